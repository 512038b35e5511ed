"""Line-oriented identity corpus language.

    check ID : expr == expr [@ N]
    check ID : expr == 0 [@ N]
    check ID : lode annihilates expr [@ N]

Expressions are applicative terms over the builder vocabulary with
+ - * / and integer powers; rationals are written p/q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


class CorpusError(Exception):
    pass


class ParseError(CorpusError, SyntaxError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = f"line {line}, col {col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnknownBuilder(CorpusError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: unknown builder {name!r}")


class ArityMismatch(CorpusError):
    def __init__(self, name: str, detail: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {name}: {detail}")


# -- syntax tree ------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Call:
    name: str
    groups: tuple[tuple["Node", ...], ...]
    line: int = 0
    col: int = 0

    def __eq__(self, other):
        return isinstance(other, Call) and (self.name, self.groups) == (other.name, other.groups)

    def __hash__(self):
        return hash((self.name, self.groups))


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


Node = Num | Str | Call | BinOp | Neg | Pow


@dataclass(frozen=True)
class Case:
    id: str
    kind: str  # equal, zero, annihilates
    lhs: Node
    rhs: Node | None
    order: int | None
    line: int = 0


# -- tokens -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<rational>\d+/\d+)
  | (?P<int>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)
  | (?P<op>==|[-+*/^(),;:@])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize_line(text: str, line: int) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos] == "#":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(line, pos + 1, "a token", text[pos])
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            # names may contain '-' and '.', but only for ids; an operator
            # minus directly after a name is split off by the parser
            out.append(Token(kind, tok, line, pos + 1))
        pos = m.end()
    out.append(Token("eol", "", line, len(text) + 1))
    return out


def _split_name(tok: Token) -> list[Token]:
    """Split 'a-b' style name tokens back into name/op pieces inside expressions."""
    if tok.kind != "name" or ("-" not in tok.text and "." not in tok.text):
        return [tok]
    out = []
    col = tok.col
    for piece in re.split(r"([-.])", tok.text):
        if not piece:
            continue
        kind = "op" if piece == "-" else ("bad" if piece == "." else ("int" if piece.isdigit() else "name"))
        out.append(Token(kind, piece, tok.line, col))
        col += len(piece)
    return out


class _Parser:
    def __init__(self, tokens: list[Token], known: Iterable[str] | None):
        self.toks = tokens
        self.i = 0
        self.known = set(known) if known is not None else None

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected: str):
        t = self.cur
        raise ParseError(t.line, t.col, expected, t.text or "end of line")

    def eat(self, kind: str, text: str | None = None) -> Token:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            self.fail(repr(text) if text else kind)
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    # expr := term (('+'|'-') term)*
    def expr(self) -> Node:
        node = self.term()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.eat("op").text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at("op", "*") or self.at("op", "/"):
            op = self.eat("op").text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.at("op", "-"):
            self.eat("op")
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.at("op", "^"):
            self.eat("op")
            sign = 1
            if self.at("op", "-"):
                self.eat("op")
                sign = -1
            t = self.eat("int")
            return Pow(base, sign * int(t.text))
        return base

    def atom(self) -> Node:
        t = self.cur
        if t.kind == "int":
            self.i += 1
            return Num(Fraction(int(t.text)))
        if t.kind == "rational":
            self.i += 1
            p, q = t.text.split("/")
            if int(q) == 0:
                raise ParseError(t.line, t.col, "a nonzero denominator", t.text)
            return Num(Fraction(int(p), int(q)))
        if t.kind == "string":
            self.i += 1
            return Str(t.text[1:-1])
        if t.kind == "name":
            self.i += 1
            if self.known is not None and t.text not in self.known:
                raise UnknownBuilder(t.text, t.line, t.col)
            groups: list[tuple[Node, ...]] = []
            if self.at("op", "("):
                self.eat("op")
                if not self.at("op", ")"):
                    groups.append(self.group())
                    while self.at("op", ";"):
                        self.eat("op")
                        groups.append(self.group())
                self.eat("op", ")")
            return Call(t.text, tuple(groups), t.line, t.col)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self.eat("op", ")")
            return node
        self.fail("an expression")

    def group(self) -> tuple[Node, ...]:
        items = [self.expr()]
        while self.at("op", ","):
            self.eat("op")
            items.append(self.expr())
        return tuple(items)


def _expr_tokens(tokens: list[Token]) -> list[Token]:
    out = []
    for t in tokens:
        out.extend(_split_name(t))
    for t in out:
        if t.kind == "bad":
            raise ParseError(t.line, t.col, "an expression", t.text)
    return out


def _check_arity(*nodes: Node) -> None:
    from .registry import check_calls

    for n in nodes:
        check_calls(n)


def parse_expr(text: str, known: Iterable[str] | None = None, line: int = 1) -> Node:
    p = _Parser(_expr_tokens(tokenize_line(text, line)), known)
    node = p.expr()
    if not p.at("eol"):
        p.fail("end of expression")
    _check_arity(node)
    return node


def parse_case_line(text: str, line: int, known: Iterable[str] | None = None) -> Case:
    toks = tokenize_line(text, line)
    if not toks or toks[0].kind != "name" or toks[0].text != "check":
        raise ParseError(line, toks[0].col if toks else 1, "'check'", toks[0].text if toks else "")
    if toks[1].kind not in ("name", "int"):
        raise ParseError(line, toks[1].col, "a case id", toks[1].text)
    case_id = toks[1].text
    p = _Parser(_expr_tokens(toks[2:]), known)
    p.eat("op", ":")
    lhs = p.expr()
    if p.at("op", "=="):
        p.eat("op")
        rhs = p.expr()
        kind = "zero" if rhs == Num(Fraction(0)) else "equal"
    elif p.at("name", "annihilates"):
        p.eat("name")
        rhs = p.expr()
        kind = "annihilates"
    else:
        p.fail("'==' or 'annihilates'")
    order = None
    if p.at("op", "@"):
        p.eat("op")
        order = int(p.eat("int").text)
        if order < 1:
            raise ParseError(line, p.toks[p.i - 1].col, "an order >= 1", str(order))
    if not p.at("eol"):
        p.fail("end of line")
    return Case(case_id, kind, lhs, rhs, order, line)


def parse_corpus(text: str, known: Iterable[str] | None = None) -> list[Case]:
    """Parse a whole corpus; ``known`` restricts builder names."""
    if known is None:
        from .registry import REGISTRY
        known = REGISTRY.keys()
    known = set(known) | {"annihilates"}
    cases = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        case = parse_case_line(raw, lineno, known)
        _check_arity(case.lhs, case.rhs)
        if case.id in seen:
            raise ParseError(lineno, 1, "a unique case id", case.id)
        seen.add(case.id)
        cases.append(case)
    return cases


# -- printing ---------------------------------------------------------------

_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2}


def _num_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _level(node: Node) -> int:
    if isinstance(node, BinOp):
        return _LEVEL[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Num) and node.value.denominator != 1:
        # p/q binds like a product when it is the base of a power
        return 4
    return 5


def pretty(node: Node) -> str:
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Str):
        return f'"{node.value}"'
    if isinstance(node, Call):
        if not node.groups:
            return node.name
        inner = "; ".join(", ".join(pretty(a) for a in g) for g in node.groups)
        return f"{node.name}({inner})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, 5)}^{node.exponent}"
    if isinstance(node, BinOp):
        lvl = _LEVEL[node.op]
        left = _wrap(node.left, lvl)
        right = _wrap(node.right, lvl + 1)
        sep = f" {node.op} " if node.op in "+-/" else node.op
        return f"{left}{sep}{right}"
    raise TypeError(node)


def _wrap(node: Node, need: int) -> str:
    text = pretty(node)
    return text if _level(node) >= need else f"({text})"


def pretty_case(case: Case) -> str:
    if case.kind == "annihilates":
        mid = f"{pretty(case.lhs)} annihilates {pretty(case.rhs)}"
    else:
        mid = f"{pretty(case.lhs)} == {pretty(case.rhs)}"
    tail = f" @ {case.order}" if case.order is not None else ""
    return f"check {case.id} : {mid}{tail}"


def pretty_corpus(cases: Iterable[Case]) -> str:
    return "".join(pretty_case(c) + "\n" for c in cases)
