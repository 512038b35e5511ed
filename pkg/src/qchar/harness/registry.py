"""Builder vocabulary of the corpus language."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .. import builders as B
from .. import characters as C
from .. import jacobi as J
from .. import mlde as M
from ..qseries import QExp
from .grammar import ArityMismatch, Call, Neg, Node, Num, Str, pretty

# parameter kinds: int, rat, str, expr


@dataclass(frozen=True)
class Builder:
    name: str
    fn: Callable[..., Any]
    kinds: tuple[str, ...] = ()
    optional: int = 0
    variadic: bool = False  # fn receives raw groups
    returns: str = "series"
    cacheable: bool = True
    doc: str = ""


def _literal(node: Node, kind: str, name: str, call: Call):
    if kind == "expr":
        return node
    if kind == "str":
        if not isinstance(node, Str):
            raise ArityMismatch(name, "expected a string argument", call.line, call.col)
        return node.value
    sign = 1
    if isinstance(node, Neg):
        sign, node = -1, node.operand
    if not isinstance(node, Num):
        raise ArityMismatch(name, f"expected a {kind} literal", call.line, call.col)
    v = sign * node.value
    if kind == "int":
        if v.denominator != 1:
            raise ArityMismatch(name, "expected an integer", call.line, call.col)
        return int(v)
    return v


def bind(call: Call) -> list:
    """Check arity and convert literal arguments."""
    b = REGISTRY[call.name]
    if b.variadic:
        return list(call.groups)
    flat = [a for g in call.groups for a in g]
    lo, hi = len(b.kinds) - b.optional, len(b.kinds)
    if not lo <= len(flat) <= hi:
        want = str(hi) if lo == hi else f"{lo}..{hi}"
        raise ArityMismatch(call.name, f"takes {want} arguments, got {len(flat)}", call.line, call.col)
    return [_literal(a, k, call.name, call) for a, k in zip(flat, b.kinds)]


def check_calls(node: Node) -> None:
    """Static arity check of every fixed-shape call in ``node``."""
    if isinstance(node, Call):
        if node.name in REGISTRY:
            bind(node)
        for g in node.groups:
            for a in g:
                check_calls(a)
        return
    for attr in ("left", "right", "operand", "base"):
        child = getattr(node, attr, None)
        if child is not None:
            check_calls(child)


def cache_key_args(call: Call) -> str:
    return pretty(call)


REGISTRY: dict[str, Builder] = {}


def register(name: str, kinds: str = "", optional: int = 0, **kw):
    def deco(fn):
        REGISTRY[name] = Builder(name, fn, tuple(k for k in kinds.split(",") if k), optional, **kw)
        return fn
    return deco


# Evaluator-dependent builders receive (ev, prec, *args); the rest (prec, *args).

register("eta", "rat", 1)(lambda prec, m=1: B.eta(prec, m))
register("E2", "rat", 1)(lambda prec, m=1: B.E2(prec, m))
register("E4", "rat", 1)(lambda prec, m=1: B.E4(prec, m))
register("E6", "rat", 1)(lambda prec, m=1: B.E6(prec, m))
register("E22")(lambda prec: B.E22(prec))
register("E42")(lambda prec: B.E42(prec))
register("poch_inf")(lambda prec: B.euler_product(prec))
register("pentagonal")(lambda prec: B.euler_pentagonal(prec))
register("mono", "rat")(lambda prec, r: QExp.monomial(r).truncate(prec))
register("poch", "int")(lambda prec, n: B.pochhammer_finite(n).truncate(prec))
register("qplus", "int,int", 1)(lambda prec, power, start=1: B.qpoch_plus(prec, power, start))


@register("latsum", variadic=True, doc="latsum(a, b, c, d; w0, w1, ...; sign; \"range\")")
def _latsum(prec, groups, call):
    if not 1 <= len(groups) <= 4 or len(groups[0]) != 4:
        raise ArityMismatch("latsum", "needs (a, b, c, d[; weights[; sign[; range]]])", call.line, call.col)
    a, b, c, d = (_literal(x, "rat", "latsum", call) for x in groups[0])
    weight = tuple(_literal(x, "rat", "latsum", call) for x in groups[1]) if len(groups) > 1 else (1,)
    sign = _literal(groups[2][0], "int", "latsum", call) if len(groups) > 2 else 1
    rng = _literal(groups[3][0], "str", "latsum", call) if len(groups) > 3 else "all"
    return B.lattice_sum_1d(B.WeightedLatticeSum1D(weight, a, b, c, d, sign, rng), prec)


@register("latsum2", variadic=True,
          doc="latsum2(A, B, C, D, E, F; k; a1, b1, c1; ...; \"range1\", \"range2\")")
def _latsum2(prec, groups, call):
    if len(groups) < 2 or len(groups[0]) != 6 or len(groups[1]) != 1:
        raise ArityMismatch("latsum2", "needs (A..F; k; linear factors...)", call.line, call.col)
    quad = tuple(_literal(x, "rat", "latsum2", call) for x in groups[0])
    k = _literal(groups[1][0], "rat", "latsum2", call)
    factors = []
    ranges = ("all", "all")
    for g in groups[2:]:
        if all(isinstance(x, Str) for x in g):
            ranges = tuple(x.value for x in g) + ("all",) * (2 - len(g))
            continue
        if len(g) != 3:
            raise ArityMismatch("latsum2", "linear factors have three coefficients", call.line, call.col)
        factors.append(tuple(_literal(x, "rat", "latsum2", call) for x in g))

    def weight(n1, n2):
        w = k
        for a, b, c in factors:
            w *= a * n1 + b * n2 + c
        return w
    return B.lattice_sum_2d(weight, quad, prec, ranges[0], ranges[1])


# structural builders take expressions and are evaluated by the evaluator
register("thetaq", "expr", cacheable=False)(lambda ev, prec, x: ev.eval(x, prec).theta())
register("qshift", "rat,expr", cacheable=False)(
    lambda ev, prec, r, x: ev.eval(x, prec - r).qshift(r))
register("rescale", "rat,expr", cacheable=False)(
    lambda ev, prec, m, x: ev.eval(x, Fraction(prec) / m).rescale(m))
register("truncate", "rat,expr", cacheable=False)(
    lambda ev, prec, n, x: ev.eval(x, prec).truncate(min(Fraction(n), Fraction(prec))))


def _sector(s: str) -> str:
    if s not in ("ch", "sch"):
        raise ValueError("sector must be \"ch\" or \"sch\"")
    return s


register("ct_char", "int,int,str")(lambda prec, n, k, s: J.ct_character(n, k, _sector(s), prec))
register("weyl", "int,int")(lambda prec, n, s: C.weyl_oracle(n, s, prec))
register("weyl_sum", "int,int,str")(lambda prec, n, k, s: C.u_oracle(n, k, prec, _sector(s)))
register("charlabel", "str")(lambda prec, text: C.CharacterLabel.parse(text).evaluate(prec))
register("F", "int")(lambda prec, s: C.F_series(s, prec))
register("G")(lambda prec: C.G_series(prec))
register("fullsum")(lambda prec: C.full_lattice_sum(prec))
register("paired_sum")(lambda prec: C.paired_sum_series(prec))
register("paired_shift_lhs", "int")(lambda prec, m: C.paired_shift_lhs(m, prec))
register("paired_shift_rhs", "int")(lambda prec, m: C.paired_shift_rhs(m, prec))
register("chV3", "int")(lambda prec, s: C.ch_Vs_explicit_n3(s, prec))
register("double_sum", "str")(lambda prec, part: C.n3_double_sum(part, prec))
register("signed_v_sum", "int")(lambda prec, k: C.signed_v_sum(k, prec))
register("singlet_ft", "int")(lambda prec, k: C.singlet_false_theta(k, prec))
register("singlet", "int")(lambda prec, k: C.singlet_qhyp(k, prec))
register("andrews_F", "int")(lambda prec, m: C.andrews_F(m, prec))
register("andrews_coeff", "int")(lambda prec, m: C.andrews_coefficient(m, prec))
register("decomp", "int,int")(lambda prec, n, s: C.decomposition_char(n, s, prec))
register("qhyp_sl3")(lambda prec: C.qhyp_sl3_rhs(prec))
register("qhyp_sl3_lhs")(lambda prec: C.qhyp_sl3_lhs(prec))
register("vacuum", "int")(lambda prec, n: C.vacuum_char(n, prec))
register("L_eta", "int")(lambda prec, i: C.affine_sl3_level1_chars(i, prec)[0])
register("L_lattice", "int")(lambda prec, i: C.affine_sl3_level1_chars(i, prec)[1])
register("schU0")(lambda prec: C.sch_U0_closed(prec))
register("schU12")(lambda prec: C.sch_U12_closed(prec))
register("chU2")(lambda prec: C.ch_U_n2_closed(prec))
register("psl", "int")(lambda prec, n: C.psl_characters(n, prec))
register("psl_branching")(lambda prec: C.psl3_branching_sum(prec))
register("gl_ratio", "int,int")(lambda prec, n, c: C.gl_supercharacter_ratio(n, prec).series(c).truncate(prec))
register("osp")(lambda prec: C.osp_rhs(prec))


def _theta_star(part: str, expected: J.UnitPrefactor, prec):
    pref, series = J.theta_star_data(prec)[part]
    if pref != expected:
        raise J.PrefactorMismatch(f"theta* {part}: prefactor {pref}, expected {expected}")
    return series


# rational part after checking the (i, 2 pi) bookkeeping
register("thetastar_value")(lambda prec: _theta_star("value", J.UnitPrefactor(2, 1), prec))


@register("thetastar_ratio")
def _thetastar_ratio(prec):
    data = J.theta_star_data(prec + 1)
    (pv, v), (ps, s) = data["value"], data["second"]
    if ps * pv.inverse() != J.UnitPrefactor(2, 2):
        raise J.PrefactorMismatch(f"ratio prefactor {ps * pv.inverse()}, expected i^2*(2pi)^2")
    return (s * v.invert()).truncate(prec)


# operators
def _lode(form: str):
    def build(ev, prec, groups, call):
        name = f"lode_{form}"
        if len(groups) != 2 or len(groups[0]) != 1:
            raise ArityMismatch(name, "needs (order; coefficients...)", call.line, call.col)
        order = _literal(groups[0][0], "int", name, call)
        coeffs = list(groups[1])
        if len(coeffs) == order + 1:
            lead = coeffs.pop(0)
            if lead not in (Num(Fraction(0)), Num(Fraction(1))):
                raise ArityMismatch(name, "the leading entry must be 0 or 1 (the operator is monic)",
                                    call.line, call.col)
        if len(coeffs) != order:
            raise ArityMismatch(name, f"order {order} needs {order} or {order + 1} coefficients",
                                call.line, call.col)
        # listed from the top down: coefficient of D^{order-1}, ..., D^0
        out = []
        for j, node in zip(range(order - 1, -1, -1), coeffs):
            if node == Num(Fraction(0)):
                out.append(M.Coefficient.zero())
            else:
                out.append(M.Coefficient(((Fraction(1), pretty(node)),), None,
                                         (lambda p, node=node: ev.eval(node, p),)))
        return M.LODE(order, form, tuple(reversed(out)))
    return build


REGISTRY["lode_serre"] = Builder("lode_serre", _lode("serre"), variadic=True, returns="lode", cacheable=False)
REGISTRY["lode_raw"] = Builder("lode_raw", _lode("raw"), variadic=True, returns="lode", cacheable=False)
register("quintic", returns="lode", cacheable=False)(lambda prec: M.quintic_sl3())
register("eta2_mlde", returns="lode", cacheable=False)(lambda prec: M.eta2_mlde())
register("mmlde", "int", returns="lode", cacheable=False)(lambda prec, n: M.mmlde_psl(n))

NEEDS_EVALUATOR = {"thetaq", "qshift", "rescale", "truncate", "lode_serre", "lode_raw"}
NEEDS_CALL = {"latsum", "latsum2", "lode_serre", "lode_raw"}
