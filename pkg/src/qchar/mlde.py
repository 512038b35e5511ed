"""Modular linear differential equations over exact q-series."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from . import builders
from .qseries import QExp, QSeriesError, Rational, Verdict, equality_to_order, series_sum


class MLDEError(QSeriesError):
    pass


class OrderMismatch(MLDEError):
    pass


class InsufficientOrder(MLDEError):
    pass


# -- derivatives ------------------------------------------------------------

def _e2_for(f: QExp) -> QExp:
    if f.prec is None:
        raise OrderMismatch("the Serre derivative of an exact series is only known to a finite order")
    rel = f.prec - (f.valuation if not f.is_zero else f.prec)
    return builders.E2(max(rel, Fraction(0)))


def serre_derivative(f: QExp, k: int) -> QExp:
    """theta_k f = q d/dq f - (k/12) E2 f."""
    if k == 0:
        return f.theta()
    if f.prec is None and not f.is_zero:
        raise OrderMismatch("the Serre derivative of an exact series is only known to a finite order")
    return f.theta() - (_e2_for(f) * f).scale(Fraction(k, 12))


def theta_power(f: QExp, n: int, start_weight: int = 0) -> QExp:
    """theta_{w+2(n-1)} o ... o theta_w applied to f."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    for i in range(n):
        f = serre_derivative(f, start_weight + 2 * i)
    return f


def raw_power(f: QExp, n: int) -> QExp:
    for _ in range(n):
        f = f.theta()
    return f


# -- coefficients -----------------------------------------------------------

GENERATORS: dict[str, tuple[int, Callable[[Fraction], QExp]]] = {
    "E2": (2, builders.E2),
    "E4": (4, builders.E4),
    "E6": (6, builders.E6),
    "E22": (2, builders.E22),
    "E42": (4, builders.E42),
}


@dataclass(frozen=True)
class Monomial:
    """Product of named generators, e.g. (("E4", 1), ("E6", 1))."""

    powers: tuple[tuple[str, int], ...]

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        powers: dict[str, int] = {}
        for part in text.split("*"):
            name, _, exp = part.strip().partition("^")
            if name not in GENERATORS:
                raise ValueError(f"unknown generator {name!r}")
            powers[name] = powers.get(name, 0) + (int(exp) if exp else 1)
        return cls(tuple(sorted(powers.items())))

    @property
    def weight(self) -> int:
        return sum(GENERATORS[g][0] * e for g, e in self.powers)

    def series(self, prec: Rational) -> QExp:
        out = QExp.constant(1)
        for g, e in self.powers:
            out = out * GENERATORS[g][1](prec) ** e
        return out.truncate(prec)

    def __str__(self) -> str:
        return "*".join(g if e == 1 else f"{g}^{e}" for g, e in self.powers) or "1"


def monomials_of_weight(generators: Sequence[str], weight: int) -> list[Monomial]:
    """All products of the generators with total weight ``weight``."""
    gens = sorted(set(generators), key=lambda g: (GENERATORS[g][0], g))
    out = []

    def rec(i: int, left: int, acc: list[tuple[str, int]]):
        if left == 0:
            out.append(Monomial(tuple(sorted(acc))))
            return
        if i == len(gens):
            return
        w = GENERATORS[gens[i]][0]
        for e in range(left // w, -1, -1):
            rec(i + 1, left - e * w, acc + ([(gens[i], e)] if e else []))

    if weight > 0:
        rec(0, weight, [])
    return out


@dataclass(frozen=True)
class CoefficientBasis:
    """Weight-graded monomials in the chosen generators."""

    generators: tuple[str, ...]
    extra: tuple[tuple[str, int, QExp], ...] = ()

    @classmethod
    def of(cls, names: Sequence[str] | str) -> "CoefficientBasis":
        if isinstance(names, str):
            names = [n for n in names.split(",") if n.strip()]
        names = tuple(n.strip() for n in names)
        for n in names:
            if n not in GENERATORS:
                raise ValueError(f"unknown generator {n!r}")
        return cls(names)

    def elements(self, weight: int) -> list[tuple[str, Callable[[Fraction], QExp]]]:
        out = [(str(m), m.series) for m in monomials_of_weight(self.generators, weight)]
        for name, w, series in self.extra:
            if w == weight:
                out.append((name, lambda prec, s=series: s.truncate(prec)))
        return out


@dataclass(frozen=True)
class Coefficient:
    """A rational combination of named series of a fixed weight."""

    terms: tuple[tuple[Fraction, str], ...]
    weight: int | None
    builders: tuple[Callable[[Fraction], QExp], ...] = field(compare=False, repr=False, default=())

    @classmethod
    def zero(cls, weight: int | None = None) -> "Coefficient":
        return cls((), weight, ())

    @classmethod
    def named(cls, text: str, c: Rational = 1) -> "Coefficient":
        m = Monomial.parse(text)
        return cls(((Fraction(c), str(m)),), m.weight, (m.series,))

    @classmethod
    def from_series(cls, text: str, series: QExp, weight: int | None = None) -> "Coefficient":
        return cls(((Fraction(1), text),), weight, (lambda prec: series.truncate(prec),))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c, _ in self.terms)

    def series(self, prec: Rational) -> QExp:
        prec = Fraction(prec)
        parts = [b(prec).scale(c) for (c, _), b in zip(self.terms, self.builders) if c]
        return series_sum(parts, prec) if parts else QExp.zero(prec)

    def constant_term(self) -> Fraction:
        return self.series(1).coefficient(0)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- operators --------------------------------------------------------------

@dataclass(frozen=True)
class LODE:
    """Monic operator D^order + sum_j c_j D^j, D = theta (serre) or q d/dq (raw).

    ``coefficients[j]`` multiplies D^j, for j = 0 .. order-1.
    """

    order: int
    form: str
    coefficients: tuple[Coefficient, ...]
    input_weight: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if self.form not in ("serre", "raw"):
            raise ValueError("form must be 'serre' or 'raw'")
        if len(self.coefficients) != self.order:
            raise ValueError("need one coefficient per derivative order below the top")
        if self.form == "serre":
            for j, c in enumerate(self.coefficients):
                if c.weight is not None and not c.is_zero and c.weight != 2 * (self.order - j):
                    raise ValueError(f"coefficient of theta^{j} must have weight {2 * (self.order - j)}")

    def derivative(self, f: QExp, j: int) -> QExp:
        if self.form == "serre":
            return theta_power(f, j, self.input_weight)
        return raw_power(f, j)

    def apply(self, f: QExp) -> QExp:
        if f.prec is None:
            raise OrderMismatch("operator application needs a truncated input")
        rel = f.prec - (f.valuation if not f.is_zero else f.prec)
        out = self.derivative(f, self.order)
        for j, c in enumerate(self.coefficients):
            if c.is_zero:
                continue
            out = out + c.series(rel) * self.derivative(f, j)
        return out

    def indicial_polynomial(self):
        import sympy

        a = sympy.Symbol("a")

        def falling(j: int):
            out = sympy.Integer(1)
            for i in range(j):
                if self.form == "serre":
                    out *= a - sympy.Rational(self.input_weight + 2 * i, 12)
                else:
                    out *= a
            return out

        poly = falling(self.order)
        for j, c in enumerate(self.coefficients):
            if not c.is_zero:
                c0 = c.constant_term()
                poly += sympy.Rational(c0.numerator, c0.denominator) * falling(j)
        return sympy.Poly(sympy.expand(poly), a)

    def text(self) -> str:
        sym = "theta" if self.form == "serre" else "D"

        def dpow(j: int) -> str:
            return "" if j == 0 else (sym if j == 1 else f"{sym}^{j}")

        out = [dpow(self.order)]
        for j in range(self.order - 1, -1, -1):
            for c, name in self.coefficients[j].terms:
                if c == 0:
                    continue
                mag = abs(c)
                pieces = [] if mag == 1 and name != "1" else [_fmt_rational(mag)]
                if name != "1":
                    pieces.append(name)
                elif mag == 1:
                    pieces.append("1")
                if j:
                    pieces.append(dpow(j))
                out.append(("- " if c < 0 else "+ ") + "*".join(pieces))
        return " ".join(out)

    __str__ = text


def lode_from_terms(order: int, form: str, terms: dict[int, dict[str, Rational]],
                    input_weight: int = 0) -> LODE:
    """Build an operator from {j: {monomial text: coefficient}}."""
    coeffs = []
    for j in range(order):
        entries = terms.get(j, {})
        ts, bs, weight = [], [], None
        for name, c in entries.items():
            m = Monomial.parse(name)
            ts.append((Fraction(c), str(m)))
            bs.append(m.series)
            weight = m.weight
        coeffs.append(Coefficient(tuple(ts), weight if ts else 2 * (order - j), tuple(bs)))
    return LODE(order, form, tuple(coeffs), input_weight)


def apply_lode(L: LODE, f: QExp) -> QExp:
    return L.apply(f)


def verify_lode(L: LODE, f: QExp, N: Rational) -> Verdict:
    N = Fraction(N)
    if f.prec is not None and f.prec < N:
        raise OrderMismatch(f"input known below q^{f.prec}, asked for q^{N}")
    residual = L.apply(f)
    return equality_to_order(residual, QExp.zero(), N)


# named operators

def eta2_mlde() -> LODE:
    """theta^2 + E4/144: annihilates eta^2."""
    return lode_from_terms(2, "serre", {0: {"E4": Fraction(1, 144)}})


def quintic_sl3() -> LODE:
    """theta^5 - 7/36 E4 theta^3 + 19/216 E6 theta^2 - 5/324 E4^2 theta + 5/1944 E4 E6."""
    return lode_from_terms(5, "serre", {
        3: {"E4": Fraction(-7, 36)},
        2: {"E6": Fraction(19, 216)},
        1: {"E4^2": Fraction(-5, 324)},
        0: {"E4*E6": Fraction(5, 1944)},
    })


def mmlde_psl(n: int) -> LODE:
    """(q d/dq)^2 - E2/6 q d/dq + (-(6n^2-5)/720 E4 + n^2/120 E42)."""
    return lode_from_terms(2, "raw", {
        1: {"E2": Fraction(-1, 6)},
        0: {"E4": Fraction(-(6 * n * n - 5), 720), "E42": Fraction(n * n, 120)},
    })


# -- exact linear algebra ---------------------------------------------------

def _bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form; returns (rows, pivot columns)."""
    m = [r[:] for r in rows]
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, len(m)):
            mi = m[i]
            mr = m[r]
            a, b = mr[c], mi[c]
            m[i] = [(a * mi[j] - b * mr[j]) // prev for j in range(len(mi))]
        prev = m[r][c]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> tuple[str, list[Fraction] | int]:
    """Solve A x = b over Q.

    Returns ("unique", x), ("inconsistent", 0) or ("ambiguous", nullity).
    """
    ncols = len(A[0]) if A else 0
    rows = []
    for row, rhs in zip(A, b):
        full = list(row) + [rhs]
        d = lcm(*(Fraction(x).denominator for x in full))
        rows.append([int(Fraction(x) * d) for x in full])
    ech, pivots = _bareiss_echelon(rows, ncols + 1)
    if ncols in pivots:
        return "inconsistent", 0
    if len(pivots) < ncols:
        return "ambiguous", ncols - len(pivots)
    x = [Fraction(0)] * ncols
    for r in range(ncols - 1, -1, -1):
        row = ech[r]
        s = Fraction(row[ncols]) - sum(Fraction(row[j]) * x[j] for j in range(r + 1, ncols))
        x[r] = s / row[r]
    return "unique", x


@dataclass(frozen=True)
class NotFound:
    kind: str  # "inconsistent" or "ambiguous"
    dimension: int = 0

    def describe(self) -> str:
        if self.kind == "ambiguous":
            return f"Ambiguous: solution space of dimension {self.dimension}"
        return "NotFound: no operator of this shape"


def find_lode(f: QExp, order: int, basis: CoefficientBasis, form: str = "serre",
              N: Rational | None = None, surplus: int = 10, input_weight: int = 0) -> LODE | NotFound:
    """Search for a monic operator of the given order annihilating f below q^N.

    Slot j gets every basis monomial of weight 2(order - j); in raw form the
    weight-2 slots also get E2.
    """
    if f.is_zero:
        raise ValueError("cannot search for an operator killing zero")
    N = Fraction(N) if N is not None else f.prec
    if N is None or (f.prec is not None and f.prec < N):
        raise OrderMismatch("input series not known to the requested order")
    f = f.truncate(N)
    rel = N - f.valuation
    unknowns: list[tuple[int, str, Callable]] = []
    for j in range(order):
        w = 2 * (order - j)
        elems = basis.elements(w)
        if form == "raw" and w == 2 and "E2" not in basis.generators:
            elems = [("E2", GENERATORS["E2"][1])] + elems
        for name, build in elems:
            unknowns.append((j, name, build))
    L0 = LODE(order, form, tuple(Coefficient.zero() for _ in range(order)), input_weight)
    target = L0.derivative(f, order)
    derivs = [L0.derivative(f, j) for j in range(order)]
    columns = [build(rel) * derivs[j] for j, _, build in unknowns]
    step = f.step
    exps = []
    e = f.valuation
    while e < N:
        exps.append(e)
        e += Fraction(1, step)
    if len(exps) < len(unknowns) + surplus:
        raise InsufficientOrder(f"{len(exps)} equations for {len(unknowns)} unknowns; need a surplus of {surplus}")
    A = [[col.coefficient(x) for col in columns] for x in exps]
    b = [-target.coefficient(x) for x in exps]
    if not unknowns:
        return L0 if all(v == 0 for v in b) else NotFound("inconsistent")
    kind, sol = solve_exact(A, b)
    if kind != "unique":
        return NotFound(kind, sol if kind == "ambiguous" else 0)
    terms: dict[int, dict[str, Fraction]] = {}
    for (j, name, _), x in zip(unknowns, sol):
        if x:
            terms.setdefault(j, {})[name] = x
    coeffs = []
    for j in range(order):
        ts, bs = [], []
        for (jj, name, build), x in zip(unknowns, sol):
            if jj == j and x:
                ts.append((x, name))
                bs.append(build)
        coeffs.append(Coefficient(tuple(ts), 2 * (order - j), tuple(bs)))
    return LODE(order, form, tuple(coeffs), input_weight)


# -- indicial analysis ------------------------------------------------------

def indicial_roots(L: LODE) -> list[Fraction]:
    """Rational roots of the indicial polynomial, repeated by multiplicity, ascending."""
    import sympy

    poly = L.indicial_polynomial()
    out = []
    for r, mult in sympy.roots(poly, filter="Q").items():
        out.extend([Fraction(int(r.p), int(r.q))] * mult)
    return sorted(out)


@dataclass(frozen=True)
class Obstructed:
    level: int

    def describe(self) -> str:
        return f"Obstructed at level {self.level}"


def frobenius_solution(L: LODE, a: Rational, N: Rational) -> QExp | Obstructed:
    """q^a (1 + sum_{k>=1} c_k q^k) solving L y = 0 below q^N.

    A resonance with a nonzero right side returns Obstructed(k); a
    resonance that is already satisfied keeps c_k = 0.
    """
    import sympy

    a = Fraction(a)
    N = Fraction(N)
    poly = L.indicial_polynomial()
    sym = poly.gens[0]

    def P(x: Fraction) -> Fraction:
        v = poly.eval(sympy.Rational(x.numerator, x.denominator))
        return Fraction(int(v.p), int(v.q))

    if P(a) != 0:
        raise ValueError(f"{a} is not an indicial root")
    levels = max(0, -(-(N - a).numerator // (N - a).denominator))
    coeffs = [Fraction(1)]
    residual = L.apply(QExp.monomial(a, 1).truncate(N)).truncate(N)
    for k in range(1, levels):
        r = residual.coefficient(a + k)
        pk = P(a + k)
        if pk == 0:
            if r != 0:
                return Obstructed(k)
            coeffs.append(Fraction(0))
            continue
        c = -r / pk
        coeffs.append(c)
        if c:
            residual = residual + L.apply(QExp.monomial(a + k, c).truncate(N)).truncate(N)
    return QExp.from_coefficients(coeffs, a, 1, N)


__all__ = [
    "serre_derivative",
    "theta_power",
    "raw_power",
    "Monomial",
    "monomials_of_weight",
    "CoefficientBasis",
    "Coefficient",
    "LODE",
    "lode_from_terms",
    "apply_lode",
    "verify_lode",
    "eta2_mlde",
    "quintic_sl3",
    "mmlde_psl",
    "solve_exact",
    "NotFound",
    "find_lode",
    "indicial_roots",
    "Obstructed",
    "frobenius_solution",
    "OrderMismatch",
    "InsufficientOrder",
]
