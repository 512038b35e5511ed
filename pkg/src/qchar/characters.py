"""Characters and supercharacters of V_{-1}(sl(n))-modules and related algebras.

The brute-force oracle :func:`weyl_oracle` expands the free-field product
directly and is independent of every closed formula below.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import kernels
from .builders import (
    E2,
    E22,
    E4,
    euler_product,
    eta_power,
    lattice_sum_2d,
    pochhammer_finite,
    qpoch_plus,
)
from .jacobi import ct_character, hw_weight
from .qseries import QExp, QSeriesError, Rational, Verdict, equality_to_order, series_sum


class CharacterError(QSeriesError):
    pass


class WindowOverflow(CharacterError):
    pass


class NonTerminating(CharacterError):
    pass


class UnsupportedRank(CharacterError):
    pass


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


WINDOW_BUDGET = 4_000_000


# -- bivariate series -------------------------------------------------------

class BivariateSeries:
    """Laurent polynomials in zeta for each power of t = q**(1/step) below ``depth``.

    The series starts as 1.  Every factor must give each unit of zeta-charge
    a positive t-degree, so charges at t-degree d satisfy |c| <= d and the
    window [-depth, depth] is exact.
    """

    def __init__(self, depth: int, step: int = 1):
        self.depth = depth
        self.step = step
        self.window = max(depth - 1, 0)
        self.width = 2 * self.window + 1
        if self.width * depth > WINDOW_BUDGET:
            raise WindowOverflow(f"window {self.width} x {depth} exceeds budget")
        self.grid = [0] * (self.width * depth)
        if depth:
            self.grid[self.window * depth] = 1

    def geometric(self, sigma: int, e: int, reps: int = 1) -> "BivariateSeries":
        """Multiply by (1 - zeta**sigma t**e)**(-reps)."""
        if e < 1:
            raise WindowOverflow("charged factor with nonpositive q-weight")
        if e < self.depth and self.width > 1:
            self.grid = kernels.geometric_update(self.grid, self.width, self.depth, sigma, e, reps)
        return self

    def binomial(self, sigma: int, e: int, reps: int = 1, sign: int = 1) -> "BivariateSeries":
        """Multiply by (1 + sign * zeta**sigma t**e)**reps."""
        if e < 1:
            raise WindowOverflow("charged factor with nonpositive q-weight")
        if sigma == 0:
            raise ValueError("sigma must be nonzero")
        g, w, d = self.grid, self.width, self.depth
        if e >= d:
            return self
        for _ in range(reps):
            # read rows before they are overwritten: opposite order to geometric_update
            rows = range(w - 1, sigma - 1, -1) if sigma > 0 else range(0, w + sigma)
            for j in rows:
                src = (j - sigma) * d
                dst = j * d
                for t in range(d - 1, e - 1, -1):
                    v = g[src + t - e]
                    if v:
                        g[dst + t] += sign * v
        return self

    def row(self, charge: int) -> list[int]:
        j = charge + self.window
        if not 0 <= j < self.width:
            return [0] * self.depth
        return self.grid[j * self.depth:(j + 1) * self.depth]

    def series(self, charge: int) -> QExp:
        """Coefficient of zeta**charge as a q-series known below q**(depth/step)."""
        return QExp.from_coefficients(self.row(charge), 0, self.step, Fraction(self.depth, self.step))


# -- Weyl dimension ---------------------------------------------------------

def weyl_dimension(n: int, weights: list[int]) -> int:
    """dim L(sum a_i omega_i) for sl(n), ``weights`` = (a_1, ..., a_{n-1})."""
    if len(weights) != n - 1:
        raise ValueError("need n-1 Dynkin labels")
    num = Fraction(1)
    for i in range(n - 1):
        for j in range(i + 1, n):
            num *= Fraction(sum(weights[i:j]) + (j - i), j - i)
    return int(num)


def v_lowest_dimension(n: int, s: int) -> int:
    """Weyl dimension of the top space of V_s: L(s omega_1), or L(|s| omega_{n-1}) for s < 0."""
    w = [0] * (n - 1)
    if s >= 0:
        w[0] = s
    else:
        w[-1] = -s
    return weyl_dimension(n, w)


def u_lowest(n: int, k: int) -> tuple[Fraction, int]:
    """Lowest conformal weight of U_k and its multiplicity."""
    best = None
    total = 0
    for s in range(-2 * n, 2 * n + 1):
        if (s - k) % n:
            continue
        h = hw_weight(n, s)
        if best is None or h < best:
            best, total = h, v_lowest_dimension(n, s)
        elif h == best:
            total += v_lowest_dimension(n, s)
    return best, total


# -- brute-force oracle -----------------------------------------------------

@lru_cache(maxsize=32)
def _weyl_grid(n: int, depth: int) -> tuple[int, ...]:
    b = BivariateSeries(depth, step=2)
    for m in range(1, depth // 2 + 2):
        e = 2 * m - 1
        if e >= depth:
            break
        b.geometric(1, e, n)
        b.geometric(-1, e, n)
    return tuple(b.grid), b.window


def weyl_oracle(n: int, s: int, prec: Rational) -> QExp:
    """ch[V_s] from (q;q)_inf [zeta^s] prod ((1 - zeta q^{m-1/2})(1 - zeta^-1 q^{m-1/2}))^{-n}."""
    if n < 2:
        raise ValueError("n must be at least 2")
    prec = Fraction(prec)
    shift = hw_weight(n, s) + Fraction(n + 1, 24)
    rel = prec - shift
    if rel <= 0:
        return QExp.zero(prec)
    # row s starts at t-degree |s|; need relative t-depth 2*rel beyond it
    depth = _ceil(2 * rel) + abs(s)
    grid, window = _weyl_grid(n, depth)
    j = s + window
    row = list(grid[j * depth:(j + 1) * depth])
    r = QExp.from_coefficients(row, 0, 2, Fraction(depth, 2))
    r = r * euler_product(Fraction(depth, 2))
    if r.is_zero:
        raise CharacterError("oracle row vanished")
    return r.qshift(shift - r.valuation).truncate(prec)


def u_oracle(n: int, k: int, prec: Rational, sector: str = "ch") -> QExp:
    """sum_s (+-1)^{ns+k} ch[V_{ns+k}] assembled from the oracle."""
    prec = Fraction(prec)
    parts = []
    s = 0
    while True:
        added = False
        for t in {k + n * s, k - n * (s + 1)} if s >= 0 else ():
            if hw_weight(n, t) + Fraction(n + 1, 24) < prec:
                c = weyl_oracle(n, t, prec)
                parts.append(-c if sector == "sch" and t % 2 else c)
                added = True
        if not added:
            break
        s += 1
    return series_sum(parts, prec) if parts else QExp.zero(prec)


# -- explicit n = 3 formulas ------------------------------------------------

def _fs_weight(s: int):
    hs = Fraction(s, 2)

    def w(n1: int, n2: int) -> Fraction:
        return 4 * (2 * n1 - n2 + hs + Fraction(1, 2)) * (2 * n2 - n1 + Fraction(1, 2)) * (n1 + n2 + hs + 1)
    return w


def F_series(s: int, prec: Rational, n1_range: str = "nonneg") -> QExp:
    """4 sum (2n1 - n2 + s/2 + 1/2)(2n2 - n1 + 1/2)(n1 + n2 + s/2 + 1) q^{2n1^2+2n2^2-2n1n2+(s+1)n1+n2}."""
    return lattice_sum_2d(_fs_weight(s), (2, -2, 2, s + 1, 1, 0), prec, n1_range, "all")


def G_series(prec: Rational) -> QExp:
    return F_series(0, prec, "nonpos")


def full_lattice_sum(prec: Rational) -> QExp:
    return F_series(0, prec, "all").scale(Fraction(1, 4))


def full_lattice_vanishing_check(prec: Rational) -> Verdict:
    return equality_to_order(full_lattice_sum(prec), QExp.zero(prec), prec)


def ch_Vs_explicit_n3(s: int, prec: Rational) -> QExp:
    if s < 0:
        raise ValueError("s must be nonnegative")
    prec = Fraction(prec)
    shift = hw_weight(3, s) + Fraction(1, 6)
    rel = prec - shift
    f = F_series(s, rel)
    return (f * euler_product(rel).power(-8)).qshift(shift)


def g_shift_check(prec: Rational) -> Verdict:
    prec = Fraction(prec)
    return equality_to_order(G_series(prec), F_series(3, prec - 3).qshift(3), prec)


def paired_sum_series(prec: Rational) -> QExp:
    """4 sum_{n in Z} (2n + 1/2)(-n + 1/2)(n + 1) q^{2n^2 + n}."""
    return paired_shift_rhs(0, prec)


def paired_sum_check(prec: Rational) -> Verdict:
    prec = Fraction(prec)
    lhs = F_series(0, prec) + F_series(3, prec - 3).qshift(3)
    return equality_to_order(lhs, paired_sum_series(prec), prec)


def paired_shift_lhs(m: int, prec: Rational) -> QExp:
    prec = Fraction(prec)
    a = Fraction(3 * m * m + 3 * m, 2)
    b = Fraction(3 * (m + 1) ** 2 + 3 * (m + 1), 2)
    return F_series(3 * m, prec - a).qshift(a) + F_series(3 * m + 3, prec - b).qshift(b)


def paired_shift_rhs(m: int, prec: Rational, uncorrected: bool = False) -> QExp:
    """4 sum (2n + 1/2)(-n + 3m/2 + 1/2)(n + 3m/2 + c) q^{2n^2 + n + 3m^2/2 + 3m/2}.

    ``c`` is 1; ``uncorrected=True`` uses c = 0, which fails already at m = 0.
    """
    prec = Fraction(prec)
    h = Fraction(3 * m, 2)
    c = 0 if uncorrected else 1
    terms = {}
    n = 0
    while True:
        done = True
        for t in {n, -n}:
            e = 2 * t * t + t + Fraction(3 * m * m + 3 * m, 2)
            if e < prec:
                done = False
                w = 4 * (2 * t + Fraction(1, 2)) * (-t + h + Fraction(1, 2)) * (t + h + c)
                terms[e] = terms.get(e, 0) + w
        if done:
            break
        n += 1
    return QExp.from_terms(terms, prec)


def paired_shift_check(m: int, prec: Rational, uncorrected: bool = False) -> Verdict:
    return equality_to_order(paired_shift_lhs(m, prec), paired_shift_rhs(m, prec, uncorrected), prec)


def _n3_double_sum(prec: Fraction, weight, m_shift: Fraction) -> QExp:
    # 2(n + 1/4)^2 + 3/2 (m + m_shift)^2
    quad = (2, 0, Fraction(3, 2), 1, 3 * m_shift, Fraction(1, 8) + Fraction(3, 2) * m_shift ** 2)
    return lattice_sum_2d(weight, quad, prec)


DOUBLE_SUM_PARTS = ("ch-u0", "ch-u1", "sch-u0", "sch-u1-unshifted", "sch-u1")


def n3_double_sum(part: str, prec: Rational) -> QExp:
    """Double-sum formulas for n = 3 (super)characters, divided by the eta power."""
    prec = Fraction(prec)
    half = Fraction(1, 2)
    rel = prec + Fraction(1, 3)
    if part == "ch-u0":
        w = lambda n, m: 2 * (2 * n + half) * (-n + Fraction(3 * m, 2) + half) * (n + Fraction(3 * m, 2) + 1)
        sh = half
    elif part == "ch-u1":
        w = lambda n, m: 2 * (2 * n + half) * (-n + Fraction(3 * m, 2) + 1) * (n + Fraction(3 * m, 2) + Fraction(3, 2))
        sh = Fraction(5, 6)
    elif part == "sch-u0":
        w = lambda n, m: 4 * (2 * n + half) ** 2 * (-n + Fraction(3 * m, 2) + half) * (n + Fraction(3 * m, 2) + 1)
        sh = half
    elif part == "sch-u1-unshifted":
        w = lambda n, m: 4 * (2 * n + half) ** 2 * (-n + Fraction(3 * m, 2) + half) * (n + Fraction(3 * m, 2) + 1)
        sh = Fraction(5, 6)
    elif part == "sch-u1":
        # ch-u1 linear factors with the squared first factor; reproduces sch[U_1]
        w = lambda n, m: 4 * (2 * n + half) ** 2 * (-n + Fraction(3 * m, 2) + 1) * (n + Fraction(3 * m, 2) + Fraction(3, 2))
        sh = Fraction(5, 6)
    else:
        raise ValueError(f"part must be one of {DOUBLE_SUM_PARTS}")
    num = _n3_double_sum(rel, w, sh)
    return (num * eta_power(-8, rel - (num.valuation if not num.is_zero else 0))).truncate(prec) \
        if not num.is_zero else QExp.zero(prec)


def signed_v_sum(k: int, prec: Rational) -> QExp:
    """Signed sums of Weyl characters proposed for sch[U_1] (k = 1) and sch[U_2] (k = 2), n = 3.

    U_1: -ch[V_1] + sum_{i>=1} (-1)^{i-1} (ch[V_{3i+1}] + ch[V_{-3i+1}])
    U_2:  ch[V_2] + sum_{i>=1} (-1)^{i-1} (ch[V_{3i+2}] + ch[V_{-3i+2}])
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    prec = Fraction(prec)
    first = weyl_oracle(3, k, prec)
    parts = [-first if k == 1 else first]
    i = 1
    while min(hw_weight(3, 3 * i + k), hw_weight(3, -3 * i + k)) + Fraction(1, 6) < prec:
        sign = 1 if i % 2 else -1
        for t in (3 * i + k, -3 * i + k):
            parts.append(weyl_oracle(3, t, prec).scale(sign))
        i += 1
    return series_sum(parts, prec)


# -- singlet and decomposition ----------------------------------------------

def singlet_false_theta(k: int, prec: Rational) -> QExp:
    """q^{k/2} sum_{n>=0} (q^{2n^2+n(2k+1)} - q^{2n^2+n(2k+3)+k+1}) / (q;q)_inf."""
    prec = Fraction(prec)
    terms = {}
    n = 0
    lo = Fraction(k, 2)
    while True:
        e1 = lo + 2 * n * n + n * (2 * k + 1)
        e2 = lo + 2 * n * n + n * (2 * k + 3) + k + 1
        if min(e1, e2) >= prec and n > abs(k) + 1:
            break
        if e1 < prec:
            terms[e1] = terms.get(e1, 0) + 1
        if e2 < prec:
            terms[e2] = terms.get(e2, 0) - 1
        n += 1
    num = QExp.from_terms(terms, prec)
    if num.is_zero:
        return num
    return num * euler_product(prec - num.valuation).invert()


def singlet_qhyp(k: int, prec: Rational) -> QExp:
    """sum_{n>=0} q^{n^2 + n(|k|+1) + |k|/2} / ((q;q)_n (q;q)_{n+|k|})."""
    prec = Fraction(prec)
    a = abs(k)
    parts = []
    n = 0
    while True:
        e = Fraction(n * n + n * (a + 1)) + Fraction(a, 2)
        if e >= prec:
            break
        den = pochhammer_finite(n) * pochhammer_finite(n + a)
        parts.append(den.invert(prec - e).qshift(e))
        n += 1
    return series_sum(parts, prec) if parts else QExp.zero(prec)


def singlet_char(k: int, prec: Rational) -> tuple[QExp, QExp]:
    """Both forms of the p = 2 singlet module character (false theta, q-hypergeometric)."""
    return singlet_false_theta(k, prec), singlet_qhyp(k, prec)


def andrews_F(m: int, prec: Rational, second_from: int = 1) -> QExp:
    """F_m for the expansion of 1/prod (1 - z q^{n-1})(1 - z^-1 q^n) in powers of z.

    ``second_from`` is the lower limit of the second sum (0 reproduces the
    unshifted sum, which has negative exponents at r = 0 when m > 0).
    """
    prec = Fraction(prec)
    if m < 0:
        return andrews_F(-m, prec + m, second_from).qshift(-m)
    terms = {}
    r = 0
    while (2 * r + 1) * r + 2 * m * r < prec:
        e = (2 * r + 1) * r + 2 * m * r
        terms[e] = terms.get(e, 0) + 1
        r += 1
    r = second_from
    while True:
        e = (2 * r - 1) * r + m * (2 * r - 1)
        if e >= prec and r > 0:
            break
        if e < prec:
            terms[e] = terms.get(e, 0) - 1
        r += 1
    return QExp.from_terms(terms, prec)


def andrews_coefficient(m: int, prec: Rational) -> QExp:
    """[z^m] of 1/prod (1 - z q^{n-1})(1 - z^-1 q^n) = sum_j q^j/((q;q)_{m+j} (q;q)_j)."""
    prec = Fraction(prec)
    parts = []
    j = max(0, -m)
    while j < prec:
        den = pochhammer_finite(m + j) * pochhammer_finite(j)
        parts.append(den.invert(prec - j).qshift(j))
        j += 1
    return series_sum(parts, prec)


def andrews_check(m: int, prec: Rational, second_from: int = 1) -> Verdict:
    prec = Fraction(prec)
    rhs = andrews_F(m, prec, second_from) * euler_product(prec).power(-2)
    return equality_to_order(andrews_coefficient(m, prec), rhs, prec)


DELTA_CANDIDATES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))


@dataclass(frozen=True)
class DeltaForm:
    """Delta(z) = alpha * sum z_i^2 + beta * (sum z_i)^2."""

    alpha: Fraction
    beta: Fraction

    def __call__(self, z) -> Fraction:
        return self.alpha * sum(x * x for x in z) + self.beta * sum(z) ** 2


def _norm_singlet_products(abs_multiset: tuple[int, ...], prec: Fraction) -> QExp:
    out = QExp.constant(1)
    for a in abs_multiset:
        out = out * _singlet_cached(a, prec)
    return out.truncate(prec)


@lru_cache(maxsize=256)
def _singlet_cached(a: int, prec: Fraction) -> QExp:
    return singlet_qhyp(a, prec)


def _enumerate_z(n: int, s: int, max_abs: int) -> Counter:
    """Count z in Z^n with sum z = s and sum |z_i| <= max_abs, keyed by sorted |z|."""
    out: Counter = Counter()

    def rec(i: int, remaining_sum: int, budget: int, acc: list[int]):
        if i == n - 1:
            z = remaining_sum
            if abs(z) <= budget:
                out[tuple(sorted(abs(x) for x in acc + [z]))] += 1
            return
        for z in range(-budget, budget + 1):
            # the rest must still reach remaining_sum - z within the budget
            if abs(remaining_sum - z) > budget - abs(z):
                continue
            acc.append(z)
            rec(i + 1, remaining_sum - z, budget - abs(z), acc)
            acc.pop()

    rec(0, s, max_abs, [])
    return out


def decomposition_char(n: int, s: int, prec: Rational, delta: DeltaForm | None = None) -> QExp:
    """ch[V_s] = q^{(n+1)/24} sum_{z, sum z = s} q^{Delta(z)} prod ch[pi_{z_i}] / (q;q)^{n-1}."""
    prec = Fraction(prec)
    d = delta if delta is not None else calibrated_delta(n)
    if d.alpha < 0:
        raise NonTerminating("Delta must be bounded below on each charge sector")
    base = Fraction(n + 1, 24)
    rel = prec - base
    # sum |z_i| / 2 + Delta(z) < rel, and Delta >= beta s^2 when alpha >= 0
    floor_delta = d.beta * s * s
    max_abs = _ceil(2 * (rel - min(floor_delta, Fraction(0)))) if rel > 0 else 0
    groups = _enumerate_z(n, s, max_abs)
    parts = []
    if d.alpha == 0:
        # Delta only sees sum z = s, so group by the multiset of |z_i|
        shift = d.beta * s * s
        for absz, count in sorted(groups.items()):
            lowest = Fraction(sum(absz), 2) + shift
            if lowest >= rel:
                continue
            parts.append(_norm_singlet_products(absz, rel - shift).qshift(shift).scale(count))
    else:
        for z in _enumerate_signed(n, s, max_abs):
            dz = d(z)
            lowest = Fraction(sum(abs(x) for x in z), 2) + dz
            if lowest >= rel:
                continue
            absz = tuple(sorted(abs(x) for x in z))
            parts.append(_norm_singlet_products(absz, rel - dz).qshift(dz))
    total = series_sum(parts, rel) if parts else QExp.zero(rel)
    return (total * euler_product(rel).power(-(n - 1))).qshift(base).truncate(prec)


def _enumerate_signed(n: int, s: int, max_abs: int):
    for z in itertools.product(range(-max_abs, max_abs + 1), repeat=n - 1):
        last = s - sum(z)
        if sum(abs(x) for x in z) + abs(last) <= max_abs:
            yield z + (last,)


@lru_cache(maxsize=None)
def calibrated_delta(n: int, order: int = 6) -> DeltaForm:
    """Fix Delta once by matching ch[V_0] and ch[V_1] of the oracle.

    Candidates satisfy alpha + beta = 1/(2n) so that z = (s, 0, ..., 0)
    sits at the lowest weight h_s.  The unique survivor is returned.
    """
    hits = []
    for alpha in DELTA_CANDIDATES:
        d = DeltaForm(alpha, Fraction(1, 2 * n) - alpha)
        ok = True
        for s in (0, 1):
            lhs = decomposition_char(n, s, order, d)
            if not equality_to_order(lhs, weyl_oracle(n, s, order), order).ok:
                ok = False
                break
        if ok:
            hits.append(d)
    if len(hits) != 1:
        raise NonTerminating(f"Delta calibration found {len(hits)} candidates")
    return hits[0]


def qhyp_sl3_rhs(prec: Rational) -> QExp:
    """Triple q-hypergeometric sum over (k1, k2, n1, n2, n3), enumerated term by term."""
    prec = Fraction(prec)
    parts = []
    kmax = _ceil(prec) + 1
    inv_cache: dict[tuple[int, int], QExp] = {}
    for k1 in range(-kmax, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            ks = (abs(k1), abs(k2), abs(k1 + k2))
            e0 = Fraction(sum(ks), 2)
            if e0 >= prec:
                continue
            ranges = []
            for a in ks:
                ns = []
                n = 0
                while n * n + (a + 1) * n + e0 < prec:
                    ns.append(n)
                    n += 1
                ranges.append(ns)
            for n1, n2, n3 in itertools.product(*ranges):
                e = e0 + sum(n * n + (a + 1) * n for n, a in zip((n1, n2, n3), ks))
                if e >= prec:
                    continue
                term = QExp.constant(1)
                for n, a in zip((n1, n2, n3), ks):
                    key = (n, a)
                    if key not in inv_cache:
                        inv_cache[key] = pochhammer_finite(n) * pochhammer_finite(n + a)
                    term = term * inv_cache[key]
                parts.append(term.invert(prec - e).qshift(e))
    return series_sum(parts, prec)


def qhyp_sl3_lhs(prec: Rational) -> QExp:
    """(q;q)^2 q^{-1/6} ch[V_0] for sl(3)."""
    prec = Fraction(prec)
    ch = weyl_oracle(3, 0, prec + Fraction(1, 6))
    return (ch * euler_product(prec + 1) ** 2).qshift(Fraction(-1, 6)).truncate(prec)


def qhyp_sl3_check(prec: Rational) -> Verdict:
    return equality_to_order(qhyp_sl3_lhs(prec), qhyp_sl3_rhs(prec), prec)


# -- vacuum, affine sl(3), psl, osp ----------------------------------------

def vacuum_char(n: int, prec: Rational, prefactor: Rational | None = None) -> QExp:
    """q^a CT_zeta prod_{i>=1} (1 + q^i zeta)^n (1 + q^i zeta^-1)^n with a = n/12 by default."""
    prec = Fraction(prec)
    a = Fraction(n, 12) if prefactor is None else Fraction(prefactor)
    rel = prec - a
    depth = max(0, _ceil(rel))
    b = BivariateSeries(depth)
    for i in range(1, depth):
        b.binomial(1, i, n)
        b.binomial(-1, i, n)
    return b.series(0).qshift(a).truncate(prec)


def affine_sl3_level1_chars(i: int, prec: Rational) -> tuple[QExp, QExp]:
    """(eta-quotient form, rank-2 lattice form) of ch[L(Lambda_i)] for sl(3) at level 1."""
    if i not in (0, 1, 2):
        raise ValueError("i must be 0, 1 or 2")
    prec = Fraction(prec)
    pad = prec + 1
    inv3 = eta_power(-3, pad + Fraction(1, 8))
    if i == 0:
        eta_form = (eta_power(3, pad, 3).scale(3) + eta_power(3, pad, Fraction(1, 3))) * inv3
        lat = lattice_sum_2d(lambda m, n: 1, (1, -1, 1, 0, 0, 0), pad)
    else:
        eta_form = eta_power(3, pad, 3).scale(3) * inv3
        lat = lattice_sum_2d(lambda m, n: 1, (1, -1, 1, 0, 1, Fraction(1, 3)), pad)
    lat_form = lat * eta_power(-2, pad + 1)
    return eta_form.truncate(prec), lat_form.truncate(prec)


def sch_U12_closed(prec: Rational) -> QExp:
    """(1/6) eta^5/eta(3tau)^3 + (E2 - 9 E2(3tau)) (eta(tau/3)^3 + 3 eta(3tau)^3) / (48 eta^5)."""
    prec = Fraction(prec)
    pad = prec + 1
    a = (eta_power(5, pad) * eta_power(-3, pad + 1, 3)).scale(Fraction(1, 6))
    e = E2(pad) - E2(pad, 3).scale(9)
    b = e * (eta_power(3, pad, Fraction(1, 3)) + eta_power(3, pad, 3).scale(3)) * eta_power(-5, pad + 1)
    return (a + b.scale(Fraction(1, 48))).truncate(prec)


def sch_U0_closed(prec: Rational) -> QExp:
    """-(1/8) (E2 - 9 E2(3tau)) eta(3tau)^3 / eta^5."""
    prec = Fraction(prec)
    pad = prec + 1
    e = E2(pad) - E2(pad, 3).scale(9)
    return (e * eta_power(3, pad, 3) * eta_power(-5, pad + 1)).scale(Fraction(-1, 8)).truncate(prec)


def ch_U_n2_swapped(prec: Rational) -> QExp:
    """(1/3) eta(4tau)^2/(eta^3 eta(2tau)) (4 E2(2tau) - E2(4tau)), with the E2 arguments swapped."""
    prec = Fraction(prec)
    pad = prec + 1
    q = eta_power(2, pad, 4) * eta_power(-3, pad + 1) * eta_power(-1, pad + 1, 2)
    return (q * (E2(pad, 2).scale(4) - E2(pad, 4))).scale(Fraction(1, 3)).truncate(prec)


def ch_U_n2_closed(prec: Rational) -> QExp:
    """(1/3) eta(4tau)^2/(eta^3 eta(2tau)) (4 E2(4tau) - E2(2tau))."""
    prec = Fraction(prec)
    pad = prec + 1
    q = eta_power(2, pad, 4) * eta_power(-3, pad + 1) * eta_power(-1, pad + 1, 2)
    return (q * (E2(pad, 4).scale(4) - E2(pad, 2))).scale(Fraction(1, 3)).truncate(prec)


def psl_characters(n: int, prec: Rational, uncorrected: bool = False) -> QExp:
    """Closed-form character of psl(n|n) at level 1 for n = 1, 2, 3.

    With ``uncorrected=True`` the uncorrected expressions are returned
    (the n = 2 one has leading coefficient -1 and the n = 3 one
    starts at q^0).
    """
    prec = Fraction(prec)
    pad = prec + 1
    if n == 1:
        return qpoch_plus(prec - Fraction(1, 12), 2).qshift(Fraction(1, 12))
    if n == 2:
        q = eta_power(4, pad, 2) * eta_power(-6, pad + 1)
        e = E2(pad).scale(Fraction(1, 3)) - E2(pad, 2).scale(Fraction(4, 3))
        out = (q * e).truncate(prec)
        return out if uncorrected else -out
    if n == 3:
        if uncorrected:
            return (eta_power(6, pad, 2) * eta_power(-12, pad + 1) * E22(pad)).truncate(prec)
        return psl3_character(prec)
    raise UnsupportedRank("closed forms exist only for n = 1, 2, 3")


def psl3_character(prec: Rational) -> QExp:
    """eta(2tau)^6 E_{2,2} / eta^10, the solution of the n = 3 MLDE with leading term q^{1/12}."""
    prec = Fraction(prec)
    pad = prec + 1
    return (eta_power(6, pad, 2) * eta_power(-10, pad + 1) * E22(pad)).truncate(prec)


def psl_eta_quotient_n1(prec: Rational) -> QExp:
    prec = Fraction(prec)
    return (eta_power(2, prec + 1, 2) * eta_power(-2, prec + 1)).truncate(prec)


def gl_supercharacter_ratio(n: int, prec: Rational) -> BivariateSeries:
    """Bivariate expansion of (Clifford product)^n / (Weyl product)^n in t = q^(1/2)."""
    prec = Fraction(prec)
    depth = _ceil(2 * prec)
    b = BivariateSeries(depth, step=2)
    for m in range(1, depth // 2 + 2):
        e = 2 * m - 1
        if e >= depth:
            break
        b.binomial(1, e, n, sign=-1)
        b.binomial(-1, e, n, sign=-1)
        b.geometric(1, e, n)
        b.geometric(-1, e, n)
    return b


def psl_supercharacter_check(n: int, prec: Rational) -> Verdict:
    """sch[V_1(psl(n|n))] = eta^2.

    Every n uses the gl route (the zeta-expansion of the ratio is exactly 1);
    n = 3 additionally uses the branching over sl(3) level one.
    """
    prec = Fraction(prec)
    b = gl_supercharacter_ratio(n, prec)
    for c in range(-b.window, b.window + 1):
        expect = QExp.constant(1) if c == 0 else QExp.zero()
        v = equality_to_order(b.series(c), expect, Fraction(b.depth, 2))
        if not v.ok:
            return v
    eta2 = eta_power(2, prec)
    if n != 3:
        return equality_to_order(eta2 * QExp.constant(1), eta2, prec)
    return equality_to_order(psl3_branching_sum(prec), eta2, prec)


def psl3_branching_sum(prec: Rational) -> QExp:
    """sum_i sch[U_i] ch[L(Lambda_i)] with sch[U_0] from the constant-term pipeline."""
    prec = Fraction(prec)
    pad = prec + 1
    s0 = ct_character(3, 0, "sch", pad)
    s12 = sch_U12_closed(pad)
    l0, _ = affine_sl3_level1_chars(0, pad)
    l1, _ = affine_sl3_level1_chars(1, pad)
    return (s0 * l0 + (s12 * l1).scale(2)).truncate(prec)


def osp_rhs(prec: Rational) -> QExp:
    """Theta_q(E4) / (240 eta^10)."""
    prec = Fraction(prec)
    pad = prec + 1
    return (E4(pad).theta().scale(Fraction(1, 240)) * eta_power(-10, pad + 1)).truncate(prec)


# -- labels -----------------------------------------------------------------

FAMILIES = {
    "V": ("n", "s"),
    "U": ("n",),
    "Uk": ("n", "k"),
    "singlet": ("k",),
    "vacuum": ("n",),
    "L": ("i",),
    "psl": ("n",),
    "gl": ("n",),
    "osp": (),
}

_LABEL_RE = re.compile(r"^(ch|sch):([A-Za-z]+)\[([^\]]*)\]$")


@dataclass(frozen=True)
class CharacterLabel:
    sector: str
    family: str
    params: tuple[tuple[str, int], ...]

    @classmethod
    def parse(cls, text: str) -> "CharacterLabel":
        m = _LABEL_RE.match(text.strip())
        if not m:
            raise ValueError(f"malformed character label {text!r}")
        sector, family, body = m.groups()
        if family not in FAMILIES:
            raise ValueError(f"unknown character family {family!r}")
        params = {}
        if body.strip():
            for item in body.split(","):
                key, _, val = item.partition("=")
                params[key.strip()] = int(val)
        expected = FAMILIES[family]
        if set(params) != set(expected):
            raise ValueError(f"{family} needs parameters {expected}")
        label = cls(sector, family, tuple((k, params[k]) for k in expected))
        label.validate()
        return label

    def get(self, key: str) -> int:
        return dict(self.params)[key]

    def validate(self) -> None:
        p = dict(self.params)
        f = self.family
        if f in ("V", "U", "Uk") and p["n"] < 2:
            raise ValueError("n must be at least 2")
        if f == "Uk" and not 0 <= p["k"] < p["n"]:
            raise ValueError("k must lie in [0, n-1]")
        if f == "L" and p["i"] not in (0, 1, 2):
            raise ValueError("Lambda_i needs i in {0, 1, 2}")
        if f == "psl" and self.sector == "ch" and p["n"] not in (1, 2, 3):
            raise ValueError("psl characters exist for n = 1, 2, 3")
        if f == "vacuum" and p["n"] < 2:
            raise ValueError("vacuum needs n >= 2")

    def __str__(self) -> str:
        body = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.sector}:{self.family}[{body}]"

    def evaluate(self, prec: Rational) -> QExp:
        p = dict(self.params)
        f, sec = self.family, self.sector
        if f == "V":
            v = weyl_oracle(p["n"], p["s"], prec)
            return -v if sec == "sch" and p["s"] % 2 else v
        if f == "U":
            return ct_character(p["n"], 0, sec, prec)
        if f == "Uk":
            return ct_character(p["n"], p["k"], sec, prec)
        if f == "singlet":
            return singlet_qhyp(p["k"], prec)
        if f == "vacuum":
            return vacuum_char(p["n"], prec)
        if f == "L":
            return affine_sl3_level1_chars(p["i"], prec)[0]
        if f == "psl":
            if sec == "sch":
                return eta_power(2, prec)
            return psl_characters(p["n"], prec)
        if f == "gl":
            if sec == "sch":
                return QExp.constant(1)
            raise ValueError("only the gl supercharacter is available")
        if f == "osp":
            return osp_rhs(prec)
        raise ValueError(f"cannot evaluate {self}")
