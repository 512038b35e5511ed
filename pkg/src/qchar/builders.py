"""Constructors for the named one-variable q-series.

Every builder takes an absolute precision ``prec``: the returned series is
exact for all exponents below it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .qseries import NonConvergent, QExp, Rational, series_sum


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# -- Bernoulli numbers ------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_table(k: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for m in range(1, k + 1):
        s = sum(math.comb(m + 1, j) * b[j] for j in range(m))
        b.append(-s / (m + 1))
    return tuple(b)


def bernoulli(k: int) -> Fraction:
    """B_k with the convention B_1 = -1/2 (recurrence sum_j C(k+1, j) B_j = 0)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _bernoulli_table(k)[k]


# -- products ---------------------------------------------------------------

def _int_len(prec: Rational) -> int:
    """Number of integer exponents 0, 1, ... below ``prec``."""
    return max(0, _ceil(Fraction(prec)))


def _times_binomial(a: list[int], e: int, sign: int) -> None:
    """In place ``a *= (1 + sign*q**e)`` on a dense integer list."""
    for j in range(len(a) - 1, e - 1, -1):
        if a[j - e]:
            a[j] += sign * a[j - e]


def _divide_binomial(a: list[int], e: int, sign: int) -> None:
    """In place ``a /= (1 + sign*q**e)``."""
    for j in range(e, len(a)):
        if a[j - e]:
            a[j] -= sign * a[j - e]


def euler_product(prec: Rational) -> QExp:
    """(q;q)_inf by multiplying the factors (1 - q^i) one at a time."""
    n = _int_len(prec)
    a = [0] * n
    if n:
        a[0] = 1
    for i in range(1, n):
        _times_binomial(a, i, -1)
    return QExp.from_coefficients(a, 0, 1, prec)


def euler_pentagonal(prec: Rational) -> QExp:
    """(q;q)_inf from Euler's pentagonal number theorem."""
    n = _int_len(prec)
    a = [0] * n
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if e1 >= n:
            break
        a[e1] += sign
        if k and e2 < n:
            a[e2] += sign
        k += 1
    return QExp.from_coefficients(a, 0, 1, prec)


def pochhammer_finite(n: int, step: int = 1) -> QExp:
    """(q^step; q^step)_n as an exact polynomial."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = [1] + [0] * (step * n * (n + 1) // 2)
    for i in range(1, n + 1):
        _times_binomial(a, step * i, -1)
    return QExp.from_terms({j: c for j, c in enumerate(a) if c})


def pochhammer(a_exponent: Rational, prec: Rational, a_coeff: Rational = 1,
               base: Rational = 1) -> QExp:
    """(a; q^base)_inf = prod_{i>=1} (1 - a q^{a_exponent + base*(i-1)}), a = a_coeff.

    Only the first factor may have nonpositive q-valuation.
    """
    e0 = Fraction(a_exponent)
    base = Fraction(base)
    prec = Fraction(prec)
    if base <= 0:
        raise NonConvergent("factor exponents must increase")
    if e0 + base <= 0:
        raise NonConvergent("infinitely many factors with nonpositive q-valuation")
    out = QExp.constant(1)
    start = 0
    rest_prec = prec
    if e0 <= 0:
        out = QExp.from_terms([(0, 1), (e0, -Fraction(a_coeff))])
        if out.is_zero:
            return out
        start = 1
        rest_prec = prec - out.valuation
    # remaining factors as a dense series in q^(1/step)
    exps = []
    i = start
    while e0 + base * i < rest_prec:
        exps.append(e0 + base * i)
        i += 1
    if not exps:
        return out.truncate(prec)
    step = math.lcm(*(e.denominator for e in exps), rest_prec.denominator)
    n = max(0, _ceil(rest_prec * step))
    c = Fraction(a_coeff)
    if c in (1, -1):
        a = [0] * n
        a[0] = 1
        for e in exps:
            _times_binomial(a, int(e * step), -int(c))
        tail = QExp.from_coefficients(a, 0, step, rest_prec)
    else:
        tail = QExp.constant(1)
        for e in exps:
            tail = (tail * QExp.from_terms({0: 1, e: -c})).truncate(rest_prec)
        tail = tail.truncate(rest_prec)
    return (out * tail).truncate(prec)


def qpoch_plus(prec: Rational, power: int = 1, start: int = 1) -> QExp:
    """prod_{i>=start} (1 + q^i)^power."""
    n = _int_len(prec)
    a = [0] * n
    if n:
        a[0] = 1
    for i in range(max(start, 1), n):
        for _ in range(power):
            _times_binomial(a, i, 1)
    return QExp.from_coefficients(a, 0, 1, prec)


def eta(prec: Rational, m: Rational = 1) -> QExp:
    """eta(m*tau) = q^{m/24} (q^m; q^m)_inf, exact below ``prec``."""
    m = Fraction(m)
    prec = Fraction(prec)
    inner = euler_pentagonal((prec - m / 24) / m) if prec > m / 24 else QExp.zero(0)
    return inner.rescale(m).qshift(m / 24).truncate(prec)


def eta_product_form(prec: Rational, m: Rational = 1) -> QExp:
    m = Fraction(m)
    prec = Fraction(prec)
    inner = euler_product((prec - m / 24) / m)
    return inner.rescale(m).qshift(m / 24).truncate(prec)


def eta_power(k: int, prec: Rational, m: Rational = 1) -> QExp:
    """eta(m*tau)**k exact below ``prec`` (k may be negative)."""
    prec = Fraction(prec)
    m = Fraction(m)
    v = k * m / 24
    # relative precision needed is prec - v
    base = eta(prec - v + m / 24, m)
    return base.power(k).truncate(prec)


# -- Eisenstein series ------------------------------------------------------

def divisor_sigma_table(k: int, n: int) -> list[int]:
    """sigma_k(j) for j < n (entry 0 is 0)."""
    s = [0] * n
    for d in range(1, n):
        dk = d ** k
        for j in range(d, n, d):
            s[j] += dk
    return s


def eisenstein(weight: int, prec: Rational, m: Rational = 1) -> QExp:
    """E_weight(m*tau) = 1 - (2k/B_k) sum sigma_{k-1}(n) q^{mn} (quasi-modular for k = 2)."""
    if weight < 2 or weight % 2:
        raise ValueError("weight must be even and >= 2")
    m = Fraction(m)
    n = _int_len(Fraction(prec) / m)
    c = -Fraction(2 * weight) / bernoulli(weight)
    sig = divisor_sigma_table(weight - 1, n)
    coeffs = [Fraction(1)] + [c * sig[j] for j in range(1, n)]
    base = QExp.from_coefficients(coeffs, 0, 1, Fraction(prec) / m)
    return base.rescale(m) if m != 1 else base


def E2(prec: Rational, m: Rational = 1) -> QExp:
    return eisenstein(2, prec, m)


def E4(prec: Rational, m: Rational = 1) -> QExp:
    return eisenstein(4, prec, m)


def E6(prec: Rational, m: Rational = 1) -> QExp:
    return eisenstein(6, prec, m)


def _plus_lambert(power: int, prec: Rational) -> list[int]:
    """Coefficients of sum_{m>=1} m^power q^m / (1 + q^m)."""
    n = _int_len(prec)
    a = [0] * n
    for d in range(1, n):
        dp = d ** power
        sign = 1
        for j in range(d, n, d):
            a[j] += sign * dp
            sign = -sign
    return a


def E22(prec: Rational) -> QExp:
    """1 + 24 sum n q^n/(1+q^n), weight 2 on Gamma_0(2)."""
    a = _plus_lambert(1, prec)
    if a:
        a[0] = 1
        a[1:] = [24 * x for x in a[1:]]
    return QExp.from_coefficients(a, 0, 1, prec)


def E42(prec: Rational) -> QExp:
    """1 - 240 sum m^3 q^m/(1+q^m)."""
    a = _plus_lambert(3, prec)
    if a:
        a[0] = 1
        a[1:] = [-240 * x for x in a[1:]]
    return QExp.from_coefficients(a, 0, 1, prec)


# -- lattice sums -----------------------------------------------------------

RANGES = ("all", "nonneg", "neg", "pos", "nonpos")


def _range_ok(s: int, rng: str) -> bool:
    return (rng == "all" or (rng == "nonneg" and s >= 0) or (rng == "neg" and s < 0)
            or (rng == "pos" and s > 0) or (rng == "nonpos" and s <= 0))


def _quadratic_window(a2: Fraction, a1: Fraction, a0: Fraction, bound: Fraction,
                      rng: str) -> range:
    """Integers s in ``rng`` with a2*s^2 + a1*s + a0 < bound (finite by assumption)."""
    f = lambda s: (a2 * s + a1) * s + a0
    lo_lim = 0 if rng == "nonneg" else 1 if rng == "pos" else None
    hi_lim = -1 if rng == "neg" else 0 if rng == "nonpos" else None
    if a2 > 0:
        center = -a1 / (2 * a2)
        disc = a1 * a1 - 4 * a2 * (a0 - bound)
        if disc < 0:
            return range(0)
        # |s - center| < sqrt(disc)/(2 a2); bracket with integer sqrt, then trim
        r = Fraction(math.isqrt(disc.numerator * disc.denominator) + 1, disc.denominator)
        half = r / (2 * a2)
        lo = math.floor(center - half) - 1
        hi = math.ceil(center + half) + 1
    elif a2 == 0 and a1 != 0:
        root = (bound - a0) / a1
        if a1 > 0:
            if lo_lim is None:
                raise NonConvergent("linear exponent unbounded below on this range")
            lo, hi = lo_lim, math.ceil(root) + 1
        else:
            if hi_lim is None:
                raise NonConvergent("linear exponent unbounded below on this range")
            lo, hi = math.floor(root) - 1, hi_lim
    else:
        raise NonConvergent("exponent is not eventually increasing on the range")
    if lo_lim is not None:
        lo = max(lo, lo_lim)
    if hi_lim is not None:
        hi = min(hi, hi_lim)
    while lo <= hi and f(lo) >= bound:
        lo += 1
    while hi >= lo and f(hi) >= bound:
        hi -= 1
    return range(lo, hi + 1)


@dataclass(frozen=True)
class WeightedLatticeSum1D:
    """sum over s in range of P(s) * sign**s * q**(a*(s+b)**2 + c*s + d).

    ``weight`` lists the coefficients of P in increasing degree.
    """

    weight: tuple[Fraction, ...] = (Fraction(1),)
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)
    sign: int = 1
    range: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "weight", tuple(Fraction(w) for w in self.weight))
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.range not in RANGES:
            raise ValueError(f"range must be one of {RANGES}")
        if self.range == "all" and self.a <= 0:
            raise NonConvergent("a > 0 is required for a sum over all integers")

    def exponent(self, s: int) -> Fraction:
        return self.a * (s + self.b) ** 2 + self.c * s + self.d

    def coefficient(self, s: int) -> Fraction:
        p = Fraction(0)
        for w in reversed(self.weight):
            p = p * s + w
        return -p if self.sign == -1 and s % 2 else p


def lattice_sum_1d(spec: WeightedLatticeSum1D, prec: Rational) -> QExp:
    prec = Fraction(prec)
    a2 = spec.a
    a1 = 2 * spec.a * spec.b + spec.c
    a0 = spec.a * spec.b ** 2 + spec.d
    terms: dict[Fraction, Fraction] = {}
    for s in _quadratic_window(a2, a1, a0, prec, spec.range):
        c = spec.coefficient(s)
        if c:
            e = spec.exponent(s)
            terms[e] = terms.get(e, 0) + c
    return QExp.from_terms(terms, prec)


def lattice_sum_2d(weight: Callable[[int, int], Rational],
                   quad: Sequence[Rational], prec: Rational,
                   range1: str = "all", range2: str = "all") -> QExp:
    """sum of weight(n1, n2) q^Q(n1, n2), Q = A n1^2 + B n1 n2 + C n2^2 + D n1 + E n2 + F.

    Q must be positive definite in its quadratic part so every order gets
    finitely many terms.
    """
    A, B, C, D, E, F = (Fraction(x) for x in quad)
    prec = Fraction(prec)
    if C <= 0 or 4 * A * C - B * B <= 0:
        raise NonConvergent("quadratic form must be positive definite")
    # min over real n2 of Q(n1, n2) = g(n1), a quadratic with positive leading term;
    # the real minimum bounds the integer one, so the n1-window is safe
    g2 = A - B * B / (4 * C)
    g1 = D - B * E / (2 * C)
    g0 = F - E * E / (4 * C)
    terms: dict[Fraction, Fraction] = {}
    for n1 in _quadratic_window(g2, g1, g0, prec, range1):
        for n2 in _quadratic_window(C, B * n1 + E, A * n1 * n1 + D * n1 + F, prec, range2):
            w = Fraction(weight(n1, n2))
            if w:
                e = A * n1 * n1 + B * n1 * n2 + C * n2 * n2 + D * n1 + E * n2 + F
                terms[e] = terms.get(e, 0) + w
    return QExp.from_terms(terms, prec)


def theta_q(x: QExp) -> QExp:
    return x.theta()


__all__ = [
    "bernoulli",
    "euler_product",
    "euler_pentagonal",
    "pochhammer",
    "pochhammer_finite",
    "qpoch_plus",
    "eta",
    "eta_product_form",
    "eta_power",
    "eisenstein",
    "E2",
    "E4",
    "E6",
    "E22",
    "E42",
    "divisor_sigma_table",
    "WeightedLatticeSum1D",
    "lattice_sum_1d",
    "lattice_sum_2d",
    "theta_q",
    "series_sum",
]
