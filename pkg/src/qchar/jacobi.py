"""Laurent series in the elliptic variable and constant-term extraction.

Series are expanded in ``w = 2*pi*i*z``.  Coefficients are rational
q-series; every power of ``i`` and ``2*pi`` lives in a :class:`UnitPrefactor`
so arithmetic stays exact.  Converting to the variable ``z`` multiplies the
coefficient of ``w**k`` by ``(2*pi*i)**k``, which is again a unit prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .builders import bernoulli, eisenstein, eta, eta_power
from .qseries import QExp, QSeriesError, Rational, Verdict, equality_to_order, series_sum


class JacobiError(QSeriesError):
    pass


class PrefactorMismatch(JacobiError):
    pass


class ZeroLeading(JacobiError):
    pass


class OddPart(JacobiError):
    pass


class OrderMismatch(JacobiError):
    pass


class SectorUnsupported(JacobiError):
    pass


class NormalizationFailed(JacobiError):
    pass


class PhaseNotGaussian(JacobiError):
    pass


@dataclass(frozen=True)
class UnitPrefactor:
    """The constant ``i**i_power * (2*pi)**two_pi_power``."""

    i_power: int = 0
    two_pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "i_power", self.i_power % 4)

    def __mul__(self, other: "UnitPrefactor") -> "UnitPrefactor":
        return UnitPrefactor(self.i_power + other.i_power, self.two_pi_power + other.two_pi_power)

    def inverse(self) -> "UnitPrefactor":
        return UnitPrefactor(-self.i_power, -self.two_pi_power)

    def __pow__(self, k: int) -> "UnitPrefactor":
        return UnitPrefactor(self.i_power * k, self.two_pi_power * k)

    @property
    def is_identity(self) -> bool:
        return self.i_power == 0 and self.two_pi_power == 0

    def real_sign(self) -> int:
        """+1 or -1 when the prefactor is a real sign, else raise."""
        if self.two_pi_power or self.i_power % 2:
            raise NormalizationFailed(f"prefactor {self} is not a rational sign")
        return 1 if self.i_power == 0 else -1

    def __str__(self) -> str:
        return f"i^{self.i_power}*(2pi)^{self.two_pi_power}"


ONE = UnitPrefactor()


def _qorder(coeffs: Sequence[QExp]) -> Fraction | None:
    out = None
    for c in coeffs:
        if c.prec is not None and (out is None or c.prec < out):
            out = c.prec
    return out


class ZSeries:
    """``prefactor * sum_{j >= w_low} coeffs[j - w_low] * w**j``, known for ``j < w_trunc``."""

    __slots__ = ("prefactor", "w_low", "coeffs", "parity")

    def __init__(self, coeffs: Sequence[QExp], w_low: int = 0, prefactor: UnitPrefactor = ONE,
                 parity: str | None = None):
        cs = list(coeffs)
        qo = _qorder(cs)
        if qo is not None:
            cs = [c.truncate(qo) for c in cs]
        lead = 0
        while lead < len(cs) and cs[lead].is_zero:
            lead += 1
        if lead == len(cs):
            # zero to the known w-order; keep the truncation
            self.coeffs = ()
            self.w_low = w_low + len(cs)
        else:
            self.coeffs = tuple(cs[lead:])
            self.w_low = w_low + lead
        self.prefactor = prefactor
        self.parity = parity
        if parity is not None:
            self._check_parity(parity)

    def _check_parity(self, parity: str) -> None:
        if parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        bad = 1 if parity == "even" else 0
        for j, c in enumerate(self.coeffs):
            if (self.w_low + j) % 2 == bad and not c.is_zero:
                raise JacobiError(f"declared {parity} but w^{self.w_low + j} coefficient is nonzero")

    @property
    def w_trunc(self) -> int:
        return self.w_low + len(self.coeffs)

    @property
    def q_order(self) -> Fraction | None:
        return _qorder(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, j: int) -> QExp:
        """Rational q-series multiplying ``prefactor * w**j``."""
        if j >= self.w_trunc:
            raise OrderMismatch(f"w^{j} is beyond the known w-order {self.w_trunc}")
        if j < self.w_low:
            return QExp.zero(self.q_order)
        return self.coeffs[j - self.w_low]

    def z_coefficient(self, k: int) -> tuple[UnitPrefactor, QExp]:
        """Coefficient of ``z**k``: prefactor times ``(2*pi*i)**k`` times ``[w**k]``."""
        return self.prefactor * UnitPrefactor(k, k), self.coefficient(k)

    def __repr__(self) -> str:
        return (f"ZSeries(prefactor={self.prefactor}, w_low={self.w_low}, "
                f"w_trunc={self.w_trunc}, q_order={self.q_order})")

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "ZSeries":
        return ZSeries([-c for c in self.coeffs], self.w_low, self.prefactor, self.parity)

    def __add__(self, other: "ZSeries") -> "ZSeries":
        if not isinstance(other, ZSeries):
            return NotImplemented
        if other.prefactor != self.prefactor:
            if self.is_zero or other.is_zero:
                pass
            else:
                raise PrefactorMismatch(f"{self.prefactor} vs {other.prefactor}")
        pre = self.prefactor if not self.is_zero else other.prefactor
        lo = min(self.w_low, other.w_low)
        hi = min(self.w_trunc, other.w_trunc)
        qo = _qorder(list(self.coeffs) + list(other.coeffs))
        out = []
        for j in range(lo, hi):
            out.append(self._coeff_or_zero(j, qo) + other._coeff_or_zero(j, qo))
        parity = self.parity if self.parity == other.parity else None
        return ZSeries(out, lo, pre, parity)

    def _coeff_or_zero(self, j: int, qo) -> QExp:
        if self.w_low <= j < self.w_trunc:
            return self.coeffs[j - self.w_low]
        return QExp.zero(qo)

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        return self + (-other)

    def __mul__(self, other) -> "ZSeries":
        if isinstance(other, (QExp, int, Fraction)):
            return ZSeries([c * other for c in self.coeffs], self.w_low, self.prefactor, self.parity)
        if isinstance(other, UnitPrefactor):
            return ZSeries(self.coeffs, self.w_low, self.prefactor * other, self.parity)
        if not isinstance(other, ZSeries):
            return NotImplemented
        n = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        out = []
        for j in range(n):
            out.append(series_sum([a[i] * b[j - i] for i in range(j + 1)]))
        parity = None
        if self.parity and other.parity:
            parity = "even" if self.parity == other.parity else "odd"
        return ZSeries(out, self.w_low + other.w_low, self.prefactor * other.prefactor, parity)

    __rmul__ = __mul__

    def invert(self) -> "ZSeries":
        if self.is_zero:
            raise ZeroLeading("cannot invert a series with no known nonzero coefficient")
        c = self.coeffs
        n = len(c)
        b0 = c[0].invert()
        b = [b0]
        for k in range(1, n):
            s = series_sum([c[i] * b[k - i] for i in range(1, k + 1)])
            b.append(-(b0 * s))
        parity = None
        if self.parity:
            parity = "even" if (self.parity == "even") else "odd"
        return ZSeries(b, -self.w_low, self.prefactor.inverse(), parity)

    def __pow__(self, k: int) -> "ZSeries":
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            return ZSeries([QExp.constant(1, self.q_order)], 0, ONE, "even")
        out = None
        base = self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def truncate_w(self, w_trunc: int) -> "ZSeries":
        keep = max(0, w_trunc - self.w_low)
        return ZSeries(self.coeffs[:keep], self.w_low, self.prefactor, self.parity)


# -- theta Taylor data ------------------------------------------------------

@dataclass(frozen=True)
class ThetaSpec:
    """theta(scale*z + shift_num/2; q_scale*tau)."""

    scale: int = 1
    shift_num: int = 0
    q_scale: int = 1

    def __post_init__(self):
        if self.scale < 1 or self.q_scale < 1:
            raise ValueError("scale and q_scale must be positive")
        if not isinstance(self.shift_num, int):
            raise PhaseNotGaussian("shift must be an integer multiple of 1/2")


def theta_taylor(spec: ThetaSpec, w_orders: int, prec: Rational) -> ZSeries:
    """Taylor coefficients in w of theta(scale*z + shift/2; q_scale*tau) for w^0..w^{w_orders-1}.

    Uses theta(z) = i * sum_s (-1)^s q^{(s+1/2)^2/2} e^{(s+1/2) w}; the shift
    contributes i^shift (-1)^{s*shift}, hoisted into the prefactor.
    """
    if w_orders < 1:
        raise ValueError("w_orders must be at least 1")
    prec = Fraction(prec)
    n, k, m = spec.scale, spec.shift_num, spec.q_scale
    terms: list[dict[Fraction, Fraction]] = [dict() for _ in range(w_orders)]
    s = 0
    # (s+1/2)^2 is symmetric under s -> -1-s; walk both sides together
    while True:
        e = Fraction(m) * Fraction(2 * s + 1, 2) ** 2 / 2
        if e >= prec:
            break
        for t in (s, -1 - s):
            sign = -1 if (t * (1 + k)) % 2 else 1
            x = Fraction(2 * t + 1, 2) * n
            p = Fraction(sign)
            for j in range(w_orders):
                d = terms[j]
                d[e] = d.get(e, 0) + p / math.factorial(j)
                p *= x
        s += 1
    coeffs = [QExp.from_terms(d, prec) for d in terms]
    parity = "odd" if k % 2 == 0 else "even"
    return ZSeries(coeffs, 0, UnitPrefactor(1 + k, 0), parity)


def characteristic_numerator(n: int, a: Fraction, w_orders: int, prec: Rational,
                             alternating: bool = False) -> ZSeries:
    """sum_s (+-1)^s q^{n (s+a)^2 / 2} e^{-(s+a) n w} as a rational w-series."""
    a = Fraction(a)
    prec = Fraction(prec)
    terms: list[dict[Fraction, Fraction]] = [dict() for _ in range(w_orders)]
    # exponent n(s+a)^2/2 < prec  <=>  |s + a| < sqrt(2 prec / n)
    r = math.isqrt(max(0, math.ceil(2 * prec / n))) + 2
    lo = math.floor(-a) - r
    hi = math.ceil(-a) + r
    for s in range(lo, hi + 1):
        e = n * (s + a) ** 2 / 2
        if e >= prec:
            continue
        sign = -1 if (alternating and s % 2) else 1
        x = -(s + a) * n
        p = Fraction(sign)
        for j in range(w_orders):
            d = terms[j]
            d[e] = d.get(e, 0) + p / math.factorial(j)
            p *= x
    return ZSeries([QExp.from_terms(d, prec) for d in terms], 0, ONE)


# -- Laurent data -----------------------------------------------------------

@dataclass
class LaurentSplit:
    """Coefficients of ``w**(-j)`` for j >= 1 (``poles[j]``) and the ``w**0`` coefficient."""

    poles: dict[int, QExp]
    h0: QExp
    prefactor: UnitPrefactor = ONE

    @property
    def pole_order(self) -> int:
        nz = [j for j, c in self.poles.items() if not c.is_zero]
        return max(nz) if nz else 0

    def even_poles(self) -> dict[int, QExp]:
        return {j: c for j, c in self.poles.items() if j % 2 == 0}

    def odd_poles(self) -> dict[int, QExp]:
        return {j: c for j, c in self.poles.items() if j % 2 == 1 and not c.is_zero}


def laurent_split(h: ZSeries, require_even: bool = True) -> LaurentSplit:
    if h.w_trunc <= 0:
        raise OrderMismatch("w^0 coefficient not determined")
    poles = {}
    for j in range(1, max(0, -h.w_low) + 1):
        poles[j] = h.coefficient(-j)
    split = LaurentSplit(poles, h.coefficient(0), h.prefactor)
    if require_even and split.odd_poles():
        raise OddPart(f"odd Laurent coefficients at w^-{sorted(split.odd_poles())}")
    return split


def reconstruct(split: LaurentSplit) -> ZSeries:
    """Inverse of :func:`laurent_split` on the principal part plus constant term."""
    order = split.pole_order
    coeffs = [split.poles[-j] if j < 0 else split.h0 for j in range(-order, 1)]
    return ZSeries(coeffs, -order, split.prefactor)


def finite_part(split: LaurentSplit) -> QExp:
    """H_0 + sum_j B_2j/(2j)! H_2j E_2j (odd poles carry no constant term)."""
    out = [split.h0]
    for j, c in sorted(split.even_poles().items()):
        if c.is_zero:
            continue
        if c.prec is None:
            raise OrderMismatch("pole coefficient must carry a q-precision")
        need = c.prec - c.valuation
        e = eisenstein(j, need)
        out.append((c * e).scale(bernoulli(j) / math.factorial(j)))
    return series_sum(out)


# -- constant-term characters -----------------------------------------------

def theta_star_data(prec: Rational, w_orders: int = 6) -> dict[str, tuple[UnitPrefactor, QExp]]:
    """z-Taylor data of theta*(z) = theta(z)/z at z = 0.

    ``value`` is theta*(0), ``second`` is theta*''(0) = 2 * [z^3] theta.
    """
    th = theta_taylor(ThetaSpec(1, 0, 1), w_orders, prec)
    p1, c1 = th.z_coefficient(1)
    p3, c3 = th.z_coefficient(3)
    return {"value": (p1, c1), "second": (p3, c3.scale(2))}


def tracked_equality(lhs: tuple[UnitPrefactor, QExp], rhs: tuple[UnitPrefactor, QExp],
                     order: Rational) -> Verdict:
    """Compare ``prefactor * series`` pairs; differing prefactors raise PrefactorMismatch."""
    (pa, a), (pb, b) = lhs, rhs
    if pa != pb:
        raise PrefactorMismatch(f"{pa} != {pb}")
    return equality_to_order(a, b, order)


@dataclass
class CTResult:
    n: int
    k: int
    sector: str
    series: QExp
    raw: QExp
    epsilon: UnitPrefactor
    prefactor: UnitPrefactor
    periodic: bool
    split: LaurentSplit | None
    kernel: ZSeries = field(repr=False)


def hw_weight(n: int, s: int) -> Fraction:
    """Lowest conformal weight of V_s."""
    return Fraction(s * s, 2 * n) + Fraction(abs(s), 2)


def _kernel(n: int, k: int, sector: str, w_orders: int, prec: Fraction) -> tuple[ZSeries, bool]:
    """eta^{n+1} * numerator / theta^n and whether it is elliptic (vs anti-periodic)."""
    if k == 0:
        spec = ThetaSpec(n, 1 if sector == "ch" else 0, n)
        num = theta_taylor(spec, w_orders, prec)
    else:
        a = Fraction(1, 2) + Fraction(k, n)
        num = characteristic_numerator(n, a, w_orders, prec, alternating=(sector == "sch"))
        if sector == "sch" and k % 2:
            num = -num
    den = theta_taylor(ThetaSpec(1, 0, 1), w_orders, prec) ** n
    kern = num * den.invert() * eta_power(n + 1, prec + Fraction(n + 1, 24))
    periodic = (sector == "sch") or (n % 2 == 0)
    return kern, periodic


def ct_character_details(n: int, k: int, sector: str, prec: Rational) -> CTResult:
    """Constant term in zeta of the (super)character kernel of U_k, exact below ``prec``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if sector not in ("ch", "sch"):
        raise ValueError("sector must be 'ch' or 'sch'")
    if sector == "sch" and n % 2 == 0:
        raise SectorUnsupported("the supercharacter kernel is only used for odd n")
    k = k % n
    target = Fraction(prec)
    w_orders = n + 3
    pad = Fraction(n, 4) + 2
    while True:
        kern, periodic = _kernel(n, k, sector, w_orders, target + pad)
        split = laurent_split(kern, require_even=False)
        if periodic:
            if not split.poles.get(1, QExp.zero()).is_zero:
                raise NormalizationFailed("elliptic kernel with nonzero residue")
            raw = finite_part(split)
        else:
            # anti-periodic under z -> z + tau: only the simple pole has a constant term
            raw = split.poles.get(1, QExp.zero(target)).scale(Fraction(1, 2))
        if raw.prec is None or raw.prec >= target:
            break
        pad += max(Fraction(2), target / 2)
    raw = raw.truncate(target)
    if kern.prefactor.two_pi_power:
        raise NormalizationFailed(f"kernel prefactor {kern.prefactor} is not a unit")
    if raw.is_zero:
        raise NormalizationFailed("constant term vanished to the computed order")
    # epsilon cancels the unit prefactor; its sign makes the lowest graded piece
    # positive, or carry the parity of the lowest V_s for supercharacters
    want = 1
    if sector == "sch":
        s_low = min((k, k - n), key=lambda s: hw_weight(n, s))
        want = -1 if s_low % 2 else 1
    sign = want if raw.leading_coefficient > 0 else -want
    eps = kern.prefactor.inverse() * UnitPrefactor(0 if sign > 0 else 2)
    return CTResult(n, k, sector, raw.scale(sign), raw, eps, kern.prefactor, periodic,
                    split if periodic else None, kern)


def ct_character(n: int, k: int, sector: str, prec: Rational) -> QExp:
    return ct_character_details(n, k, sector, prec).series


__all__ = [
    "UnitPrefactor",
    "ZSeries",
    "ThetaSpec",
    "theta_taylor",
    "characteristic_numerator",
    "LaurentSplit",
    "laurent_split",
    "reconstruct",
    "finite_part",
    "theta_star_data",
    "tracked_equality",
    "ct_character",
    "ct_character_details",
    "CTResult",
    "hw_weight",
    "PrefactorMismatch",
    "ZeroLeading",
    "OddPart",
    "OrderMismatch",
    "SectorUnsupported",
    "NormalizationFailed",
    "PhaseNotGaussian",
]
