"""Truncated Puiseux series in q with exact rational coefficients.

A :class:`QExp` is ``q**shift * sum_i c_i q**(i/step)`` known for every
exponent below ``prec`` (``prec is None`` marks an exact, finite series).
Values are immutable and always canonical: the first stored coefficient is
nonzero, ``step`` is minimal and the integer numerators share no factor with
the common denominator.  The dense ``(D, v, T, coeffs)`` view exposed by
:meth:`QExp.dense` is the interchange form used for serialization.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from . import kernels

Rational = int | Fraction

DEFAULT_MAX_DENOM = 1440
_max_denom = DEFAULT_MAX_DENOM


class QSeriesError(ArithmeticError):
    pass


class ZeroSeries(QSeriesError):
    pass


class DenominatorOverflow(QSeriesError):
    pass


class NonConvergent(QSeriesError):
    pass


class UnknownCoefficient(QSeriesError):
    """Requested coefficient lies at or beyond the series precision."""


def max_denominator() -> int:
    return _max_denom


@contextlib.contextmanager
def denominator_cap(cap: int):
    """Temporarily change the global exponent-denominator cap."""
    global _max_denom
    old = _max_denom
    _max_denom = cap
    try:
        yield
    finally:
        _max_denom = old


def _lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _min_prec(a: Fraction | None, b: Fraction | None) -> Fraction | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class QExp:
    __slots__ = ("_shift", "_step", "_num", "_den", "_prec", "_hash")

    def __init__(self, *args, **kwargs):
        raise TypeError("use QExp.from_terms, QExp.from_coefficients or QExp.constant")

    # -- construction -----------------------------------------------------

    @classmethod
    def _make(cls, shift: Fraction, step: int, num, den: int, prec: Fraction | None) -> "QExp":
        num = list(num)
        if prec is not None:
            prec = Fraction(prec)
            length = max(0, _ceil((prec - shift) * step))
            if len(num) > length:
                del num[length:]
            elif len(num) < length:
                num.extend([0] * (length - len(num)))
        first = next((i for i, v in enumerate(num) if v), None)
        self = object.__new__(cls)
        self._hash = None
        if first is None:
            self._shift = Fraction(0)
            self._step = 1
            self._num = ()
            self._den = 1
            self._prec = prec
            return self
        if first:
            shift = shift + Fraction(first, step)
            del num[:first]
        if prec is None:
            last = max(i for i, v in enumerate(num) if v)
            del num[last + 1:]
        g = step
        if g > 1:
            for i, v in enumerate(num):
                if v and i % g:
                    g = math.gcd(g, i)
                    if g == 1:
                        break
        if g > 1:
            step //= g
            num = num[::g]
            if prec is not None:
                length = _ceil((prec - shift) * step)
                if len(num) < length:
                    num.extend([0] * (length - len(num)))
                else:
                    del num[length:]
        if den < 0:
            den = -den
            num = [-v for v in num]
        c = math.gcd(den, *num)
        if c > 1:
            den //= c
            num = [v // c for v in num]
        d = _lcm(step, shift.denominator)
        if d > _max_denom:
            raise DenominatorOverflow(f"exponent denominator {d} exceeds cap {_max_denom}")
        self._shift = shift
        self._step = step
        self._num = tuple(num)
        self._den = den
        self._prec = prec
        return self

    @classmethod
    def from_terms(cls, terms: Mapping[Rational, Rational] | Iterable[tuple[Rational, Rational]],
                   prec: Rational | None = None) -> "QExp":
        """Series from ``exponent -> coefficient`` pairs; terms at or past ``prec`` are dropped."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Fraction] = {}
        for e, c in items:
            e = Fraction(e)
            if prec is not None and e >= prec:
                continue
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        acc = {e: c for e, c in acc.items() if c}
        p = None if prec is None else Fraction(prec)
        if not acc:
            return cls._make(Fraction(0), 1, [], 1, p)
        base = min(acc)
        step = _lcm(*((e - base).denominator for e in acc))
        den = _lcm(*(c.denominator for c in acc.values()))
        length = max(int((e - base) * step) for e in acc) + 1
        num = [0] * length
        for e, c in acc.items():
            num[int((e - base) * step)] = c.numerator * (den // c.denominator)
        return cls._make(base, step, num, den, p)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Rational], shift: Rational = 0, step: int = 1,
                          prec: Rational | None = None) -> "QExp":
        """Series ``q**shift * sum_i coeffs[i] q**(i/step)``.

        When ``prec`` is omitted the series is known up to the end of ``coeffs``.
        Pass ``exact=True`` semantics through :meth:`from_terms` instead.
        """
        cs = [Fraction(c) for c in coeffs]
        shift = Fraction(shift)
        if prec is None:
            prec = shift + Fraction(len(cs), step)
        den = _lcm(*(c.denominator for c in cs)) if cs else 1
        return cls._make(shift, step, [c.numerator * (den // c.denominator) for c in cs], den,
                         Fraction(prec))

    @classmethod
    def constant(cls, c: Rational, prec: Rational | None = None) -> "QExp":
        return cls.from_terms({0: c}, prec)

    @classmethod
    def monomial(cls, e: Rational, c: Rational = 1) -> "QExp":
        return cls.from_terms({e: c})

    @classmethod
    def zero(cls, prec: Rational | None = None) -> "QExp":
        return cls._make(Fraction(0), 1, [], 1, None if prec is None else Fraction(prec))

    @classmethod
    def _from_ints(cls, shift: Fraction, step: int, num: list[int], den: int,
                   prec: Fraction | None) -> "QExp":
        return cls._make(shift, step, num, den, prec)

    # -- inspection -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._num

    @property
    def is_exact(self) -> bool:
        return self._prec is None

    @property
    def prec(self) -> Fraction | None:
        """Absolute truncation order: coefficients known for exponents below it."""
        return self._prec

    @property
    def valuation(self) -> Fraction:
        if not self._num:
            raise ZeroSeries("valuation of the zero series is undefined")
        return self._shift

    @property
    def step(self) -> int:
        return self._step

    @property
    def denom(self) -> int:
        """Smallest D with every stored exponent (and the precision) in (1/D)Z."""
        d = _lcm(self._step, self._shift.denominator)
        if self._prec is not None:
            d = _lcm(d, self._prec.denominator)
        return d

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._num:
            raise ZeroSeries("zero series has no leading coefficient")
        return Fraction(self._num[0], self._den)

    def coefficient(self, e: Rational) -> Fraction:
        e = Fraction(e)
        if self._prec is not None and e >= self._prec:
            raise UnknownCoefficient(f"coefficient of q^{e} is beyond precision {self._prec}")
        if not self._num:
            return Fraction(0)
        k = (e - self._shift) * self._step
        if k.denominator != 1 or k < 0 or k >= len(self._num):
            return Fraction(0)
        return Fraction(self._num[int(k)], self._den)

    def __getitem__(self, e: Rational) -> Fraction:
        return self.coefficient(e)

    def terms(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Nonzero ``(exponent, coefficient)`` pairs in increasing exponent order."""
        for i, v in enumerate(self._num):
            if v:
                yield self._shift + Fraction(i, self._step), Fraction(v, self._den)

    def coefficients(self, count: int | None = None, start: Rational | None = None,
                     step: int | None = None) -> list[Fraction]:
        """Coefficients on the grid ``start + i/step`` (defaults: valuation, own step)."""
        st = self._step if step is None else step
        s0 = (self._shift if self._num else Fraction(0)) if start is None else Fraction(start)
        if count is None:
            if self._prec is None:
                raise ValueError("count required for exact series")
            count = max(0, _ceil((self._prec - s0) * st))
        return [self.coefficient(s0 + Fraction(i, st)) for i in range(count)]

    def dense(self) -> tuple[int, int | None, int | None, list[Fraction]]:
        """``(D, v, T, coeffs)``: exponents ``(v + i)/D``, known below ``T/D``.

        ``v`` is None for the zero series and ``T`` is None for exact series.
        """
        d = self.denom
        t = None if self._prec is None else int(self._prec * d)
        if not self._num:
            return d, None, t, []
        v = int(self._shift * d)
        spread = d // self._step
        if t is None:
            length = (len(self._num) - 1) * spread + 1
        else:
            length = t - v
        out = [Fraction(0)] * length
        for i, c in enumerate(self._num):
            if c and i * spread < length:
                out[i * spread] = Fraction(c, self._den)
        return d, v, t, out

    # -- equality ---------------------------------------------------------

    def _key(self):
        return (self._shift, self._step, self._num, self._den, self._prec)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QExp):
            return self._key() == other._key()
        if isinstance(other, (int, Fraction)):
            return self._key() == QExp.constant(other)._key()
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return f"QExp({self.format(8)})"

    def format(self, max_terms: int = 10) -> str:
        parts = []
        for k, (e, c) in enumerate(self.terms()):
            if k == max_terms:
                parts.append("...")
                break
            parts.append(f"{c}*q^{e}" if e else f"{c}")
        body = " + ".join(parts) if parts else "0"
        tail = "" if self._prec is None else f" + O(q^{self._prec})"
        return body + tail

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, shift: Fraction, step: int, den: int, length: int) -> list[int]:
        """Numerators on the grid ``shift + i/step`` scaled to denominator ``den``."""
        out = [0] * length
        if not self._num:
            return out
        off = (self._shift - shift) * step
        assert off.denominator == 1 and off >= 0
        off = int(off)
        spread = step // self._step
        scale = den // self._den
        for i, v in enumerate(self._num):
            j = off + i * spread
            if j >= length:
                break
            if v:
                out[j] = v * scale
        return out

    def __add__(self, other) -> "QExp":
        if isinstance(other, (int, Fraction)):
            other = QExp.constant(other)
        if not isinstance(other, QExp):
            return NotImplemented
        prec = _min_prec(self._prec, other._prec)
        parts = [x for x in (self, other) if x._num]
        if not parts:
            return QExp.zero(prec)
        base = min(x._shift for x in parts)
        step = _lcm(*(x._step for x in parts), *((x._shift - base).denominator for x in parts))
        den = _lcm(*(x._den for x in parts))
        if prec is None:
            length = max(int((x._shift - base) * step) + (len(x._num) - 1) * (step // x._step) + 1
                         for x in parts)
        else:
            length = max(0, _ceil((prec - base) * step))
        acc = [0] * length
        for x in parts:
            for j, v in enumerate(x._aligned(base, step, den, length)):
                if v:
                    acc[j] += v
        return QExp._make(base, step, acc, den, prec)

    __radd__ = __add__

    def __neg__(self) -> "QExp":
        return QExp._make(self._shift, self._step, [-v for v in self._num], self._den, self._prec)

    def __sub__(self, other) -> "QExp":
        if isinstance(other, (int, Fraction)):
            other = QExp.constant(other)
        if not isinstance(other, QExp):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QExp":
        return (-self) + other

    def scale(self, c: Rational) -> "QExp":
        c = Fraction(c)
        return QExp._make(self._shift, self._step, [v * c.numerator for v in self._num],
                          self._den * c.denominator, self._prec)

    def __mul__(self, other) -> "QExp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QExp):
            return NotImplemented
        x, y = self, other
        if (not x._num and x._prec is None) or (not y._num and y._prec is None):
            return QExp.zero()
        if not x._num or not y._num:
            if not x._num and not y._num:
                return QExp.zero(x._prec + y._prec)
            z, nz = (x, y) if not x._num else (y, x)
            return QExp.zero(z._prec + nz._shift)
        shift = x._shift + y._shift
        step = _lcm(x._step, y._step)
        prec = None
        if x._prec is not None:
            prec = x._prec + y._shift
        if y._prec is not None:
            p2 = y._prec + x._shift
            prec = p2 if prec is None else min(prec, p2)
        lx = (len(x._num) - 1) * (step // x._step) + 1
        ly = (len(y._num) - 1) * (step // y._step) + 1
        full = lx + ly - 1
        n = full if prec is None else max(0, _ceil((prec - shift) * step))
        a = x._aligned(x._shift, step, x._den, min(lx, n) if n else 0)
        b = y._aligned(y._shift, step, y._den, min(ly, n) if n else 0)
        c = kernels.convolve(a, b, n) if n else []
        return QExp._make(shift, step, c, x._den * y._den, prec)

    __rmul__ = __mul__

    def invert(self, prec: Rational | None = None) -> "QExp":
        """Multiplicative inverse; ``prec`` is required for exact inputs."""
        if not self._num:
            raise ZeroSeries("cannot invert a series with no nonzero known coefficient")
        v = self._shift
        if self._prec is None:
            if prec is None:
                if len(self._num) == 1:
                    return QExp._make(-v, 1, [self._den], self._num[0], None)
                raise ValueError("precision required to invert an exact series")
            out_prec = Fraction(prec)
        else:
            out_prec = self._prec - 2 * v
            if prec is not None:
                out_prec = min(out_prec, Fraction(prec))
        n = max(0, _ceil((out_prec + v) * self._step))
        a = list(self._num[:n])
        a0 = a[0]
        if a0 in (1, -1):
            b = kernels.inverse_unit(a, n)
            return QExp._make(-v, self._step, [t * self._den for t in b], 1, out_prec)
        b = kernels.inverse_scaled(a, n)
        # 1/a = sum_k b[k] / a0**(k+1)
        num = [t * a0 ** (n - 1 - k) * self._den for k, t in enumerate(b)]
        return QExp._make(-v, self._step, num, a0 ** n, out_prec)

    def __truediv__(self, other) -> "QExp":
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if not isinstance(other, QExp):
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other) -> "QExp":
        if isinstance(other, (int, Fraction)):
            return self.invert().scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "QExp":
        return self.power(k)

    def power(self, k: int, prec: Rational | None = None) -> "QExp":
        """Integer power; negative powers of exact series need ``prec``."""
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k == 0:
            return QExp.constant(1)
        if not self._num:
            if k < 0:
                raise ZeroSeries("negative power of zero")
            return self if self._prec is None else QExp.zero(self._prec * k)
        if k == 1:
            return self
        v = self._shift
        a0 = self._num[0]
        if self._prec is None and k > 0 and prec is None:
            if a0 in (1, -1) and len(self._num) > 1:
                n = (len(self._num) - 1) * k + 1
                u = [t * a0 for t in self._num]
                g = kernels.power_unit(u, k, n)
                return QExp._make(k * v, self._step, [t * a0 ** k for t in g], self._den ** k, None)
            return self._square_multiply(k)
        if self._prec is None:
            if prec is None:
                raise ValueError("precision required for a negative power of an exact series")
            out_prec = Fraction(prec)
        else:
            out_prec = self._prec - v + k * v
            if prec is not None:
                out_prec = min(out_prec, Fraction(prec))
        n = max(0, _ceil((out_prec - k * v) * self._step))
        if a0 in (1, -1):
            u = [t * a0 for t in self._num[:n]]
            g = kernels.power_unit(u, k, n)
            sign = a0 ** (k % 2)
            if k >= 0:
                return QExp._make(k * v, self._step, [t * sign for t in g], self._den ** k, out_prec)
            return QExp._make(k * v, self._step, [t * sign * self._den ** (-k) for t in g], 1, out_prec)
        if k > 0:
            return self.truncate(out_prec - (k - 1) * v)._square_multiply(k).truncate(out_prec)
        # relative precision of the inverse must match that of the result
        inv = self.invert(out_prec - k * v - v)
        return inv._square_multiply(-k).truncate(out_prec)

    def _square_multiply(self, k: int) -> "QExp":
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncate(self, prec: Rational | None) -> "QExp":
        if prec is None:
            return self
        p = Fraction(prec)
        if self._prec is not None and self._prec <= p:
            return self
        return QExp._make(self._shift, self._step, self._num, self._den, p)

    def qshift(self, e: Rational) -> "QExp":
        """Multiply by ``q**e``."""
        e = Fraction(e)
        return QExp._make(self._shift + e, self._step, self._num, self._den,
                          None if self._prec is None else self._prec + e)

    def rescale(self, m: Rational) -> "QExp":
        """Substitute ``q -> q**m`` for a positive rational ``m``."""
        m = Fraction(m)
        if m <= 0:
            raise ValueError("rescale factor must be positive")
        p, r = m.numerator, m.denominator
        step = self._step * r
        if step > _max_denom * 64:
            raise DenominatorOverflow(f"rescale by {m} needs denominator {step}")
        if self._num:
            num = [0] * ((len(self._num) - 1) * p + 1)
            for i, v in enumerate(self._num):
                num[i * p] = v
        else:
            num = []
        return QExp._make(self._shift * m, step, num, self._den,
                          None if self._prec is None else self._prec * m)

    def theta(self) -> "QExp":
        """``q d/dq``: the coefficient at exponent e is multiplied by e."""
        if not self._num:
            return self
        a, b = self._shift.numerator, self._shift.denominator
        st = self._step
        num = [v * (a * st + i * b) for i, v in enumerate(self._num)]
        return QExp._make(self._shift, st, num, self._den * b * st, self._prec)

    # -- serialization ----------------------------------------------------

    def to_record(self) -> dict:
        d, v, t, cs = self.dense()
        return {
            "D": d,
            "v": v,
            "T": t,
            "exact": self._prec is None,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in cs],
        }

    @classmethod
    def from_record(cls, rec: Mapping) -> "QExp":
        d = int(rec["D"])
        prec = None if rec["T"] is None else Fraction(int(rec["T"]), d)
        if rec["v"] is None:
            return cls.zero(prec)
        v = int(rec["v"])
        cs = [Fraction(c) for c in rec["coeffs"]]
        den = _lcm(*(c.denominator for c in cs)) if cs else 1
        num = [c.numerator * (den // c.denominator) for c in cs]
        return cls._make(Fraction(v, d), d, num, den, prec)


def as_qexp(x) -> QExp:
    if isinstance(x, QExp):
        return x
    if isinstance(x, (int, Fraction)):
        return QExp.constant(x)
    raise TypeError(f"cannot convert {type(x).__name__} to QExp")


def series_sum(items: Iterable[QExp], prec: Rational | None = None) -> QExp:
    """Sum many series in one pass (cheaper than repeated ``+``)."""
    items = [as_qexp(x) for x in items]
    p = None if prec is None else Fraction(prec)
    for x in items:
        p = _min_prec(p, x.prec)
    parts = [x for x in items if not x.is_zero]
    if not parts:
        return QExp.zero(p)
    base = min(x._shift for x in parts)
    step = _lcm(*(x._step for x in parts), *((x._shift - base).denominator for x in parts))
    den = _lcm(*(x._den for x in parts))
    if p is None:
        length = max(int((x._shift - base) * step) + (len(x._num) - 1) * (step // x._step) + 1
                     for x in parts)
    else:
        length = max(0, _ceil((p - base) * step))
    acc = [0] * length
    for x in parts:
        off = int((x._shift - base) * step)
        spread = step // x._step
        sc = den // x._den
        for i, v in enumerate(x._num):
            j = off + i * spread
            if j >= length:
                break
            if v:
                acc[j] += v * sc
    return QExp._make(base, step, acc, den, p)


@dataclass(frozen=True)
class Verdict:
    """Outcome of comparing two series below an order N.

    ``kind`` is ``"equal"``, ``"first_difference"`` or ``"insufficient"``.
    """

    kind: str
    order: Fraction
    exponent: Fraction | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    available: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.kind == "equal"

    def describe(self) -> str:
        if self.kind == "equal":
            return f"Equal below q^{self.order}"
        if self.kind == "first_difference":
            return f"FirstDifference at q^{self.exponent}: {self.lhs} != {self.rhs}"
        return f"Insufficient: determined only below q^{self.available} (< {self.order})"


def equality_to_order(x, y, order: Rational) -> Verdict:
    """Compare ``x`` and ``y`` for every exponent below ``order``.

    A genuine difference below the shared precision is reported even when
    one side is not determined all the way to ``order``.
    """
    x, y = as_qexp(x), as_qexp(y)
    n = Fraction(order)
    avail = _min_prec(x.prec, y.prec)
    limit = n if avail is None else min(n, avail)
    diff = (x - y).truncate(limit)
    for e, _ in diff.terms():
        if e < limit:
            return Verdict("first_difference", n, e, x.coefficient(e), y.coefficient(e))
        break
    if avail is not None and avail < n:
        return Verdict("insufficient", n, available=avail)
    return Verdict("equal", n)
