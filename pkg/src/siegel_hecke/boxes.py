"""Rectangular interval arithmetic with arbitrary-precision endpoints.

Real intervals are pairs of MPFR endpoints rounded outward; complex boxes are
rectangles (a real interval for the real part, one for the imaginary part).
Every operation returns an enclosure of the exact image set, so containment is
preserved through arbitrarily long computations.  MPFR transcendentals are
correctly rounded, which makes the directed-rounding enclosures of exp, cos
and sin sound.

All endpoints of a value live at the precision of the owning ``BoxField``.
Operations between values of different fields are rejected rather than
silently coerced.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr, mpq, mpz

__all__ = [
    "BoxField",
    "RealInterval",
    "ComplexBox",
    "BoxDivisionError",
    "IntervalDomainError",
]


class BoxDivisionError(ZeroDivisionError):
    """Division by an interval or box whose enclosure contains zero."""


class IntervalDomainError(ValueError):
    """Operand lies (partly) outside the mathematical domain of the operation."""


def _imul(cd, cu, alo, ahi, blo, bhi):
    # Sign-classified interval product; two MPFR multiplies in the common
    # cases, four only when both operands straddle zero.
    if alo >= 0:
        if blo >= 0:
            return cd.mul(alo, blo), cu.mul(ahi, bhi)
        if bhi <= 0:
            return cd.mul(ahi, blo), cu.mul(alo, bhi)
        return cd.mul(ahi, blo), cu.mul(ahi, bhi)
    if ahi <= 0:
        if blo >= 0:
            return cd.mul(alo, bhi), cu.mul(ahi, blo)
        if bhi <= 0:
            return cd.mul(ahi, bhi), cu.mul(alo, blo)
        return cd.mul(alo, bhi), cu.mul(alo, blo)
    if blo >= 0:
        return cd.mul(alo, bhi), cu.mul(ahi, bhi)
    if bhi <= 0:
        return cd.mul(ahi, blo), cu.mul(alo, blo)
    lo1 = cd.mul(alo, bhi)
    lo2 = cd.mul(ahi, blo)
    hi1 = cu.mul(alo, blo)
    hi2 = cu.mul(ahi, bhi)
    return (lo1 if lo1 < lo2 else lo2), (hi1 if hi1 > hi2 else hi2)


def _isquare(cd, cu, lo, hi):
    if lo >= 0:
        return cd.mul(lo, lo), cu.mul(hi, hi)
    if hi <= 0:
        return cd.mul(hi, hi), cu.mul(lo, lo)
    nl = cu.minus(lo)
    m = nl if nl > hi else hi
    return mpfr(0), cu.mul(m, m)


def _idiv(cd, cu, alo, ahi, blo, bhi):
    if blo > 0:
        lo = cd.div(alo, bhi if alo >= 0 else blo)
        hi = cu.div(ahi, blo if ahi >= 0 else bhi)
        return lo, hi
    if bhi < 0:
        # (-a)/(-b) = a/b; ctx.minus at operand precision is exact, unlike
        # the unary operator, which rounds at the thread's global context.
        lo, hi = _idiv(cd, cu, cd.minus(ahi), cd.minus(alo), cd.minus(bhi), cd.minus(blo))
        return lo, hi
    raise BoxDivisionError("division by an interval containing zero")


class BoxField:
    """Factory and arithmetic context for intervals at a fixed bit precision."""

    __slots__ = ("prec", "_dn", "_up", "_ne", "_pi", "_two_pi", "_half_pi")

    def __init__(self, prec: int):
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        self.prec = int(prec)
        self._dn = gmpy2.context(precision=self.prec, round=gmpy2.RoundDown)
        self._up = gmpy2.context(precision=self.prec, round=gmpy2.RoundUp)
        self._ne = gmpy2.context(precision=self.prec, round=gmpy2.RoundToNearest)
        self._pi = None
        self._two_pi = None
        self._half_pi = None

    def __repr__(self):
        return f"BoxField(prec={self.prec})"

    def __eq__(self, other):
        return isinstance(other, BoxField) and other.prec == self.prec

    def __hash__(self):
        return hash(("BoxField", self.prec))

    # -- constructors ------------------------------------------------------

    def real(self, lo, hi=None) -> "RealInterval":
        """Interval from exact endpoint data (int, mpz, mpq, Fraction, mpfr,
        or a decimal string, which is interpreted exactly)."""
        if hi is None:
            hi = lo
        return RealInterval(self, self._round_down(lo), self._round_up(hi))

    def real_point(self, x) -> "RealInterval":
        return self.real(x, x)

    def complex(self, re, im=0) -> "ComplexBox":
        re = re if isinstance(re, RealInterval) else self.real(re)
        im = im if isinstance(im, RealInterval) else self.real(im)
        if re.field is not self or im.field is not self:
            raise ValueError("parts must belong to this field")
        return ComplexBox(re, im)

    def _as_ratio(self, x):
        if isinstance(x, (int, mpz)):
            return mpz(x), mpz(1)
        if isinstance(x, mpq):
            return x.numerator, x.denominator
        if isinstance(x, str):
            q = mpq(_decimal_to_mpq(x))
            return q.numerator, q.denominator
        num = getattr(x, "numerator", None)
        if num is not None:
            return mpz(num), mpz(x.denominator)
        raise TypeError(f"cannot interpret {type(x).__name__} as an exact number")

    def _round_down(self, x):
        if isinstance(x, mpfr):
            if not gmpy2.is_finite(x):
                raise ValueError("endpoints must be finite")
            return self._dn.add(x, mpfr(0))
        n, d = self._as_ratio(x)
        return self._dn.div(n, d)

    def _round_up(self, x):
        if isinstance(x, mpfr):
            if not gmpy2.is_finite(x):
                raise ValueError("endpoints must be finite")
            return self._up.add(x, mpfr(0))
        n, d = self._as_ratio(x)
        return self._up.div(n, d)

    # -- cached constants --------------------------------------------------

    def pi(self) -> "RealInterval":
        if self._pi is None:
            self._pi = RealInterval(self, self._dn.const_pi(), self._up.const_pi())
        return self._pi

    def two_pi(self) -> "RealInterval":
        if self._two_pi is None:
            pi = self.pi()
            self._two_pi = RealInterval(self, self._dn.mul(pi.lo, 2), self._up.mul(pi.hi, 2))
        return self._two_pi

    def half_pi(self) -> "RealInterval":
        if self._half_pi is None:
            pi = self.pi()
            self._half_pi = RealInterval(self, self._dn.div(pi.lo, 2), self._up.div(pi.hi, 2))
        return self._half_pi

    def zero(self) -> "RealInterval":
        return RealInterval(self, mpfr(0), mpfr(0))

    def one(self) -> "RealInterval":
        return RealInterval(self, mpfr(1), mpfr(1))


def _decimal_to_mpq(s: str):
    from fractions import Fraction

    return Fraction(s)


class RealInterval:
    """Closed interval [lo, hi] with MPFR endpoints; arithmetic is outward."""

    __slots__ = ("field", "lo", "hi")

    def __init__(self, field: BoxField, lo: mpfr, hi: mpfr):
        if not (lo <= hi):
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.field = field
        self.lo = lo
        self.hi = hi

    # -- predicates --------------------------------------------------------

    def contains(self, x) -> bool:
        """Exact containment test against an int, rational, or mpfr."""
        if isinstance(x, mpfr):
            return self.lo <= x <= self.hi
        n, d = self.field._as_ratio(x)
        q = mpq(n, d)
        return self.lo <= q and q <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def contains_interval(self, other: "RealInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "RealInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    # -- measures ----------------------------------------------------------

    def mid(self) -> mpfr:
        f = self.field
        return f._ne.div(f._ne.add(self.lo, self.hi), 2)

    def rad_up(self) -> mpfr:
        """Upper bound on the distance from mid() to either endpoint."""
        f = self.field
        m = self.mid()
        left = f._up.sub(m, self.lo)
        right = f._up.sub(self.hi, m)
        return left if left > right else right

    def width_up(self) -> mpfr:
        return self.field._up.sub(self.hi, self.lo)

    def abs_up(self) -> mpfr:
        """Upper bound for sup |x| over the interval."""
        c = self.field._ne
        a, b = c.abs(self.lo), c.abs(self.hi)
        return a if a > b else b

    def abs_down(self) -> mpfr:
        """Lower bound for inf |x| over the interval (0 if it straddles)."""
        if self.lo <= 0 <= self.hi:
            return mpfr(0)
        c = self.field._ne
        a, b = c.abs(self.lo), c.abs(self.hi)
        return a if a < b else b

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RealInterval):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("interval fields differ")
            return other
        if isinstance(other, ComplexBox):
            # Let the reflected ComplexBox operation take over.
            return None
        return self.field.real(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        return RealInterval(f, f._dn.add(self.lo, other.lo), f._up.add(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self):
        c = self.field._ne
        return RealInterval(self.field, c.minus(self.hi), c.minus(self.lo))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        return RealInterval(f, f._dn.sub(self.lo, other.hi), f._up.sub(self.hi, other.lo))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        lo, hi = _imul(f._dn, f._up, self.lo, self.hi, other.lo, other.hi)
        return RealInterval(f, lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        lo, hi = _idiv(f._dn, f._up, self.lo, self.hi, other.lo, other.hi)
        return RealInterval(f, lo, hi)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def square(self) -> "RealInterval":
        f = self.field
        lo, hi = _isquare(f._dn, f._up, self.lo, self.hi)
        return RealInterval(f, lo, hi)

    def pow_int(self, n: int) -> "RealInterval":
        if n < 0:
            return self.field.one() / self.pow_int(-n)
        f = self.field
        result = f.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.square()
        return result

    def sqrt(self) -> "RealInterval":
        if self.lo < 0:
            raise IntervalDomainError("sqrt of an interval with negative points")
        f = self.field
        return RealInterval(f, f._dn.sqrt(self.lo), f._up.sqrt(self.hi))

    def exp(self) -> "RealInterval":
        f = self.field
        return RealInterval(f, f._dn.exp(self.lo), f._up.exp(self.hi))

    def log(self) -> "RealInterval":
        if self.lo <= 0:
            raise IntervalDomainError("log of an interval touching (-inf, 0]")
        f = self.field
        return RealInterval(f, f._dn.log(self.lo), f._up.log(self.hi))

    def cos(self) -> "RealInterval":
        return _icos(self.field, self.lo, self.hi)

    def sin(self) -> "RealInterval":
        # sin x = cos(x - pi/2); the interval shift costs at most one ulp
        # per endpoint, which the outward rounding absorbs.
        f = self.field
        hp = f.half_pi()
        return _icos(f, f._dn.sub(self.lo, hp.hi), f._up.sub(self.hi, hp.lo))

    # -- set operations ----------------------------------------------------

    def intersect(self, other: "RealInterval") -> "RealInterval":
        other = self._coerce(other)
        lo = self.lo if self.lo > other.lo else other.lo
        hi = self.hi if self.hi < other.hi else other.hi
        if lo > hi:
            raise IntervalDomainError("empty intersection")
        return RealInterval(self.field, lo, hi)

    def hull(self, other: "RealInterval") -> "RealInterval":
        other = self._coerce(other)
        lo = self.lo if self.lo < other.lo else other.lo
        hi = self.hi if self.hi > other.hi else other.hi
        return RealInterval(self.field, lo, hi)

    def widen(self, slack) -> "RealInterval":
        """Enlarge by +-slack (slack given as exact data or mpfr >= 0)."""
        s = self.field._round_up(slack)
        if s < 0:
            raise ValueError("slack must be nonnegative")
        f = self.field
        return RealInterval(f, f._dn.sub(self.lo, s), f._up.add(self.hi, s))

    # -- io ------------------------------------------------------------------

    def __repr__(self):
        return f"RealInterval[{self.lo!r}, {self.hi!r}]"

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"

    def to_bytes(self) -> bytes:
        return _pack_mpfrs((self.lo, self.hi))

    @classmethod
    def from_bytes(cls, field: BoxField, data: bytes) -> "RealInterval":
        lo, hi = _unpack_mpfrs(data, 2)
        return cls(field, lo, hi)


def _integer_in(qlo: mpfr, qhi: mpfr) -> bool:
    # True if [qlo, qhi] certainly or possibly contains an integer.
    return gmpy2.floor(qhi) >= gmpy2.ceil(qlo)


def _icos(field: BoxField, lo: mpfr, hi: mpfr) -> RealInterval:
    f = field
    two_pi = f.two_pi()
    width = f._up.sub(hi, lo)
    if width >= two_pi.lo:
        return RealInterval(f, mpfr(-1), mpfr(1))
    # Point enclosures of cos at the endpoints.
    c1d, c1u = f._dn.cos(lo), f._up.cos(lo)
    c2d, c2u = f._dn.cos(hi), f._up.cos(hi)
    out_lo = c1d if c1d < c2d else c2d
    out_hi = c1u if c1u > c2u else c2u
    # Interior maximum at 2k*pi, interior minimum at (2k+1)*pi.  Quotient
    # intervals are conservative: a possible hit widens the result, which is
    # always sound.
    x = RealInterval(f, lo, hi)
    q = x / two_pi
    if _integer_in(q.lo, q.hi):
        out_hi = mpfr(1)
    q = (x - f.pi()) / two_pi
    if _integer_in(q.lo, q.hi):
        out_lo = mpfr(-1)
    if out_lo < -1:
        out_lo = mpfr(-1)
    if out_hi > 1:
        out_hi = mpfr(1)
    return RealInterval(f, out_lo, out_hi)


class ComplexBox:
    """Axis-aligned rectangle in the complex plane: re + i*im, both intervals."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealInterval, im: RealInterval):
        if re.field is not im.field and re.field != im.field:
            raise ValueError("real and imaginary parts must share a field")
        self.re = re
        self.im = im

    @property
    def field(self) -> BoxField:
        return self.re.field

    # -- predicates --------------------------------------------------------

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, re, im=0) -> bool:
        return self.re.contains(re) and self.im.contains(im)

    def contains_box(self, other: "ComplexBox") -> bool:
        return self.re.contains_interval(other.re) and self.im.contains_interval(other.im)

    def overlaps(self, other: "ComplexBox") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    # -- measures ----------------------------------------------------------

    def mid(self):
        return self.re.mid(), self.im.mid()

    def radius_up(self) -> mpfr:
        """Upper bound on the distance from mid() to any point of the box,
        measured per axis (Chebyshev radius of the rectangle)."""
        rr = self.re.rad_up()
        ri = self.im.rad_up()
        return rr if rr > ri else ri

    def abs_up(self) -> mpfr:
        """Upper bound on sup |z| over the box."""
        f = self.field
        a = self.re.abs_up()
        b = self.im.abs_up()
        return f._up.sqrt(f._up.add(f._up.mul(a, a), f._up.mul(b, b)))

    def abs_down(self) -> mpfr:
        """Lower bound on inf |z| over the box."""
        f = self.field
        a = self.re.abs_down()
        b = self.im.abs_down()
        return f._dn.sqrt(f._dn.add(f._dn.mul(a, a), f._dn.mul(b, b)))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "ComplexBox":
        if isinstance(other, ComplexBox):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("box fields differ")
            return other
        if isinstance(other, RealInterval):
            return ComplexBox(other, other.field.zero())
        f = self.field
        return ComplexBox(f.real(other), f.zero())

    def __add__(self, other):
        other = self._coerce(other)
        return ComplexBox(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __sub__(self, other):
        other = self._coerce(other)
        return ComplexBox(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        f = self.field
        cd, cu = f._dn, f._up
        a, b, c, d = self.re, self.im, other.re, other.im
        aclo, achi = _imul(cd, cu, a.lo, a.hi, c.lo, c.hi)
        bdlo, bdhi = _imul(cd, cu, b.lo, b.hi, d.lo, d.hi)
        adlo, adhi = _imul(cd, cu, a.lo, a.hi, d.lo, d.hi)
        bclo, bchi = _imul(cd, cu, b.lo, b.hi, c.lo, c.hi)
        return ComplexBox(
            RealInterval(f, cd.sub(aclo, bdhi), cu.sub(achi, bdlo)),
            RealInterval(f, cd.add(adlo, bclo), cu.add(adhi, bchi)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        f = self.field
        cd, cu = f._dn, f._up
        c, d = other.re, other.im
        nlo, nhi = _isquare(cd, cu, c.lo, c.hi)
        mlo, mhi = _isquare(cd, cu, d.lo, d.hi)
        den_lo, den_hi = cd.add(nlo, mlo), cu.add(nhi, mhi)
        if den_lo <= 0:
            raise BoxDivisionError("division by a box containing zero")
        num = self * other.conjugate()
        den = RealInterval(f, den_lo, den_hi)
        return ComplexBox(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def conjugate(self) -> "ComplexBox":
        return ComplexBox(self.re, -self.im)

    def scale(self, q) -> "ComplexBox":
        """Multiply by an exact rational scalar."""
        s = self.field.real(q)
        return ComplexBox(self.re * s, self.im * s)

    def pow_int(self, n: int) -> "ComplexBox":
        f = self.field
        if n < 0:
            return ComplexBox(f.one(), f.zero()) / self.pow_int(-n)
        result = ComplexBox(f.one(), f.zero())
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exp(self) -> "ComplexBox":
        """exp(re) * (cos(im) + i sin(im)); the modulus factor is positive."""
        f = self.field
        m = self.re.exp()
        c = self.im.cos()
        s = self.im.sin()
        return ComplexBox(m * c, m * s)

    def sqrt(self) -> "ComplexBox":
        """Principal square root for boxes certified in the right half-plane.

        Uses u = sqrt((|z| + re)/2), v = im/(2u), exact for re >= 0; interval
        evaluation keeps containment.  Boxes touching re <= 0 with nonzero
        imaginary extent are rejected rather than guessed at.
        """
        f = self.field
        if self.im.lo == 0 and self.im.hi == 0:
            if self.re.lo < 0:
                raise IntervalDomainError("sqrt of a box on the negative real axis")
            return ComplexBox(self.re.sqrt(), f.zero())
        if self.re.lo <= 0:
            raise IntervalDomainError("sqrt requires a box in the open right half-plane")
        mod = (self.re.square() + self.im.square()).sqrt()
        u = ((mod + self.re) / f.real(2)).sqrt()
        v = self.im / (u * f.real(2))
        return ComplexBox(u, v)

    # -- set operations ----------------------------------------------------

    def intersect(self, other: "ComplexBox") -> "ComplexBox":
        other = self._coerce(other)
        return ComplexBox(self.re.intersect(other.re), self.im.intersect(other.im))

    def hull(self, other: "ComplexBox") -> "ComplexBox":
        other = self._coerce(other)
        return ComplexBox(self.re.hull(other.re), self.im.hull(other.im))

    def widen(self, slack) -> "ComplexBox":
        return ComplexBox(self.re.widen(slack), self.im.widen(slack))

    # -- io ------------------------------------------------------------------

    def __repr__(self):
        return f"ComplexBox(re={self.re!r}, im={self.im!r})"

    def __str__(self):
        return f"{self.re} + {self.im}*i"

    def to_bytes(self) -> bytes:
        return _pack_mpfrs((self.re.lo, self.re.hi, self.im.lo, self.im.hi))

    @classmethod
    def from_bytes(cls, field: BoxField, data: bytes) -> "ComplexBox":
        relo, rehi, imlo, imhi = _unpack_mpfrs(data, 4)
        return cls(RealInterval(field, relo, rehi), RealInterval(field, imlo, imhi))

    def key(self):
        """Hashable identity of the exact endpoint data (content-based)."""
        return (
            gmpy2.to_binary(self.re.lo),
            gmpy2.to_binary(self.re.hi),
            gmpy2.to_binary(self.im.lo),
            gmpy2.to_binary(self.im.hi),
        )


def _pack_mpfrs(values) -> bytes:
    parts = []
    for v in values:
        blob = gmpy2.to_binary(v)
        parts.append(len(blob).to_bytes(4, "big"))
        parts.append(blob)
    return b"".join(parts)


def _unpack_mpfrs(data: bytes, count: int):
    out = []
    pos = 0
    for _ in range(count):
        n = int.from_bytes(data[pos : pos + 4], "big")
        pos += 4
        out.append(gmpy2.from_binary(data[pos : pos + n]))
        pos += n
    if pos != len(data):
        raise ValueError("trailing bytes in serialized interval")
    return out
