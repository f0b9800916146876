"""Certified evaluation of truncated expansions on the Siegel upper half-space.

A point is Z = [[z1, z3], [z3, z2]] with Im Z positive definite.  The value
of a truncated expansion at Z is the finite sum

    sum_N a_N exp(2 pi i (a z1 + b z3 + c z2)),    N = (a, b, c),

computed in rectangular interval arithmetic.  Evaluation of one expansion at
many points (the transformed points of a Hecke coset sum) exploits their
structure: points sharing the z3 component share all inner b-sums, points
sharing z2 on top of that share the middle c-sums, and every distinct
exponential is computed once through a content-keyed memo.  Grouping is by
the exact bit pattern of the boxes, so no geometry needs to be guessed.

Truncation control: for a form whose coefficients obey |a_N| <= C t^d
(t = trace N), the tail of the full series beyond trace T at a point with
y-matrix eigenvalue lower bound delta > 0 is at most

    6 C (d + 3) / alpha * exp(-alpha T) * T^{d+2},    alpha = 2 pi delta,

valid once T > (d + 2) / alpha, since there are at most 6 t^2 indices of
trace t.  ``truncation_bound`` inverts this for a requested number of digits
and ``tail_bound`` evaluates it rigorously for widening result boxes.
"""

from __future__ import annotations

import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr, mpq

from .boxes import BoxField, ComplexBox, RealInterval, _imul
from .qexp import TruncatedSeries

__all__ = [
    "EvalPoint",
    "CoefficientBound",
    "GENERATOR_BOUNDS",
    "generator_bound",
    "bound_constant_a",
    "truncation_bound",
    "tail_bound",
    "q_exponential",
    "NumericSeries",
]


class EvalPoint:
    """Point of the degree-2 upper half-space with certified Im Z > 0."""

    __slots__ = ("z1", "z2", "z3")

    def __init__(self, z1: ComplexBox, z2: ComplexBox, z3: ComplexBox):
        self.z1 = z1
        self.z2 = z2
        self.z3 = z3
        if not self.delta().is_positive():
            raise ValueError("imaginary part is not certified positive definite")

    @classmethod
    def from_rationals(cls, field: BoxField, y, x=(0, 0, 0)) -> "EvalPoint":
        """Exact rational coordinates; y = (y1, y2, y3), x = (x1, x2, x3)."""
        y1, y2, y3 = y
        x1, x2, x3 = x
        return cls(
            field.complex(field.real(x1), field.real(y1)),
            field.complex(field.real(x2), field.real(y2)),
            field.complex(field.real(x3), field.real(y3)),
        )

    def triple(self) -> Tuple[ComplexBox, ComplexBox, ComplexBox]:
        return (self.z1, self.z2, self.z3)

    def field(self) -> BoxField:
        return self.z1.field

    def delta(self) -> RealInterval:
        """Smallest eigenvalue of Im Z: ((y1+y2) - sqrt((y1-y2)^2 + 4 y3^2)) / 2."""
        y1, y2, y3 = self.z1.im, self.z2.im, self.z3.im
        f = y1.field
        four = f.real(4)
        disc = (y1 - y2).square() + four * y3.square()
        return ((y1 + y2) - disc.sqrt()) / f.real(2)

    def alpha(self) -> RealInterval:
        return self.delta() * self.z1.field.two_pi()


class CoefficientBound(NamedTuple):
    """Envelope |a_N| <= c * trace(N)^d."""

    c: int
    d: int


GENERATOR_BOUNDS: Dict[str, CoefficientBound] = {
    "E4": CoefficientBound(19230, 5),
    "E6": CoefficientBound(12169, 9),
    "chi10": CoefficientBound(220439, 11),
    "chi12": CoefficientBound(287248, 13),
}


def generator_bound(name: str) -> CoefficientBound:
    try:
        return GENERATOR_BOUNDS[name]
    except KeyError:
        raise ValueError(f"no coefficient envelope on record for {name!r}") from None


def bound_constant_a(field: BoxField, eps, s: int) -> RealInterval:
    """The envelope constant

        A(eps, s) = (2 pi)^{-1/4} exp(9 eps^{-1} 2^{3/eps}) zeta(1 + eps)
                    * max(1, sqrt(Gamma(s + 1/2 + eps) / Gamma(s - 1/2 - eps)))

    as a certified enclosure.  Requires s - 1/2 - eps >= 3/2, which keeps both
    Gamma arguments in the region where Gamma is increasing.
    """
    f = field
    eps = mpq(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if mpq(s) - mpq(1, 2) - eps < mpq(3, 2):
        raise ValueError("need s - 1/2 - eps >= 3/2")
    two_pi = f.two_pi()
    front = f.one() / two_pi.sqrt().sqrt()
    expo = f.real(mpq(9) / eps) * (f.real(mpq(3) / eps) * f.real(2).log()).exp()
    zarg = f.real(1 + eps)
    # zeta decreases on (1, oo), Gamma increases on [3/2, oo).
    zval = RealInterval(f, f._dn.zeta(zarg.hi), f._up.zeta(zarg.lo))
    gnum = f.real(mpq(s) + mpq(1, 2) + eps)
    gden = f.real(mpq(s) - mpq(1, 2) - eps)
    gn = RealInterval(f, f._dn.gamma(gnum.lo), f._up.gamma(gnum.hi))
    gd = RealInterval(f, f._dn.gamma(gden.lo), f._up.gamma(gden.hi))
    ratio = (gn / gd).sqrt()
    if ratio.hi < 1:
        ratio = f.one()
    elif ratio.lo < 1:
        ratio = RealInterval(f, mpfr(1), ratio.hi)
    return front * expo.exp() * zval * ratio


def tail_bound(bound: CoefficientBound, alpha: RealInterval, trunc: int) -> mpfr:
    """Rigorous upper bound for the discarded tail beyond trace ``trunc``."""
    f = alpha.field
    if not alpha.is_positive():
        raise ValueError("alpha must be certified positive")
    if trunc * alpha.lo <= bound.d + 2:
        raise ValueError("truncation too small for the tail estimate to apply")
    front = f.real(6 * bound.c * (bound.d + 3)) / alpha
    decay = (-(alpha * f.real(trunc))).exp()
    poly = f.real(trunc).pow_int(bound.d + 2)
    return (front * decay * poly).hi


def truncation_bound(bound: CoefficientBound, alpha: RealInterval, digits: int) -> int:
    """Minimal T with T > (d + 2) / alpha and tail_bound(T) < 10^{-digits}."""
    if not alpha.is_positive():
        raise ValueError("alpha must be certified positive")
    a = float(alpha.lo)
    c, d = bound
    t = max(1, math.floor((d + 2) / a) + 1)
    log_front = math.log(6 * c * (d + 3) / a)
    target = -digits * math.log(10)
    while log_front - a * t + (d + 2) * math.log(t) >= target:
        t += 1
    # The float scan is a heuristic; certify with interval arithmetic.
    f = alpha.field
    threshold = f.real(mpq(1, 10**digits))
    while trunc_invalid(bound, alpha, t) or not tail_bound(bound, alpha, t) < threshold.lo:
        t += 1
    return t


def trunc_invalid(bound: CoefficientBound, alpha: RealInterval, trunc: int) -> bool:
    return trunc * alpha.lo <= bound.d + 2


def q_exponential(field: BoxField, w: ComplexBox, memo: Optional[dict] = None) -> ComplexBox:
    """exp(2 pi i w), optionally through a content-keyed memo."""
    if memo is not None:
        key = w.key()
        hit = memo.get(key)
        if hit is not None:
            return hit
    t = field.two_pi()
    mod = (-(w.im * t)).exp()
    ang = w.re * t
    out = ComplexBox(mod * ang.cos(), mod * ang.sin())
    if memo is not None:
        memo[key] = out
    return out


# Raw box layout used in the hot loops: (re_lo, re_hi, im_lo, im_hi).


def _raw(box: ComplexBox):
    return (box.re.lo, box.re.hi, box.im.lo, box.im.hi)


def _unraw(field: BoxField, t) -> ComplexBox:
    return ComplexBox(
        RealInterval(field, t[0], t[1]), RealInterval(field, t[2], t[3])
    )


def _cmul_raw(cd, cu, a, b):
    arl, arh, ail, aih = a
    brl, brh, bil, bih = b
    aclo, achi = _imul(cd, cu, arl, arh, brl, brh)
    bdlo, bdhi = _imul(cd, cu, ail, aih, bil, bih)
    adlo, adhi = _imul(cd, cu, arl, arh, bil, bih)
    bclo, bchi = _imul(cd, cu, ail, aih, brl, brh)
    return (
        cd.sub(aclo, bdhi),
        cu.sub(achi, bdlo),
        cd.add(adlo, bclo),
        cu.add(adhi, bchi),
    )


class NumericSeries:
    """A truncated expansion preprocessed for repeated evaluation on one field.

    Exact rational coefficients become interval-endpoint data once, at
    construction; evaluation then runs on raw MPFR endpoints.  With
    ``symmetric=True`` (valid for any full-level form of even weight, whose
    coefficients satisfy a(a, b, c) = a(a, -b, c)), inner sums over b use
    w_b = q3^b + q3^{-b} and the recurrence w_{b+1} = w_1 w_b - w_{b-1},
    halving the work; ``symmetric=False`` evaluates all powers directly and
    exists as a cross-check.
    """

    def __init__(self, series: TruncatedSeries, field: BoxField, symmetric: bool = True):
        self.field = field
        self.symmetric = symmetric
        self.trace_bound = series.trace_bound
        pair_data: Dict[Tuple[int, int], Dict[int, mpq]] = {}
        for (a, b, c), val in series.coeffs.items():
            pair_data.setdefault((a, c), {})[b] = val
        if symmetric:
            for (a, c), bs in pair_data.items():
                for b, v in bs.items():
                    if b > 0 and bs.get(-b) != v:
                        raise ValueError(
                            f"coefficients at ({a}, +-{b}, {c}) are not symmetric in b"
                        )
        self.pairs: List[Tuple[int, int]] = sorted(pair_data)
        # Inner data per pair: constant endpoint pair and b-entries, each entry
        # an exact MPFR scalar with sign flag, or an endpoint pair as fallback.
        self.inner = []
        self.bmax = 0
        for (a, c) in self.pairs:
            bs = pair_data[(a, c)]
            const = bs.get(0)
            exact: List[Tuple[int, mpfr, bool]] = []
            rough: List[Tuple[int, mpfr, mpfr]] = []
            items = (
                sorted(b for b in bs if b > 0) if symmetric else sorted(b for b in bs if b)
            )
            for b in items:
                v = bs[b]
                self.bmax = max(self.bmax, abs(b))
                lo, hi = field._round_down(v), field._round_up(v)
                if lo == hi:
                    exact.append((b, lo, lo >= 0))
                else:
                    rough.append((b, lo, hi))
            cpair = None
            if const is not None:
                cpair = (field._round_down(const), field._round_up(const))
            self.inner.append((cpair, exact, rough))
        # Outer structure: rows over a with ascending c, and the transpose.
        rows: Dict[int, List[Tuple[int, int]]] = {}
        cols: Dict[int, List[Tuple[int, int]]] = {}
        for i, (a, c) in enumerate(self.pairs):
            rows.setdefault(a, []).append((c, i))
            cols.setdefault(c, []).append((a, i))
        self.by_a = sorted((a, sorted(v)) for a, v in rows.items())
        self.by_c = sorted((c, sorted(v)) for c, v in cols.items())
        self.max_a = max(rows) if rows else 0
        self.max_c = max(cols) if cols else 0

    # -- inner sums ---------------------------------------------------------

    def _w_array(self, q3: ComplexBox) -> List:
        """w_b = q3^b + q3^{-b} for 0 <= b <= bmax, as raw endpoint tuples."""
        f = self.field
        two = ComplexBox(f.real(2), f.zero())
        out = [two]
        if self.bmax >= 1:
            w1 = q3 + f.one() / q3
            out.append(w1)
            for _ in range(2, self.bmax + 1):
                out.append(w1 * out[-1] - out[-2])
        return [_raw(w) for w in out]

    def _power_tuples(self, q: ComplexBox, top: int) -> List:
        f = self.field
        one = ComplexBox(f.one(), f.zero())
        boxes = [one]
        for _ in range(top):
            boxes.append(boxes[-1] * q)
        return [_raw(b) for b in boxes]

    def _inner_values(self, q3: ComplexBox) -> List:
        """P_{a,c}(q3) for every stored pair, raw tuples."""
        f = self.field
        cd, cu = f._dn, f._up
        zero = mpfr(0)
        if self.symmetric:
            tab = self._w_array(q3)
        else:
            pos = self._power_tuples(q3, self.bmax)
            neg = self._power_tuples(ComplexBox(f.one(), f.zero()) / q3, self.bmax)
            tab = {b: pos[b] for b in range(self.bmax + 1)}
            tab.update({-b: neg[b] for b in range(1, self.bmax + 1)})
        out = []
        for cpair, exact, rough in self.inner:
            if cpair is None:
                prl = prh = pil = pih = zero
            else:
                prl, prh = cpair
                pil = pih = zero
            for b, s, nonneg in exact:
                wrl, wrh, wil, wih = tab[b]
                if nonneg:
                    prl = cd.add(prl, cd.mul(s, wrl))
                    prh = cu.add(prh, cu.mul(s, wrh))
                    pil = cd.add(pil, cd.mul(s, wil))
                    pih = cu.add(pih, cu.mul(s, wih))
                else:
                    prl = cd.add(prl, cd.mul(s, wrh))
                    prh = cu.add(prh, cu.mul(s, wrl))
                    pil = cd.add(pil, cd.mul(s, wih))
                    pih = cu.add(pih, cu.mul(s, wil))
            for b, lo, hi in rough:
                wrl, wrh, wil, wih = tab[b]
                xl, xh = _imul(cd, cu, lo, hi, wrl, wrh)
                prl = cd.add(prl, xl)
                prh = cu.add(prh, xh)
                xl, xh = _imul(cd, cu, lo, hi, wil, wih)
                pil = cd.add(pil, xl)
                pih = cu.add(pih, xh)
            out.append((prl, prh, pil, pih))
        return out

    # -- full evaluation ------------------------------------------------------

    def evaluate_many(
        self,
        points: Sequence[Tuple[ComplexBox, ComplexBox, ComplexBox]],
        exp_memo: Optional[dict] = None,
    ) -> List[ComplexBox]:
        """Values at each point, in input order.

        Points are grouped by the exact content of their z3 box; within a
        group, middle sums are cached per distinct remaining component, keyed
        on whichever of z1, z2 takes fewer distinct values.
        """
        f = self.field
        cd, cu = f._dn, f._up
        zero = mpfr(0)
        if exp_memo is None:
            exp_memo = {}
        results: List[Optional[ComplexBox]] = [None] * len(points)
        groups: Dict[tuple, List[int]] = {}
        for i, (z1, z2, z3) in enumerate(points):
            groups.setdefault(z3.key(), []).append(i)
        for members in groups.values():
            q3 = q_exponential(f, points[members[0]][2], exp_memo)
            pvals = self._inner_values(q3)
            k1 = {points[i][0].key() for i in members}
            k2 = {points[i][1].key() for i in members}
            # Middle sums over the component with fewer distinct values; the
            # outer sum then runs over the other one.
            middle_on_z2 = len(k2) <= len(k1)
            rows = self.by_a if middle_on_z2 else self.by_c
            middle_cache: Dict[tuple, List] = {}
            power_cache: Dict[tuple, List] = {}
            for i in members:
                z1, z2, z3 = points[i]
                mid_z, out_z = (z2, z1) if middle_on_z2 else (z1, z2)
                mid_top = self.max_c if middle_on_z2 else self.max_a
                out_top = self.max_a if middle_on_z2 else self.max_c
                mkey = mid_z.key()
                mid = middle_cache.get(mkey)
                if mid is None:
                    qm = q_exponential(f, mid_z, exp_memo)
                    mtab = power_cache.get(mkey)
                    if mtab is None:
                        mtab = self._power_tuples(qm, mid_top)
                        power_cache[mkey] = mtab
                    mid = []
                    for _, entries in rows:
                        srl = srh = sil = sih = zero
                        for e, idx in entries:
                            t = _cmul_raw(cd, cu, pvals[idx], mtab[e])
                            srl = cd.add(srl, t[0])
                            srh = cu.add(srh, t[1])
                            sil = cd.add(sil, t[2])
                            sih = cu.add(sih, t[3])
                        mid.append((srl, srh, sil, sih))
                    middle_cache[mkey] = mid
                okey = out_z.key()
                otab = power_cache.get(okey)
                if otab is None:
                    qo = q_exponential(f, out_z, exp_memo)
                    otab = self._power_tuples(qo, out_top)
                    power_cache[okey] = otab
                srl = srh = sil = sih = zero
                for (e, _), m in zip(rows, mid):
                    t = _cmul_raw(cd, cu, m, otab[e])
                    srl = cd.add(srl, t[0])
                    srh = cu.add(srh, t[1])
                    sil = cd.add(sil, t[2])
                    sih = cu.add(sih, t[3])
                results[i] = _unraw(f, (srl, srh, sil, sih))
        return results  # type: ignore[return-value]

    def evaluate(self, point: EvalPoint) -> ComplexBox:
        return self.evaluate_many([point.triple()])[0]
