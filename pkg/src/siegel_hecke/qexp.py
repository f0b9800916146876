"""Fourier indices and truncated Fourier expansions of degree-2 forms.

A Fourier index is a triple (a, b, c) of integers standing for the half-
integral symmetric matrix [[a, b/2], [b/2, c]].  Expansions are supported on
positive semidefinite indices (a >= 0, c >= 0, 4ac - b^2 >= 0); a truncated
expansion stores exact rational coefficients for every index of trace
a + c <= trace_bound, nonzero entries only.

The coefficient of a form of full level at (a, b, c) is invariant under the
unimodular action N -> U^T N U for U in GL(2, Z); ``reduce_index`` computes
the canonical representative of that orbit, used by consistency checks.
"""

from __future__ import annotations

import math
from typing import Dict, Iterator, List, Tuple

from gmpy2 import mpq, mpz

Index = Tuple[int, int, int]

__all__ = [
    "Index",
    "index_trace",
    "index_disc",
    "is_psd",
    "reduce_index",
    "indices_of_trace",
    "enumerate_indices",
    "count_indices",
    "TruncatedSeries",
    "dump_series",
    "load_series",
    "SeriesFormatError",
]


def index_trace(idx: Index) -> int:
    return idx[0] + idx[2]


def index_disc(idx: Index) -> int:
    """4ac - b^2, nonnegative exactly on the semidefinite cone."""
    a, b, c = idx
    return 4 * a * c - b * b


def is_psd(idx: Index) -> bool:
    a, b, c = idx
    return a >= 0 and c >= 0 and 4 * a * c - b * b >= 0


def reduce_index(idx: Index) -> Index:
    """Canonical GL(2, Z) representative, with 0 <= b <= a <= c."""
    a, b, c = idx
    if not is_psd(idx):
        raise ValueError(f"index {idx} is not positive semidefinite")
    if a == 0 or c == 0:
        # Semidefiniteness forces b = 0; diagonal entries sort.
        return (0, 0, a + c)
    while True:
        if a > c:
            a, c = c, a
        # Translate b into [-a, a] by x -> x + t y, then flip its sign.
        if b > a or b < -a:
            t = (a - b) // (2 * a)
            c = c + t * (a * t + b)
            b = b + 2 * t * a
        if b < 0:
            b = -b
        if b <= a <= c:
            return (a, b, c)


def indices_of_trace(t: int) -> Iterator[Index]:
    """Semidefinite indices with a + c = t, ordered by (a, b)."""
    for a in range(t + 1):
        c = t - a
        bmax = math.isqrt(4 * a * c)
        for b in range(-bmax, bmax + 1):
            yield (a, b, c)


def enumerate_indices(trace_bound: int) -> List[Index]:
    """All semidefinite indices of trace <= trace_bound in (trace, a, b) order."""
    if trace_bound < 0:
        raise ValueError("trace bound must be nonnegative")
    out: List[Index] = []
    for t in range(trace_bound + 1):
        out.extend(indices_of_trace(t))
    return out


def count_indices(trace_bound: int) -> int:
    total = 0
    for t in range(trace_bound + 1):
        for a in range(t + 1):
            total += 1 + 2 * math.isqrt(4 * a * (t - a))
    return total


def _as_mpq(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, mpz)):
        return mpq(x)
    num = getattr(x, "numerator", None)
    if num is not None:
        return mpq(num, x.denominator)
    raise TypeError(f"coefficient of type {type(x).__name__} is not exact")


class TruncatedSeries:
    """Exact truncated Fourier expansion: nonzero coefficients up to a trace bound.

    Instances behave as immutable values; arithmetic returns new series.  The
    product of two series is complete up to the smaller of the two bounds,
    since discarded tails only influence traces beyond it.
    """

    __slots__ = ("trace_bound", "coeffs")

    def __init__(self, trace_bound: int, coeffs: Dict[Index, mpq] | None = None):
        if trace_bound < 0:
            raise ValueError("trace bound must be nonnegative")
        clean: Dict[Index, mpq] = {}
        for idx, val in (coeffs or {}).items():
            a, b, c = idx
            if not is_psd(idx):
                raise ValueError(f"index {idx} is not positive semidefinite")
            if a + c > trace_bound:
                raise ValueError(f"index {idx} exceeds trace bound {trace_bound}")
            q = _as_mpq(val)
            if q:
                clean[(int(a), int(b), int(c))] = q
        self.trace_bound = int(trace_bound)
        self.coeffs = clean

    # -- queries -------------------------------------------------------------

    def coefficient(self, idx: Index) -> mpq:
        return self.coeffs.get(idx, mpq(0))

    def __len__(self) -> int:
        return len(self.coeffs)

    def support(self) -> List[Index]:
        return sorted(self.coeffs, key=lambda n: (n[0] + n[2], n[0], n[1]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncatedSeries)
            and self.trace_bound == other.trace_bound
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        return f"TruncatedSeries(trace_bound={self.trace_bound}, nonzero={len(self.coeffs)})"

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        bound = min(self.trace_bound, other.trace_bound)
        out: Dict[Index, mpq] = {}
        for idx, val in self.coeffs.items():
            if idx[0] + idx[2] <= bound:
                out[idx] = val
        for idx, val in other.coeffs.items():
            if idx[0] + idx[2] > bound:
                continue
            s = out.get(idx)
            if s is None:
                out[idx] = val
            else:
                t = s + val
                if t:
                    out[idx] = t
                else:
                    del out[idx]
        return TruncatedSeries(bound, out)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.trace_bound, {i: -v for i, v in self.coeffs.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, q) -> "TruncatedSeries":
        q = _as_mpq(q)
        if not q:
            return TruncatedSeries(self.trace_bound, {})
        return TruncatedSeries(self.trace_bound, {i: q * v for i, v in self.coeffs.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        bound = min(self.trace_bound, other.trace_bound)
        by_trace: Dict[int, List[Tuple[Index, mpq]]] = {}
        for idx, val in other.coeffs.items():
            by_trace.setdefault(idx[0] + idx[2], []).append((idx, val))
        out: Dict[Index, mpq] = {}
        for (a1, b1, c1), v1 in self.coeffs.items():
            t1 = a1 + c1
            if t1 > bound:
                continue
            for t2 in range(bound - t1 + 1):
                for (a2, b2, c2), v2 in by_trace.get(t2, ()):
                    key = (a1 + a2, b1 + b2, c1 + c2)
                    s = out.get(key)
                    if s is None:
                        out[key] = v1 * v2
                    else:
                        p = s + v1 * v2
                        if p:
                            out[key] = p
                        else:
                            del out[key]
        return TruncatedSeries(bound, out)

    def restrict(self, trace_bound: int) -> "TruncatedSeries":
        """Drop all coefficients of trace above the new (smaller) bound."""
        if trace_bound > self.trace_bound:
            raise ValueError("cannot extend a truncated expansion by restriction")
        return TruncatedSeries(
            trace_bound,
            {i: v for i, v in self.coeffs.items() if i[0] + i[2] <= trace_bound},
        )

    # -- structure -------------------------------------------------------------

    def diagonal(self) -> Dict[Tuple[int, int], mpq]:
        """Restriction to z3 = 0: collapse b, keyed by (a, c), zeros dropped.

        The result is the expansion of F(diag(z1, z2)) in q1^a q2^c.
        """
        out: Dict[Tuple[int, int], mpq] = {}
        for (a, b, c), val in self.coeffs.items():
            key = (a, c)
            s = out.get(key)
            if s is None:
                out[key] = val
            else:
                t = s + val
                if t:
                    out[key] = t
                else:
                    del out[key]
        return out

    def symmetry_defects(self) -> List[Tuple[Index, Index]]:
        """Pairs (N, reduced(N)) where the coefficients disagree; empty when the
        expansion is GL(2, Z)-invariant as a full-level form must be."""
        bad = []
        for idx in self.support():
            r = reduce_index(idx)
            if self.coefficient(idx) != self.coefficient(r):
                bad.append((idx, r))
        return bad


class SeriesFormatError(ValueError):
    """Malformed serialized expansion."""


_MAGIC = "SIEGELQEXP 1"


def dump_series(series: TruncatedSeries, weight: int) -> str:
    """Canonical text form: magic, header, then nonzero coefficients in
    (trace, a, b) order as ``a b c num/den`` lines."""
    lines = [_MAGIC, f"{int(weight)} {series.trace_bound} {len(series.coeffs)}"]
    for a, b, c in series.support():
        q = series.coeffs[(a, b, c)]
        lines.append(f"{a} {b} {c} {q.numerator}/{q.denominator}")
    return "\n".join(lines) + "\n"


def load_series(text: str) -> Tuple[int, TruncatedSeries]:
    """Parse ``dump_series`` output strictly, including the ordering rule."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise SeriesFormatError("missing SIEGELQEXP 1 magic line")
    if len(lines) < 2:
        raise SeriesFormatError("missing header line")
    head = lines[1].split()
    if len(head) != 3:
        raise SeriesFormatError(f"bad header: {lines[1]!r}")
    try:
        weight, bound, count = (int(x) for x in head)
    except ValueError as e:
        raise SeriesFormatError(f"bad header: {lines[1]!r}") from e
    body = [ln for ln in lines[2:] if ln.strip()]
    if len(body) != count:
        raise SeriesFormatError(f"header promises {count} coefficients, file has {len(body)}")
    coeffs: Dict[Index, mpq] = {}
    prev_key = None
    for ln in body:
        parts = ln.split()
        if len(parts) != 4:
            raise SeriesFormatError(f"bad coefficient line: {ln!r}")
        try:
            a, b, c = int(parts[0]), int(parts[1]), int(parts[2])
            if "/" in parts[3]:
                num, den = parts[3].split("/")
                q = mpq(int(num), int(den))
            else:
                q = mpq(int(parts[3]))
        except (ValueError, ZeroDivisionError) as e:
            raise SeriesFormatError(f"bad coefficient line: {ln!r}") from e
        idx = (a, b, c)
        if not is_psd(idx):
            raise SeriesFormatError(f"index {idx} is not positive semidefinite")
        if a + c > bound:
            raise SeriesFormatError(f"index {idx} exceeds the stated trace bound {bound}")
        if not q:
            raise SeriesFormatError(f"explicit zero coefficient at {idx}")
        key = (a + c, a, b)
        if prev_key is not None and key <= prev_key:
            raise SeriesFormatError(f"coefficients out of (trace, a, b) order at {idx}")
        prev_key = key
        coeffs[idx] = q
    return weight, TruncatedSeries(bound, coeffs)
