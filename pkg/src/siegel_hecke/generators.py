"""The four classical generators E4, E6, chi10, chi12 of the ring of
degree-2 Siegel modular forms of even weight, as exact truncated expansions.

All four are Maass lifts, so every coefficient comes from a one-variable
table indexed by discriminants: Cohen class numbers for the Eisenstein
series, and weight 10 and 12 Jacobi cusp coefficients for the two cusp
generators.  The lift itself is the divisor sum

    a([a, b, c]) = sum_{d | gcd(a, b, c)} d^{k-1} c((4ac - b^2) / d^2).

Normalizations: E4 and E6 have constant term 1; chi10 and chi12 have
a([1, 1, 1]) = 1.
"""

from __future__ import annotations

import math
from typing import Dict, Optional

from gmpy2 import mpq, mpz
from sympy import bernoulli as _sympy_bernoulli
from sympy import divisors

from . import elliptic
from .hclass import CohenTable
from .qexp import TruncatedSeries, enumerate_indices

__all__ = [
    "GENERATOR_NAMES",
    "GENERATOR_WEIGHTS",
    "jacobi_eisenstein_c",
    "jacobi_cusp_c",
    "siegel_eisenstein",
    "maass_cusp_lift",
    "igusa_generator",
]

GENERATOR_NAMES = ("E4", "E6", "chi10", "chi12")
GENERATOR_WEIGHTS = {"E4": 4, "E6": 6, "chi10": 10, "chi12": 12}


def _zeta_nonpositive(m: int) -> mpq:
    """zeta(-m) for integer m >= 0."""
    if m == 0:
        return mpq(-1, 2)
    if m % 2 == 0:
        return mpq(0)
    b = _sympy_bernoulli(m + 1)
    return -mpq(int(b.p), int(b.q)) / (m + 1)


def jacobi_eisenstein_c(k: int, dmax: int, table: Optional[CohenTable] = None) -> Dict[int, mpq]:
    """Coefficients e_k(D) of the weight-k index-1 Jacobi Eisenstein series,
    keyed by the discriminant D = 4n - r^2, for 0 <= D <= dmax."""
    table = table or CohenTable()
    h0 = table.h(k - 1, 0)
    out: Dict[int, mpq] = {}
    for d in range(dmax + 1):
        if d % 4 in (1, 2):
            continue
        out[d] = table.h(k - 1, d) / h0
    return out


def jacobi_cusp_c(weight: int, dmax: int, table: Optional[CohenTable] = None) -> Dict[int, mpq]:
    """Coefficients c(D) of the Jacobi cusp form of index 1 and weight 10 or
    12, normalized with c(3) = 1.

    Both forms are exhibited inside the free module of index-1 Jacobi forms
    over the ring generated by E4 and E6: phi_{k,1} for k = 10, 12 drops out
    of the combinations (E6 * E_{4,1} - E4 * E_{6,1}) / 144 and
    (E4^2 * E_{4,1} - E6 * E_{6,1}) / 144, read off discriminant-wise.
    """
    table = table or CohenTable()
    order = dmax // 4
    e4j = jacobi_eisenstein_c(4, dmax, table)
    e6j = jacobi_eisenstein_c(6, dmax, table)
    if weight == 10:
        left = elliptic.eisenstein_q(6, order)
        right = elliptic.eisenstein_q(4, order)
    elif weight == 12:
        e4 = elliptic.eisenstein_q(4, order)
        left = elliptic.series_mul(e4, e4, order)
        right = elliptic.eisenstein_q(6, order)
    else:
        raise ValueError("index-1 Jacobi cusp forms exist here for weights 10 and 12 only")
    out: Dict[int, mpq] = {}
    for d in range(dmax + 1):
        if d % 4 in (1, 2):
            continue
        acc = mpq(0)
        for m in range(d // 4 + 1):
            rest = d - 4 * m
            acc += left[m] * e4j[rest] - right[m] * e6j[rest]
        out[d] = acc / 144
    return out


def siegel_eisenstein(
    k: int, trace_bound: int, table: Optional[CohenTable] = None, min_trace: int = 0
) -> TruncatedSeries:
    """Degree-2 Siegel Eisenstein series of weight k (k = 4 or 6 here),
    constant term 1, via the Cohen class-number lift.

    With min_trace > 0, only indices of trace >= min_trace are filled in;
    the cache layer uses this to extend an existing expansion.
    """
    if k % 2 or k < 4:
        raise ValueError("weight must be even and at least 4")
    table = table or CohenTable()
    prefactor = 2 / (_zeta_nonpositive(k - 1) * _zeta_nonpositive(2 * k - 3))
    coeffs: Dict = {}
    for idx in enumerate_indices(trace_bound):
        a, b, c = idx
        if a + c < min_trace:
            continue
        if a == 0 and b == 0 and c == 0:
            coeffs[idx] = mpq(1)
            continue
        g = math.gcd(a, math.gcd(b, c))
        disc = 4 * a * c - b * b
        acc = mpq(0)
        for d in divisors(g):
            acc += mpz(d) ** (k - 1) * table.h(k - 1, disc // (d * d))
        coeffs[idx] = prefactor * acc
    return TruncatedSeries(trace_bound, coeffs)


def maass_cusp_lift(
    cvals: Dict[int, mpq], k: int, trace_bound: int, min_trace: int = 0
) -> TruncatedSeries:
    """Maass lift of an index-1 Jacobi cusp form given by its coefficients
    c(D); the constant term and all singular indices come out zero."""
    coeffs: Dict = {}
    for idx in enumerate_indices(trace_bound):
        a, b, c = idx
        if a + c < min_trace:
            continue
        g = math.gcd(a, math.gcd(b, c))
        if g == 0:
            continue
        disc = 4 * a * c - b * b
        acc = mpq(0)
        for d in divisors(g):
            acc += mpz(d) ** (k - 1) * cvals[disc // (d * d)]
        if acc:
            coeffs[idx] = acc
    return TruncatedSeries(trace_bound, coeffs)


def igusa_generator(
    name: str, trace_bound: int, table: Optional[CohenTable] = None, min_trace: int = 0
) -> TruncatedSeries:
    """One of E4, E6, chi10, chi12 expanded to the given trace bound."""
    table = table or CohenTable()
    if name in ("E4", "E6"):
        return siegel_eisenstein(GENERATOR_WEIGHTS[name], trace_bound, table, min_trace)
    if name in ("chi10", "chi12"):
        k = GENERATOR_WEIGHTS[name]
        cvals = jacobi_cusp_c(k, trace_bound * trace_bound, table)
        return maass_cusp_lift(cvals, k, trace_bound, min_trace)
    raise ValueError(f"unknown generator {name!r}")
