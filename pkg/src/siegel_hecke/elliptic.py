"""Classical one-variable q-expansions with exact rational coefficients.

Series are dense lists indexed by the q-power.  Only low orders are ever
needed (a few hundred terms), so the quadratic product is fine.  Delta is
available through two independent routes, the pentagonal-number eta product
and (E4^3 - E6^2)/1728, which consistency tests compare term by term.
"""

from __future__ import annotations

from typing import List

from gmpy2 import mpq, mpz
from sympy import bernoulli as _sympy_bernoulli
from sympy import divisor_sigma

__all__ = [
    "series_mul",
    "series_pow",
    "eisenstein_q",
    "delta_q",
    "delta_q_from_eisenstein",
    "newform_q",
]


def series_mul(a: List[mpq], b: List[mpq], order: int) -> List[mpq]:
    """Product truncated to q^order inclusive."""
    out = [mpq(0)] * (order + 1)
    for i, ai in enumerate(a):
        if i > order or not ai:
            continue
        top = min(order - i, len(b) - 1)
        for j in range(top + 1):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def series_pow(a: List[mpq], n: int, order: int) -> List[mpq]:
    result = [mpq(1)] + [mpq(0)] * order
    base = list(a[: order + 1])
    while n:
        if n & 1:
            result = series_mul(result, base, order)
        n >>= 1
        if n:
            base = series_mul(base, base, order)
    return result


def eisenstein_q(k: int, order: int) -> List[mpq]:
    """E_k = 1 - (2k / B_k) * sum_n sigma_{k-1}(n) q^n for even k >= 4."""
    if k < 4 or k % 2:
        raise ValueError("weight must be even and at least 4")
    bk = _sympy_bernoulli(k)
    factor = -mpq(2 * k) / mpq(int(bk.p), int(bk.q))
    out = [mpq(1)]
    for n in range(1, order + 1):
        out.append(factor * int(divisor_sigma(n, k - 1)))
    return out


def _eta_q(order: int) -> List[mpq]:
    # Pentagonal number theorem: eta/q^{1/24} = sum_k (-1)^k q^{k(3k-1)/2}.
    out = [mpq(0)] * (order + 1)
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e <= order:
                out[e] += mpq(-1) ** (kk % 2)
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return out


def delta_q(order: int) -> List[mpq]:
    """q * (eta-product)^24, the discriminant cusp form of weight 12."""
    eta24 = series_pow(_eta_q(order), 24, order)
    return [mpq(0)] + eta24[:order]


def delta_q_from_eisenstein(order: int) -> List[mpq]:
    e4 = eisenstein_q(4, order)
    e6 = eisenstein_q(6, order)
    num = [
        x - y
        for x, y in zip(series_pow(e4, 3, order), series_mul(e6, e6, order))
    ]
    return [x / 1728 for x in num]


def newform_q(weight: int, order: int) -> List[mpq]:
    """The normalized cusp eigenform in a one-dimensional space.

    Supported weights: 12 (Delta), 18 (Delta*E6), 22 (Delta*E4*E6).
    """
    if weight == 12:
        return delta_q(order)
    if weight == 18:
        return series_mul(delta_q(order), eisenstein_q(6, order), order)
    if weight == 22:
        e10 = series_mul(eisenstein_q(4, order), eisenstein_q(6, order), order)
        return series_mul(delta_q(order), e10, order)
    raise ValueError(f"no built-in newform of weight {weight}")
