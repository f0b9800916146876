"""Cohen's class-number function H(r, N) as exact rationals.

H(r, N) interpolates class numbers of imaginary quadratic orders: it vanishes
for N = 1, 2 mod 4, equals zeta(1 - 2r) at N = 0, and otherwise factors
through the quadratic character of the fundamental discriminant D < 0 with
-N = D f^2,

    H(r, N) = L(1 - r, chi_D) * sum_{d | f} mu(d) chi_D(d) d^{r-1} sigma_{2r-1}(f / d),

with L(1 - r, chi_D) = -B_{r, chi_D} / r given by a generalized Bernoulli
number.  Everything here is exact integer and rational arithmetic.
"""

from __future__ import annotations

from typing import Dict, Iterable, Tuple

import gmpy2
from gmpy2 import mpq, mpz
from sympy import bernoulli as _sympy_bernoulli
from sympy import divisor_sigma, divisors, factorint, mobius

__all__ = [
    "fundamental_decomposition",
    "generalized_bernoulli",
    "dirichlet_l_nonpositive",
    "cohen_h",
    "CohenTable",
    "dump_cohen_table",
    "load_cohen_table",
    "CohenFormatError",
]


def _bern(j: int) -> mpq:
    # B_j(0), so B_1 = -1/2: the expansion below needs the t/(e^t - 1)
    # convention, while bare sympy.bernoulli(1) is +1/2 since sympy 1.12.
    r = _sympy_bernoulli(j, 0)
    return mpq(int(r.p), int(r.q))


def fundamental_decomposition(n: int) -> Tuple[int, int]:
    """Write -n = D * f^2 with D < 0 a fundamental discriminant.

    Defined exactly for n > 0 with n = 0 or 3 mod 4.
    """
    if n <= 0 or n % 4 in (1, 2):
        raise ValueError(f"-{n} is not a discriminant")
    u, v = 1, 1
    for p, e in factorint(n).items():
        if e % 2:
            u *= p
        v *= p ** (e // 2)
    if (-u) % 4 == 1:
        return -u, v
    # -u = 2, 3 mod 4: the fundamental discriminant picks up the factor 4.
    assert v % 2 == 0
    return -4 * u, v // 2


def _is_fundamental(d: int) -> bool:
    if d == 1:
        return True
    if d % 4 == 1:
        m = d
    elif d % 4 == 0 and (d // 4) % 4 in (2, 3):
        m = d // 4
    else:
        return False
    return all(e == 1 for e in factorint(abs(m)).values())


def generalized_bernoulli(n: int, d: int) -> mpq:
    """B_{n, chi} for chi the Kronecker character of the fundamental
    discriminant d (d = 1 gives the trivial character and ordinary B_n).

    Non-fundamental d is rejected: the Kronecker symbol would silently
    give an imprimitive character and the wrong Bernoulli number.
    """
    if not _is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    if d == 1:
        return _bern(n)
    m = abs(d)
    # B_{n,chi} = sum_j C(n,j) B_j m^{j-1} S_{n-j},  S_e = sum_a chi(a) a^e.
    chi = [gmpy2.kronecker(d, a) for a in range(m)]
    total = mpq(0)
    for j in range(n + 1):
        e = n - j
        s = mpz(0)
        for a in range(1, m + 1):
            ca = chi[a % m]
            if ca:
                s += ca * mpz(a) ** e
        if s:
            total += gmpy2.bincoef(n, j) * _bern(j) * mpq(mpz(m) ** j, m) * s
    return total


def dirichlet_l_nonpositive(n: int, d: int) -> mpq:
    """L(1 - n, chi_d) = -B_{n, chi_d} / n for n >= 1."""
    if n < 1:
        raise ValueError("need n >= 1")
    return -generalized_bernoulli(n, d) / n


class CohenTable:
    """Memoizing evaluator for H(r, N); L-values are cached per discriminant."""

    def __init__(self):
        self._l_values: Dict[Tuple[int, int], mpq] = {}
        self._h_values: Dict[Tuple[int, int], mpq] = {}

    def l_value(self, r: int, d: int) -> mpq:
        key = (r, d)
        val = self._l_values.get(key)
        if val is None:
            val = dirichlet_l_nonpositive(r, d)
            self._l_values[key] = val
        return val

    def h(self, r: int, n: int) -> mpq:
        if r < 1:
            raise ValueError("need r >= 1")
        if n < 0:
            raise ValueError("need N >= 0")
        key = (r, n)
        val = self._h_values.get(key)
        if val is not None:
            return val
        if n == 0:
            # zeta(1 - 2r)
            val = -_bern(2 * r) / (2 * r)
        elif n % 4 in (1, 2):
            val = mpq(0)
        else:
            d, f = fundamental_decomposition(n)
            acc = mpq(0)
            for t in divisors(f):
                mu = mobius(t)
                if mu == 0:
                    continue
                ct = gmpy2.kronecker(d, t)
                if ct == 0:
                    continue
                acc += mu * ct * mpz(t) ** (r - 1) * int(divisor_sigma(f // t, 2 * r - 1))
            val = self.l_value(r, d) * acc
        self._h_values[key] = val
        return val

    def preload(self, items: Iterable[Tuple[int, int, mpq]]):
        for r, n, q in items:
            self._h_values[(r, n)] = q

    def known(self) -> Dict[Tuple[int, int], mpq]:
        return dict(self._h_values)


_DEFAULT_TABLE = CohenTable()


def cohen_h(r: int, n: int) -> mpq:
    """H(r, N) through a process-wide memo table."""
    return _DEFAULT_TABLE.h(r, n)


class CohenFormatError(ValueError):
    """Malformed serialized H-value table."""


_MAGIC = "COHENH 1"


def dump_cohen_table(values: Dict[Tuple[int, int], mpq]) -> str:
    """Canonical text form: magic line, then ``r N num/den`` sorted by (r, N)."""
    lines = [_MAGIC]
    for (r, n) in sorted(values):
        q = values[(r, n)]
        lines.append(f"{r} {n} {q.numerator}/{q.denominator}")
    return "\n".join(lines) + "\n"


def load_cohen_table(text: str) -> Dict[Tuple[int, int], mpq]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise CohenFormatError("missing COHENH 1 magic line")
    out: Dict[Tuple[int, int], mpq] = {}
    prev = None
    for ln in lines[1:]:
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 3:
            raise CohenFormatError(f"bad table line: {ln!r}")
        try:
            r, n = int(parts[0]), int(parts[1])
            if "/" in parts[2]:
                num, den = parts[2].split("/")
                q = mpq(int(num), int(den))
            else:
                q = mpq(int(parts[2]))
        except (ValueError, ZeroDivisionError) as e:
            raise CohenFormatError(f"bad table line: {ln!r}") from e
        if prev is not None and (r, n) <= prev:
            raise CohenFormatError(f"entries out of (r, N) order at r={r} N={n}")
        prev = (r, n)
        out[(r, n)] = q
    return out
