"""Coset representatives of the degree-2 Hecke operators T_p and T_{p^2, 1}.

Both operators act through finitely many right cosets Gamma M_i with
Gamma = Sp(4, Z); every representative below is block upper triangular,

    M = [[A, B], [0, D]],   A^T D = mu I,   B^T D symmetric,

with similitude mu = p for T_p and mu = p^2 for T_{p^2, 1}.  The operator sum
is (F | T)(Z) = sum_i det(D_i)^{-k} F((A_i Z + B_i) D_i^{-1}); no similitude
normalization is applied at this level.

T_p has p^3 + p^2 + p + 1 cosets, T_{p^2, 1} has p^4 + p^3 + p^2 + p.
"""

from __future__ import annotations

from typing import List, NamedTuple, Tuple

from gmpy2 import mpq
from sympy import isprime

from .boxes import ComplexBox

__all__ = [
    "CosetRep",
    "tp_cosets",
    "tp2_1_cosets",
    "operator_cosets",
    "operator_degree",
    "act_on_point",
    "coset_label",
    "cosets_equal",
    "OPERATORS",
]

Mat2 = Tuple[Tuple[int, int], Tuple[int, int]]


class CosetRep(NamedTuple):
    """Block upper triangular representative [[A, B], [0, D]]."""

    a: Mat2
    b: Mat2
    d: Mat2
    similitude: int

    def det_d(self) -> int:
        (d1, d2), (d3, d4) = self.d
        return d1 * d4 - d2 * d3

    def matrix(self) -> Tuple[Tuple[int, int, int, int], ...]:
        (a1, a2), (a3, a4) = self.a
        (b1, b2), (b3, b4) = self.b
        (d1, d2), (d3, d4) = self.d
        return (
            (a1, a2, b1, b2),
            (a3, a4, b3, b4),
            (0, 0, d1, d2),
            (0, 0, d3, d4),
        )


def tp_cosets(p: int) -> List[CosetRep]:
    """The p^3 + p^2 + p + 1 right cosets of T_p."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    reps: List[CosetRep] = []
    reps.append(CosetRep(((p, 0), (0, p)), ((0, 0), (0, 0)), ((1, 0), (0, 1)), p))
    for a in range(p):
        for b in range(p):
            for c in range(p):
                reps.append(
                    CosetRep(((1, 0), (0, 1)), ((a, b), (b, c)), ((p, 0), (0, p)), p)
                )
    for a in range(p):
        reps.append(
            CosetRep(((0, -p), (1, 0)), ((0, 0), (a, 0)), ((0, -1), (p, 0)), p)
        )
    for m in range(p):
        for a in range(p):
            reps.append(
                CosetRep(((p, 0), (-m, 1)), ((0, 0), (0, a)), ((1, m), (0, p)), p)
            )
    return reps


def tp2_1_cosets(p: int) -> List[CosetRep]:
    """The p^4 + p^3 + p^2 + p right cosets of T_{p^2, 1}."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    p2 = p * p
    reps: List[CosetRep] = []
    for alpha in range(p):
        reps.append(
            CosetRep(((p2, 0), (-p * alpha, p)), ((0, 0), (0, 0)), ((1, alpha), (0, p)), p2)
        )
    reps.append(CosetRep(((p, 0), (0, p2)), ((0, 0), (0, 0)), ((p, 0), (0, 1)), p2))
    for a in range(p):
        for b in range(p):
            for c in range(p):
                if (a or b or c) and (a * c - b * b) % p == 0:
                    reps.append(
                        CosetRep(((p, 0), (0, p)), ((a, b), (b, c)), ((p, 0), (0, p)), p2)
                    )
    for alpha in range(p):
        for beta in range(p):
            for cc in range(p2):
                reps.append(
                    CosetRep(
                        ((p, 0), (-alpha, 1)),
                        ((0, p * beta), (beta, alpha * beta + cc)),
                        ((p, p * alpha), (0, p2)),
                        p2,
                    )
                )
    for big_a in range(p2):
        for beta in range(p):
            reps.append(
                CosetRep(((1, 0), (0, p)), ((big_a, beta), (p * beta, 0)), ((p2, 0), (0, p)), p2)
            )
    return reps


OPERATORS = ("tp", "tp2_1")


def operator_cosets(operator: str, p: int) -> List[CosetRep]:
    if operator == "tp":
        return tp_cosets(p)
    if operator == "tp2_1":
        return tp2_1_cosets(p)
    raise ValueError(f"unknown operator {operator!r}; cosets exist for {OPERATORS}")


def operator_degree(operator: str, p: int) -> int:
    if operator == "tp":
        return p**3 + p**2 + p + 1
    if operator == "tp2_1":
        return p**4 + p**3 + p**2 + p
    raise ValueError(f"unknown operator {operator!r}; cosets exist for {OPERATORS}")


def _hnf2(m: Mat2) -> Tuple[Mat2, Mat2]:
    """Row Hermite form of a nonsingular 2x2 integer matrix.

    Returns (H, W) with W unimodular, W m = H = [[a, b], [0, d]], a > 0,
    d > 0, 0 <= b < d.
    """
    (p, q), (r, s) = m
    if p == 0 and r == 0:
        raise ValueError("matrix is singular")
    import math

    g = math.gcd(p, r)
    # x p + y r = g via the extended algorithm.
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = p, r
    while bb:
        t = aa // bb
        aa, bb = bb, aa - t * bb
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    x, y = x0, y0
    if aa < 0:
        x, y, aa = -x, -y, -aa
    assert aa == g
    w = ((x, y), (-(r // g), p // g))
    h12 = x * q + y * s
    h22 = -(r // g) * q + (p // g) * s
    if h22 < 0:
        w = (w[0], (-w[1][0], -w[1][1]))
        h22 = -h22
    t = h12 // h22
    h12 -= t * h22
    w = ((w[0][0] - t * w[1][0], w[0][1] - t * w[1][1]), w[1])
    return ((g, h12), (0, h22)), w


def coset_label(rep: CosetRep) -> tuple:
    """Canonical invariant of the right coset Gamma rep; equal iff same coset.

    The block triangular elements of Gamma are [[U, S U^{-T}], [0, U^{-T}]]
    with U in GL2(Z) and S symmetric integral; they send D to W D (W = U^{-T}
    free in GL2(Z)) and B to W^{-T} B + S (W D).  The Hermite form of D pins
    W, after which B is reduced to a canonical residue modulo the lattice of
    symmetric multiples of the Hermite form.
    """
    h, w = _hnf2(rep.d)
    (a, b), (_, d) = h
    # W^{-T} for unimodular W via the adjugate.
    (w1, w2), (w3, w4) = w
    det = w1 * w4 - w2 * w3
    wit = ((w4 * det, -w3 * det), (-w2 * det, w1 * det))
    (b1, b2), (b3, b4) = rep.b
    v = [
        wit[0][0] * b1 + wit[0][1] * b3,
        wit[0][0] * b2 + wit[0][1] * b4,
        wit[1][0] * b1 + wit[1][1] * b3,
        wit[1][0] * b2 + wit[1][1] * b4,
    ]
    # Lattice rows (a, b, 0, 0), (0, d, a, b), (0, 0, 0, d) from S = E11,
    # E12 + E21, E22; reduce in echelon order (pivots in columns 1, 2, 4).
    t = v[0] // a
    v[0] -= t * a
    v[1] -= t * b
    t = v[1] // d
    v[1] -= t * d
    v[2] -= t * a
    v[3] -= t * b
    t = v[3] // d
    v[3] -= t * d
    return (rep.similitude, a, b, d, v[0], v[1], v[2], v[3])


def cosets_equal(r1: CosetRep, r2: CosetRep) -> bool:
    """Whether Gamma r1 = Gamma r2, by testing r1 r2^{-1} for membership.

    The product of triangular similitude matrices is triangular, so
    membership in Sp(4, Z) reduces to integrality plus U^T W = I and V^T W
    symmetric for r1 r2^{-1} = [[U, V], [0, W]].  Quadratic in matrix size;
    coset_label gives the same verdict in constant time per representative.
    """
    if r1.similitude != r2.similitude:
        return False

    def inv2(m):
        (p, q), (r, s) = m
        det = mpq(p * s - q * r)
        return ((s / det, -q / det), (-r / det, p / det))

    def mul2(m, n):
        return (
            (
                m[0][0] * n[0][0] + m[0][1] * n[1][0],
                m[0][0] * n[0][1] + m[0][1] * n[1][1],
            ),
            (
                m[1][0] * n[0][0] + m[1][1] * n[1][0],
                m[1][0] * n[0][1] + m[1][1] * n[1][1],
            ),
        )

    ia2 = inv2(r2.a)
    id2 = inv2(r2.d)
    u = mul2(r1.a, ia2)
    w = mul2(r1.d, id2)
    # V = (B1 - U B2) D2^{-1}.
    ub2 = mul2(u, r2.b)
    diff = (
        (r1.b[0][0] - ub2[0][0], r1.b[0][1] - ub2[0][1]),
        (r1.b[1][0] - ub2[1][0], r1.b[1][1] - ub2[1][1]),
    )
    v = mul2(diff, id2)
    for m in (u, v, w):
        for row in m:
            for entry in row:
                if mpq(entry).denominator != 1:
                    return False
    utw = mul2(((u[0][0], u[1][0]), (u[0][1], u[1][1])), w)
    if utw != ((1, 0), (0, 1)):
        return False
    vtw = mul2(((v[0][0], v[1][0]), (v[0][1], v[1][1])), w)
    return vtw[0][1] == vtw[1][0]


def act_on_point(
    rep: CosetRep, z1: ComplexBox, z2: ComplexBox, z3: ComplexBox
) -> Tuple[ComplexBox, ComplexBox, ComplexBox]:
    """Image (A Z + B) D^{-1} of Z = [[z1, z3], [z3, z2]].

    D^{-1} enters as adj(D) / det(D) with exact rational scaling; the (1, 2)
    entry of the image is computed once and reused for both off-diagonal
    slots, so the result is exactly symmetric.
    """
    (a1, a2), (a3, a4) = rep.a
    (b1, b2), (b3, b4) = rep.b
    (d1, d2), (d3, d4) = rep.d
    det = d1 * d4 - d2 * d3
    # W = A Z + B over the box field.
    w11 = z1 * a1 + z3 * a2 + b1
    w12 = z3 * a1 + z2 * a2 + b2
    w21 = z1 * a3 + z3 * a4 + b3
    w22 = z3 * a3 + z2 * a4 + b4
    # Z' = W adj(D) / det with adj(D) = [[d4, -d2], [-d3, d1]].
    z1p = (w11 * d4 + w12 * (-d3)).scale(mpq(1, det))
    z2p = (w21 * (-d2) + w22 * d1).scale(mpq(1, det))
    z3p = (w11 * (-d2) + w12 * d1).scale(mpq(1, det))
    return z1p, z2p, z3p
