"""Fourier index bookkeeping and exact truncated series algebra."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from siegel_hecke.qexp import (
    SeriesFormatError,
    TruncatedSeries,
    count_indices,
    dump_series,
    enumerate_indices,
    index_disc,
    index_trace,
    indices_of_trace,
    is_psd,
    load_series,
    reduce_index,
)


def brute_force_trace(t):
    out = []
    for a in range(t + 1):
        c = t - a
        for b in range(-2 * t, 2 * t + 1):
            if b * b <= 4 * a * c:
                out.append((a, b, c))
    return sorted(out)


def test_trace_zero_and_one():
    assert enumerate_indices(0) == [(0, 0, 0)]
    assert list(indices_of_trace(1)) == [(0, 0, 1), (1, 0, 0)]


def test_trace_two_has_seven():
    assert len(list(indices_of_trace(2))) == 7


def test_enumeration_matches_brute_force():
    for t in range(9):
        got = [idx for idx in enumerate_indices(t) if index_trace(idx) == t]
        assert sorted(got) == brute_force_trace(t)
        assert got == sorted(got)  # lexicographic within a trace


def test_per_trace_count_formula():
    # 1 + 2*floor(2*sqrt(a(t-a))) summed over a, and the 6t^2 ceiling.
    import math

    for t in range(1, 30):
        n = len(list(indices_of_trace(t)))
        formula = sum(1 + 2 * math.isqrt(4 * a * (t - a)) for a in range(t + 1))
        assert n == formula
        assert n <= 6 * t * t


def test_count_indices_consistent():
    for t in range(8):
        assert count_indices(t) == len(enumerate_indices(t))


def test_psd_and_disc():
    assert is_psd((1, 2, 1))
    assert not is_psd((1, 3, 1))
    assert not is_psd((-1, 0, 1))
    assert index_disc((1, 1, 1)) == 3
    assert index_disc((2, 2, 2)) == 12


def test_reduce_index_canonicalizes():
    # GL(2, Z) reduction lands in the 0 <= b <= a <= c chamber, preserves
    # the discriminant (trace generally changes), and is idempotent.
    rng = random.Random(7)
    for _ in range(200):
        a = rng.randrange(0, 9)
        c = rng.randrange(0, 9)
        bmax = 4 * a * c
        b = rng.randrange(-bmax, bmax + 1) if bmax else 0
        if b * b > 4 * a * c:
            continue
        r = reduce_index((a, b, c))
        assert index_disc(r) == index_disc((a, b, c))
        assert 0 <= r[1] <= r[0] <= r[2] or r[0] == 0
        assert reduce_index(r) == r


# -- series algebra -----------------------------------------------------------


def random_series(rng, trace_bound, density=0.6):
    coeffs = {}
    for idx in enumerate_indices(trace_bound):
        if rng.random() < density:
            coeffs[idx] = mpq(rng.randrange(-9, 10), rng.randrange(1, 5))
    return TruncatedSeries(trace_bound, coeffs)


small_series = st.integers(min_value=0, max_value=2**30).map(
    lambda seed: random_series(random.Random(seed), 3)
)


def brute_mul(f, g, bound):
    out = {}
    for n1, a1 in f.coeffs.items():
        for n2, a2 in g.coeffs.items():
            n = (n1[0] + n2[0], n1[1] + n2[1], n1[2] + n2[2])
            if index_trace(n) <= bound:
                out[n] = out.get(n, mpq(0)) + a1 * a2
    return TruncatedSeries(bound, {k: v for k, v in out.items() if v})


def test_mul_matches_brute_force_convolution():
    rng = random.Random(11)
    for _ in range(10):
        f = random_series(rng, 4)
        g = random_series(rng, 4)
        assert f * g == brute_mul(f, g, 4)


@settings(max_examples=30, deadline=None)
@given(small_series, small_series)
def test_mul_commutative(f, g):
    assert f * g == g * f


@settings(max_examples=20, deadline=None)
@given(small_series, small_series, small_series)
def test_mul_associative_and_distributive(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


def test_unit_series_is_identity():
    rng = random.Random(3)
    f = random_series(rng, 5)
    one = TruncatedSeries(5, {(0, 0, 0): mpq(1)})
    assert f * one == f


def test_add_sub_scale():
    rng = random.Random(5)
    f = random_series(rng, 4)
    zero = TruncatedSeries(4)
    assert f + zero == f
    assert (f - f).is_zero()
    assert f.scale(2) == f + f
    assert f.scale(mpq(1, 3)).scale(3) == f


def test_add_truncates_to_min_bound():
    f = TruncatedSeries(5, {(2, 0, 3): mpq(1)})
    g = TruncatedSeries(3, {(1, 0, 1): mpq(1)})
    s = f + g
    assert s.trace_bound == 3
    assert s.coefficient((2, 0, 3)) == 0
    assert s.coefficient((1, 0, 1)) == 1


def test_mul_truncation_drops_high_trace():
    f = TruncatedSeries(2, {(1, 0, 1): mpq(1)})
    sq = f * f
    assert sq.trace_bound == 2
    assert sq.is_zero()  # the product index (2,0,2) has trace 4


def test_restrict():
    rng = random.Random(9)
    f = random_series(rng, 6)
    r = f.restrict(3)
    assert r.trace_bound == 3
    for idx, val in r.coeffs.items():
        assert index_trace(idx) <= 3 and f.coefficient(idx) == val
    assert all(index_trace(i) <= 3 for i in r.support())
    with pytest.raises(ValueError):
        f.restrict(7)


def test_diagonal_of_constant():
    one = TruncatedSeries(4, {(0, 0, 0): mpq(1)})
    assert one.diagonal() == {(0, 0): mpq(1)}


def test_diagonal_of_product_is_convolution():
    # Setting z3 = 0 is multiplicative, so the diagonal of a product must
    # equal the 2-variable convolution of the diagonals.
    rng = random.Random(13)
    f = random_series(rng, 4)
    g = random_series(rng, 4)
    df, dg, dfg = f.diagonal(), g.diagonal(), (f * g).diagonal()
    conv = {}
    for (a1, c1), v1 in df.items():
        for (a2, c2), v2 in dg.items():
            if a1 + a2 + c1 + c2 <= 4:
                key = (a1 + a2, c1 + c2)
                conv[key] = conv.get(key, mpq(0)) + v1 * v2
    conv = {k: v for k, v in conv.items() if v}
    assert dfg == conv


def test_symmetry_defects_flags_asymmetry():
    sym = TruncatedSeries(2, {(1, 1, 1): mpq(1), (1, -1, 1): mpq(1)})
    assert sym.symmetry_defects() == []
    # (1,-1,1) reduces to (1,1,1), whose coefficient here is 0: a defect.
    broken = TruncatedSeries(2, {(1, -1, 1): mpq(1)})
    assert broken.symmetry_defects() != []


def test_invalid_coefficients_rejected():
    with pytest.raises(ValueError):
        TruncatedSeries(3, {(1, 3, 1): mpq(1)})  # not psd
    with pytest.raises(ValueError):
        TruncatedSeries(1, {(2, 0, 2): mpq(1)})  # beyond bound


# -- serialization --------------------------------------------------------------


def test_dump_load_roundtrip_bit_exact():
    rng = random.Random(17)
    f = random_series(rng, 5, density=0.4)
    text = dump_series(f, weight=10)
    weight, back = load_series(text)
    assert weight == 10
    assert back == f
    assert dump_series(back, weight=10) == text


def test_dump_is_sorted_and_headed():
    f = TruncatedSeries(2, {(1, 1, 1): mpq(3), (0, 0, 1): mpq(-2)})
    lines = dump_series(f, weight=4).splitlines()
    assert lines[0] == "SIEGELQEXP 1"
    assert lines[1].split() == ["4", "2", "2"]
    assert lines[2].startswith("0 0 1 ")


def test_load_rejects_garbage():
    with pytest.raises(SeriesFormatError):
        load_series("not a series\n")
    good = dump_series(TruncatedSeries(1, {(1, 0, 0): mpq(1)}), weight=4)
    truncated = "\n".join(good.splitlines()[:-1]) + "\n"
    with pytest.raises(SeriesFormatError):
        load_series(truncated)
