"""Igusa generator expansions.

The decisive checks are the diagonal-restriction identities: setting
z3 = 0 turns each degree-2 expansion into a product of one-variable
q-expansions (or 0 for chi10), computed here by the independent elliptic
routines.  They pin the whole construction chain, H-values included, at
every index with trace <= 12.  Spot values then serve as regression pins.
"""

from gmpy2 import mpq

from siegel_hecke.elliptic import delta_q, eisenstein_q
from siegel_hecke.generators import (
    GENERATOR_NAMES,
    jacobi_cusp_c,
    jacobi_eisenstein_c,
    igusa_generator,
)
from siegel_hecke.qexp import TruncatedSeries, enumerate_indices

TRACE = 12


def test_jacobi_eisenstein_values():
    e4 = jacobi_eisenstein_c(4, 8)
    e6 = jacobi_eisenstein_c(6, 8)
    assert e4[0] == 1 and e6[0] == 1
    assert e4[3] == 56 and e4[4] == 126
    assert e6[3] == -88 and e6[4] == -330
    assert all(d % 4 in (0, 3) for d in e4)


def test_jacobi_cusp_values():
    c10 = jacobi_cusp_c(10, 8)
    c12 = jacobi_cusp_c(12, 8)
    assert c10.get(0, 0) == 0 and c12.get(0, 0) == 0
    assert c10[3] == 1 and c10[4] == -2 and c10[7] == -16 and c10[8] == 36
    # c12(4) = 10 is pinned by the chi12 diagonal identity below: with
    # c12(3) = 1 it forces kappa = 12 and the tau-product identity at
    # every (a, c), which fails for any other value.
    assert c12[3] == 1 and c12[4] == 10
    assert all(d % 4 in (0, 3) for d in c10)


def test_generator_weights_and_names(store):
    assert GENERATOR_NAMES == ("E4", "E6", "chi10", "chi12")
    assert store.series("E4", 0).coefficient((0, 0, 0)) == 1
    assert igusa_generator("E4", 0) == TruncatedSeries(0, {(0, 0, 0): mpq(1)})


def test_normalizations(store):
    for name in ("E4", "E6"):
        assert store.series(name, TRACE).coefficient((0, 0, 0)) == 1
    for name in ("chi10", "chi12"):
        s = store.series(name, TRACE)
        assert s.coefficient((0, 0, 0)) == 0
        assert s.coefficient((1, 1, 1)) == 1


def test_integrality(store):
    for name in GENERATOR_NAMES:
        for val in store.series(name, TRACE).coeffs.values():
            assert val.denominator == 1


def test_index_symmetry(store):
    for name in GENERATOR_NAMES:
        assert store.series(name, TRACE).symmetry_defects() == []


def test_diagonal_e4_e6_are_elliptic_products(store):
    for name, k in (("E4", 4), ("E6", 6)):
        elliptic = eisenstein_q(k, TRACE + 1)
        diag = store.series(name, TRACE).diagonal()
        for a in range(TRACE + 1):
            for c in range(TRACE + 1 - a):
                assert diag.get((a, c), mpq(0)) == elliptic[a] * elliptic[c], (
                    name,
                    a,
                    c,
                )


def test_diagonal_chi10_vanishes(store):
    diag = store.series("chi10", TRACE).diagonal()
    assert all(v == 0 for v in diag.values())


def test_diagonal_chi12_is_kappa_tau_tau(store):
    series = store.series("chi12", TRACE)
    kappa = sum(
        (series.coefficient((1, b, 1)) for b in (-2, -1, 0, 1, 2)), mpq(0)
    )
    assert kappa == 12
    tau = delta_q(TRACE + 1)
    diag = series.diagonal()
    for a in range(TRACE + 1):
        for c in range(TRACE + 1 - a):
            assert diag.get((a, c), mpq(0)) == kappa * tau[a] * tau[c], (a, c)


def test_chi10_trace_three_table(store):
    # The full trace <= 3 support: 13 nonzero coefficients, symmetric in
    # b -> -b and a <-> c.  The b = +/-2 entries of the a = 2 row carry the
    # same -2 as their mirrors.
    row1 = {-1: 1, 0: -2, 1: 1}
    row2 = {-2: -2, -1: -16, 0: 36, 1: -16, 2: -2}
    expected = {}
    for b, v in row1.items():
        expected[(1, b, 1)] = mpq(v)
    for b, v in row2.items():
        expected[(1, b, 2)] = mpq(v)
        expected[(2, b, 1)] = mpq(v)
    got = {i: v for i, v in store.series("chi10", 3).coeffs.items() if v}
    assert got == expected
    assert len(got) == 13


def test_chi12_trace_two_table(store):
    got = {i: v for i, v in store.series("chi12", 2).coeffs.items() if v}
    assert got == {
        (1, -1, 1): mpq(1),
        (1, 0, 1): mpq(10),
        (1, 1, 1): mpq(1),
    }


def test_chi10_content_two_index(store):
    # gcd 2 index: both divisors contribute, d=1 through c(12) and d=2
    # through 2^9 c(3).  The diagonal-vanishing identity pins the result.
    c10 = jacobi_cusp_c(10, 16)
    val = c10[12] + 2**9 * c10[3]
    assert store.series("chi10", 4).coefficient((2, 2, 2)) == val == 240


def test_growth_envelopes(store):
    # |a_N| <= C t^d exhaustively over the computed tables.
    from siegel_hecke.evaluate import generator_bound

    for name in GENERATOR_NAMES:
        c, d = generator_bound(name)
        for (a, b, cc), val in store.series(name, TRACE).coeffs.items():
            t = a + cc
            if t == 0:
                continue
            assert abs(val) <= mpq(c) * mpq(t) ** d, (name, (a, b, cc))


def test_min_trace_extension_matches_full_build():
    table = None
    low = igusa_generator("chi12", 4)
    high = igusa_generator("chi12", 6, table, min_trace=5)
    merged = dict(low.coeffs)
    merged.update(high.coeffs)
    assert TruncatedSeries(6, merged) == igusa_generator("chi12", 6)
    # The extension piece holds nothing below its min trace.
    assert all(a + c >= 5 for (a, b, c) in high.support())


def test_full_support_is_reduced_closed(store):
    # Every index with trace <= bound and nonzero reduced representative
    # appears; Eisenstein series are nonzero on all indices.
    s = store.series("E4", 6)
    for idx in enumerate_indices(6):
        assert s.coefficient(idx) != 0
