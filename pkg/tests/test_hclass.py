"""Generalized Bernoulli numbers and Cohen's H function.

The spot values are pinned by independent finite computations written out
in the tests themselves (character sums, classical Bernoulli numbers), not
by re-running the module's own formulas.
"""

from fractions import Fraction

import pytest
from gmpy2 import mpq
from sympy import bernoulli

from siegel_hecke.hclass import (
    CohenFormatError,
    CohenTable,
    cohen_h,
    dump_cohen_table,
    fundamental_decomposition,
    generalized_bernoulli,
    load_cohen_table,
)


def test_fundamental_decomposition():
    # -N = D f^2 with D fundamental.
    assert fundamental_decomposition(3) == (-3, 1)
    assert fundamental_decomposition(4) == (-4, 1)
    assert fundamental_decomposition(12) == (-3, 2)
    assert fundamental_decomposition(16) == (-4, 2)
    assert fundamental_decomposition(27) == (-3, 3)
    for bad in (0, -3, 5, 6):  # zero, negative, 1 or 2 mod 4
        with pytest.raises(ValueError):
            fundamental_decomposition(bad)


def test_generalized_bernoulli_d_minus_3():
    # B_{1,chi} = (1/3) sum_{a=1}^{3} chi(a) a with chi(1)=1, chi(2)=-1.
    oracle = Fraction(1 * 1 + (-1) * 2, 3)
    assert generalized_bernoulli(1, -3) == mpq(oracle.numerator, oracle.denominator)
    assert oracle == Fraction(-1, 3)


def test_generalized_bernoulli_d_minus_4():
    # (1/4)(chi(1)*1 + chi(3)*3) = (1 - 3)/4.
    oracle = Fraction(1 - 3, 4)
    assert generalized_bernoulli(1, -4) == mpq(oracle.numerator, oracle.denominator)


def test_generalized_bernoulli_trivial_character():
    # D = 1 reduces to the classical Bernoulli number.
    b6 = Fraction(str(bernoulli(6)))
    assert b6 == Fraction(1, 42)
    assert generalized_bernoulli(6, 1) == mpq(1, 42)


def test_generalized_bernoulli_rejects_nonfundamental():
    with pytest.raises(ValueError):
        generalized_bernoulli(1, -12)


def test_cohen_h_vanishes_mod_4():
    for r in (1, 2, 3, 5):
        assert cohen_h(r, 5) == 0
        assert cohen_h(r, 1) == 0
        assert cohen_h(r, 2) == 0
        assert cohen_h(r, 6) == 0


def test_cohen_h_at_zero_is_zeta():
    # H(r, 0) = zeta(1 - 2r) = -B_{2r}/(2r).
    for r in (1, 2, 3, 4):
        b = Fraction(str(bernoulli(2 * r)))
        assert cohen_h(r, 0) == mpq(-b.numerator, b.denominator * 2 * r)
    assert cohen_h(3, 0) == mpq(-1, 252)


def test_cohen_h_weight_four_values():
    # Pinned by the Jacobi Eisenstein coefficients they must produce:
    # H(3,3)/H(3,0) = 56 and H(3,4)/H(3,0) = 126.
    assert cohen_h(3, 3) == mpq(-2, 9)
    assert cohen_h(3, 4) == mpq(-1, 2)
    assert cohen_h(3, 3) / cohen_h(3, 0) == 56
    assert cohen_h(3, 4) / cohen_h(3, 0) == 126


def test_cohen_h_r1_is_hurwitz_class_number():
    # Classical small Hurwitz class numbers.
    expected = {0: mpq(-1, 12), 3: mpq(1, 3), 4: mpq(1, 2), 7: 1, 8: 1, 11: 1,
                12: mpq(4, 3), 15: 2, 16: mpq(3, 2), 19: 1, 20: 2, 23: 3}
    for n, h in expected.items():
        assert cohen_h(1, n) == h


def test_table_memoizes_and_preloads():
    table = CohenTable()
    v = table.h(3, 3)
    assert (3, 3) in table.known()
    table.preload([(9, 4, mpq(7, 13))])
    assert table.h(9, 4) == mpq(7, 13)
    assert table.h(3, 3) == v


def test_table_roundtrip_and_format_errors():
    table = CohenTable()
    for n in range(0, 20):
        table.h(3, n)
        table.h(5, n)
    text = dump_cohen_table(table.known())
    back = load_cohen_table(text)
    assert back == table.known()
    with pytest.raises(CohenFormatError):
        load_cohen_table("not a table\n")
