"""One-variable q-expansions used as oracles elsewhere: Eisenstein series,
the discriminant cusp form, and the normalized cusp eigenforms of weights
18 and 22 (dimension one, so Hecke eigenvalues are Fourier coefficients).
"""

import pytest
from gmpy2 import mpq
from sympy import divisor_sigma

from siegel_hecke.elliptic import (
    delta_q,
    delta_q_from_eisenstein,
    eisenstein_q,
    newform_q,
    series_mul,
    series_pow,
)


def test_eisenstein_divisor_sums():
    e4 = eisenstein_q(4, 12)
    e6 = eisenstein_q(6, 12)
    assert e4[0] == 1 and e6[0] == 1
    for n in range(1, 12):
        assert e4[n] == 240 * int(divisor_sigma(n, 3))
        assert e6[n] == -504 * int(divisor_sigma(n, 5))


def test_delta_tau_values():
    tau = delta_q(11)
    assert tau[0] == 0 and tau[1] == 1
    assert tau[2] == -24 and tau[3] == 252 and tau[4] == -1472
    assert tau[5] == 4830 and tau[6] == -6048 and tau[10] == -115920


def test_delta_two_routes_agree():
    # eta(q)^24 against (E4^3 - E6^2)/1728.
    assert delta_q(16) == delta_q_from_eisenstein(16)


def test_tau_multiplicativity_spot():
    tau = delta_q(16)
    assert tau[6] == tau[2] * tau[3]
    assert tau[10] == tau[2] * tau[5]
    assert tau[15] == tau[3] * tau[5]
    assert tau[4] == tau[2] ** 2 - 2**11


def test_series_mul_and_pow():
    e4 = eisenstein_q(4, 10)
    e8 = series_mul(e4, e4, 10)
    assert e8 == series_pow(e4, 2, 10)
    # E4^2 = E8, whose coefficients are 480 sigma_7.
    for n in range(1, 10):
        assert e8[n] == 480 * int(divisor_sigma(n, 7))


def test_newform_weight_18():
    f = newform_q(18, 8)
    assert f[1] == 1
    assert f[2] == -528
    assert f[3] == -4284
    assert f[4] == f[2] ** 2 - 2**17
    assert f[6] == f[2] * f[3]


def test_newform_weight_22():
    f = newform_q(22, 8)
    assert f[1] == 1
    assert f[2] == -288
    assert f[3] == -128844
    assert f[4] == f[2] ** 2 - 2**21
    assert f[6] == f[2] * f[3]


def test_newform_rejects_wrong_weight():
    # Only the one-dimensional cusp spaces needed by the lift oracles.
    with pytest.raises(ValueError):
        newform_q(14, 4)


def test_exactness():
    for series in (eisenstein_q(4, 6), delta_q(6), newform_q(18, 6)):
        for c in series:
            assert isinstance(c, type(mpq(0)))
            assert c.denominator == 1
