from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemeixner.meixner1d import (
    JacobiParams,
    annihilation_1d,
    c_compose_psi_series,
    free_cumulants,
    genfun_1d_coefficient,
    meixner_poly,
    psi_series,
    vacuum_moment,
    verify_1d_annihilation,
)
from freemeixner.partitions import moment_from_cumulants
from freemeixner.series import Polynomial

params = st.builds(
    JacobiParams,
    st.fractions(min_value=-2, max_value=2, max_denominator=4),
    st.fractions(min_value=0, max_value=2, max_denominator=4),
    st.fractions(min_value=Fraction(1, 4), max_value=2, max_denominator=4),
)


def test_first_polynomials():
    p = JacobiParams(2, 3, 5)
    x = Polynomial.x()
    assert meixner_poly(0, p) == Polynomial.const(1)
    assert meixner_poly(1, p) == x
    assert meixner_poly(2, p) == (x - 2) * x - 5
    assert meixner_poly(3, p) == (x - 2) * meixner_poly(2, p) - 8 * x


def test_semicircle_moments():
    p = JacobiParams(0, 0, 1)
    assert [vacuum_moment(n, p) for n in range(9)] == [1, 0, 1, 0, 2, 0, 5, 0, 14]


def test_free_poisson_cumulants_are_constant():
    # lambda = 1, eta = 0, k = 1 is the free Poisson law shifted to mean zero
    assert free_cumulants(JacobiParams(1, 0, 1), 6) == [0, 1, 1, 1, 1, 1]


def test_psi_series_coefficients():
    s = psi_series(1, 0, 5)
    assert s.coeffs == (0, 1, -1, 1, -1, 1)
    assert c_compose_psi_series(0, 1, 6).coeffs == (0, 0, 1, 0, -1, 0, 1)


@settings(max_examples=20, deadline=None)
@given(params)
def test_moments_agree_with_jacobi_matrix(p):
    # dense monic Jacobi matrix built independently of the path sum
    n = 6
    J = np.zeros((n + 1, n + 1))
    for m in range(n + 1):
        J[m, m] = float(p.diagonal(m))
        if m:
            J[m - 1, m] = float(p.lower(m))
            J[m, m - 1] = 1.0
    e = np.zeros(n + 1)
    e[0] = 1
    w = e.copy()
    for k in range(n + 1):
        assert abs(e @ w - float(vacuum_moment(k, p))) < 1e-9 * max(1, abs(e @ w))
        w = J @ w


@settings(max_examples=20, deadline=None)
@given(params)
def test_genfun_moments_and_annihilation(p):
    for n in range(9):
        assert genfun_1d_coefficient(n, p) == meixner_poly(n, p)
    kappa = free_cumulants(p, 8)
    assert kappa[0] == 0 and kappa[1] == p.k
    for n in range(9):
        assert vacuum_moment(n, p) == moment_from_cumulants(kappa, n)
    assert verify_1d_annihilation(p, 6).passed


def test_annihilation_lowers_degree():
    p = JacobiParams("1/2", "1/3", 2)
    assert annihilation_1d(meixner_poly(4, p), p) == meixner_poly(3, p)
    assert annihilation_1d(Polynomial.const(7), p) == Polynomial()


def test_parameter_validation():
    with pytest.raises(ValueError):
        JacobiParams(0, 0, 0)
    with pytest.raises(ValueError):
        JacobiParams(0, -1, 1)
    with pytest.raises(ValueError):
        meixner_poly(-1, JacobiParams(0, 0, 1))
