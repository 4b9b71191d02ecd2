"""Unit tests for Jacobi polynomials and their identities."""
import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from scipy.special import eval_jacobi, poch

from sphere_energy.core.errors import DomainError
from sphere_energy.core.jacobi import (
    JacobiParams,
    connection_expand,
    gamma_ratio,
    jacobi_at_one,
    jacobi_batch,
    jacobi_derivative,
    jacobi_eval,
    jacobi_series,
    pochhammer_direct,
    pochhammer_log,
    zonal_jacobi_integral,
)
from sphere_energy.core.quadrature import zonal_integral

GRID = np.linspace(-1.0, 1.0, 41)


@pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (0.5, 0.5), (3.5, 3.5), (1.0, -0.5), (-0.5, 2.0)])
def test_jacobi_eval_matches_scipy(alpha, beta):
    """Test the recurrence against scipy.special.eval_jacobi."""
    params = JacobiParams(alpha, beta)
    for n in (0, 1, 2, 5, 17, 40):
        np.testing.assert_allclose(jacobi_eval(n, params, GRID), eval_jacobi(n, alpha, beta, GRID),
                                   rtol=1e-10, atol=1e-10)


def test_jacobi_batch_rows_match_eval():
    """Test that the batch table agrees with single-degree evaluation."""
    params = JacobiParams.symmetric(1.5)
    table = jacobi_batch(12, params, GRID)
    assert table.shape == (13, GRID.size)
    for n in range(13):
        np.testing.assert_allclose(table[n], jacobi_eval(n, params, GRID), rtol=1e-13, atol=1e-13)


def test_jacobi_series_split():
    """Test head + tail equals the full series and the head matches a direct sum."""
    params = JacobiParams.symmetric(2.0)
    coeffs = 1.0 / (1.0 + np.arange(30)) ** 2
    full = jacobi_series(coeffs, params, GRID)
    head, tail = jacobi_series(coeffs, params, GRID, split=7)
    direct = sum(coeffs[k] * jacobi_eval(k, params, GRID) for k in range(8))

    np.testing.assert_allclose(head + tail, full, rtol=1e-13, atol=1e-12)
    np.testing.assert_allclose(head, direct, rtol=1e-13, atol=1e-12)


@given(
    n=st.integers(min_value=0, max_value=60),
    alpha=st.floats(min_value=-0.9, max_value=6.0),
)
@hsettings(max_examples=100, deadline=None)
def test_normalization_at_one(n, alpha):
    """Test P_n(1) = (alpha + 1)_n / n!."""
    params = JacobiParams.symmetric(alpha)
    expected = poch(alpha + 1, n) / poch(1, n)
    assert jacobi_eval(n, params, 1.0) == pytest.approx(expected, rel=1e-10)
    assert jacobi_at_one(n, params) == pytest.approx(expected, rel=1e-10)


@given(
    n=st.integers(min_value=0, max_value=40),
    alpha=st.floats(min_value=-0.5, max_value=5.0),
    beta=st.floats(min_value=-0.5, max_value=5.0),
    x=st.floats(min_value=-1.0, max_value=1.0),
)
@hsettings(max_examples=100, deadline=None)
def test_parity(n, alpha, beta, x):
    """Test P_n^(a,b)(-x) = (-1)^n P_n^(b,a)(x)."""
    left = jacobi_eval(n, JacobiParams(alpha, beta), -x)
    right = (-1) ** n * jacobi_eval(n, JacobiParams(beta, alpha), x)
    scale = max(1.0, abs(jacobi_at_one(n, JacobiParams.symmetric(max(alpha, beta)))))
    assert abs(left - right) <= 1e-10 * scale


def test_derivative_matches_finite_differences():
    """Test the derivative identity against central differences."""
    params = JacobiParams(1.5, 0.5)
    x = np.linspace(-0.9, 0.9, 19)
    h = 1e-6
    for n in (1, 3, 8, 15):
        fd = (jacobi_eval(n, params, x + h) - jacobi_eval(n, params, x - h)) / (2 * h)
        np.testing.assert_allclose(jacobi_derivative(n, params, x), fd, rtol=1e-6, atol=1e-6)
    np.testing.assert_array_equal(jacobi_derivative(0, params, x), np.zeros_like(x))


def test_domain_checks():
    """Test parameter and argument domains."""
    with pytest.raises(DomainError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(DomainError):
        jacobi_eval(2, JacobiParams.symmetric(0.0), 1.5)
    with pytest.raises(DomainError):
        jacobi_eval(-1, JacobiParams.symmetric(0.0), 0.5)
    with pytest.raises(DomainError):
        pochhammer_log(0.0, 3)


def test_pochhammer_forms_agree():
    """Test log-space and direct Pochhammer symbols."""
    for a in (0.5, 1.0, 3.25):
        for n in (0, 1, 6, 12):
            assert np.exp(pochhammer_log(a, n)) == pytest.approx(pochhammer_direct(a, n), rel=1e-12)
    assert pochhammer_direct(-2.0, 3) == pytest.approx(0.0)
    assert gamma_ratio(5, 1.0, 1.0) == pytest.approx(1.0)
    assert gamma_ratio(3, 2.0, 1.0) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        gamma_ratio(0, -1.0, 1.0)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("lam", [2.0, 4.0, 5.5])
def test_connection_reconstructs_polynomial(d, lam):
    """Test that the connection coefficients rebuild P_n^(lam-1/2, lam-1/2)."""
    target = JacobiParams.symmetric(lam - 0.5)
    basis = JacobiParams.symmetric(d / 2 - 1)
    for n in range(0, 21):
        rebuilt = sum(c * jacobi_eval(m, basis, GRID) for m, c in connection_expand(n, lam, d))
        np.testing.assert_allclose(rebuilt, jacobi_eval(n, target, GRID), rtol=1e-9, atol=1e-9)


def test_connection_domain():
    """Test that lambda must exceed d/2 - 1/2."""
    with pytest.raises(DomainError):
        connection_expand(4, 0.5, 3)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_zonal_jacobi_integral_matches_quadrature(d):
    """Test the closed-form zonal integral against numerical quadrature."""
    lam = 3.0
    params = JacobiParams.symmetric(lam - 0.5)
    for n in range(0, 13):
        numeric = zonal_integral(lambda x: jacobi_eval(n, params, x), d)
        assert zonal_jacobi_integral(n, lam, d) == pytest.approx(numeric, rel=1e-9, abs=1e-11)


def test_zonal_jacobi_integral_odd_degrees_vanish():
    """Test that odd degrees integrate to zero exactly."""
    values = zonal_jacobi_integral(np.arange(1, 40, 2), 4.0, 2)
    assert np.all(values == 0.0)
    assert zonal_jacobi_integral(0, 4.0, 2) == pytest.approx(1.0)


def test_gamma_ratio_power_asymptotics():
    """Test Gamma(n + a) / Gamma(n + b) ~ n^(a - b) for large n."""
    assert gamma_ratio(1000, 1.5, 0.5) / 1000.0 == pytest.approx(1.0, abs=2e-3)
    assert gamma_ratio(2, 3.0, 1.0) == pytest.approx(12.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_weighted_interior_bound_has_no_growth(alpha):
    """Test max |P_n(cos theta)| sin(theta)^(alpha + 1/2) sqrt(n) stays flat in n."""
    theta = np.linspace(0.1, np.pi - 0.1, 4001)
    weight = np.sin(theta) ** (alpha + 0.5)
    degrees = np.array([16, 32, 64, 128, 256])
    table = jacobi_batch(int(degrees[-1]), JacobiParams.symmetric(alpha), np.cos(theta))

    peaks = np.array([np.max(np.abs(table[n]) * weight) * np.sqrt(n) for n in degrees])
    slope = np.polyfit(np.log(degrees), np.log(peaks), 1)[0]
    assert abs(slope) <= 0.1
