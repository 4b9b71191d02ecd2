"""Unit tests for discrete energies and the kernel split."""
import math

import numpy as np
import pytest

from sphere_energy.core.errors import DomainError, SingularInputError
from sphere_energy.core.generators import generate_fibonacci
from sphere_energy.core.geometry import PointSet
from sphere_energy.core.kernels import LOG, RIESZ, head_integral, kernel_head_eval, log_coefficients, riesz_coefficients
from sphere_energy.energy.energy import (
    continuous_log_energy,
    continuous_log_energy_closed_form,
    kernel_for,
    kernel_split_energy,
    log_energy,
    log_energy_inner_form,
    quadrature_exactness,
    riesz_energy,
)


def test_log_energy_tetrahedron(tetrahedron, serial_summer):
    """Test E_log of the tetrahedron: -6 log(8/3)."""
    report = log_energy(tetrahedron, serial_summer)
    assert report.value == pytest.approx(-6 * math.log(8 / 3), abs=1e-12)
    assert report.kind == LOG
    assert report.min_separation == pytest.approx(math.sqrt(8 / 3))


def test_log_energy_octahedron(octahedron, serial_summer):
    """Test E_log of the octahedron: -18 log 2."""
    assert log_energy(octahedron, serial_summer).value == pytest.approx(-18 * math.log(2), abs=1e-12)


def test_riesz_energy_tetrahedron(tetrahedron, serial_summer):
    """Test E_2 of the tetrahedron: 9/4."""
    report = riesz_energy(tetrahedron, 2.0, serial_summer)
    assert report.value == pytest.approx(2.25, abs=1e-12)
    assert report.s == 2.0


def test_riesz_energy_antipodal_pair(antipodal_pair, serial_summer):
    """Test E_2 of two antipodal points: 1/4."""
    assert riesz_energy(antipodal_pair, 2.0, serial_summer).value == pytest.approx(0.25, abs=1e-15)


def test_inner_product_form_agrees(random_points, serial_summer):
    """Test the <x, y> form of the log energy against the distance form."""
    direct = log_energy(random_points, serial_summer).value
    assert log_energy_inner_form(random_points, serial_summer) == pytest.approx(direct, rel=1e-12)


def test_coincident_points_are_singular(tetrahedron, serial_summer):
    """Test duplicates raise SingularInputError naming the pair."""
    doubled = PointSet(2, np.vstack([tetrahedron.points, tetrahedron.points[2:3]]))
    with pytest.raises(SingularInputError) as excinfo:
        log_energy(doubled, serial_summer)
    assert excinfo.value.pairs == [(2, 4)]
    with pytest.raises(SingularInputError):
        riesz_energy(doubled, 3.0, serial_summer)


def test_fewer_than_two_points(serial_summer):
    """Test the empty pair sum."""
    single = PointSet(2, np.array([[1.0, 0.0, 0.0]]))
    with pytest.raises(DomainError):
        log_energy(single, serial_summer)
    assert log_energy(single, serial_summer, allow_empty=True).value == 0.0


def test_riesz_exponent_must_be_positive(tetrahedron):
    """Test s <= 0 is rejected."""
    with pytest.raises(DomainError):
        riesz_energy(tetrahedron, 0.0)


def test_continuous_log_energy_s2():
    """Test V_log(S^2) = 1/2 - log 2."""
    assert continuous_log_energy(2) == pytest.approx(0.5 - math.log(2), abs=1e-12)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_continuous_log_energy_closed_form(d):
    """Test quadrature against the digamma closed form."""
    assert continuous_log_energy(d) == pytest.approx(continuous_log_energy_closed_form(d), abs=1e-11)


def test_energy_rotation_invariant(random_points, serial_summer):
    """Test energies do not change under an orthogonal map."""
    q, _ = np.linalg.qr(np.random.default_rng(5).standard_normal((3, 3)))
    rotated = random_points.rotated(q)
    assert log_energy(rotated, serial_summer).value == pytest.approx(
        log_energy(random_points, serial_summer).value, rel=1e-12)
    assert riesz_energy(rotated, 3.0, serial_summer).value == pytest.approx(
        riesz_energy(random_points, 3.0, serial_summer).value, rel=1e-12)


@pytest.fixture(scope="module")
def riesz_series():
    return riesz_coefficients(2.0, 4.0, 2, 2000)


@pytest.fixture(scope="module")
def log_series():
    return log_coefficients(5.0, 2, 2000)


def test_split_total_matches_riesz_energy(tetrahedron, serial_summer, riesz_series):
    """Test head + tail reproduces E_2 of the tetrahedron."""
    split = kernel_split_energy(tetrahedron, RIESZ, None, 2, 2000, s=2.0, coeffs=riesz_series, summer=serial_summer)
    assert split.total == pytest.approx(2.25, rel=1e-8)
    head, tail = split
    assert head + tail == split.total
    assert split.to_dict()["total"] == split.total


def test_split_total_matches_log_energy(tetrahedron, serial_summer, log_series):
    """Test head + tail reproduces E_log of the tetrahedron."""
    split = kernel_split_energy(tetrahedron, LOG, None, 2, 2000, coeffs=log_series, summer=serial_summer)
    assert split.total == pytest.approx(-6 * math.log(8 / 3), rel=1e-8)


def test_split_head_on_a_design(tetrahedron, serial_summer, riesz_series):
    """Test that on a 2-design the head is fixed by the head integral and H_t(1)."""
    t, N = 2, tetrahedron.N
    scale = riesz_series.distance_scale
    split = kernel_split_energy(tetrahedron, RIESZ, None, t, 2000, s=2.0, coeffs=riesz_series, summer=serial_summer)
    at_one = scale * kernel_head_eval(riesz_series, t, 1.0)
    expected = 0.5 * (N ** 2 * head_integral(2.0, 4.0, 2, t) - N * at_one)
    assert split.head == pytest.approx(expected, rel=1e-12)


def test_split_rejects_antipodal(octahedron, serial_summer, riesz_series):
    """Test that antipodal pairs make the split singular."""
    with pytest.raises(SingularInputError):
        kernel_split_energy(octahedron, RIESZ, None, 3, 2000, s=2.0, coeffs=riesz_series, summer=serial_summer)


def test_split_needs_two_points(riesz_series):
    """Test the size precondition."""
    with pytest.raises(DomainError):
        kernel_split_energy(PointSet(2, np.array([[0.0, 0.0, 1.0]])), RIESZ, None, 1, 10, s=2.0)


def test_split_total_on_fibonacci_lattice(serial_summer):
    """Test split total against the direct energy for a set that is not a design."""
    X = generate_fibonacci(50)
    split = kernel_split_energy(X, RIESZ, 6.0, 4, 3000, s=3.0, summer=serial_summer)
    direct = riesz_energy(X, 3.0, serial_summer).value
    assert split.total == pytest.approx(direct, rel=1e-8)
    assert split.lam == 6.0


def test_kernel_for_defaults():
    """Test default lambdas come from settings."""
    riesz = kernel_for(RIESZ, None, 2, 10, s=3.0)
    assert riesz.lam == pytest.approx(5.0)
    log_kernel = kernel_for(LOG, None, 3, 10)
    assert log_kernel.lam == pytest.approx(6.0)
    with pytest.raises(DomainError):
        kernel_for(RIESZ, None, 2, 10)
    with pytest.raises(DomainError):
        kernel_for("coulomb", 3.0, 2, 10)


@pytest.mark.parametrize("kind", [RIESZ, LOG])
def test_quadrature_exactness_icosahedron(icosahedron, serial_summer, kind):
    """Test that the icosahedron (a 5-design) integrates the degree-5 head exactly."""
    coeffs = riesz_coefficients(2.0, 4.0, 2, 5) if kind == RIESZ else log_coefficients(5.0, 2, 5)
    result = quadrature_exactness(icosahedron, coeffs, 5, serial_summer)
    assert result.relative_gap < 1e-10
    assert result.to_dict()["relative_gap"] == result.relative_gap


def test_quadrature_exactness_fails_off_design(random_points, serial_summer):
    """Test that random points miss the head integral."""
    coeffs = riesz_coefficients(2.0, 4.0, 2, 5)
    assert quadrature_exactness(random_points, coeffs, 5, serial_summer).relative_gap > 1e-3
