"""Pytest configuration and fixtures."""
import pytest
import numpy as np

from sphere_energy.core.geometry import PointSet
from sphere_energy.core.generators import generate_random_uniform
from sphere_energy.energy.summation import PairwiseSummation

GOLDEN = (1 + np.sqrt(5)) / 2


@pytest.fixture
def antipodal_pair():
    """Two antipodal points on S^2."""
    return PointSet(2, np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), label="antipodal")


@pytest.fixture
def tetrahedron():
    """Regular tetrahedron: a 2-design (not a 3-design) on S^2."""
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3)
    return PointSet.from_array(pts, 2, label="tetrahedron")


@pytest.fixture
def octahedron():
    """Regular octahedron: a 3-design on S^2 with three antipodal pairs."""
    pts = np.vstack([np.eye(3), -np.eye(3)])
    return PointSet(2, pts, label="octahedron")


@pytest.fixture
def icosahedron():
    """Regular icosahedron: a 5-design on S^2."""
    pts = []
    for a in (-1.0, 1.0):
        for b in (-GOLDEN, GOLDEN):
            pts.append([0.0, a, b])
            pts.append([a, b, 0.0])
            pts.append([b, 0.0, a])
    return PointSet.from_array(np.array(pts), 2, label="icosahedron")


@pytest.fixture
def cross_polytope_s3():
    """The 8 points +-e_i on S^3: a 3-design."""
    pts = np.vstack([np.eye(4), -np.eye(4)])
    return PointSet(3, pts, label="cross polytope")


@pytest.fixture
def random_points():
    """Seeded uniform random set on S^2."""
    return generate_random_uniform(2, 200, seed=42)


@pytest.fixture
def serial_summer():
    """Single-threaded deterministic pair summation."""
    return PairwiseSummation(threads=1, deterministic=True)


@pytest.fixture
def point_file(tmp_path, tetrahedron):
    """Tetrahedron written in the point-set text format."""
    path = tmp_path / "tetra.txt"
    path.write_text("# regular tetrahedron\n" + tetrahedron.to_text())
    return path


@pytest.fixture
def antipodal_file(tmp_path, antipodal_pair):
    """Antipodal pair written in the point-set text format."""
    path = tmp_path / "antipodal.txt"
    path.write_text(antipodal_pair.to_text())
    return path


@pytest.fixture
def memory_db():
    """Bind the package session factory to a fresh in-memory SQLite database."""
    from sphere_energy.db import db

    db.configure("sqlite://")
    db.init_db()
    yield db
    db.configure("sqlite://")


@pytest.fixture
def fast_options():
    """Construction options small enough for unit tests."""
    from sphere_energy.designs.constructor import ConstructionOptions

    return ConstructionOptions(max_iters=2000, polish_iters=2000, restarts=2, tolerance=1e-13, threads=1)
