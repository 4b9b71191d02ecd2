"""
Point sets on S^d, cap geometry and separation quantities.

Points are stored and compared in Cartesian coordinates in R^{d+1}; angles
are derived on demand.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog
from scipy.optimize import bisect
from scipy.spatial import cKDTree

from .errors import DomainError, PointSetFormatError, RootFindingError
from .quadrature import DEFAULT_TOLERANCE, zonal_integral

log = structlog.get_logger(__name__)

NORM_TOLERANCE = 1e-10
RENORMALIZE_THRESHOLD = 1e-8


# ============================================================
# POINT SETS
# ============================================================

@dataclass(frozen=True, eq=False)
class PointSet:
    """
    N unit vectors in R^{d+1}. The coordinate array is read-only after
    construction.
    """
    dimension: int
    points: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise DomainError(f"sphere dimension d must be an integer >= 2, got {self.dimension}")
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise PointSetFormatError("points must be a non-empty 2-D array")
        if pts.shape[1] != self.dimension + 1:
            raise PointSetFormatError(
                f"points on S^{self.dimension} need {self.dimension + 1} coordinates, got {pts.shape[1]}"
            )
        deviation = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        # NaN compares False, so test the accepted side
        bad = np.flatnonzero(~(deviation <= NORM_TOLERANCE))
        if bad.size:
            raise PointSetFormatError(
                f"norm deviates from 1 by {deviation[bad[0]]:.3e}", row=int(bad[0]) + 1
            )
        pts.setflags(write=False)
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_array(
        cls,
        points,
        d: Optional[int] = None,
        label: Optional[str] = None,
        renormalize_threshold: float = RENORMALIZE_THRESHOLD
    ) -> "PointSet":
        """
        Build a PointSet, renormalizing rows whose norm is within
        renormalize_threshold of 1 and rejecting the rest.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if d is None:
            d = pts.shape[1] - 1
        norms = np.linalg.norm(pts, axis=1)
        bad = np.flatnonzero(~(np.abs(norms - 1.0) <= renormalize_threshold))
        if bad.size:
            raise PointSetFormatError(
                f"norm {norms[bad[0]]:.12g} deviates from 1 by more than {renormalize_threshold:g}",
                row=int(bad[0]) + 1
            )
        return cls(dimension=d, points=pts / norms[:, None], label=label)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.dimension + 1

    def gram(self) -> np.ndarray:
        """Matrix of inner products <x_i, x_j>, clipped to [-1, 1]."""
        g = self.points @ self.points.T
        return np.clip(g, -1.0, 1.0)

    def rotated(self, q: np.ndarray) -> "PointSet":
        """Apply an orthogonal map q (acting on column vectors)."""
        return PointSet.from_array(self.points @ np.asarray(q).T, self.dimension, self.label)

    def to_text(self, header: Optional[Dict[str, Any]] = None) -> str:
        lines = [f"# {key}: {value}" for key, value in (header or {}).items()]
        lines.extend(" ".join(f"{c:.17g}" for c in row) for row in self.points)
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "d": self.dimension,
            "N": self.N,
            "label": self.label,
            "points": self.points.tolist(),
        }


def load_point_set(
    path: Union[str, Path],
    d: int,
    renormalize_threshold: float = RENORMALIZE_THRESHOLD
) -> PointSet:
    """
    Load a point set from the text format: one point per line, d+1
    whitespace-separated decimals, '#' starts a comment.

    Raises:
        FileNotFoundError: path does not exist
        PointSetFormatError: malformed line, wrong column count, or a norm
            deviating from 1 by more than renormalize_threshold (with row index)
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Point-set file not found: {path}")
    if d < 2:
        raise DomainError(f"sphere dimension d must be >= 2, got {d}")

    rows: List[List[float]] = []
    for line in path.read_text().splitlines():
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        row_index = len(rows) + 1
        tokens = content.split()
        if len(tokens) != d + 1:
            raise PointSetFormatError(f"expected {d + 1} columns, found {len(tokens)}", row=row_index)
        try:
            values = [float(tok) for tok in tokens]
        except ValueError:
            raise PointSetFormatError(f"malformed coordinate in line {line.strip()!r}", row=row_index)
        if not all(math.isfinite(v) for v in values):
            raise PointSetFormatError(f"non-finite coordinate in line {line.strip()!r}", row=row_index)
        rows.append(values)

    if not rows:
        raise PointSetFormatError(f"no points found in {path}")

    point_set = PointSet.from_array(rows, d, label=path.name, renormalize_threshold=renormalize_threshold)
    log.debug("point_set_loaded", path=str(path), N=point_set.N, d=d)
    return point_set


def save_point_set(path: Union[str, Path], X: PointSet, header: Optional[Dict[str, Any]] = None) -> Path:
    """Write X in the text format with '# key: value' header comments."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(X.to_text(header))
    log.info("point_set_saved", path=str(path), N=X.N, d=X.dimension)
    return path


# ============================================================
# SEPARATION
# ============================================================

def min_separation(X: PointSet) -> float:
    """min_{i != j} |x_i - x_j|; 0.0 when a point is duplicated."""
    if X.N < 2:
        raise DomainError("separation is undefined for fewer than 2 points")
    distances, _ = cKDTree(X.points).query(X.points, k=2)
    return float(distances[:, 1].min())


def measured_separation_constant(X: PointSet) -> float:
    """min_separation * N^(1/d), the measured c1 of the set."""
    return min_separation(X) * X.N ** (1.0 / X.dimension)


def extreme_inner_products(X: PointSet) -> Tuple[float, float]:
    """Largest and smallest <x_i, x_j> over i != j, from nearest-neighbour distances."""
    if X.N < 2:
        raise DomainError("inner products need at least 2 points")
    tree = cKDTree(X.points)
    near, _ = tree.query(X.points, k=2)
    # nearest neighbour of -x_i other than x_i itself (matters only when N == 2)
    far, idx = tree.query(-X.points, k=2)
    own = idx[:, 0] == np.arange(X.N)
    opposite = np.where(own, far[:, 1], far[:, 0])
    largest = 1.0 - 0.5 * float(near[:, 1].min()) ** 2
    smallest = -1.0 + 0.5 * float(opposite.min()) ** 2
    return largest, smallest


def coincident_pairs(X: PointSet, tol: float = 0.0) -> List[Tuple[int, int]]:
    """Index pairs i < j with |x_i - x_j| <= tol."""
    return sorted(cKDTree(X.points).query_pairs(r=tol))


def antipodal_pairs(X: PointSet, tol: float = 1e-6) -> List[Tuple[int, int]]:
    """Index pairs i < j with |x_i + x_j| <= tol, i.e. <x_i, x_j> close to -1."""
    tree = cKDTree(X.points)
    pairs = set()
    for i, neighbours in enumerate(tree.query_ball_point(-X.points, r=tol)):
        for j in neighbours:
            if i != j:
                pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


# ============================================================
# CAPS
# ============================================================

@dataclass(frozen=True, eq=False)
class CapSpec:
    """Spherical cap S(center; phi) = {y : <center, y> >= cos phi}."""
    center: np.ndarray
    angular_radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=np.float64)
        if abs(np.linalg.norm(c) - 1.0) > NORM_TOLERANCE:
            raise DomainError("cap center must be a unit vector")
        if not 0.0 < self.angular_radius <= math.pi:
            raise DomainError(f"angular radius must lie in (0, pi], got {self.angular_radius}")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)

    @property
    def dimension(self) -> int:
        return self.center.shape[0] - 1

    @property
    def area(self) -> float:
        return cap_area(self.dimension, self.angular_radius)

    def contains(self, X: PointSet) -> int:
        """Number of points of X inside the cap."""
        return int(np.count_nonzero(X.points @ self.center >= math.cos(self.angular_radius)))


def _cap_measure(d: int, lower: float, tol: float = DEFAULT_TOLERANCE) -> float:
    return zonal_integral(np.ones_like, d, lower=lower, upper=1.0, tol=tol)


def cap_area(d: int, phi: float) -> float:
    """
    Normalized surface area of a cap of angular radius phi on S^d:
    c_d * int_{cos phi}^1 (1 - t^2)^(d/2 - 1) dt, a value in (0, 1].
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if not 0.0 < phi <= math.pi:
        raise DomainError(f"angular radius must lie in (0, pi], got {phi}")
    lower = -1.0 if phi == math.pi else math.cos(phi)
    return _cap_measure(d, lower)


def alpha_N(c1: float, N: int, d: int) -> float:
    """
    arccos(1 - c1^2 / (8 N^(2/d))): the angular radius of caps that hold at
    most one point of a set with separation c1 N^(-1/d).
    """
    if c1 <= 0 or N < 1:
        raise DomainError(f"need c1 > 0 and N >= 1, got c1={c1}, N={N}")
    arg = 1.0 - c1 ** 2 / (8.0 * N ** (2.0 / d))
    if not -1.0 <= arg <= 1.0:
        raise DomainError(f"arccos argument {arg} outside [-1, 1]")
    return math.acos(arg)


def alpha_N_bracket(c1: float, N: int, d: int) -> Tuple[float, float]:
    """Lower and upper bounds for alpha_N from sin(x) <= x <= (pi/2) sin(x)."""
    root = math.sqrt(1.0 - c1 ** 2 / (16.0 * N ** (2.0 / d)))
    lower = root * c1 / (2.0 * N ** (1.0 / d))
    upper = (math.pi / 4.0) * root * c1 / N ** (1.0 / d)
    return lower, upper


def beta_N(d: int, N: int, xtol: float = 1e-14) -> Tuple[float, float]:
    """
    Solve for the cap of measure exactly 1/N.

    Returns:
        (beta_N, b0) with beta_N = arccos(1 - b0 N^(-2/d)) and
        cap_area(d, beta_N) = 1/N.
    """
    if d < 2 or N < 2:
        raise DomainError(f"need d >= 2 and N >= 2, got d={d}, N={N}")
    target = 1.0 / N

    def excess(height: float) -> float:
        return _cap_measure(d, 1.0 - height) - target

    lo, hi = np.finfo(float).tiny, 2.0
    if excess(lo) >= 0 or excess(hi) <= 0:
        raise RootFindingError(f"cap height not bracketed for d={d}, N={N}")
    height = bisect(excess, lo, hi, xtol=xtol, maxiter=500)

    b0 = height * N ** (2.0 / d)
    return math.acos(1.0 - height), b0
