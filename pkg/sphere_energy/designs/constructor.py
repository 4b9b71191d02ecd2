"""
Construction of well-separated approximate spherical t-designs.

Each restart runs projected gradient descent from a random start: points move
along the tangent gradient and are renormalized after every step. Phase 1
minimizes total_residual plus a softplus penalty on pairs closer than the
separation target; phase 2 polishes the pure residual from the phase-1
optimum. Restarts use independent seeded streams and may run in threads; the
result is picked in restart order, so a fixed seed gives the same design for
any thread count.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Literal, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, Field
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from ..config import settings
from ..core.errors import DomainError
from ..core.generators import generate_random_uniform
from ..core.geometry import PointSet, min_separation
from .certificate import DesignCertificate, verify_design
from .residual import project_tangent, zonal_moments

log = structlog.get_logger(__name__)

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]

ARMIJO = 1e-4
MAX_BACKTRACKS = 40
# smallest residual the double-precision pair sums can resolve
RESIDUAL_FLOOR = 1e-15


class ConstructionOptions(BaseModel):
    """Knobs of the design constructor (configs/construct_options.json)."""

    max_iters: int = Field(default=3000, ge=1, description="Phase-1 iterations per restart")
    polish_iters: int = Field(default=5000, ge=0, description="Phase-2 iterations per restart")
    step_schedule: Literal["bb", "armijo", "lbfgs"] = Field(
        default="bb", description="Barzilai-Borwein, plain backtracking, or scipy L-BFGS-B"
    )
    initial_move: float = Field(default=0.1, gt=0, description="Largest point displacement of the first step")
    separation_weight: float = Field(default=1e-3, ge=0, description="Weight of the softplus separation penalty")
    separation_factor: float = Field(default=1.0, gt=0, description="Separation target is factor * N^(-1/d)")
    restarts: int = Field(default=4, ge=1, description="Independent random starts")
    tolerance: float = Field(default_factory=lambda: settings.design_tolerance, gt=0,
                             description="Total residual that counts as a design")
    polish_ratio: float = Field(default=1e-2, gt=0, le=1, description="Phase-2 target as a fraction of tolerance")
    threads: int = Field(default_factory=lambda: settings.threads, ge=1, description="Restarts run concurrently")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ConstructionOptions":
        return cls.model_validate_json(Path(path).read_text())


@dataclass
class RestartOutcome:
    """Best point set of a single restart."""
    index: int
    points: np.ndarray
    residual: float
    separation: float
    iterations: int

    def summary(self) -> dict:
        return {
            "restart": self.index,
            "residual": self.residual,
            "min_separation": self.separation,
            "iterations": self.iterations,
        }


@dataclass
class ConstructionResult:
    """Chosen design, its certificate, and the per-restart record."""
    point_set: PointSet
    certificate: DesignCertificate
    restarts: List[RestartOutcome] = field(default_factory=list)
    success: bool = False
    elapsed_seconds: float = 0.0


def default_design_size(d: int, t: int, factor: Optional[float] = None) -> int:
    """N = max(2, ceil(c (t + 1)^d)); c = 1 gives (t+1)^2 points on S^2."""
    factor = settings.design_size_factor if factor is None else factor
    return max(2, math.ceil(factor * (t + 1) ** d))


def minimum_design_size(d: int, t: int) -> int:
    """Lower bound on the size of any t-design on S^d (even and odd degree cases)."""
    e = t // 2
    if t % 2 == 0:
        return math.comb(d + e, d) + math.comb(d + e - 1, d)
    return 2 * math.comb(d + e, d)


def _normalize(points: np.ndarray) -> np.ndarray:
    return points / np.linalg.norm(points, axis=1)[:, None]


def _separation_penalty(points: np.ndarray, target: float) -> Tuple[float, np.ndarray]:
    """
    width * sum_{i<j} softplus((target - r_ij) / width), width = target / 10,
    and its Euclidean gradient. Pairs farther than target + 20 width are skipped.
    """
    width = 0.1 * target
    grad = np.zeros_like(points)
    pairs = cKDTree(points).query_pairs(r=target + 20 * width, output_type="ndarray")
    if pairs.size == 0:
        return 0.0, grad
    i, j = pairs[:, 0], pairs[:, 1]
    diff = points[i] - points[j]
    r = np.linalg.norm(diff, axis=1)
    z = (target - r) / width
    value = width * float(np.sum(np.logaddexp(0.0, z)))
    # d/dr of width * softplus((target - r)/width) = -sigmoid(z)
    coef = -(0.5 * (1.0 + np.tanh(0.5 * z))) / np.maximum(r, 1e-300)
    contrib = coef[:, None] * diff
    np.add.at(grad, i, contrib)
    np.add.at(grad, j, -contrib)
    return value, grad


class DesignConstructor:
    """
    Builds an approximate t-design of N points on S^d.

    Supports:
    - Barzilai-Borwein steps with Armijo backtracking
    - plain Armijo backtracking
    - scipy L-BFGS-B on the renormalized coordinates
    """

    def __init__(self, d: int, t: int, N: Optional[int] = None, options: Optional[ConstructionOptions] = None):
        if d < 2:
            raise DomainError(f"d must be >= 2, got {d}")
        if t < 1:
            raise DomainError(f"t must be >= 1, got {t}")
        self.d = d
        self.t = t
        self.N = default_design_size(d, t) if N is None else N
        self.options = options or ConstructionOptions()

        lower = minimum_design_size(d, t)
        if self.N < lower:
            raise DomainError(f"no {t}-design on S^{d} has fewer than {lower} points, got N={self.N}")

        self.separation_target = self.options.separation_factor * self.N ** (-1.0 / d)

    # --------------------------------------------------------
    # objectives
    # --------------------------------------------------------

    def residual_objective(self, points: np.ndarray) -> Tuple[float, np.ndarray]:
        residuals, grad = zonal_moments(points, self.d, self.t, gradient=True)
        return float(residuals.sum()), project_tangent(points, grad)

    def penalized_objective(self, points: np.ndarray) -> Tuple[float, np.ndarray]:
        value, grad = self.residual_objective(points)
        weight = self.options.separation_weight
        if weight == 0:
            return value, grad
        penalty, pgrad = _separation_penalty(points, self.separation_target)
        return value + weight * penalty, grad + weight * project_tangent(points, pgrad)

    # --------------------------------------------------------
    # descent
    # --------------------------------------------------------

    def _descend(self, points: np.ndarray, objective: Objective, iters: int, target: float) -> Tuple[np.ndarray, int]:
        if self.options.step_schedule == "lbfgs":
            return self._lbfgs(points, objective, iters)

        f, g = objective(points)
        step = self.options.initial_move / max(float(np.linalg.norm(g, axis=1).max()), 1e-300)
        prev_points = prev_grad = None

        for k in range(iters):
            if f <= target:
                return points, k
            gnorm2 = float(np.sum(g * g))
            if not np.isfinite(gnorm2) or gnorm2 == 0.0:
                return points, k

            if self.options.step_schedule == "bb" and prev_points is not None:
                s = points - prev_points
                y = g - prev_grad
                sy = abs(float(np.sum(s * y)))
                if sy > 0:
                    step = float(np.sum(s * s)) / sy

            for _ in range(MAX_BACKTRACKS):
                candidate = _normalize(points - step * g)
                f_new, g_new = objective(candidate)
                if f_new <= f - ARMIJO * step * gnorm2:
                    break
                step *= 0.5
            else:
                # no sufficient decrease at any step size
                return points, k

            prev_points, prev_grad = points, g
            points, f, g = candidate, f_new, g_new
            if self.options.step_schedule == "armijo":
                step *= 2.0

        return points, iters

    def _lbfgs(self, points: np.ndarray, objective: Objective, iters: int) -> Tuple[np.ndarray, int]:
        shape = points.shape

        def fun(flat: np.ndarray):
            raw = flat.reshape(shape)
            norms = np.linalg.norm(raw, axis=1)[:, None]
            value, tangent = objective(raw / norms)
            return value, (tangent / norms).ravel()

        result = minimize(
            fun, points.ravel(), jac=True, method="L-BFGS-B",
            options={"maxiter": max(iters, 1), "gtol": 1e-14, "ftol": 1e-16}
        )
        return _normalize(result.x.reshape(shape)), int(result.nit)

    def _run_restart(self, index: int, seed_seq: np.random.SeedSequence) -> RestartOutcome:
        rng = np.random.default_rng(seed_seq)
        points = np.array(generate_random_uniform(self.d, self.N, rng).points)

        polish_target = max(self.options.tolerance * self.options.polish_ratio, RESIDUAL_FLOOR)
        points, n1 = self._descend(points, self.penalized_objective, self.options.max_iters, target=polish_target)
        points, n2 = self._descend(points, self.residual_objective, self.options.polish_iters, target=polish_target)

        residual = float(zonal_moments(points, self.d, self.t).sum())
        separation = float(min_separation(PointSet(self.d, points)))
        log.debug("restart_finished", restart=index, residual=residual, separation=separation, iterations=n1 + n2)
        return RestartOutcome(index, points, residual, separation, n1 + n2)

    def _pick(self, outcomes: List[RestartOutcome]) -> Tuple[RestartOutcome, bool]:
        good = [
            o for o in outcomes
            if o.residual <= self.options.tolerance and o.separation >= self.separation_target
        ]
        pool = good or outcomes
        # min() keeps the first of equal residuals, i.e. the earliest restart
        return min(pool, key=lambda o: o.residual), bool(good)

    def construct(self, seed: int = 0) -> ConstructionResult:
        """Run all restarts and certify the best configuration."""
        started = time.perf_counter()
        log.info("construction_started", d=self.d, t=self.t, N=self.N, seed=seed,
                 restarts=self.options.restarts, schedule=self.options.step_schedule)

        streams = np.random.SeedSequence(seed).spawn(self.options.restarts)
        if self.options.threads > 1 and self.options.restarts > 1:
            with ThreadPoolExecutor(max_workers=self.options.threads) as executor:
                outcomes = list(executor.map(self._run_restart, range(len(streams)), streams))
        else:
            outcomes = [self._run_restart(i, s) for i, s in enumerate(streams)]

        best, success = self._pick(outcomes)
        point_set = PointSet.from_array(best.points, self.d, label=f"design(d={self.d}, t={self.t}, N={self.N}, seed={seed})")
        certificate = verify_design(point_set, self.t, self.options.tolerance)
        elapsed = time.perf_counter() - started

        if success:
            log.info("design_constructed", d=self.d, t=self.t, N=self.N, residual=certificate.total_residual,
                     separation_constant=certificate.separation_constant, seconds=round(elapsed, 3))
        else:
            log.warning("design_not_converged", d=self.d, t=self.t, N=self.N,
                        residual=certificate.total_residual, tolerance=self.options.tolerance)

        return ConstructionResult(point_set, certificate, outcomes, success and certificate.passed, elapsed)


def construct_design(
    d: int,
    t: int,
    N: Optional[int] = None,
    seed: int = 0,
    options: Optional[ConstructionOptions] = None
) -> Tuple[PointSet, DesignCertificate]:
    """Construct an approximate t-design; always returns a certificate, pass or fail."""
    result = DesignConstructor(d, t, N, options).construct(seed)
    return result.point_set, result.certificate
