"""
Blockwise pairwise summation over the N^2 pairs of a point set.

Rows are processed in blocks: each block materializes its (rows x N) slab of
pair terms, reduces every row with numpy, and folds the row sums into a
compensated accumulator. Block results are combined in block order when the
run is deterministic, or in completion order otherwise.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
import structlog

from ..core.geometry import PointSet

log = structlog.get_logger(__name__)

# upper bound on the floats in one block slab (rows * N * (d + 1))
BLOCK_BUDGET = 2_000_000


class CompensatedSum:
    """Running sum that carries the rounding error of every addition (like math.fsum)."""

    __slots__ = ("_s", "_t")

    def __init__(self, y: float = 0.0):
        self._s = float(y)
        self._t = 0.0

    @staticmethod
    def two_sum(u: float, v: float) -> Tuple[float, float]:
        """Error-free transformation: u + v = s + t exactly."""
        s = u + v
        up = s - v
        vpp = s - up
        up -= u
        vpp -= v
        return s, -(up + vpp)

    def add(self, y: float) -> "CompensatedSum":
        y, u = self.two_sum(float(y), self._t)
        self._s, self._t = self.two_sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u
        return self

    def extend(self, values: Iterable[float]) -> "CompensatedSum":
        for v in values:
            self.add(v)
        return self

    def merge(self, other: "CompensatedSum") -> "CompensatedSum":
        self.add(other._s)
        self.add(other._t)
        return self

    @property
    def value(self) -> float:
        return self._s + self._t


@dataclass(frozen=True)
class PairBlock:
    """Rows start..stop of the pair matrix of a point set."""
    start: int
    stop: int
    rows: np.ndarray
    points: np.ndarray

    def inner(self) -> np.ndarray:
        return np.clip(self.rows @ self.points.T, -1.0, 1.0)

    def distances(self) -> np.ndarray:
        diff = self.rows[:, None, :] - self.points[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def diagonal(self) -> Tuple[np.ndarray, np.ndarray]:
        idx = np.arange(self.start, self.stop)
        return idx - self.start, idx


PairTerm = Callable[[PairBlock], np.ndarray]


class PairwiseSummation:
    """
    Sum a pair term over all ordered pairs (i, j), i != j (or all pairs when
    include_diagonal is set).

    With deterministic=True the block partition depends only on the input
    size, and block sums are reduced in index order, so the result does not
    change with the thread count.
    """

    def __init__(self, threads: int = 1, deterministic: bool = True, block_rows: Optional[int] = None):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.deterministic = deterministic
        self.block_rows = block_rows

    def _row_step(self, X: PointSet) -> int:
        if self.block_rows:
            return self.block_rows
        return int(max(1, min(512, BLOCK_BUDGET // (X.N * X.ambient_dim))))

    def partitions(self, X: PointSet) -> List[Tuple[int, int]]:
        step = self._row_step(X)
        blocks = [(i, min(i + step, X.N)) for i in range(0, X.N, step)]
        if self.deterministic or self.threads == 1:
            return blocks
        # one contiguous run of blocks per worker
        bounds = np.linspace(0, X.N, self.threads + 1).astype(int)
        return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def _block_sum(self, X: PointSet, term: PairTerm, start: int, stop: int, include_diagonal: bool):
        accs: List[CompensatedSum] = []
        step = self._row_step(X)
        for lo in range(start, stop, step):
            hi = min(lo + step, stop)
            block = PairBlock(lo, hi, X.points[lo:hi], X.points)
            with np.errstate(divide="ignore", invalid="ignore"):
                values = np.array(term(block), dtype=np.float64)
            # a term may return a stack of components with shape (k, rows, N)
            stack = values if values.ndim == 3 else values[None]
            if not accs:
                accs = [CompensatedSum() for _ in range(stack.shape[0])]
            for acc, component in zip(accs, stack):
                if not include_diagonal:
                    component[block.diagonal()] = 0.0
                acc.extend(component.sum(axis=1))
        return accs

    def sum(self, X: PointSet, term: PairTerm, include_diagonal: bool = False):
        """
        Total of term over the pairs. Returns a float, or a tuple of floats
        when term returns a (k, rows, N) stack.
        """
        parts = self.partitions(X)
        totals: List[CompensatedSum] = []

        def fold(accs: List[CompensatedSum]):
            if not totals:
                totals.extend(CompensatedSum() for _ in accs)
            for total, acc in zip(totals, accs):
                total.merge(acc)

        if self.threads == 1 or len(parts) == 1:
            for start, stop in parts:
                fold(self._block_sum(X, term, start, stop, include_diagonal))
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                futures = [
                    executor.submit(self._block_sum, X, term, start, stop, include_diagonal)
                    for start, stop in parts
                ]
                ordered = futures if self.deterministic else as_completed(futures)
                for future in ordered:
                    fold(future.result())

        log.debug("pairwise_sum", N=X.N, partitions=len(parts), threads=self.threads,
                  deterministic=self.deterministic)
        values = tuple(total.value for total in totals)
        return values[0] if len(values) == 1 else values
