"""Independent reference computations for the closed-form FOU centroid.

Two cross-checks live here: a brute-force planar centroid of the region
between lower and upper aggregates (midpoint quadrature on a fine strip
grid, never forming the per-set centroids and areas), and the classic
iterative Karnik-Mendel centroid interval.  Both are validation and
benchmarking surfaces; the closed-loop controller never calls them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SampledMF
from .decomposed import UndefinedOutput

__all__ = [
    "CentroidInterval",
    "fou_centroid_bruteforce",
    "km_centroid",
    "km_defuzz",
    "random_fou_pair",
]

_ZERO_FOU_EPS = 1e-12


@dataclass(frozen=True)
class CentroidInterval:
    """Endpoints of the type-reduced centroid set, plus iteration count."""

    left: float
    right: float
    iterations: int

    def __post_init__(self) -> None:
        if self.left > self.right + 1e-12:
            raise ValueError("centroid interval endpoints out of order")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)


def _require_same_grid(upper: SampledMF, lower: SampledMF) -> None:
    if (upper.lo, upper.hi, upper.grid_size) != (lower.lo, lower.hi, lower.grid_size):
        raise ValueError("aggregates must share universe and grid")


def fou_centroid_bruteforce(upper: SampledMF, lower: SampledMF, resolution: int = 10_000) -> float:
    """x centroid of the planar region {(x, z): lower(x) <= z <= upper(x)}.

    Integrates the strip density (upper - lower) directly by midpoint
    summation on `resolution` strips, giving a numerical path independent
    of the closed-form combiner.  A zero-area FOU with nonzero upper area
    falls back to the upper centroid, mirroring the combiner; a zero upper
    area raises UndefinedOutput.
    """
    if resolution < 100:
        raise ValueError("resolution must be at least 100")
    _require_same_grid(upper, lower)
    width = (upper.hi - upper.lo) / resolution
    mids = upper.lo + (np.arange(resolution) + 0.5) * width
    u = np.interp(mids, upper.xs, upper.mu)
    low = np.interp(mids, lower.xs, lower.mu)
    upper_mass = float(u.sum())
    if upper_mass <= 0.0:
        raise UndefinedOutput("upper aggregate has zero area")
    gap = u - low
    gap_mass = float(gap.sum())
    span = upper.hi - upper.lo
    if gap_mass * width < _ZERO_FOU_EPS * span:
        return float((mids * u).sum()) / upper_mass
    return float((mids * gap).sum()) / gap_mass


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def _km_endpoint(xs: np.ndarray, w_low: np.ndarray, w_up: np.ndarray, c: float, minimize: bool) -> tuple[float, int]:
    """Iterate the switch point until it stabilizes.

    For the left endpoint the grades left of the switch take the upper
    bound and the rest the lower bound (mass pushed toward small x);
    the right endpoint mirrors that.  A switch point landing exactly on a
    grid node is assigned to the left segment.
    """
    n = xs.size
    indices = np.arange(n)
    prev_k = -2
    iterations = 0
    while True:
        k = int(np.searchsorted(xs, c, side="right")) - 1
        k = min(max(k, 0), n - 1)
        if k == prev_k:
            return c, iterations
        if minimize:
            theta = np.where(indices <= k, w_up, w_low)
        else:
            theta = np.where(indices <= k, w_low, w_up)
        mass = float(theta.sum())
        if mass == 0.0:
            # degenerate single-point FOU; current estimate is the answer
            return c, iterations
        c = float((xs * theta).sum()) / mass
        prev_k = k
        iterations += 1
        if iterations > n:
            raise RuntimeError("switch-point iteration failed to terminate")


def km_centroid(upper: SampledMF, lower: SampledMF) -> CentroidInterval:
    """Karnik-Mendel centroid interval of the discretized FOU.

    Grades carry trapezoid quadrature weights so that a zero-width FOU
    collapses exactly to the trapezoid-rule type-1 centroid.  Iteration
    starts from the mean-membership centroid and stops when the switch
    point stabilizes; the reported count sums both endpoint searches.
    """
    _require_same_grid(upper, lower)
    if np.any(lower.mu > upper.mu + 1e-12):
        raise ValueError("FOU ordering violated: lower grade above upper grade")
    if float(upper.mu.sum()) == 0.0:
        raise UndefinedOutput("upper aggregate has zero area")
    weights = _trapezoid_weights(upper.grid_size)
    w_up = weights * upper.mu
    w_low = weights * lower.mu
    xs = upper.xs
    mean = 0.5 * (w_up + w_low)
    c0 = float((xs * mean).sum()) / float(mean.sum())
    left, it_left = _km_endpoint(xs, w_low, w_up, c0, minimize=True)
    right, it_right = _km_endpoint(xs, w_low, w_up, c0, minimize=False)
    return CentroidInterval(left, right, it_left + it_right)


def km_defuzz(upper: SampledMF, lower: SampledMF) -> float:
    """Defuzzified value after type-reduction: the interval midpoint."""
    return km_centroid(upper, lower).midpoint


def random_fou_pair(
    rng: np.random.Generator, lo: float, hi: float, grid_size: int = 1001
) -> tuple[SampledMF, SampledMF]:
    """Random ordered aggregate pair for validation and benchmarking.

    Builds two Mamdani-style aggregates (maxima of clipped random
    triangles) and orders them pointwise; occasionally zeroes the lower
    one to exercise the reduced formula.  The upper aggregate always has
    positive area.
    """
    span = hi - lo
    xs = np.linspace(lo, hi, grid_size)

    def random_aggregate() -> np.ndarray:
        agg = np.zeros(grid_size)
        for _ in range(int(rng.integers(2, 5))):
            while True:
                a, b, c = np.sort(rng.uniform(lo, hi, 3))
                if b - a > 1e-3 * span and c - b > 1e-3 * span:
                    break
            clip = rng.uniform(0.1, 1.0)
            tri = np.minimum((xs - a) / (b - a), (c - xs) / (c - b))
            agg = np.maximum(agg, np.minimum(np.maximum(tri, 0.0), clip))
        return agg

    first, second = random_aggregate(), random_aggregate()
    upper = np.maximum(first, second)
    lower = np.minimum(first, second)
    if rng.uniform() < 0.15:
        lower = np.zeros_like(lower)
    return SampledMF(lo, hi, upper), SampledMF(lo, hi, lower)
