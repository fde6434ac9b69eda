import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from coxperc.boolmodel.clusters import (
    ClusterLabels,
    component_of,
    covering_balls,
)
from coxperc.common.models import AppBaseModel
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.seeds import Seed
from coxperc.coxsampler.points import MarkedPointSet
from coxperc.settings import get_settings

__all__ = (
    "ClusterStats",
    "origin_cluster",
    "cluster_stats",
    "cluster_diameter",
    "union_volume_mc",
    "covered_mask",
)

_logger = logging.getLogger("coxperc.boolmodel")

MIN_SAMPLES = 1000
# hit-or-miss sample count stops growing here
MAX_SAMPLES = 2**20
_DENSE_LIMIT = 2048


class ClusterStats(AppBaseModel):
    """Observables of one cluster; all zero when the cluster is empty.

    ``censored`` marks clusters touching the boundary of the padded
    window, whose observables are lower bounds.
    """

    point_count: int = 0
    diameter: float = 0.0
    reach: float = 0.0
    volume_estimate: float = 0.0
    volume_se: float = 0.0
    max_radius: float = 0.0
    censored: bool = False
    empty: bool = True

    def observable(self, name: str) -> float:
        if name == "volume":
            return self.volume_estimate
        if name == "diameter":
            return self.diameter
        if name == "count":
            return float(self.point_count)
        raise InvalidParameter("observable", f"unknown observable '{name}'")


def cluster_diameter(points: np.ndarray, radii: np.ndarray) -> float:
    """max over i, j of |X_i - X_j| + ρ_i + ρ_j.

    Some ball of an optimal pair lies at least D/2 from the centroid in
    the |X - c| + ρ sense, D being any lower bound of the diameter; only
    those balls are scanned against all others.
    """
    if points.shape[0] == 0:
        return 0.0
    centroid = points.mean(axis=0)
    spread = np.linalg.norm(points - centroid, axis=1) + radii
    start = int(np.argmax(spread))
    lower = float(
        np.max(np.linalg.norm(points - points[start], axis=1) + radii)
        + radii[start]
    )
    candidates = np.flatnonzero(spread >= lower / 2 - 1e-12)
    best = lower
    for first in range(0, candidates.size, _DENSE_LIMIT):
        block = candidates[first : first + _DENSE_LIMIT]
        gaps = np.linalg.norm(
            points[block, None, :] - points[None], axis=2
        )
        spans = gaps + radii[block, None] + radii[None]
        best = max(best, float(spans.max()))
    return best


def covered_mask(
    samples: np.ndarray, centers: np.ndarray, radii: np.ndarray
) -> np.ndarray:
    """Whether each sample lies in some open ball."""
    inside = np.zeros(samples.shape[0], dtype=bool)
    if centers.shape[0] == 0:
        return inside
    if centers.shape[0] <= _DENSE_LIMIT:
        for first in range(0, samples.shape[0], _DENSE_LIMIT):
            block = samples[first : first + _DENSE_LIMIT]
            gaps = np.linalg.norm(block[:, None, :] - centers[None], axis=2)
            inside[first : first + _DENSE_LIMIT] = np.any(
                gaps < radii[None], axis=1
            )
        return inside
    tree = cKDTree(centers)
    hits = tree.query_ball_point(samples, float(radii.max()))
    for k, hit in enumerate(hits):
        if hit:
            hit = np.asarray(hit)
            gaps = np.linalg.norm(centers[hit] - samples[k], axis=1)
            inside[k] = bool(np.any(gaps < radii[hit]))
    return inside


def _interval_union(centers: np.ndarray, radii: np.ndarray) -> float:
    lows = centers[:, 0] - radii
    highs = centers[:, 0] + radii
    order = np.argsort(lows)
    total = 0.0
    current_low, current_high = lows[order[0]], highs[order[0]]
    for k in order[1:]:
        if lows[k] > current_high:
            total += current_high - current_low
            current_low, current_high = lows[k], highs[k]
        else:
            current_high = max(current_high, highs[k])
    return float(total + current_high - current_low)


def union_volume_mc(
    balls: Sequence[tuple[Sequence[float], float]],
    n_samples: int,
    seed: Seed,
) -> tuple[float, float]:
    """Hit-or-miss volume of a union of balls over its bounding box.

    Returns ``(estimate, standard error)``; in dimension 1 the interval
    union is exact and the error is 0.
    """
    if not balls:
        return 0.0, 0.0
    centers = np.asarray([np.ravel(c) for c, _ in balls], dtype=float)
    radii = np.asarray([r for _, r in balls], dtype=float)
    return _union_volume(centers, radii, n_samples, seed)


def _union_volume(centers, radii, n_samples: int, seed: Seed):
    if n_samples < MIN_SAMPLES:
        raise InvalidParameter(
            "n_samples", f"need at least {MIN_SAMPLES} samples"
        )
    keep = radii > 0
    centers, radii = centers[keep], radii[keep]
    if centers.shape[0] == 0:
        return 0.0, 0.0
    dim = centers.shape[1]
    if dim == 1:
        return _interval_union(centers, radii), 0.0
    lower = np.min(centers - radii[:, None], axis=0)
    upper = np.max(centers + radii[:, None], axis=0)
    box = float(np.prod(upper - lower))
    rng = seed.rng()
    chunk = get_settings().mc_chunk_size
    hits = 0
    for first in range(0, n_samples, chunk):
        size = min(chunk, n_samples - first)
        samples = lower + (upper - lower) * rng.random((size, dim))
        hits += int(np.sum(covered_mask(samples, centers, radii)))
    p = hits / n_samples
    return box * p, box * math.sqrt(p * (1 - p) / n_samples)


def default_samples(centers: np.ndarray, radii: np.ndarray) -> int:
    """Samples for a standard error of about 1% of the largest ball."""
    dim = centers.shape[1]
    largest = unit_ball_volume(dim) * float(radii.max()) ** dim
    lower = np.min(centers - radii[:, None], axis=0)
    upper = np.max(centers + radii[:, None], axis=0)
    box = float(np.prod(upper - lower))
    wanted = (50 * box / largest) ** 2 if largest > 0 else MIN_SAMPLES
    return int(min(max(wanted, MIN_SAMPLES), MAX_SAMPLES))


def cluster_stats(
    mps: MarkedPointSet,
    members: np.ndarray,
    seed: Optional[Seed] = None,
    n_samples: Optional[int] = None,
    volume: bool = True,
) -> ClusterStats:
    """Observables of the cluster formed by the balls ``members``."""
    if members.size == 0:
        return ClusterStats()
    points, radii = mps.points[members], mps.radii[members]
    bound = mps.window.padded_half_width
    censored = bool(
        np.any(np.max(np.abs(points), axis=1) + radii >= bound)
    )
    estimate, se = 0.0, 0.0
    if volume:
        if n_samples is None:
            n_samples = default_samples(points, radii)
        estimate, se = _union_volume(
            points, radii, n_samples, seed or Seed.of(0)
        )
    return ClusterStats(
        point_count=int(members.size),
        diameter=cluster_diameter(points, radii),
        reach=float(np.max(np.linalg.norm(points, axis=1) + radii)),
        volume_estimate=estimate,
        volume_se=se,
        max_radius=float(radii.max()),
        censored=censored,
        empty=False,
    )


def origin_cluster(
    mps: MarkedPointSet,
    labels: Optional[ClusterLabels] = None,
    seed: Optional[Seed] = None,
    n_samples: Optional[int] = None,
    volume: bool = True,
) -> ClusterStats:
    """Statistics of C_o; empty when no ball covers the origin.

    Without ``labels`` only the component of the origin is explored.
    """
    covering = covering_balls(mps, np.zeros(mps.dim))
    if covering.size == 0:
        return ClusterStats()
    if labels is None:
        members = component_of(mps, covering)
    else:
        members = labels.members(int(labels.labels[covering[0]]))
    stats = cluster_stats(mps, members, seed, n_samples, volume)
    if stats.censored:
        _logger.debug("origin cluster of %d balls is censored", members.size)
    return stats
