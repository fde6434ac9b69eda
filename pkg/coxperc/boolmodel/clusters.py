import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from coxperc.common.tables import Target, write_rows
from coxperc.coxsampler.points import MarkedPointSet
from coxperc.utils.union_find import UnionFind

__all__ = (
    "ClusterLabels",
    "build_clusters",
    "brute_force_clusters",
    "covering_balls",
    "component_of",
    "clusters_to_csv",
)

_logger = logging.getLogger("coxperc.boolmodel")


@dataclass(frozen=True)
class ClusterLabels:
    """Canonical cluster label of every ball, numbered 0..count-1 in order
    of first appearance.
    """

    labels: np.ndarray

    @property
    def count(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    def groups(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(
            self.labels[order], np.arange(self.count + 1)
        )
        return [order[bounds[k] : bounds[k + 1]] for k in range(self.count)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)

    def __eq__(self, other):
        if not isinstance(other, ClusterLabels):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)


def _overlapping(points, radii, pairs: np.ndarray) -> np.ndarray:
    if pairs.size == 0:
        return pairs.reshape(0, 2)
    gaps = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
    return pairs[gaps < radii[pairs[:, 0]] + radii[pairs[:, 1]]]


def _neighbour_pairs(tree: cKDTree, queries, ranges, ids) -> np.ndarray:
    """Pairs (query index, ids[hit]) for hits within ``ranges``."""
    hits = tree.query_ball_point(queries, ranges)
    counts = np.fromiter((len(h) for h in hits), dtype=np.int64)
    if counts.sum() == 0:
        return np.empty((0, 2), dtype=np.int64)
    owner = np.repeat(np.arange(len(hits)), counts)
    found = np.concatenate([np.asarray(h, dtype=np.int64) for h in hits])
    return np.stack([owner, ids[found]], axis=1)


def build_clusters(mps: MarkedPointSet) -> ClusterLabels:
    """Connected components of the union of open balls B_ρi(X_i).

    Balls up to the median radius are paired through one k-d tree at
    range 2·median; every larger ball queries the small balls within
    ρ_i + median and the large balls of radius <= ρ_i within 2ρ_i.
    """
    n = len(mps)
    if n == 0:
        return ClusterLabels(np.empty(0, dtype=np.int64))
    points, radii = mps.points, mps.radii
    union_find = UnionFind(n)
    median = float(np.median(radii))
    small = np.flatnonzero(radii <= median)
    large = np.flatnonzero(radii > median)

    small_tree = cKDTree(points[small])
    pairs = small_tree.query_pairs(2 * median, output_type="ndarray")
    union_find.union_pairs(_overlapping(points, radii, small[pairs]))

    if large.size:
        found = _neighbour_pairs(
            small_tree, points[large], radii[large] + median, small
        )
        found[:, 0] = large[found[:, 0]]
        union_find.union_pairs(_overlapping(points, radii, found))

        large_tree = cKDTree(points[large])
        found = _neighbour_pairs(
            large_tree, points[large], 2 * radii[large], large
        )
        found[:, 0] = large[found[:, 0]]
        found = found[
            (found[:, 0] != found[:, 1])
            & (radii[found[:, 1]] <= radii[found[:, 0]])
        ]
        union_find.union_pairs(_overlapping(points, radii, found))

    labels = ClusterLabels(union_find.labels())
    _logger.debug("%d balls form %d clusters", n, labels.count)
    return labels


def brute_force_clusters(mps: MarkedPointSet) -> ClusterLabels:
    """All-pairs overlap test followed by transitive closure."""
    n = len(mps)
    union_find = UnionFind(n)
    for i in range(n):
        gaps = np.linalg.norm(mps.points[i + 1 :] - mps.points[i], axis=1)
        for j in np.flatnonzero(gaps < mps.radii[i] + mps.radii[i + 1 :]):
            union_find.union(i, i + 1 + int(j))
    return ClusterLabels(union_find.labels())


def covering_balls(mps: MarkedPointSet, point) -> np.ndarray:
    """Indices of the open balls containing ``point``."""
    point = np.asarray(point, dtype=float).reshape(mps.dim)
    if len(mps) == 0:
        return np.empty(0, dtype=np.int64)
    gaps = np.linalg.norm(mps.points - point, axis=1)
    return np.flatnonzero(gaps < mps.radii)


def clusters_to_csv(
    mps: MarkedPointSet, labels: ClusterLabels, target: Target
) -> None:
    header = ["point", *(f"x{k + 1}" for k in range(mps.dim))]
    header += ["radius", "cluster"]
    rows = (
        [i, *point, radius, label]
        for i, (point, radius, label) in enumerate(
            zip(
                mps.points.tolist(),
                mps.radii.tolist(),
                labels.labels.tolist(),
            )
        )
    )
    write_rows(target, header, rows)


def component_of(mps: MarkedPointSet, start: np.ndarray) -> np.ndarray:
    """Balls connected to the balls ``start``, by breadth-first search."""
    if start.size == 0 or len(mps) == 0:
        return np.empty(0, dtype=np.int64)
    tree = cKDTree(mps.points)
    largest = float(mps.radii.max())
    seen = np.zeros(len(mps), dtype=bool)
    seen[start] = True
    frontier = np.asarray(start, dtype=np.int64)
    while frontier.size:
        found = _neighbour_pairs(
            tree,
            mps.points[frontier],
            mps.radii[frontier] + largest,
            np.arange(len(mps)),
        )
        found[:, 0] = frontier[found[:, 0]]
        found = _overlapping(mps.points, mps.radii, found)
        fresh = np.unique(found[:, 1][~seen[found[:, 1]]])
        seen[fresh] = True
        frontier = fresh
    return np.flatnonzero(seen)
