from typing import Literal

import numpy as np

from coxperc.boolmodel.clusters import (
    ClusterLabels,
    build_clusters,
    covering_balls,
)
from coxperc.boolmodel.exceptions import InvalidAxis, WindowTooSmall
from coxperc.boolmodel.observables import ClusterStats
from coxperc.core.geometry import as_point
from coxperc.core.window import Window
from coxperc.coxsampler.points import MarkedPointSet

__all__ = (
    "GEventVariant",
    "crossing_exists",
    "crossing_labels",
    "giant_cluster_count",
    "g_event",
    "reach_event",
)

GEventVariant = Literal["point", "ball"]


def _check_inner(mps: MarkedPointSet, inner_window: Window):
    if inner_window.half_width > mps.window.half_width:
        raise WindowTooSmall(inner_window.half_width, mps.window.half_width)


def _face_hits(
    mps: MarkedPointSet, half_width: float, axis: int, side: float
) -> np.ndarray:
    """Balls meeting the face {x_axis = side·L, |x_k| <= L} of Q_L."""
    points = mps.points
    along = points[:, axis] - side * half_width
    across = np.delete(np.abs(points), axis, axis=1) - half_width
    gap2 = along**2 + np.sum(np.maximum(across, 0) ** 2, axis=1)
    return gap2 < mps.radii**2


def crossing_labels(
    mps: MarkedPointSet,
    labels: ClusterLabels,
    inner_window: Window,
    axis: int,
) -> np.ndarray:
    """Labels of the clusters meeting both faces orthogonal to ``axis``."""
    if not 0 <= axis < mps.dim:
        raise InvalidAxis(axis, mps.dim)
    _check_inner(mps, inner_window)
    if len(mps) == 0:
        return np.empty(0, dtype=np.int64)
    half = inner_window.half_width
    low = labels.labels[_face_hits(mps, half, axis, -1.0)]
    high = labels.labels[_face_hits(mps, half, axis, 1.0)]
    return np.intersect1d(low, high)


def crossing_exists(
    mps: MarkedPointSet,
    labels: ClusterLabels,
    inner_window: Window,
    axis: int = 0,
) -> bool:
    return bool(crossing_labels(mps, labels, inner_window, axis).size)


def giant_cluster_count(
    mps: MarkedPointSet, labels: ClusterLabels, inner_window: Window
) -> int:
    """Distinct clusters crossing the inner window along some axis."""
    crossing = [
        crossing_labels(mps, labels, inner_window, axis)
        for axis in range(mps.dim)
    ]
    return int(np.unique(np.concatenate(crossing)).size)


def g_event(
    mps: MarkedPointSet,
    alpha: float,
    variant: GEventVariant = "point",
    center=None,
) -> bool:
    """Whether the cluster seen from B_α(x) reaches beyond B_8α(x).

    Only balls centered in B_10α(x) take part. The "point" variant uses
    the cluster covering x; the "ball" variant uses every cluster with a
    ball meeting B_α(x).
    """
    x = np.zeros(mps.dim) if center is None else as_point(center, mps.dim)
    needed = float(np.max(np.abs(x))) + 10 * alpha
    if needed > mps.window.padded_half_width:
        raise WindowTooSmall(needed, mps.window.padded_half_width)
    distance = np.linalg.norm(mps.points - x, axis=1)
    local = MarkedPointSet(
        mps.points[distance < 10 * alpha],
        mps.radii[distance < 10 * alpha],
        mps.window,
        mps.intensity,
    )
    if len(local) == 0:
        return False
    distance = distance[distance < 10 * alpha]
    labels = build_clusters(local)
    if variant == "point":
        seeds = covering_balls(local, x)
    else:
        seeds = np.flatnonzero(distance < alpha + local.radii)
    if seeds.size == 0:
        return False
    members = np.isin(labels.labels, labels.labels[seeds])
    return bool(np.any(distance[members] + local.radii[members] > 8 * alpha))


def reach_event(stats: ClusterStats, alpha: float) -> bool:
    """{M >= 9α} for the origin cluster."""
    return bool(not stats.empty and stats.reach >= 9 * alpha)
