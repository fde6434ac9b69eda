import math
from typing import Sequence, Union

import numpy as np
from scipy.special import gamma

from coxperc.core.exceptions import DimensionMismatch

__all__ = (
    "as_point",
    "unit_ball_volume",
    "ball_volume",
    "ball_surface",
    "ball_intersection_volume",
    "balls_overlap",
    "segment_ball_length",
    "clip_segments",
)

PointLike = Union[Sequence[float], np.ndarray]


def as_point(coords: PointLike, dim: int = None) -> np.ndarray:
    point = np.asarray(coords, dtype=float).reshape(-1)
    if dim is not None and point.shape[0] != dim:
        raise DimensionMismatch(dim, point.shape[0])
    return point


def unit_ball_volume(dim: int) -> float:
    """v_d = |B_1| in dimension ``dim``."""
    return math.pi ** (dim / 2) / gamma(dim / 2 + 1)


def ball_volume(radius, dim: int):
    return unit_ball_volume(dim) * np.power(radius, dim)


def ball_surface(radius, dim: int):
    return dim * unit_ball_volume(dim) * np.power(radius, dim - 1)


def ball_intersection_volume(r1, r2, dist, dim: int):
    """|B_r1(x) ∩ B_r2(y)| for |x - y| = dist, vectorized over arrays."""
    r1, r2, dist = np.broadcast_arrays(
        np.asarray(r1, dtype=float),
        np.asarray(r2, dtype=float),
        np.asarray(dist, dtype=float),
    )
    result = np.zeros(r1.shape, dtype=float)
    small = np.minimum(r1, r2)
    large = np.maximum(r1, r2)
    nested = dist <= large - small
    result[nested] = ball_volume(small[nested], dim)
    lens = (~nested) & (dist < r1 + r2)
    if not np.any(lens):
        return result if result.ndim else float(result)
    a, b, d = r1[lens], r2[lens], dist[lens]
    if dim == 1:
        value = a + b - d
    elif dim == 2:
        alpha = np.arccos(np.clip((d**2 + a**2 - b**2) / (2 * d * a), -1, 1))
        beta = np.arccos(np.clip((d**2 + b**2 - a**2) / (2 * d * b), -1, 1))
        value = (
            a**2 * (alpha - np.sin(2 * alpha) / 2)
            + b**2 * (beta - np.sin(2 * beta) / 2)
        )
    elif dim == 3:
        value = (
            math.pi
            * (a + b - d) ** 2
            * (d**2 + 2 * d * b - 3 * b**2 + 2 * d * a + 6 * a * b - 3 * a**2)
            / (12 * d)
        )
    else:
        raise ValueError(f"unsupported dimension {dim}")
    result[lens] = value
    return result if result.ndim else float(result)


def balls_overlap(
    c1: PointLike, r1: float, c2: PointLike, r2: float
) -> bool:
    """Strict overlap |c1 - c2| < r1 + r2."""
    p1 = as_point(c1)
    p2 = as_point(c2, dim=p1.shape[0])
    return bool(np.linalg.norm(p1 - p2) < r1 + r2)


def segment_ball_length(
    starts: np.ndarray, ends: np.ndarray, center: np.ndarray, radius: float
) -> np.ndarray:
    """Length of each segment [start, end] inside B_radius(center)."""
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    direction = ends - starts
    length = np.linalg.norm(direction, axis=1)
    result = np.zeros(length.shape)
    ok = length > 0
    if not np.any(ok):
        return result
    u = direction[ok] / length[ok, None]
    w = starts[ok] - center
    # |w + t u|^2 = radius^2, t in [0, length]
    b = np.einsum("ij,ij->i", w, u)
    c = np.einsum("ij,ij->i", w, w) - radius**2
    disc = b**2 - c
    hit = disc > 0
    root = np.sqrt(np.where(hit, disc, 0.0))
    t0 = np.clip(-b - root, 0, length[ok])
    t1 = np.clip(-b + root, 0, length[ok])
    result[ok] = np.where(hit, np.maximum(t1 - t0, 0.0), 0.0)
    return result


def clip_segments(
    starts: np.ndarray, ends: np.ndarray, half_width: float
) -> tuple[np.ndarray, np.ndarray]:
    """Liang-Barsky clipping of segments to the box [-h, h]^dim.

    Segments missing the box are dropped.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    if starts.shape[0] == 0:
        return starts, ends
    direction = ends - starts
    t_lo = np.zeros(starts.shape[0])
    t_hi = np.ones(starts.shape[0])
    keep = np.ones(starts.shape[0], dtype=bool)
    for axis in range(starts.shape[1]):
        p = direction[:, axis]
        for sign in (-1.0, 1.0):
            # sign * (start + t p) <= h
            q = half_width - sign * starts[:, axis]
            sp = sign * p
            parallel = sp == 0
            keep &= ~(parallel & (q < 0))
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(parallel, np.inf, q / np.where(parallel, 1, sp))
            t_hi = np.where(~parallel & (sp > 0), np.minimum(t_hi, t), t_hi)
            t_lo = np.where(~parallel & (sp < 0), np.maximum(t_lo, t), t_lo)
    keep &= t_lo < t_hi
    clipped_starts = starts + t_lo[:, None] * direction
    clipped_ends = starts + t_hi[:, None] * direction
    return clipped_starts[keep], clipped_ends[keep]
