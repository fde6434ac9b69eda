import numpy as np

from coxperc.core.geometry import (
    as_point,
    ball_intersection_volume,
    ball_volume,
    segment_ball_length,
)
from coxperc.environments.exceptions import BallOutsideWindow
from coxperc.environments.realization import (
    BallSet,
    DensityGrid,
    EnvRealization,
    Scalar,
    SegmentSet,
)

__all__ = ("measure_of_ball",)

# boundary cells are integrated on a SUBCELLS^dim sub-grid
SUBCELLS = 8
_CHUNK = 4096


def measure_of_ball(env: EnvRealization, center, alpha: float) -> float:
    """Λ(B_alpha(center)) for a ball inside the padded window."""
    center = as_point(center, env.dim)
    if not env.window.contains_ball(center, alpha):
        raise BallOutsideWindow(center, alpha)
    rep = env.representation
    if isinstance(rep, Scalar):
        return float(rep.z * ball_volume(alpha, env.dim))
    if isinstance(rep, SegmentSet):
        if len(rep) == 0:
            return 0.0
        lengths = segment_ball_length(rep.starts, rep.ends, center, alpha)
        return float(rep.weight * lengths.sum())
    if isinstance(rep, BallSet):
        if len(rep) == 0:
            return 0.0
        dist = np.linalg.norm(rep.centers - center, axis=1)
        overlap = ball_intersection_volume(rep.radii, alpha, dist, env.dim)
        return float(rep.weight * np.sum(overlap))
    return _grid_measure(rep, center, alpha)


def _grid_measure(grid: DensityGrid, center: np.ndarray, alpha: float):
    dim = grid.dim
    if grid.constant is not None:
        return float(grid.constant * ball_volume(alpha, dim))
    h = grid.step
    shape = np.asarray(grid.values.shape)
    lo = np.clip(np.floor((center - alpha - grid.lower) / h), 0, shape - 1)
    hi = np.clip(np.floor((center + alpha - grid.lower) / h), 0, shape - 1)
    lo, hi = lo.astype(int), hi.astype(int)
    axes = [
        grid.lower + h * np.arange(lo[k], hi[k] + 1) - center[k]
        for k in range(dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    corner = np.stack([m.ravel() for m in mesh], axis=1)
    values = grid.values[
        tuple(slice(lo[k], hi[k] + 1) for k in range(dim))
    ].ravel()
    # nearest and farthest point of each cell relative to the center
    near = np.linalg.norm(np.clip(0.0, corner, corner + h), axis=1)
    far = np.linalg.norm(
        np.maximum(np.abs(corner), np.abs(corner + h)), axis=1
    )
    full = far <= alpha
    boundary = (near < alpha) & ~full
    cell_volume = h**dim
    total = float(values[full].sum()) * cell_volume
    if not np.any(boundary):
        return total

    offsets = (np.arange(SUBCELLS) + 0.5) * h / SUBCELLS
    sub_mesh = np.meshgrid(*([offsets] * dim), indexing="ij")
    sub = np.stack([m.ravel() for m in sub_mesh], axis=1)
    corners = corner[boundary]
    weights = values[boundary]
    for start in range(0, corners.shape[0], _CHUNK):
        block = corners[start : start + _CHUNK, None, :] + sub[None]
        inside = np.sum(block**2, axis=2) < alpha**2
        fraction = inside.mean(axis=1)
        partial = np.sum(weights[start : start + _CHUNK] * fraction)
        total += float(partial) * cell_volume
    return total
