import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from coxperc.core.exceptions import InvalidParameter
from coxperc.core.window import Window
from coxperc.environments.exceptions import NoRadiusField
from coxperc.environments.realization import BallSet, EnvRealization
from coxperc.environments.spec import EnvironmentSpec
from coxperc.utils.type_registry import TypeRegistry

__all__ = ("RadiusField", "radius_field", "field_window", "RADIUS_FIELDS")

Evaluator = Callable[[np.ndarray, Optional[float]], np.ndarray]

RADIUS_FIELDS: TypeRegistry[Callable[[EnvRealization], "RadiusField"]] = (
    TypeRegistry("radius field")
)

_CHUNK = 2048
# offsets z with |z|_inf = 2 around a query point
_RING = np.array(
    [
        z
        for z in itertools.product(range(-2, 3), repeat=2)
        if max(abs(z[0]), abs(z[1])) == 2
    ],
    dtype=float,
)


@dataclass(frozen=True)
class RadiusField:
    """Stabilization or connectivity radius, evaluable at query points.

    Values are +inf where the realization does not carry enough of the
    environment to decide.
    """

    kind: str
    evaluate: Evaluator
    experimental: bool = False

    def __call__(self, points, alpha: Optional[float] = None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return self.evaluate(points, alpha)

    def supremum(self, points, alpha: Optional[float] = None) -> float:
        values = self(points, alpha)
        return float(values.max()) if values.size else 0.0


def radius_field(env: EnvRealization) -> RadiusField:
    if env.kind not in RADIUS_FIELDS:
        raise NoRadiusField(env.kind)
    return RADIUS_FIELDS[env.kind](env)


def field_window(
    spec: EnvironmentSpec, half_width: float, dim: int
) -> Window:
    """Window on which the field of ``spec`` is exact over Q_half_width."""
    margin = spec.required_margin(dim)
    if spec.kind in ("delaunay_edges", "voronoi_edges"):
        # boxes of the ring reach 3R >= 6 half_width from the query
        margin = max(margin, 6 * half_width + 4 / math.sqrt(spec.mu))
    return Window(dim=dim, half_width=half_width, margin=margin)


@RADIUS_FIELDS.register("boolean_count")
def _boolean_count_field(env: EnvRealization) -> RadiusField:
    rep: BallSet = env.representation

    def evaluate(points, alpha=None):
        result = np.zeros(points.shape[0])
        if len(rep) == 0 or points.shape[0] == 0:
            return result
        lo, hi = points.min(axis=0), points.max(axis=0)
        gap = np.maximum(np.maximum(lo - rep.centers, rep.centers - hi), 0)
        near = np.linalg.norm(gap, axis=1) < rep.radii
        centers, radii = rep.centers[near], rep.radii[near]
        if centers.shape[0] == 0:
            return result
        for start in range(0, points.shape[0], _CHUNK):
            block = points[start : start + _CHUNK]
            dist = np.linalg.norm(block[:, None, :] - centers[None], axis=2)
            covering = np.where(dist < radii[None], radii[None], 0.0)
            result[start : start + _CHUNK] = covering.max(axis=1)
        return result

    return RadiusField("stabilization", evaluate)


@RADIUS_FIELDS.register("manhattan_grid")
def _manhattan_field(env: EnvRealization) -> RadiusField:
    lines = env.lines

    def next_line(positions: np.ndarray, coords: np.ndarray) -> np.ndarray:
        index = np.searchsorted(positions, coords, side="left")
        found = index < positions.shape[0]
        gap = np.full(coords.shape, np.inf)
        gap[found] = positions[index[found]] - coords[found]
        return gap

    def evaluate(points, alpha=None):
        to_right = next_line(lines.vertical, points[:, 0])
        above = next_line(lines.horizontal, points[:, 1])
        return np.maximum(to_right, above)

    return RadiusField("connectivity", evaluate)


def _box_ring_field(env: EnvRealization, experimental: bool) -> RadiusField:
    tree = cKDTree(env.generators)
    available = env.generator_half_width

    def evaluate(points, alpha=None):
        if alpha is None or alpha <= 0:
            raise InvalidParameter(
                "alpha", "the tessellation radius needs a query scale"
            )
        result = np.full(points.shape[0], np.inf)
        radius = np.full(points.shape[0], max(1, math.ceil(2 * alpha)))
        open_ = np.ones(points.shape[0], dtype=bool)
        reach = np.max(np.abs(points), axis=1)
        while np.any(open_):
            open_ &= reach + 3 * radius <= available
            index = np.flatnonzero(open_)
            if index.size == 0:
                break
            r = radius[index]
            centers = points[index, None, :] + r[:, None, None] * _RING[None]
            counts = tree.query_ball_point(
                centers.reshape(-1, 2),
                np.repeat(r, _RING.shape[0]),
                p=np.inf,
                return_length=True,
            ).reshape(index.size, _RING.shape[0])
            done = np.all(counts > 0, axis=1)
            result[index[done]] = r[done]
            open_[index[done]] = False
            radius[index[~done]] += 1
        return result

    return RadiusField("stabilization", evaluate, experimental=experimental)


@RADIUS_FIELDS.register("delaunay_edges")
def _delaunay_field(env: EnvRealization) -> RadiusField:
    return _box_ring_field(env, experimental=False)


@RADIUS_FIELDS.register("voronoi_edges")
def _voronoi_field(env: EnvRealization) -> RadiusField:
    return _box_ring_field(env, experimental=True)
