import logging
import math
from dataclasses import dataclass, replace
from typing import ClassVar, Optional, Union

import numpy as np

from coxperc.common.tables import Target, write_rows
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import clip_segments
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments.spec import EnvironmentSpec

__all__ = (
    "Scalar",
    "DensityGrid",
    "SegmentSet",
    "BallSet",
    "ManhattanLines",
    "Representation",
    "EnvRealization",
    "count_covering",
    "rasterize_balls",
)

_logger = logging.getLogger("coxperc.environments")

# rasterized grids larger than this are coarsened
_MAX_CELLS = 2**24


@dataclass(frozen=True)
class Scalar:
    """Λ(dx) = z dx."""

    z: float
    kind: ClassVar[str] = "scalar"

    def __post_init__(self):
        if not self.z >= 0:
            raise InvalidParameter("z", "must be nonnegative")


@dataclass(frozen=True)
class DensityGrid:
    """Piecewise-constant density on cubic cells of side ``step``.

    Cell ``i`` spans ``[lower + i*step, lower + (i+1)*step]`` along every
    axis; ``constant`` marks a uniform density with a single cell.
    """

    step: float
    lower: float
    values: np.ndarray
    constant: Optional[float] = None
    kind: ClassVar[str] = "density_grid"

    def __post_init__(self):
        if np.any(self.values < 0):
            raise InvalidParameter("values", "densities must be nonnegative")

    @classmethod
    def uniform(cls, value: float, half_width: float, dim: int):
        return cls(
            step=2 * half_width,
            lower=-half_width,
            values=np.full((1,) * dim, float(value)),
            constant=float(value),
        )

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    def cell_index(self, points: np.ndarray) -> np.ndarray:
        index = np.floor((points - self.lower) / self.step).astype(np.int64)
        return np.clip(index, 0, np.asarray(self.values.shape) - 1)

    def value_at(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        if self.constant is not None:
            return np.full(points.shape[0], self.constant)
        index = self.cell_index(points)
        return self.values[tuple(index.T)]

    def cell_centers(self) -> np.ndarray:
        axes = [
            self.lower + self.step * (np.arange(n) + 0.5)
            for n in self.values.shape
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class SegmentSet:
    """Λ(A) = weight · ν_1(S ∩ A) for the union S of segments."""

    starts: np.ndarray
    ends: np.ndarray
    weight: float = 1.0
    kind: ClassVar[str] = "segment_set"

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.ends - self.starts, axis=1)

    def __len__(self):
        return self.starts.shape[0]


@dataclass(frozen=True)
class BallSet:
    """Density weight · #{i : |x - centers[i]| < radii[i]}."""

    centers: np.ndarray
    radii: np.ndarray
    weight: float = 1.0
    kind: ClassVar[str] = "ball_set"

    def __len__(self):
        return self.centers.shape[0]


@dataclass(frozen=True)
class ManhattanLines:
    """Line positions of a Manhattan grid.

    Positions are drawn on [-L', upper]; the grid segments only use those
    inside the padded window, the rest serve the connectivity field.
    """

    vertical: np.ndarray
    horizontal: np.ndarray
    upper: float


Representation = Union[Scalar, DensityGrid, SegmentSet, BallSet]


def count_covering(
    centers: np.ndarray,
    radii: np.ndarray,
    points: np.ndarray,
    chunk: int = 4096,
) -> np.ndarray:
    """Number of open balls B_radii[i](centers[i]) containing each point."""
    counts = np.zeros(points.shape[0], dtype=np.int64)
    if centers.shape[0] == 0 or points.shape[0] == 0:
        return counts
    for start in range(0, points.shape[0], chunk):
        block = points[start : start + chunk]
        dist = np.linalg.norm(block[:, None, :] - centers[None], axis=2)
        counts[start : start + chunk] = np.sum(dist < radii[None], axis=1)
    return counts


@dataclass(frozen=True)
class EnvRealization:
    """One realization of a directing measure on a padded window."""

    window: Window
    representation: Representation
    spec: Optional[EnvironmentSpec] = None
    seed: Optional[Seed] = None
    normalization: float = 1.0
    # driving points of a tessellation and the half-width they cover
    generators: Optional[np.ndarray] = None
    generator_half_width: float = 0.0
    lines: Optional[ManhattanLines] = None
    # expected number of driving balls reaching the window but not sampled
    truncation_mass: float = 0.0

    def __post_init__(self):
        rep = self.representation
        if isinstance(rep, SegmentSet) and len(rep):
            bound = self.window.padded_half_width * (1 + 1e-9)
            if np.any(np.abs(rep.starts) > bound) or np.any(
                np.abs(rep.ends) > bound
            ):
                raise InvalidParameter(
                    "segments", "must lie inside the padded window"
                )

    @property
    def kind(self) -> str:
        return self.spec.kind if self.spec is not None else "custom"

    @property
    def dim(self) -> int:
        return self.window.dim

    @classmethod
    def from_scalar(cls, window: Window, z: float, spec=None):
        return cls(window=window, representation=Scalar(float(z)), spec=spec)

    @classmethod
    def from_density(
        cls,
        window: Window,
        values: np.ndarray,
        spec=None,
    ) -> "EnvRealization":
        """Density grid tiling the padded window with ``values``."""
        values = np.asarray(values, dtype=float)
        if values.ndim != window.dim:
            raise InvalidParameter("values", "grid rank must equal dim")
        half = window.padded_half_width
        if len(set(values.shape)) != 1:
            raise InvalidParameter("values", "grid must be cubic")
        step = 2 * half / values.shape[0]
        grid = DensityGrid(step=step, lower=-half, values=values)
        return cls(window=window, representation=grid, spec=spec)

    @classmethod
    def from_segments(
        cls,
        window: Window,
        starts,
        ends,
        weight: float = 1.0,
        spec=None,
    ) -> "EnvRealization":
        """Segments clipped to the padded window."""
        starts = np.asarray(starts, dtype=float).reshape(-1, window.dim)
        ends = np.asarray(ends, dtype=float).reshape(-1, window.dim)
        starts, ends = clip_segments(starts, ends, window.padded_half_width)
        return cls(
            window=window,
            representation=SegmentSet(starts, ends, float(weight)),
            spec=spec,
            normalization=float(weight),
        )

    @classmethod
    def from_balls(
        cls,
        window: Window,
        centers,
        radii,
        weight: float = 1.0,
        spec=None,
    ) -> "EnvRealization":
        centers = np.asarray(centers, dtype=float).reshape(-1, window.dim)
        radii = np.broadcast_to(
            np.asarray(radii, dtype=float), (centers.shape[0],)
        ).copy()
        return cls(
            window=window,
            representation=BallSet(centers, radii, float(weight)),
            spec=spec,
            normalization=float(weight),
        )

    @classmethod
    def from_manhattan_lines(
        cls,
        window: Window,
        vertical,
        horizontal,
        weight: float = 1.0,
        spec=None,
    ) -> "EnvRealization":
        """Full-width lines x = vertical[i] and y = horizontal[j] (d = 2)."""
        half = window.padded_half_width
        vertical = np.sort(np.asarray(vertical, dtype=float).reshape(-1))
        horizontal = np.sort(np.asarray(horizontal, dtype=float).reshape(-1))
        xs = vertical[np.abs(vertical) <= half]
        ys = horizontal[np.abs(horizontal) <= half]
        starts = [[x, -half] for x in xs] + [[-half, y] for y in ys]
        ends = [[x, half] for x in xs] + [[half, y] for y in ys]
        segments = SegmentSet(
            np.asarray(starts, dtype=float).reshape(-1, 2),
            np.asarray(ends, dtype=float).reshape(-1, 2),
            float(weight),
        )
        upper = max([half, *vertical.tolist(), *horizontal.tolist()])
        return cls(
            window=window,
            representation=segments,
            spec=spec,
            normalization=float(weight),
            lines=ManhattanLines(vertical, horizontal, upper),
        )

    def grid_shape(self, step: float) -> tuple[int, float]:
        """Cell count per axis and the adjusted step tiling Q_{L+m}."""
        width = 2 * self.window.padded_half_width
        n = max(1, math.ceil(width / step - 1e-9))
        if n**self.dim > _MAX_CELLS:
            n = int(_MAX_CELLS ** (1 / self.dim))
            _logger.warning(
                "grid step %g needs too many cells, coarsened to %g",
                step,
                width / n,
            )
        return n, width / n

    def rasterize(self, step: float) -> "EnvRealization":
        """The realization as a DensityGrid with cells of side ≈ step."""
        rep = self.representation
        if isinstance(rep, SegmentSet):
            raise InvalidParameter(
                "representation", "segment measures have no density"
            )
        n, step = self.grid_shape(step)
        half = self.window.padded_half_width
        if isinstance(rep, Scalar):
            values = np.full((n,) * self.dim, rep.z)
        elif isinstance(rep, DensityGrid):
            grid = DensityGrid(step, -half, np.zeros((n,) * self.dim))
            values = rep.value_at(grid.cell_centers())
            values = values.reshape((n,) * self.dim)
        else:
            values = rep.weight * rasterize_balls(
                rep.centers, rep.radii, n, step, -half
            )
        grid = DensityGrid(step=step, lower=-half, values=values)
        return replace(self, representation=grid)

    def to_csv(self, target: Target) -> None:
        """One primitive (segment or ball) per row."""
        rep = self.representation
        axes = [f"x{k + 1}" for k in range(self.dim)]
        if isinstance(rep, SegmentSet):
            header = (
                ["segment"]
                + [f"{a}_start" for a in axes]
                + [f"{a}_end" for a in axes]
                + ["weight"]
            )
            rows = (
                [i, *rep.starts[i], *rep.ends[i], rep.weight]
                for i in range(len(rep))
            )
        elif isinstance(rep, BallSet):
            header = ["ball", *axes, "radius", "weight"]
            rows = (
                [i, *rep.centers[i], rep.radii[i], rep.weight]
                for i in range(len(rep))
            )
        else:
            raise InvalidParameter(
                "representation", f"{rep.kind} has no primitives to export"
            )
        write_rows(target, header, rows)


def rasterize_balls(
    centers: np.ndarray,
    radii: np.ndarray,
    n: int,
    step: float,
    lower: float,
) -> np.ndarray:
    """Count of open balls covering each cell center of an n^d grid."""
    dim = centers.shape[1] if centers.ndim == 2 else 1
    counts = np.zeros((n,) * dim)
    axis = lower + step * (np.arange(n) + 0.5)
    for center, radius in zip(centers, radii):
        lo = np.clip(
            np.floor((center - radius - lower) / step).astype(int), 0, n
        )
        hi = np.clip(
            np.ceil((center + radius - lower) / step).astype(int), 0, n
        )
        if np.any(hi <= lo):
            continue
        sub = [axis[lo[k] : hi[k]] - center[k] for k in range(dim)]
        mesh = np.meshgrid(*sub, indexing="ij")
        inside = sum(m**2 for m in mesh) < radius**2
        counts[tuple(slice(lo[k], hi[k]) for k in range(dim))] += inside
    return counts
