import logging
from typing import Callable

import numpy as np

from coxperc.common.utils import Errors
from coxperc.core.sampling import poisson_in_box
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments.exceptions import (
    IncompatibleDimension,
    MarginTooSmall,
)
from coxperc.environments.realization import (
    BallSet,
    DensityGrid,
    EnvRealization,
    ManhattanLines,
    Scalar,
    SegmentSet,
    rasterize_balls,
)
from coxperc.environments.spec import (
    BooleanCountSpec,
    DelaunayEdgesSpec,
    EnvironmentSpec,
    HomogeneousSpec,
    IndicatorFieldSpec,
    ManhattanGridSpec,
    MixedPoissonSpec,
    ShotNoiseSpec,
    VoronoiEdgesSpec,
)
from coxperc.environments.tessellation import sample_tessellation
from coxperc.utils.type_registry import TypeRegistry

__all__ = ("make_environment", "ENVIRONMENT_BUILDERS", "truncation_radius")

_logger = logging.getLogger("coxperc.environments")

Builder = Callable[[EnvironmentSpec, Window, np.random.Generator], dict]
ENVIRONMENT_BUILDERS: TypeRegistry[Builder] = TypeRegistry("builder")

# driving balls that could reach the window but are not sampled
TRUNCATION_TOLERANCE = 1e-4


def make_environment(
    spec: EnvironmentSpec, window: Window, seed: Seed
) -> EnvRealization:
    Errors.raise_if_false(
        spec.supports_dim(window.dim),
        IncompatibleDimension,
        spec.kind,
        window.dim,
    )
    required = spec.required_margin(window.dim)
    Errors.raise_if_false(
        window.margin >= required,
        MarginTooSmall,
        spec.kind,
        required,
        window.margin,
    )
    builder = ENVIRONMENT_BUILDERS.require(spec.kind)
    fields = builder(spec, window, seed.rng())
    fields.setdefault("normalization", spec.normalization(window.dim))
    return EnvRealization(window=window, spec=spec, seed=seed, **fields)


def _balls_meeting_box(centers, radii, half_width):
    gap = np.maximum(np.abs(centers) - half_width, 0)
    return np.linalg.norm(gap, axis=1) < radii


@ENVIRONMENT_BUILDERS.register("homogeneous")
def _homogeneous(spec: HomogeneousSpec, window: Window, rng):
    grid = DensityGrid.uniform(1.0, window.padded_half_width, window.dim)
    return {"representation": grid}


@ENVIRONMENT_BUILDERS.register("mixed_poisson")
def _mixed_poisson(spec: MixedPoissonSpec, window: Window, rng):
    z = spec.normalization(window.dim) * spec.z.sample(rng)
    return {"representation": Scalar(float(z))}


@ENVIRONMENT_BUILDERS.register("indicator_field")
def _indicator_field(spec: IndicatorFieldSpec, window: Window, rng):
    half = window.padded_half_width
    drivers = poisson_in_box(rng, spec.mu, half + spec.radius, window.dim)
    radii = np.full(drivers.shape[0], spec.radius)
    blank = EnvRealization(window=window, representation=Scalar(0.0))
    n, step = blank.grid_shape(spec.step)
    covered = rasterize_balls(drivers, radii, n, step, -half) > 0
    c = spec.normalization(window.dim)
    values = c * np.where(covered, spec.lambda1, spec.lambda2)
    grid = DensityGrid(step=step, lower=-half, values=values)
    return {"representation": grid}


@ENVIRONMENT_BUILDERS.register("shot_noise")
def _shot_noise(spec: ShotNoiseSpec, window: Window, rng):
    half = window.padded_half_width
    r = spec.support_radius
    drivers = poisson_in_box(rng, spec.mu, half + r, window.dim)
    radii = np.full(drivers.shape[0], r)
    keep = _balls_meeting_box(drivers, radii, half)
    weight = spec.normalization(window.dim) * spec.height
    return {
        "representation": BallSet(drivers[keep], radii[keep], weight),
    }


def truncation_radius(
    spec: BooleanCountSpec, half_width: float, dim: int
) -> tuple[float, float]:
    """Extra sampling range for driving balls, and the omitted mass.

    Balls centered outside Q_{half_width + R} reach Q_half_width only if
    ρ > R; their expected number is at most
    μ E[(2(half_width + ρ))^d - (2(half_width + R))^d; ρ > R].
    """
    law = spec.radius_law
    if law.is_bounded():
        return law.esssup, 0.0

    def omitted(radius: float) -> float:
        edge = 2 * (half_width + radius)
        return spec.mu * law.expect(
            lambda r: np.power(2 * (half_width + r), dim) - edge**dim,
            radius,
        )

    radius = max(1.0, half_width)
    mass = omitted(radius)
    while mass >= TRUNCATION_TOLERANCE and radius < 1e4 * half_width:
        radius *= 2
        mass = omitted(radius)
    if mass >= TRUNCATION_TOLERANCE:
        _logger.warning(
            "driving balls truncated at %g with omitted mass %.3g",
            radius,
            mass,
        )
    return radius, max(mass, 0.0)


@ENVIRONMENT_BUILDERS.register("boolean_count")
def _boolean_count(spec: BooleanCountSpec, window: Window, rng):
    half = window.padded_half_width
    reach, mass = truncation_radius(spec, half, window.dim)
    drivers = poisson_in_box(rng, spec.mu, half + reach, window.dim)
    radii = np.asarray(
        spec.radius_law.sample(rng, drivers.shape[0]), dtype=float
    )
    keep = _balls_meeting_box(drivers, radii, half)
    weight = spec.checked_scale(window.dim)
    _logger.debug(
        "boolean count field: %d of %d driving balls meet the window",
        int(keep.sum()),
        drivers.shape[0],
    )
    return {
        "representation": BallSet(drivers[keep], radii[keep], weight),
        "truncation_mass": mass,
    }


def _tessellation(spec, window: Window, rng, dual: bool):
    half = window.padded_half_width
    tessellation = sample_tessellation(rng, spec.mu, half, dual)
    if dual:
        starts, ends = tessellation.voronoi_edges(half)
    else:
        starts, ends = tessellation.delaunay_edges(half)
    weight = spec.normalization(window.dim)
    return {
        "representation": SegmentSet(starts, ends, weight),
        "generators": tessellation.generators,
        "generator_half_width": tessellation.sampled_half_width,
    }


@ENVIRONMENT_BUILDERS.register("voronoi_edges")
def _voronoi(spec: VoronoiEdgesSpec, window: Window, rng):
    return _tessellation(spec, window, rng, dual=True)


@ENVIRONMENT_BUILDERS.register("delaunay_edges")
def _delaunay(spec: DelaunayEdgesSpec, window: Window, rng):
    return _tessellation(spec, window, rng, dual=False)


def _line_positions(rng, intensity: float, lower: float, upper: float):
    n = rng.poisson(intensity * (upper - lower))
    return np.sort(rng.uniform(lower, upper, n))


@ENVIRONMENT_BUILDERS.register("manhattan_grid")
def _manhattan(spec: ManhattanGridSpec, window: Window, rng):
    half = window.padded_half_width
    # positions beyond the window feed the connectivity field
    sparsest = min(spec.vertical_intensity, spec.horizontal_intensity)
    upper = half + max(half, 20 / sparsest)
    vertical = _line_positions(rng, spec.vertical_intensity, -half, upper)
    horizontal = _line_positions(
        rng, spec.horizontal_intensity, -half, upper
    )
    xs = vertical[vertical <= half]
    ys = horizontal[horizontal <= half]
    starts = np.concatenate(
        [
            np.stack([xs, np.full(xs.shape, -half)], axis=1),
            np.stack([np.full(ys.shape, -half), ys], axis=1),
        ]
    )
    ends = np.concatenate(
        [
            np.stack([xs, np.full(xs.shape, half)], axis=1),
            np.stack([np.full(ys.shape, half), ys], axis=1),
        ]
    )
    weight = spec.normalization(window.dim)
    return {
        "representation": SegmentSet(starts, ends, weight),
        "lines": ManhattanLines(vertical, horizontal, upper),
    }

