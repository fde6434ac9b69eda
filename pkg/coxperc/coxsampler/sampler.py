import logging
from typing import Optional

import numpy as np

from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import ball_volume
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.sampling import poisson_in_box, uniform_in_balls
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.coxsampler.points import MarkedPointSet
from coxperc.environments.realization import (
    DensityGrid,
    EnvRealization,
    Scalar,
    SegmentSet,
)

__all__ = ("sample_cox", "attach_marks", "sample_marked", "thin")

_logger = logging.getLogger("coxperc.coxsampler")


def sample_cox(env: EnvRealization, intensity: float, seed: Seed):
    """Poisson points with intensity measure ``intensity · Λ`` given Λ."""
    if intensity < 0:
        raise InvalidParameter("lambda", "must be nonnegative")
    dim = env.dim
    half = env.window.padded_half_width
    empty = np.empty((0, dim))
    if intensity == 0:
        return empty
    rng = seed.rng()
    rep = env.representation

    if isinstance(rep, Scalar):
        return poisson_in_box(rng, intensity * rep.z, half, dim)

    if isinstance(rep, DensityGrid):
        if rep.constant is not None:
            return poisson_in_box(rng, intensity * rep.constant, half, dim)
        means = intensity * rep.values.ravel() * rep.step**dim
        counts = rng.poisson(means)
        cells = np.repeat(np.arange(means.size), counts)
        index = np.stack(np.unravel_index(cells, rep.values.shape), axis=1)
        jitter = rng.random((cells.size, dim))
        points = rep.lower + (index + jitter) * rep.step
        return np.clip(points, -half, half)

    if isinstance(rep, SegmentSet):
        if len(rep) == 0:
            return empty
        counts = rng.poisson(intensity * rep.weight * rep.lengths)
        owner = np.repeat(np.arange(len(rep)), counts)
        t = rng.random(owner.size)[:, None]
        points = rep.starts[owner] + t * (rep.ends[owner] - rep.starts[owner])
        return np.clip(points, -half, half)

    if len(rep) == 0:
        return empty
    # a Poisson process on each whole ball, restricted to the window
    counts = rng.poisson(
        intensity * rep.weight * ball_volume(rep.radii, dim)
    )
    points = uniform_in_balls(rng, rep.centers, rep.radii, counts)
    return points[np.all(np.abs(points) <= half, axis=1)]


def attach_marks(
    points,
    law: RadiusLaw,
    seed: Seed,
    window: Optional[Window] = None,
    intensity: float = 0.0,
) -> MarkedPointSet:
    """I.i.d. radii from ``law``, drawn from their own stream."""
    points = np.asarray(points, dtype=float)
    if window is None:
        dim = points.shape[1] if points.ndim == 2 and points.size else 2
        points = points.reshape(-1, dim)
        half = float(np.max(np.abs(points))) if points.size else 1.0
        window = Window(dim=dim, half_width=max(half, 1e-9))
    points = points.reshape(-1, window.dim)
    radii = np.asarray(
        law.sample(seed.rng(), points.shape[0]), dtype=float
    ).reshape(-1)
    return MarkedPointSet(
        points, radii, window, intensity, mark_seed=int(seed)
    )


def thin(points, p: float, seed: Seed) -> np.ndarray:
    """Keep each point independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise InvalidParameter("p", "must lie in [0, 1]")
    points = np.asarray(points, dtype=float)
    keep = seed.rng().random(points.shape[0]) < p
    return points[keep]


def sample_marked(
    env: EnvRealization, intensity: float, law: RadiusLaw, seed: Seed
) -> MarkedPointSet:
    """Cox points on the "positions" branch with radii on "marks"."""
    points = sample_cox(env, intensity, seed.branch("positions"))
    marked = attach_marks(
        points, law, seed.branch("marks"), env.window, intensity
    )
    _logger.debug("sampled %d marked points", len(marked))
    env_seed = int(env.seed) if env.seed is not None else None
    return MarkedPointSet(
        marked.points,
        marked.radii,
        marked.window,
        intensity,
        env_seed=env_seed,
        mark_seed=marked.mark_seed,
    )
