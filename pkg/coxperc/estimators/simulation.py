"""Replicate building blocks shared by the estimators."""
from dataclasses import replace

import numpy as np

from coxperc.boolmodel import build_clusters, crossing_exists
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.coxsampler import MarkedPointSet, sample_marked
from coxperc.environments import EnvironmentSpec, make_environment
from coxperc.estimators.exceptions import LadderOutsideWindow
from coxperc.settings import get_settings

__all__ = (
    "radius_margin",
    "simulation_window",
    "simulate",
    "simulate_coupled",
    "thinned",
    "crosses",
)

# balls beyond this survival level are ignored when padding windows
_MARGIN_SURVIVAL = 1e-3


def radius_margin(law: RadiusLaw) -> float:
    if law.is_bounded():
        return float(law.esssup)
    radius = 1.0
    while float(law.survival(radius)) > _MARGIN_SURVIVAL:
        radius *= 2
    return radius


def simulation_window(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    half_width: float,
    dim: int,
    margin: float = 0.0,
) -> Window:
    """Q_half_width padded for the environment and for incoming balls.

    ``margin`` is a floor on the pad.
    """
    margin = max(spec.required_margin(dim), radius_margin(law), margin)
    limit = get_settings().max_half_width
    if half_width + margin > limit:
        raise LadderOutsideWindow(half_width + margin, limit)
    return Window(dim=dim, half_width=half_width, margin=margin)


def simulate(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    window: Window,
    seed: Seed,
) -> MarkedPointSet:
    env = make_environment(spec, window, seed.branch("environment"))
    return sample_marked(env, intensity, law, seed)


def simulate_coupled(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    window: Window,
    seed: Seed,
) -> tuple[MarkedPointSet, np.ndarray]:
    """A sample at ``intensity`` with uniform thinning labels.

    Keeping the points with label below p gives a sample at p·intensity;
    the samples are nested in p.
    """
    mps = simulate(spec, law, intensity, window, seed)
    labels = seed.branch("thinning").rng().random(len(mps))
    return mps, labels


def thinned(
    mps: MarkedPointSet, labels: np.ndarray, fraction: float
) -> MarkedPointSet:
    keep = labels < fraction
    return replace(
        mps,
        points=mps.points[keep],
        radii=mps.radii[keep],
        intensity=mps.intensity * fraction,
    )


def crosses(mps: MarkedPointSet, inner: Window, axis: int = 0) -> bool:
    """Whether one cluster meets both faces of ``inner`` along ``axis``."""
    if len(mps) == 0:
        return False
    return crossing_exists(mps, build_clusters(mps), inner, axis)
