import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate

from coxperc.boolmodel import covering_balls
from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.radius_law import RadiusLaw, covering_range, law_moment
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import (
    EnvironmentSpec,
    HomogeneousSpec,
    MixedPoissonSpec,
    ParetoZ,
)
from coxperc.estimators.exceptions import CompleteCoverage
from coxperc.estimators.simulation import simulate

__all__ = ("vacant_probability", "vacant_closed_form", "vacant_window")

_logger = logging.getLogger("coxperc.estimators")

# mixing levels above this survival are ignored when sizing the window
_Z_SURVIVAL = 1e-6


def vacant_closed_form(
    spec: EnvironmentSpec, law: RadiusLaw, intensity: float, dim: int
) -> Optional[float]:
    """P(o ∉ C) when Λ is a multiple of Lebesgue measure.

    With Λ = Z dx this is E[exp(-λ Z v_d E[ρ^d])]; other environments
    have no closed form.
    """
    rate = intensity * unit_ball_volume(dim) * law.moment(dim)
    if isinstance(spec, HomogeneousSpec):
        return math.exp(-rate)
    if not isinstance(spec, MixedPoissonSpec):
        return None
    c = spec.normalization(dim)
    if not isinstance(spec.z, ParetoZ):
        return sum(p * math.exp(-rate * c * z) for z, p in spec.z.atoms())
    z = spec.z
    density = lambda t: z.tail * z.scale**z.tail * t ** (-z.tail - 1)  # noqa
    value, _ = integrate.quad(
        lambda t: math.exp(-rate * c * t) * density(t),
        z.scale,
        math.inf,
        limit=200,
    )
    return value


def vacant_window(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    dim: int,
    margin: float = 0.0,
) -> Window:
    """Q_R holding the centers of the balls that may cover the origin.

    R is the covering range at the largest local intensity: λ times
    the normalized top of Z for a mixed Poisson environment.
    """
    peak = intensity
    if isinstance(spec, MixedPoissonSpec):
        peak *= spec.normalization(dim) * spec.z.upper(_Z_SURVIVAL)
    reach = covering_range(law, max(peak, 1e-12), dim) or 1.0
    return Window(
        dim=dim,
        half_width=max(reach, 1.0),
        margin=max(spec.required_margin(dim), margin),
    )


def vacant_probability(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensities: Union[float, Sequence[float]],
    replicates: int,
    seed: Seed,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Fraction of replicates in which no ball covers the origin."""
    if not math.isfinite(law_moment(law, dim)):
        raise CompleteCoverage(dim)
    grid = np.atleast_1d(np.asarray(intensities, dtype=float))
    pool = ReplicatePool.resolve(pool)
    vacant = []
    closed = []
    for k, intensity in enumerate(grid):
        window = vacant_window(spec, law, intensity, dim, margin)

        def replicate(index: int, replicate_seed: Seed, intensity=intensity):
            mps = simulate(spec, law, intensity, window, replicate_seed)
            return covering_balls(mps, np.zeros(dim)).size == 0

        outcomes = pool.map(replicate, seed.branch(f"lambda:{k}"), replicates)
        vacant.append(sum(outcomes))
        closed.append(vacant_closed_form(spec, law, intensity, dim))
        _logger.info(
            "vacant probability at λ=%g: %d/%d",
            intensity,
            vacant[-1],
            replicates,
        )
    columns = {}
    if any(c is not None for c in closed):
        columns["closed_form"] = closed
    return EstimateReport.from_proportions(
        "vacant_probability",
        "lambda",
        grid,
        vacant,
        replicates,
        int(seed),
        columns=columns,
        flags={"dim": dim, "environment": spec.kind},
    )
