import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import HomogeneousSpec
from coxperc.estimators.exceptions import InfiniteMean
from coxperc.estimators.moments import check_ladder
from coxperc.estimators.simulation import (
    crosses,
    simulate,
    simulation_window,
)

__all__ = ("one_dim_triviality", "exact_coverage_probability")

_logger = logging.getLogger("coxperc.estimators")

# mass of the residual coverage left above the grid
_TOP_TOLERANCE = 1e-10
EXACT_MAX_STEPS = 20_000


def _residual_grid(law: RadiusLaw, intensity: float, step: float):
    """Grid for D with P(D > top) negligible, and the survival of 2ρ."""
    if law.is_bounded():
        top = 2 * law.esssup + step
    else:
        top = 2.0
        while intensity * law.expect(
            lambda r, t=top: np.maximum(2 * r - t, 0.0), top / 2
        ) > _TOP_TOLERANCE:
            top *= 2
    values = np.arange(0.0, top + step, step)
    survival = np.asarray(law.survival(values / 2), dtype=float)
    return values, survival


def exact_coverage_probability(
    law: RadiusLaw, intensity: float, half_width: float, step: float = 0.01
) -> float:
    """P([-L, L] ⊂ C) for the 1-D Poisson Boolean model.

    The residual coverage D(x), the length of covered ground ahead of x,
    is a Markov process. Its stationary law is
    P(D <= u) = exp(-λ ∫_u^∞ P(2ρ > w) dw). On a grid of pitch ``step``
    the sub-distribution of D over covered paths is moved right by one
    pitch, loses the paths whose coverage ends, and absorbs the
    intervals starting inside the pitch.
    """
    if intensity == 0 or law.moment(1) == 0:
        return 0.0
    _, survival = _residual_grid(law, intensity, step)
    tail = cumulative_trapezoid(survival[::-1], dx=step, initial=0.0)[::-1]
    cdf = np.exp(-intensity * tail)
    # the origin of the interval must itself be covered
    cdf = cdf - cdf[0]
    mass = cdf[-1]
    arrivals = np.exp(-intensity * step * survival)
    for _ in range(int(round(2 * half_width / step))):
        shifted = np.empty_like(cdf)
        shifted[:-1] = cdf[1:] - cdf[1]
        shifted[-1] = mass - cdf[1]
        mass = shifted[-1]
        cdf = shifted * arrivals
        cdf[-1] = mass
        if mass <= 0:
            return 0.0
    return float(mass)


def one_dim_triviality(
    law: RadiusLaw,
    intensity: float,
    half_widths: Sequence[float],
    replicates: int,
    seed: Seed,
    exact_step: float = 0.01,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """P([-L, L] is crossed by one cluster) on the line, per L.

    In one dimension a crossing cluster covers the whole interval, so
    the exact coverage probability is reported alongside wherever the
    recursion stays below ``EXACT_MAX_STEPS`` steps.
    """
    if not math.isfinite(law.moment(1)):
        raise InfiniteMean()
    ladder = check_ladder(half_widths)
    spec = HomogeneousSpec()
    window = simulation_window(spec, law, ladder[-1], 1, margin)
    rungs = [
        Window(dim=1, half_width=h, margin=window.margin) for h in ladder
    ]

    def replicate(index: int, replicate_seed: Seed):
        mps = simulate(spec, law, intensity, window, replicate_seed)
        return [crosses(mps.restrict(w), w.inner()) for w in rungs]

    outcomes = np.asarray(
        ReplicatePool.resolve(pool).map(replicate, seed, replicates),
        dtype=bool,
    ).reshape(replicates, len(ladder))
    hits = outcomes.sum(axis=0)
    exact, agreement = [], []
    for k, h in enumerate(ladder):
        if 2 * h / exact_step > EXACT_MAX_STEPS:
            exact.append(None)
            continue
        p = exact_coverage_probability(law, intensity, h, exact_step)
        exact.append(p)
        spread = math.sqrt(p * (1 - p) / replicates) + 1 / replicates
        agreement.append(bool(abs(hits[k] / replicates - p) <= 3 * spread))
    estimates = hits / replicates
    _logger.info(
        "1-D crossing probability at L=%g: %.4f", ladder[-1], estimates[-1]
    )
    return EstimateReport.from_proportions(
        "one_dim_triviality",
        "half_width",
        ladder,
        hits,
        replicates,
        int(seed),
        columns={"exact": exact},
        flags={
            "lambda": intensity,
            "exact_agreement": all(agreement),
            "strictly_decreasing": bool(np.all(np.diff(estimates) < 0)),
        },
    )
