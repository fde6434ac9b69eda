import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport, wilson_interval
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import (
    EnvironmentSpec,
    make_environment,
    measure_of_ball,
)

__all__ = ("deviation_tail", "truncated_integral", "deviation_verdict")

_logger = logging.getLogger("coxperc.estimators")

SUMMABLE_THRESHOLD = 0.1


def truncated_integral(
    alphas: np.ndarray, tails: np.ndarray, s: float
) -> np.ndarray:
    """I(A) = ∫_1^A α^(s-1) P(Λ(B_α) >= cα^d) dα at each grid point.

    Trapezoid rule on the grid; points below 1 contribute nothing.
    """
    integrand = np.power(alphas, s - 1) * tails
    integral = np.zeros(alphas.size)
    for k in range(1, alphas.size):
        low = max(alphas[k - 1], 1.0)
        if alphas[k] <= 1.0:
            continue
        left = (
            integrand[k - 1]
            if alphas[k - 1] >= 1.0
            else float(np.interp(1.0, alphas, integrand))
        )
        integral[k] = integral[k - 1] + 0.5 * (left + integrand[k]) * (
            alphas[k] - low
        )
    return integral


def deviation_verdict(
    alphas: np.ndarray,
    integral: np.ndarray,
    last_tail_low: float,
    s: float,
) -> tuple[str, Optional[float]]:
    """Compare the growth of I over the last doubling with α^s growth.

    A flat tail q gives I(A) ≈ q(A^s - 1)/s, whose relative increase
    over [A/2, A] is close to 1 - 2^(-s).
    """
    top = integral[-1]
    if top == 0:
        return "summable", 0.0
    half = float(np.interp(alphas[-1] / 2, alphas, integral))
    growth = (top - half) / top
    if growth >= 0.5 * (1 - 2.0 ** (-s)) and last_tail_low > 0:
        return "diverging", growth
    if growth < SUMMABLE_THRESHOLD:
        return "summable", growth
    return "inconclusive", growth


def deviation_tail(
    spec: EnvironmentSpec,
    c: float,
    s: float,
    alphas: Sequence[float],
    replicates: int,
    seed: Seed,
    dim: int = 2,
    betas: Sequence[float] = (1.0,),
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Tail P̂(Λ(B_α) >= cα^d) on an α grid and its truncated integral.

    Each replicate draws one environment on the largest ball and reads
    Λ(B_α) for every α. The columns also carry, for every β,
    α^(-d) log Ê[exp(βΛ(B_α))] and Ê[|Λ(B_α) - |B_α||^β].
    """
    v_d = unit_ball_volume(dim)
    if c <= v_d:
        raise InvalidParameter("c", f"must exceed v_d = {v_d:g}")
    if replicates < 1:
        raise InvalidParameter("replicates", "need at least one")
    grid = np.asarray(sorted(float(a) for a in alphas), dtype=float)
    if grid.size == 0 or grid[0] <= 0:
        raise InvalidParameter("alphas", "must be positive")
    window = Window(
        dim=dim,
        half_width=grid[-1],
        margin=max(spec.required_margin(dim), margin),
    )
    origin = np.zeros(dim)

    def replicate(index: int, replicate_seed: Seed):
        env = make_environment(
            spec, window, replicate_seed.branch("environment")
        )
        return [measure_of_ball(env, origin, a) for a in grid]

    masses = np.asarray(
        ReplicatePool.resolve(pool).map(replicate, seed, replicates),
        dtype=float,
    ).reshape(replicates, grid.size)
    thresholds = c * np.power(grid, dim)
    successes = np.sum(masses >= thresholds[None], axis=0)
    tails = successes / replicates
    integral = truncated_integral(grid, tails, s)
    last_low, _ = wilson_interval(int(successes[-1]), replicates)
    verdict, growth = deviation_verdict(grid, integral, last_low, s)

    volumes = v_d * np.power(grid, dim)
    columns = {"integral": list(integral)}
    for beta in betas:
        log_mgf = logsumexp(beta * masses, axis=0) - math.log(replicates)
        columns[f"log_mgf_{beta:g}"] = list(log_mgf / np.power(grid, dim))
        columns[f"abs_moment_{beta:g}"] = list(
            np.mean(np.abs(masses - volumes[None]) ** beta, axis=0)
        )
    _logger.info(
        "deviation tail for %s with c=%g: %s", spec.kind, c, verdict
    )
    return EstimateReport.from_proportions(
        "deviation_tail",
        "alpha",
        grid,
        successes,
        replicates,
        int(seed),
        columns=columns,
        flags={
            "verdict": verdict,
            "last_doubling_growth": growth,
            "c": c,
            "s": s,
            "dim": dim,
            "environment": spec.kind,
        },
    )
