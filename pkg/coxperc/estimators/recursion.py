import logging
import math
from typing import Optional, Sequence

import numpy as np

from coxperc.boolmodel import g_event, origin_cluster, reach_event
from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport, binomial_se
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import EnvironmentSpec, HomogeneousSpec, phi_hat
from coxperc.estimators.exceptions import InvalidLadder
from coxperc.estimators.simulation import simulate, simulation_window

__all__ = (
    "recursion_window",
    "scaling_recursion_check",
    "stabilization_tail",
)

_logger = logging.getLogger("coxperc.estimators")

RUNG_RATIO = 10
VARIANTS = ("point", "ball")


def _check_rungs(alphas: Sequence[float]) -> list[float]:
    rungs = [float(a) for a in alphas]
    if not rungs or rungs[0] <= 0:
        raise InvalidLadder("the α ladder needs positive rungs")
    for low, high in zip(rungs, rungs[1:]):
        if not math.isclose(high, RUNG_RATIO * low, rel_tol=1e-9):
            raise InvalidLadder(
                f"α rungs must grow by a factor {RUNG_RATIO}"
            )
    return rungs


def recursion_window(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    alphas: Sequence[float],
    dim: int,
    margin: float = 0.0,
) -> Window:
    """Simulation window containing B_100α for the top rung α."""
    rungs = _check_rungs(alphas)
    return simulation_window(
        spec, law, RUNG_RATIO**2 * rungs[-1], dim, margin
    )


def stabilization_tail(
    spec: EnvironmentSpec,
    alpha: float,
    replicates: int,
    seed: Seed,
    dim: int,
    pool: Optional[ReplicatePool] = None,
) -> tuple[float, float, str]:
    """φ̂(alpha) with its standard error and where it came from."""
    if isinstance(spec, HomogeneousSpec):
        return 0.0, 0.0, "exact"
    if spec.influence_range is not None and alpha > spec.influence_range:
        return 0.0, 0.0, "b_dependent"
    if spec.has_radius_field:
        report = phi_hat(
            spec, [alpha], alpha / 10, replicates, seed, dim, pool
        )
        return report.estimates[0], report.standard_errors[0], "estimated"
    return 1.0, 0.0, "unavailable"


def scaling_recursion_check(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    alphas: Sequence[float],
    replicates: int,
    seed: Seed,
    dim: int = 2,
    variant: Optional[str] = None,
    phi_replicates: Optional[int] = None,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Check f(α) <= f(α/10)² + ĝ(α) along a ladder of G-event rungs.

    f(α) = P̂(G(o, α)) and ĝ(α) = λc∫_α^∞ r^d ν(dr) + 2cφ̂(10α), with c
    calibrated on the smallest rung as max(1, f(α_0)/(λα_0^d)). The
    bound f(α) <= cλα^d and the comparison
    P̂(M >= 9α) <= f(α) + λc∫_α^∞ r^d ν(dr) are reported per rung.
    Both G-event variants are estimated; ``variant`` picks the one in
    the estimate column.
    """
    rungs = _check_rungs(alphas)
    primary = variant or "point"
    if primary not in VARIANTS:
        raise InvalidLadder(f"unknown G-event variant '{primary}'")
    pool = ReplicatePool.resolve(pool)
    window = recursion_window(spec, law, rungs, dim, margin)

    def replicate(index: int, replicate_seed: Seed):
        mps = simulate(spec, law, intensity, window, replicate_seed)
        events = [[g_event(mps, a, v) for a in rungs] for v in VARIANTS]
        stats = origin_cluster(mps, volume=False)
        reach = [reach_event(stats, a) for a in rungs]
        return events, reach

    results = pool.map(replicate, seed, replicates)
    events = np.asarray([r[0] for r in results], dtype=bool).reshape(
        replicates, len(VARIANTS), len(rungs)
    )
    reach = np.asarray([r[1] for r in results], dtype=bool).reshape(
        replicates, len(rungs)
    )
    hits = events.sum(axis=0)
    f = hits / replicates
    se = np.vectorize(binomial_se)(hits, replicates)

    tails = np.asarray(
        [law.tail_power_integral(a, dim) for a in rungs], dtype=float
    )
    phis, sources = [], []
    for k, a in enumerate(rungs):
        phi, _, source = stabilization_tail(
            spec,
            RUNG_RATIO * a,
            phi_replicates or replicates,
            seed.branch(f"phi:{k}"),
            dim,
            pool,
        )
        phis.append(phi)
        sources.append(source)
    phis = np.asarray(phis)

    columns, flags = {}, {}
    for v, name in enumerate(VARIANTS):
        scale = intensity * rungs[0] ** dim
        c = max(1.0, f[v, 0] / scale) if intensity > 0 else 1.0
        reach_term = intensity * c * tails if intensity > 0 else 0 * phis
        g = reach_term + 2 * c * phis
        bound = c * intensity * np.power(rungs, dim)
        recursion = [True]
        for k in range(1, len(rungs)):
            slack = 3 * math.sqrt(
                se[v, k] ** 2 + (2 * f[v, k - 1] * se[v, k - 1]) ** 2
            )
            recursion.append(
                bool(f[v, k] <= f[v, k - 1] ** 2 + g[k] + slack)
            )
        reach_p = reach.mean(axis=0)
        reach_se = np.vectorize(binomial_se)(reach.sum(axis=0), replicates)
        reach_rhs = f[v] + reach_term
        reach_ok = [
            bool(
                reach_p[k]
                <= reach_rhs[k] + 2 * math.hypot(reach_se[k], se[v, k])
            )
            for k in range(len(rungs))
        ]
        power_ok = [
            bool(f[v, k] <= bound[k] + 3 * se[v, k])
            for k in range(len(rungs))
        ]
        if name != primary:
            columns[f"f_{name}"] = list(f[v])
            columns[f"f_{name}_se"] = list(se[v])
        columns[f"g_{name}"] = list(g)
        columns[f"bound_{name}"] = list(bound)
        columns[f"reach_bound_{name}"] = list(reach_rhs)
        flags[f"c_{name}"] = c
        flags[f"recursion_{name}"] = recursion
        flags[f"power_bound_{name}"] = power_ok
        flags[f"reach_comparison_{name}"] = reach_ok
    columns["phi"] = list(phis)
    columns["reach_probability"] = list(reach.mean(axis=0))
    flags["phi_source"] = sources
    flags["variant"] = primary
    flags["lambda"] = intensity
    flags["recursion_holds"] = all(flags[f"recursion_{primary}"])
    if "unavailable" in sources:
        _logger.warning(
            "%s has no stabilization field; φ̂ is taken as 1", spec.kind
        )
    primary_index = VARIANTS.index(primary)
    _logger.info(
        "scaling recursion over %d rungs: %s",
        len(rungs),
        "holds" if flags["recursion_holds"] else "fails",
    )
    return EstimateReport.from_proportions(
        "scaling_recursion",
        "alpha",
        rungs,
        hits[primary_index],
        replicates,
        int(seed),
        columns=columns,
        flags=flags,
    )
