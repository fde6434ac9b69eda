import logging
from typing import Optional, Sequence

import numpy as np

from coxperc.boolmodel import build_clusters, giant_cluster_count
from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import (
    EnvironmentSpec,
    essential_connectedness_audit,
    make_environment,
)
from coxperc.estimators.moments import check_ladder
from coxperc.estimators.simulation import simulate, simulation_window

__all__ = ("uniqueness_report", "connectedness_rate")

_logger = logging.getLogger("coxperc.estimators")


def uniqueness_report(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    half_widths: Sequence[float],
    replicates: int,
    seed: Seed,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Distribution of the number of crossing clusters per window.

    The estimate is P(count >= 2); the columns give the fractions with
    0, 1 and at least 2 crossing clusters and the mean count.
    """
    ladder = check_ladder(half_widths)
    window = simulation_window(spec, law, ladder[-1], dim, margin)
    rungs = [
        Window(dim=dim, half_width=h, margin=window.margin) for h in ladder
    ]

    def replicate(index: int, replicate_seed: Seed):
        mps = simulate(spec, law, intensity, window, replicate_seed)
        counts = []
        for rung in rungs:
            local = mps.restrict(rung)
            if len(local) == 0:
                counts.append(0)
                continue
            labels = build_clusters(local)
            counts.append(giant_cluster_count(local, labels, rung.inner()))
        return counts

    counts = np.asarray(
        ReplicatePool.resolve(pool).map(replicate, seed, replicates),
        dtype=int,
    ).reshape(replicates, len(ladder))
    several = np.sum(counts >= 2, axis=0)
    fractions = several / replicates
    report = EstimateReport.from_proportions(
        "uniqueness",
        "half_width",
        ladder,
        several,
        replicates,
        int(seed),
        columns={
            "count_0": list(np.mean(counts == 0, axis=0)),
            "count_1": list(np.mean(counts == 1, axis=0)),
            "count_2plus": list(fractions),
            "mean_count": list(counts.mean(axis=0)),
        },
        flags={
            "lambda": intensity,
            "environment": spec.kind,
            "dim": dim,
            "decreasing": bool(np.all(np.diff(fractions) <= 0)),
        },
    )
    _logger.info(
        "P(several crossing clusters) at L=%g: %.3f",
        ladder[-1],
        report.estimates[-1],
    )
    return report


def connectedness_rate(
    spec: EnvironmentSpec,
    r: float,
    alpha: float,
    replicates: int,
    seed: Seed,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
) -> EstimateReport:
    """Fraction of environments whose support in Q_α is essentially
    r-connected through Q_2α.
    """
    margin = max(spec.required_margin(dim), alpha)
    window = Window(dim=dim, half_width=alpha, margin=margin)

    def replicate(index: int, replicate_seed: Seed):
        env = make_environment(
            spec, window, replicate_seed.branch("environment")
        )
        audit = essential_connectedness_audit(env, r, alpha)
        return audit.connected, audit.precondition_held

    results = ReplicatePool.resolve(pool).map(replicate, seed, replicates)
    connected = sum(1 for c, _ in results if c)
    held = [p for _, p in results if p is not None]
    columns = {}
    if held:
        columns["precondition"] = [sum(held) / len(held)]
    return EstimateReport.from_proportions(
        "connectedness_audit",
        "alpha",
        [alpha],
        [connected],
        replicates,
        int(seed),
        columns=columns,
        flags={"r": r, "environment": spec.kind, "dim": dim},
    )
