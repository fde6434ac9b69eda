import logging
from typing import Optional, Sequence

import numpy as np
from scipy.special import comb

from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.seeds import Seed
from coxperc.environments.builders import make_environment
from coxperc.environments.exceptions import NoRadiusField
from coxperc.environments.radius_field import field_window, radius_field
from coxperc.environments.spec import BooleanCountSpec, EnvironmentSpec

__all__ = ("phi_hat", "campbell_bound")

_logger = logging.getLogger("coxperc.environments")


def campbell_bound(spec: BooleanCountSpec, alpha: float, dim: int) -> float:
    """μ ∫_α^∞ |B_{2α+r}| ν(dr), expanding (2α + r)^d."""
    law = spec.radius_law
    total = 0.0
    for j in range(dim + 1):
        moment = law.tail_power_integral(alpha, j)
        if moment == 0:
            continue
        total += comb(dim, j) * (2 * alpha) ** (dim - j) * moment
    return spec.mu * unit_ball_volume(dim) * total


def phi_hat(
    spec: EnvironmentSpec,
    alphas: Sequence[float],
    grid_step: float,
    replicates: int,
    seed: Seed,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
) -> EstimateReport:
    """Fraction of replicates where sup R over a lattice in Q_α is >= α."""
    if not spec.has_radius_field:
        raise NoRadiusField(spec.kind)
    alphas = sorted(float(a) for a in alphas)
    if not alphas or alphas[0] <= 0:
        raise InvalidParameter("alphas", "must be positive")
    if grid_step > alphas[0] / 10:
        raise InvalidParameter(
            "grid_step", f"must be at most min(alphas)/10 = {alphas[0] / 10}"
        )
    window = field_window(spec, alphas[-1], dim)
    _logger.info(
        "phi_hat for %s on %d alphas, %d replicates",
        spec.kind,
        len(alphas),
        replicates,
    )

    def replicate(index: int, replicate_seed: Seed):
        env = make_environment(
            spec, window, replicate_seed.branch("environment")
        )
        field = radius_field(env)
        sups = [
            field.supremum(window.lattice(alpha, grid_step), alpha)
            for alpha in alphas
        ]
        return sups, env.truncation_mass

    results = ReplicatePool.resolve(pool).map(replicate, seed, replicates)
    sups = np.asarray([r[0] for r in results]).reshape(replicates, -1)
    hits = np.sum(sups >= np.asarray(alphas)[None], axis=0)
    finite = np.where(np.isfinite(sups), sups, np.nan)
    columns = {
        "mean_sup": [
            float(np.nanmean(finite[:, k])) for k in range(len(alphas))
        ]
    }
    flags = {
        "grid_step": grid_step,
        "dim": dim,
        "experimental": spec.kind == "voronoi_edges",
        "truncation_mass": max((r[1] for r in results), default=0.0),
    }
    if isinstance(spec, BooleanCountSpec):
        columns["campbell_bound"] = [
            campbell_bound(spec, alpha, dim) for alpha in alphas
        ]
    return EstimateReport.from_proportions(
        "phi_hat",
        "alpha",
        alphas,
        hits,
        replicates,
        int(seed),
        columns=columns,
        flags=flags,
    )
