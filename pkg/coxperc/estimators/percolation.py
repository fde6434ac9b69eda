import logging
import math
from typing import Optional, Sequence

import numpy as np

from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport, binomial_se
from coxperc.core.exceptions import InvalidParameter
from coxperc.core.geometry import unit_ball_volume
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import EnvironmentSpec, HomogeneousSpec
from coxperc.estimators.exceptions import (
    CompleteCoverage,
    NoSupercriticalPhase,
    SupercriticalIntensity,
)
from coxperc.estimators.simulation import (
    crosses,
    simulate,
    simulate_coupled,
    simulation_window,
    thinned,
)
from coxperc.settings import get_settings

__all__ = (
    "percolation_curve",
    "critical_intensity",
    "ensure_subcritical",
    "zero_critical_intensity",
    "subcritical_decay",
)

_logger = logging.getLogger("coxperc.estimators")

# halvings tried before concluding that the crossing point is at 0
_MAX_HALVINGS = 20


def _check_grid(grid: np.ndarray):
    if grid.size == 0 or np.any(grid < 0):
        raise InvalidParameter("lambda", "need nonnegative intensities")
    if np.any(np.diff(grid) < 0):
        raise InvalidParameter("lambda", "grid must be sorted")


def percolation_curve(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensities: Sequence[float],
    half_width: float,
    replicates: int,
    seed: Seed,
    dim: int = 2,
    axis: int = 0,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Crossing probability of Q_L along ``axis`` over a λ grid.

    Each replicate is sampled once at the largest intensity and thinned
    down, so the curve of every replicate is nondecreasing in λ.
    """
    grid = np.asarray(intensities, dtype=float)
    _check_grid(grid)
    window = simulation_window(spec, law, half_width, dim, margin)
    inner = window.inner()
    top = float(grid[-1])

    def replicate(index: int, replicate_seed: Seed):
        if top == 0:
            return [False] * grid.size
        mps, labels = simulate_coupled(
            spec, law, top, window, replicate_seed
        )
        return [
            crosses(thinned(mps, labels, intensity / top), inner, axis)
            for intensity in grid
        ]

    outcomes = np.asarray(
        ReplicatePool.resolve(pool).map(replicate, seed, replicates),
        dtype=bool,
    ).reshape(replicates, grid.size)
    report = EstimateReport.from_proportions(
        "percolation_curve",
        "lambda",
        grid,
        outcomes.sum(axis=0),
        replicates,
        int(seed),
        flags={"half_width": half_width, "dim": dim, "axis": axis},
    )
    _logger.info(
        "percolation curve on %d intensities at L=%g", grid.size, half_width
    )
    return report


class _CrossingSampler:
    """Crossing fractions at one scale, for a fixed list of replicates."""

    def __init__(self, spec, law, window: Window, replicates, seed, pool):
        self.spec = spec
        self.law = law
        self.window = window
        self.inner = window.inner()
        self.replicates = replicates
        self.seed = seed
        self.pool = pool
        self.evaluations: list[tuple[float, float]] = []
        self._coupled = None
        self._top = 0.0

    def fresh(self, intensity: float) -> float:
        def replicate(index: int, replicate_seed: Seed):
            mps = simulate(
                self.spec, self.law, intensity, self.window, replicate_seed
            )
            return crosses(mps, self.inner)

        hits = self.pool.map(replicate, self.seed, self.replicates)
        fraction = sum(hits) / self.replicates
        self.evaluations.append((intensity, fraction))
        _logger.debug("crossing fraction %.3f at λ=%g", fraction, intensity)
        return fraction

    def couple(self, top: float):
        def replicate(index: int, replicate_seed: Seed):
            return simulate_coupled(
                self.spec, self.law, top, self.window, replicate_seed
            )

        self._top = top
        self._coupled = self.pool.map(replicate, self.seed, self.replicates)

    def coupled(self, intensity: float) -> float:
        fraction = min(intensity / self._top, 1.0)

        def replicate(index: int, replicate_seed: Seed):
            mps, labels = self._coupled[index]
            return crosses(thinned(mps, labels, fraction), self.inner)

        hits = self.pool.map(replicate, self.seed, self.replicates)
        return sum(hits) / self.replicates


def critical_intensity(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    half_width: float,
    replicates: int,
    tolerance: float,
    seed: Seed,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """λ at which the crossing probability of Q_L is 1/2.

    The bracket is found by doubling or halving from 1/(v_d E[ρ^d]) on
    fresh samples; the bisection then runs on thinnings of one sample per
    replicate taken at the top of the bracket. ``ci_low``/``ci_high``
    hold the final bracket and ``se`` a slope-based standard error.
    """
    if tolerance <= 0:
        raise InvalidParameter("tolerance", "must be positive")
    moment = law.moment(dim)
    if not math.isfinite(moment):
        raise CompleteCoverage(dim)
    if moment == 0:
        raise NoSupercriticalPhase(get_settings().lambda_cap, half_width)
    cap = get_settings().lambda_cap
    window = simulation_window(spec, law, half_width, dim, margin)
    sampler = _CrossingSampler(
        spec, law, window, replicates, seed, ReplicatePool.resolve(pool)
    )

    start = min(1.0 / (unit_ball_volume(dim) * moment), cap)
    if sampler.fresh(start) < 0.5:
        low, high = start, min(2 * start, cap)
        while sampler.fresh(high) < 0.5:
            if high >= cap:
                raise NoSupercriticalPhase(cap, half_width)
            low, high = high, min(2 * high, cap)
    else:
        low, high = start / 2, start
        for _ in range(_MAX_HALVINGS):
            if sampler.fresh(low) < 0.5:
                break
            low, high = low / 2, low
        else:
            low = 0.0
    _logger.info("crossing point bracketed in [%g, %g]", low, high)

    top = 1.25 * high
    sampler.couple(top)
    while high - low > tolerance:
        middle = (low + high) / 2
        if sampler.coupled(middle) < 0.5:
            low = middle
        else:
            high = middle
    estimate = (low + high) / 2

    step = min(max(0.1 * estimate, tolerance), top - estimate, estimate)
    slope = math.nan
    if step > 0:
        rise = sampler.coupled(estimate + step) - sampler.coupled(
            estimate - step
        )
        slope = rise / (2 * step)
    se = math.sqrt(0.25 / replicates) / slope if slope > 0 else math.inf
    _logger.info("λ_c ≈ %g at L=%g (se %.3g)", estimate, half_width, se)
    return EstimateReport.build(
        "critical_intensity",
        "half_width",
        [half_width],
        [estimate],
        [se],
        replicates,
        int(seed),
        ci_low=[low],
        ci_high=[high],
        columns={"slope": [slope]},
        flags={
            "dim": dim,
            "tolerance": tolerance,
            "bracket_evaluations": [
                [intensity, fraction]
                for intensity, fraction in sampler.evaluations
            ],
            "finite_size": "crossing point at fixed L, not extrapolated",
        },
    )


def ensure_subcritical(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    half_width: float,
    replicates: int,
    seed: Seed,
    dim: int = 2,
    critical: Optional[float] = None,
    allow_supercritical: bool = False,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> Optional[float]:
    """Raise unless ``intensity`` is below half the critical intensity.

    The critical intensity is estimated at ``half_width`` unless given;
    returns the value used (``inf`` when no crossing point exists below
    the λ cap).
    """
    if allow_supercritical or intensity == 0:
        return critical
    if critical is None:
        try:
            report = critical_intensity(
                spec,
                law,
                half_width,
                min(replicates, 100),
                max(0.1 * intensity, 1e-3),
                seed.branch("critical"),
                dim,
                pool,
                margin,
            )
            critical = report.estimates[0]
        except NoSupercriticalPhase:
            critical = math.inf
    if intensity >= critical / 2:
        raise SupercriticalIntensity(intensity, critical)
    return critical


def _crossing_fraction(
    spec, law, intensity, half_width, replicates, seed, dim, pool, margin
) -> int:
    window = simulation_window(spec, law, half_width, dim, margin)
    inner = window.inner()

    def replicate(index: int, replicate_seed: Seed):
        return crosses(
            simulate(spec, law, intensity, window, replicate_seed), inner
        )

    return sum(ReplicatePool.resolve(pool).map(replicate, seed, replicates))


def zero_critical_intensity(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    half_width: float,
    replicates: int,
    seed: Seed,
    fraction: float = 0.2,
    reference_critical: Optional[float] = None,
    tolerance: float = 0.01,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Crossing at a fraction of the Poisson critical intensity.

    Compares ``spec`` with the homogeneous environment at the same λ; a
    crossing probability bounded away from 0 for ``spec`` while the
    Poisson model stays subcritical is the signature of a vanishing
    critical intensity.
    """
    homogeneous = HomogeneousSpec()
    if reference_critical is None:
        reference_critical = critical_intensity(
            homogeneous,
            law,
            half_width,
            min(replicates, 200),
            tolerance,
            seed.branch("critical"),
            dim,
            pool,
            margin,
        ).estimates[0]
    intensity = fraction * reference_critical
    hits = _crossing_fraction(
        spec, law, intensity, half_width, replicates, seed, dim, pool, margin
    )
    reference = _crossing_fraction(
        homogeneous,
        law,
        intensity,
        half_width,
        replicates,
        seed,
        dim,
        pool,
        margin,
    )
    p, q = hits / replicates, reference / replicates
    _logger.info(
        "crossing at λ=%g: %s %.3f, homogeneous %.3f",
        intensity,
        spec.kind,
        p,
        q,
    )
    return EstimateReport.from_proportions(
        "zero_critical_intensity",
        "lambda",
        [intensity],
        [hits],
        replicates,
        int(seed),
        columns={
            "homogeneous": [q],
            "homogeneous_se": [binomial_se(reference, replicates)],
        },
        flags={
            "half_width": half_width,
            "reference_critical": reference_critical,
            "fraction": fraction,
            "signature": bool(p >= 0.05 and q < 0.01),
        },
    )


def subcritical_decay(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    half_widths: Sequence[float],
    replicates: int,
    seed: Seed,
    fraction: float = 0.25,
    critical: Optional[float] = None,
    tolerance: float = 0.01,
    dim: int = 2,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> EstimateReport:
    """Crossing probability over growing windows at λ = fraction · λ̂_c.

    λ̂_c is estimated at the smallest window unless given.
    """
    half_widths = sorted(float(h) for h in half_widths)
    if critical is None:
        critical = critical_intensity(
            spec,
            law,
            half_widths[0],
            min(replicates, 200),
            tolerance,
            seed.branch("critical"),
            dim,
            pool,
            margin,
        ).estimates[0]
    intensity = fraction * critical
    hits = [
        _crossing_fraction(
            spec, law, intensity, half, replicates, seed, dim, pool, margin
        )
        for half in half_widths
    ]
    estimates = [h / replicates for h in hits]
    return EstimateReport.from_proportions(
        "subcritical_decay",
        "half_width",
        half_widths,
        hits,
        replicates,
        int(seed),
        flags={
            "lambda": intensity,
            "critical": critical,
            "strictly_decreasing": bool(np.all(np.diff(estimates) < 0)),
        },
    )
