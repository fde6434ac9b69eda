import logging
from typing import Callable

from coxperc.common.replicates import ReplicatePool
from coxperc.common.report import EstimateReport
from coxperc.core.seeds import Seed
from coxperc.environments import phi_hat
from coxperc.estimators import (
    clustering_oracle,
    connectedness_rate,
    critical_intensity,
    deviation_tail,
    diameter_oracle,
    moment_ladder,
    one_dim_triviality,
    percolation_curve,
    scaling_recursion_check,
    subcritical_decay,
    uniqueness_report,
    vacant_probability,
    volume_oracle,
    zero_critical_intensity,
)
from coxperc.harness.config import ExperimentConfig
from coxperc.utils.type_registry import TypeRegistry

__all__ = ("EXPERIMENTS", "run_experiment", "alpha_grid")

_logger = logging.getLogger("coxperc.harness")

Experiment = Callable[[ExperimentConfig, Seed, ReplicatePool], EstimateReport]
EXPERIMENTS: TypeRegistry[Experiment] = TypeRegistry("experiment")


def run_experiment(
    config: ExperimentConfig, pool: ReplicatePool
) -> EstimateReport:
    experiment = EXPERIMENTS.require(config.kind)
    _logger.info(
        "running %s with %d replicates (seed %d)",
        config.kind,
        config.replicates,
        config.seed,
    )
    return experiment(config, Seed.of(config.seed), pool)


def alpha_grid(a_max: float) -> list[float]:
    """1, 2, 4, ... up to and including ``a_max``."""
    grid = [1.0]
    while grid[-1] * 2 < a_max:
        grid.append(grid[-1] * 2)
    return grid + [float(a_max)]


@EXPERIMENTS.register("vacant_probability")
def _vacant(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return vacant_probability(
        config.environment,
        config.radius_law,
        config.intensities,
        config.replicates,
        seed,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("percolation_curve")
def _percolation(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return percolation_curve(
        config.environment,
        config.radius_law,
        config.intensities,
        config.window.half_width,
        config.replicates,
        seed,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("critical_intensity")
def _critical(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return critical_intensity(
        config.environment,
        config.radius_law,
        config.window.half_width,
        config.replicates,
        config.estimator.tolerance,
        seed,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("moment_ladder")
def _moments(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    knobs = config.estimator
    ladder = moment_ladder(
        config.environment,
        config.radius_law,
        config.intensity,
        knobs.s,
        knobs.observable,
        config.window.ladder,
        config.replicates,
        seed,
        dim=config.window.dim,
        critical=knobs.critical,
        allow_supercritical=knobs.allow_supercritical,
        witness_alphas=knobs.alphas,
        volume_samples=knobs.volume_samples,
        pool=pool,
        margin=config.window.margin,
    )
    return ladder.to_report()


@EXPERIMENTS.register("deviation_tail")
def _deviation(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    knobs = config.estimator
    return deviation_tail(
        config.environment,
        knobs.c,
        knobs.s,
        knobs.alphas or alpha_grid(knobs.a_max),
        config.replicates,
        seed,
        dim=config.window.dim,
        betas=knobs.betas,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("scaling_recursion")
def _recursion(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    knobs = config.estimator
    return scaling_recursion_check(
        config.environment,
        config.radius_law,
        config.intensity,
        knobs.alphas,
        config.replicates,
        seed,
        dim=config.window.dim,
        variant=knobs.variant,
        phi_replicates=knobs.phi_replicates,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("uniqueness")
def _uniqueness(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return uniqueness_report(
        config.environment,
        config.radius_law,
        config.intensity,
        config.window.ladder,
        config.replicates,
        seed,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("one_dim_triviality")
def _one_dim(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return one_dim_triviality(
        config.radius_law,
        config.intensity,
        config.window.ladder,
        config.replicates,
        seed,
        exact_step=config.estimator.exact_step,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("phi_hat")
def _phi_hat(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return phi_hat(
        config.environment,
        config.estimator.alphas,
        config.estimator.grid_step,
        config.replicates,
        seed,
        dim=config.window.dim,
        pool=pool,
    )


@EXPERIMENTS.register("zero_critical_intensity")
def _zero_critical(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    knobs = config.estimator
    return zero_critical_intensity(
        config.environment,
        config.radius_law,
        config.window.half_width,
        config.replicates,
        seed,
        fraction=knobs.fraction or 0.2,
        reference_critical=knobs.critical,
        tolerance=knobs.tolerance,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("subcritical_decay")
def _decay(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    knobs = config.estimator
    return subcritical_decay(
        config.environment,
        config.radius_law,
        config.window.ladder,
        config.replicates,
        seed,
        fraction=knobs.fraction or 0.25,
        critical=knobs.critical,
        tolerance=knobs.tolerance,
        dim=config.window.dim,
        pool=pool,
        margin=config.window.margin,
    )


@EXPERIMENTS.register("connectedness_audit")
def _audit(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return connectedness_rate(
        config.environment,
        config.estimator.r,
        config.estimator.alpha,
        config.replicates,
        seed,
        dim=config.window.dim,
        pool=pool,
    )


@EXPERIMENTS.register("clustering_oracle")
def _clustering(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return clustering_oracle(
        config.estimator.n_max,
        config.replicates,
        seed,
        dims=config.estimator.dims,
    )


@EXPERIMENTS.register("diameter_oracle")
def _diameter(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return diameter_oracle(config.replicates, config.estimator.pitch, seed)


@EXPERIMENTS.register("volume_oracle")
def _volume(config: ExperimentConfig, seed: Seed, pool: ReplicatePool):
    return volume_oracle(config.estimator.n_samples, seed)
