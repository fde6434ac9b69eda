import math

import numpy as np
import pytest

from coxperc.common.replicates import ReplicatePool
from coxperc.core import (
    ConstantLaw,
    ExponentialLaw,
    InvalidParameter,
    ParetoLaw,
    Window,
    covering_range,
)
from coxperc.environments import (
    HomogeneousSpec,
    MixedPoissonSpec,
    ShotNoiseSpec,
)
from coxperc.estimators import (
    CompleteCoverage,
    InfiniteMean,
    InvalidLadder,
    LadderOutsideWindow,
    NoSupercriticalPhase,
    SupercriticalIntensity,
    check_ladder,
    clustering_oracle,
    critical_intensity,
    deviation_tail,
    diameter_oracle,
    ensure_subcritical,
    exact_coverage_probability,
    ladder_verdict,
    moment_ladder,
    one_dim_triviality,
    percolation_curve,
    recursion_window,
    scaling_recursion_check,
    simulate_coupled,
    simulation_window,
    subcritical_decay,
    thinned,
    truncated_integral,
    uniqueness_report,
    vacant_probability,
    vacant_window,
    volume_oracle,
    zero_critical_intensity,
)

SMALL_DISKS = ConstantLaw(r=0.5)
HEAVY_Z = {"kind": "two_point", "z1": 0.1, "p1": 0.9, "z2": 9.1}


def test_vacant_probability_without_points(seed, pool):
    report = vacant_probability(
        HomogeneousSpec(), SMALL_DISKS, [0.0], 50, seed, pool=pool
    )
    assert report.estimates == [1.0]


def test_vacant_probability_matches_closed_form(seed, pool):
    report = vacant_probability(
        HomogeneousSpec(), SMALL_DISKS, [0.3, 1.0], 2000, seed, pool=pool
    )
    closed = report.columns["closed_form"]
    assert closed[1] == pytest.approx(math.exp(-math.pi * 0.25))
    for estimate, se, value in zip(
        report.estimates, report.standard_errors, closed
    ):
        assert abs(estimate - value) <= 4 * se
    assert report.column_names() == [
        "lambda",
        "estimate",
        "se",
        "ci_low",
        "ci_high",
        "closed_form",
        "n",
    ]


def test_vacant_probability_of_mixed_poisson(seed, pool):
    report = vacant_probability(
        MixedPoissonSpec(z=HEAVY_Z),
        SMALL_DISKS,
        [1.0],
        2000,
        seed,
        pool=pool,
    )
    rate = math.pi * 0.25
    expected = 0.9 * math.exp(-0.1 * rate) + 0.1 * math.exp(-9.1 * rate)
    assert report.columns["closed_form"][0] == pytest.approx(expected)
    assert abs(report.estimates[0] - expected) <= 4 * (
        report.standard_errors[0]
    )


def test_heavy_radii_cover_everything(seed):
    with pytest.raises(CompleteCoverage):
        vacant_probability(
            HomogeneousSpec(), ParetoLaw(scale=1.0, tail=2.0), 1.0, 10, seed
        )


def test_vacant_window_follows_the_mixing_variable():
    law = ExponentialLaw(rate=1.0)
    plain = vacant_window(HomogeneousSpec(), law, 1.0, 2)
    two_point = vacant_window(MixedPoissonSpec(z=HEAVY_Z), law, 1.0, 2)
    pareto = vacant_window(
        MixedPoissonSpec(z={"kind": "pareto", "tail": 3.0}), law, 1.0, 2
    )
    assert plain.half_width == covering_range(law, 1.0, 2)
    assert two_point.half_width == covering_range(law, 9.1, 2)
    assert two_point.half_width > plain.half_width
    assert pareto.half_width > plain.half_width
    bounded = vacant_window(MixedPoissonSpec(z=HEAVY_Z), SMALL_DISKS, 1.0, 2)
    assert bounded.half_width == 1.0


def test_percolation_curve_without_points(seed, pool):
    report = percolation_curve(
        HomogeneousSpec(), SMALL_DISKS, [0.0], 5.0, 20, seed, pool=pool
    )
    assert report.estimates == [0.0]


def test_percolation_curve_is_monotone(seed, pool):
    report = percolation_curve(
        HomogeneousSpec(),
        SMALL_DISKS,
        [0.1, 0.5, 2.0, 6.0],
        5.0,
        30,
        seed,
        pool=pool,
    )
    assert np.all(np.diff(report.estimates) >= 0)
    assert report.estimates[0] == 0.0
    assert report.estimates[-1] == 1.0


def test_percolation_curve_needs_sorted_grid(seed):
    with pytest.raises(InvalidParameter):
        percolation_curve(
            HomogeneousSpec(), SMALL_DISKS, [1.0, 0.5], 5.0, 5, seed
        )


def test_critical_intensity_bracket(seed, pool):
    report = critical_intensity(
        HomogeneousSpec(), SMALL_DISKS, 5.0, 40, 0.1, seed, pool=pool
    )
    estimate = report.estimates[0]
    assert report.ci_low[0] <= estimate <= report.ci_high[0]
    assert report.ci_high[0] - report.ci_low[0] <= 0.1
    assert 0.7 < estimate < 3.0


def test_critical_intensity_without_balls(seed):
    with pytest.raises(NoSupercriticalPhase):
        critical_intensity(
            HomogeneousSpec(), ConstantLaw(r=0.0), 5.0, 5, 0.1, seed
        )
    with pytest.raises(InvalidParameter):
        critical_intensity(HomogeneousSpec(), SMALL_DISKS, 5.0, 5, 0, seed)


def test_ensure_subcritical(seed):
    spec = HomogeneousSpec()
    with pytest.raises(SupercriticalIntensity):
        ensure_subcritical(spec, SMALL_DISKS, 1.0, 5.0, 5, seed, critical=1.5)
    assert (
        ensure_subcritical(spec, SMALL_DISKS, 1.0, 5.0, 5, seed, critical=3)
        == 3
    )
    assert (
        ensure_subcritical(
            spec, SMALL_DISKS, 1.0, 5.0, 5, seed, allow_supercritical=True
        )
        is None
    )


def test_zero_critical_against_itself(seed, pool):
    report = zero_critical_intensity(
        HomogeneousSpec(),
        SMALL_DISKS,
        5.0,
        20,
        seed,
        reference_critical=1.4,
        pool=pool,
    )
    assert report.grid == [pytest.approx(0.28)]
    assert report.estimates[0] == report.columns["homogeneous"][0]
    assert not report.flags["signature"]


def test_subcritical_decay_is_small(seed, pool):
    report = subcritical_decay(
        HomogeneousSpec(),
        SMALL_DISKS,
        [4.0, 8.0],
        50,
        seed,
        critical=1.4,
        pool=pool,
    )
    assert report.flags["lambda"] == pytest.approx(0.35)
    assert all(e <= 0.2 for e in report.estimates)


def test_truncated_integral_of_flat_tail():
    alphas = np.array([1.0, 2.0, 3.0])
    assert truncated_integral(alphas, np.ones(3), 1.0).tolist() == [
        0.0,
        1.0,
        2.0,
    ]
    below = np.array([0.5, 1.0, 2.0])
    assert truncated_integral(below, np.ones(3), 1.0).tolist() == [
        0.0,
        0.0,
        1.0,
    ]


def test_deviation_tail_of_poisson_is_summable(seed, pool):
    report = deviation_tail(
        HomogeneousSpec(),
        2 * math.pi,
        1.0,
        [1, 2, 4, 8],
        20,
        seed,
        pool=pool,
    )
    assert report.estimates == [0.0] * 4
    assert report.flags["verdict"] == "summable"
    assert "log_mgf_1" in report.columns


def test_deviation_tail_of_heavy_mixture_diverges(seed, pool):
    report = deviation_tail(
        MixedPoissonSpec(z=HEAVY_Z),
        2 * math.pi,
        1.0,
        [1, 2, 4, 8, 16],
        400,
        seed,
        pool=pool,
    )
    for estimate, se in zip(report.estimates, report.standard_errors):
        assert abs(estimate - 0.1) <= 4 * se
    assert report.flags["verdict"] == "diverging"


def test_deviation_threshold_must_exceed_ball_volume(seed):
    with pytest.raises(InvalidParameter):
        deviation_tail(HomogeneousSpec(), 3.0, 1.0, [1, 2], 5, seed)


@pytest.mark.parametrize("replicates", [0, -1])
def test_deviation_tail_needs_replicates(seed, replicates):
    with pytest.raises(InvalidParameter):
        deviation_tail(
            HomogeneousSpec(), 2 * math.pi, 1.0, [1, 2], replicates, seed
        )


def test_deviation_tail_of_shot_noise_is_summable(seed, pool):
    report = deviation_tail(
        ShotNoiseSpec(height=1.0, support_radius=0.5, mu=4.0),
        2 * math.pi,
        1.0,
        [1, 2, 4, 8],
        50,
        seed,
        pool=pool,
    )
    assert report.flags["verdict"] == "summable"
    assert report.estimates[-1] == 0.0


@pytest.mark.parametrize(
    "moments, censored, expected",
    [
        ([1.0, 1.2, 1.5, 2.0], [0.0] * 4, "growing"),
        ([1.0, 1.05, 1.06], [0.0] * 3, "stabilizing"),
        ([1.0, 1.05, 1.06], [0.0, 0.0, 0.05], "inconclusive"),
        ([1.0], [0.0], "inconclusive"),
    ],
)
def test_ladder_verdict(moments, censored, expected):
    verdict, changes = ladder_verdict(moments, censored)
    assert verdict == expected
    assert changes[0] is None
    assert len(changes) == len(moments)


@pytest.mark.parametrize("ladder", [[], [2.0, 1.0], [0.0, 1.0]])
def test_check_ladder_rejects(ladder):
    with pytest.raises(InvalidLadder):
        check_ladder(ladder)


def test_moment_ladder_without_points(seed, pool):
    ladder = moment_ladder(
        HomogeneousSpec(),
        SMALL_DISKS,
        0.0,
        2.0,
        "diameter",
        [2.0, 4.0],
        10,
        seed,
        pool=pool,
    )
    assert ladder.moments == [0.0, 0.0]
    assert ladder.verdict == "stabilizing"
    report = ladder.to_report()
    assert report.parameter == "half_width"
    assert report.flags["observable"] == "diameter"


def test_moment_ladder_is_nondecreasing(seed, pool):
    ladder = moment_ladder(
        HomogeneousSpec(),
        SMALL_DISKS,
        0.3,
        2.0,
        "count",
        [2.0, 4.0, 8.0],
        50,
        seed,
        critical=1.4,
        pool=pool,
    )
    assert ladder.exponent == 1.0
    assert np.all(np.diff(ladder.moments) >= 0)
    assert len(ladder.witness_probabilities) == 3


def test_moment_ladder_needs_positive_order(seed):
    with pytest.raises(InvalidLadder):
        moment_ladder(
            HomogeneousSpec(),
            SMALL_DISKS,
            0.0,
            0.0,
            "count",
            [2.0],
            5,
            seed,
        )


@pytest.mark.slow
def test_moment_ladder_separates_radius_tails(seed, pool):
    def ladder(tail):
        return moment_ladder(
            HomogeneousSpec(),
            ParetoLaw(scale=0.5, tail=tail),
            0.2,
            1.0,
            "diameter",
            [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            3000,
            seed,
            critical=10.0,
            pool=pool,
        )

    # E[ρ^3] is infinite for the heavier tail only
    heavy, light = ladder(2.5), ladder(4.0)
    assert light.verdict != "growing"
    assert abs(light.relative_changes[-1]) < 0.05
    heavy_growth = heavy.moments[-1] / heavy.moments[0]
    light_growth = light.moments[-1] / light.moments[0]
    assert heavy_growth > light_growth
    assert heavy.relative_changes[-1] > light.relative_changes[-1]


def test_exact_coverage_probability():
    assert exact_coverage_probability(SMALL_DISKS, 0.0, 1.0) == 0.0
    values = [
        exact_coverage_probability(SMALL_DISKS, 3.0, h)
        for h in (0.5, 1.0, 2.0)
    ]
    assert all(0.0 < v < 1.0 for v in values)
    assert values[0] > values[1] > values[2]


def test_one_dim_triviality_agrees_with_exact(seed, pool):
    report = one_dim_triviality(
        SMALL_DISKS, 3.0, [1.0, 2.0, 4.0], 2000, seed, pool=pool
    )
    assert report.flags["exact_agreement"]
    assert report.flags["strictly_decreasing"]
    assert all(v is not None for v in report.columns["exact"])


def test_one_dim_triviality_without_points(seed):
    report = one_dim_triviality(SMALL_DISKS, 0.0, [1.0, 2.0], 20, seed)
    assert report.estimates == [0.0, 0.0]


def test_one_dim_needs_finite_mean(seed):
    with pytest.raises(InfiniteMean):
        one_dim_triviality(
            ParetoLaw(scale=1.0, tail=1.0), 1.0, [1.0], 5, seed
        )


def test_scaling_recursion_without_points(seed, pool):
    report = scaling_recursion_check(
        HomogeneousSpec(), SMALL_DISKS, 0.0, [1.0, 10.0], 10, seed, pool=pool
    )
    assert report.estimates == [0.0, 0.0]
    assert report.flags["recursion_holds"]
    assert report.flags["phi_source"] == ["exact", "exact"]


@pytest.mark.parametrize(
    "alphas, variant", [([1.0, 5.0], None), ([1.0, 10.0], "disk")]
)
def test_scaling_recursion_rejects(seed, alphas, variant):
    with pytest.raises(InvalidLadder):
        scaling_recursion_check(
            HomogeneousSpec(),
            SMALL_DISKS,
            0.1,
            alphas,
            5,
            seed,
            variant=variant,
        )


def test_recursion_window_holds_a_hundred_top_rungs():
    window = recursion_window(HomogeneousSpec(), SMALL_DISKS, [1.0, 10.0], 2)
    assert window.contains_ball(np.zeros(2), 1000.0, padded=False)
    with pytest.raises(LadderOutsideWindow):
        recursion_window(HomogeneousSpec(), SMALL_DISKS, [2.0, 20.0], 2)
    with pytest.raises(InvalidLadder):
        recursion_window(HomogeneousSpec(), SMALL_DISKS, [1.0, 5.0], 2)


@pytest.mark.slow
def test_scaling_recursion_on_sparse_poisson(seed, pool):
    report = scaling_recursion_check(
        HomogeneousSpec(), SMALL_DISKS, 0.05, [1.0, 10.0], 40, seed, pool=pool
    )
    assert report.flags["recursion_holds"]
    assert report.flags["recursion_ball"] == [True, True]
    assert all(report.flags["reach_comparison_point"])
    assert report.flags["phi_source"] == ["exact", "exact"]
    assert report.estimates[1] <= report.estimates[0] + 3 * (
        report.standard_errors[0] + report.standard_errors[1]
    )


def test_uniqueness_of_the_supercritical_cluster(seed, pool):
    report = uniqueness_report(
        HomogeneousSpec(), SMALL_DISKS, 4.0, [4.0, 8.0], 30, seed, pool=pool
    )
    assert report.columns["count_0"] == [0.0, 0.0]
    assert report.columns["count_1"][-1] >= 0.9
    assert report.estimates[-1] <= 0.1


def test_uniqueness_without_points(seed, pool):
    report = uniqueness_report(
        HomogeneousSpec(), SMALL_DISKS, 0.0, [2.0, 4.0], 10, seed, pool=pool
    )
    assert report.estimates == [0.0, 0.0]
    assert report.columns["count_0"] == [1.0, 1.0]


def test_clustering_oracle(seed):
    report = clustering_oracle(50, 5, seed, dims=(1, 2))
    assert report.estimates == [1.0, 1.0]
    assert report.flags["mismatches"] == []


def test_diameter_oracle(seed):
    report = diameter_oracle(5, 0.01, seed)
    assert report.flags["within_tolerance"]


def test_volume_oracle(seed):
    report = volume_oracle(100_000, seed)
    for estimate, se, value in zip(
        report.estimates, report.standard_errors, report.columns["closed_form"]
    ):
        assert abs(estimate - value) <= max(4 * se, 1e-12)


def test_simulation_window_limit():
    with pytest.raises(LadderOutsideWindow):
        simulation_window(HomogeneousSpec(), SMALL_DISKS, 5000.0, 2)
    window = simulation_window(HomogeneousSpec(), SMALL_DISKS, 4.0, 2, 1.0)
    assert window.margin == 1.0


def test_thinned_samples_are_nested(seed):
    window = Window(dim=2, half_width=4.0, margin=1.0)
    mps, labels = simulate_coupled(
        HomogeneousSpec(), SMALL_DISKS, 2.0, window, seed
    )
    low = thinned(mps, labels, 0.3)
    high = thinned(mps, labels, 0.6)
    assert low.intensity == pytest.approx(0.6)
    rows = {tuple(p) for p in high.points}
    assert all(tuple(p) in rows for p in low.points)
    assert len(low) <= len(high) <= len(mps)


def test_results_do_not_depend_on_threads(seed):
    def run(threads):
        return percolation_curve(
            HomogeneousSpec(),
            SMALL_DISKS,
            [0.5, 1.5],
            4.0,
            12,
            seed,
            pool=ReplicatePool(threads),
        )

    assert run(1) == run(3)
