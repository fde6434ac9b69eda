import io
import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from coxperc.core import (
    ConstantLaw,
    InvalidParameter,
    ParetoLaw,
    Seed,
    Window,
)
from coxperc.coxsampler import (
    MarkedPointSet,
    attach_marks,
    sample_cox,
    sample_marked,
    thin,
)
from coxperc.environments import (
    EnvRealization,
    HomogeneousSpec,
    MixedPoissonSpec,
    make_environment,
)


def test_zero_scalar_gives_no_points(seed, small_window):
    env = EnvRealization.from_scalar(small_window, 0.0)
    for k in range(20):
        assert sample_cox(env, 5.0, seed.child(k)).shape == (0, 2)


def test_zero_intensity_gives_no_points(seed, small_window):
    env = EnvRealization.from_scalar(small_window, 1.0)
    assert sample_cox(env, 0.0, seed).shape == (0, 2)
    with pytest.raises(InvalidParameter):
        sample_cox(env, -1.0, seed)


def test_scalar_count_matches_intensity(seed):
    window = Window(dim=2, half_width=5.0)
    env = EnvRealization.from_scalar(window, 2.0)
    counts = [
        sample_cox(env, 0.5, seed.child(k)).shape[0] for k in range(400)
    ]
    mean = 0.5 * 2.0 * window.padded_volume
    assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / 400)


def test_segment_points_lie_on_segments(seed):
    window = Window(dim=2, half_width=5.0)
    env = EnvRealization.from_segments(window, [[-5.0, 1.0]], [[5.0, 1.0]])
    points = sample_cox(env, 3.0, seed)
    assert points.shape[0] > 0
    assert np.all(points[:, 1] == 1.0)


def test_density_grid_points_avoid_empty_cells(seed):
    window = Window(dim=2, half_width=2.0)
    values = np.zeros((4, 4))
    values[0, 0] = 10.0
    env = EnvRealization.from_density(window, values)
    points = sample_cox(env, 1.0, seed)
    assert points.shape[0] > 0
    assert np.all(points <= -1.0)


def test_ball_points_stay_in_window(seed):
    window = Window(dim=2, half_width=2.0)
    env = EnvRealization.from_balls(window, [[2.0, 0.0]], [1.5], weight=4.0)
    points = sample_cox(env, 1.0, seed)
    assert np.all(window.contains(points))
    assert np.all(np.linalg.norm(points - [2.0, 0.0], axis=1) < 1.5)


def test_marks(seed):
    empty = attach_marks(np.empty((0, 2)), ConstantLaw(r=1.0), seed)
    assert len(empty) == 0
    points = np.zeros((100, 2))
    marked = attach_marks(points, ConstantLaw(r=1.0), seed)
    assert np.all(marked.radii == 1.0)


def test_pareto_mark_mean(seed):
    points = np.zeros((10**6, 1))
    marked = attach_marks(points, ParetoLaw(scale=1.0, tail=3.0), seed)
    assert abs(marked.radii.mean() - 1.5) < 0.01


def test_thinning(seed):
    points = np.zeros((10_000, 2))
    kept = thin(points, 0.3, seed)
    assert abs(kept.shape[0] - 3000) < 4 * math.sqrt(10_000 * 0.21)
    assert thin(points, 0.0, seed).shape[0] == 0
    with pytest.raises(InvalidParameter):
        thin(points, 1.5, seed)


EVEN_MIXTURE = {"kind": "two_point", "z1": 0.5, "p1": 0.5, "z2": 1.5}
UNEVEN_DENSITY = np.array([[4.0, 0.5], [1.0, 2.0]])


def _halves(points):
    return int(np.sum(points[:, 0] < 0)), int(np.sum(points[:, 0] >= 0))


def test_void_probability_averages_over_the_environment(seed):
    spec = MixedPoissonSpec(z=EVEN_MIXTURE)
    window = Window(dim=2, half_width=0.5)
    replicates = 4000
    empty = 0
    for k in range(replicates):
        env = make_environment(spec, window, seed.child(k).branch("env"))
        empty += sample_cox(env, 1.5, seed.child(k)).shape[0] == 0
    fraction = empty / replicates
    se = math.sqrt(fraction * (1 - fraction) / replicates)
    expected = 0.5 * math.exp(-0.75) + 0.5 * math.exp(-2.25)
    assert abs(fraction - expected) <= 4 * se
    assert abs(fraction - math.exp(-1.5)) > 4 * se


def test_void_probability_of_a_fixed_density(seed):
    window = Window(dim=2, half_width=1.0)
    env = EnvRealization.from_density(window, UNEVEN_DENSITY)
    replicates = 4000
    empty = sum(
        not np.any(np.all(sample_cox(env, 0.5, seed.child(k)) < 0, axis=1))
        for k in range(replicates)
    )
    fraction = empty / replicates
    se = math.sqrt(fraction * (1 - fraction) / replicates)
    assert abs(fraction - math.exp(-0.5 * 4.0)) <= 4 * se


def test_thinning_matches_direct_sampling(seed):
    window = Window(dim=2, half_width=1.0)
    env = EnvRealization.from_density(window, UNEVEN_DENSITY)
    thinned, direct = [], []
    for k in range(2000):
        points = sample_cox(env, 5.0, seed.branch("full").child(k))
        thinned.append(thin(points, 0.4, seed.branch("thin").child(k)))
        direct.append(sample_cox(env, 2.0, seed.branch("direct").child(k)))
    counts = ks_2samp(
        [p.shape[0] for p in thinned], [p.shape[0] for p in direct]
    )
    assert counts.pvalue > 1e-3
    for axis in (0, 1):
        positions = ks_2samp(
            np.concatenate(thinned)[:, axis], np.concatenate(direct)[:, axis]
        )
        assert positions.pvalue > 1e-3


def test_disjoint_counts_are_independent_given_the_environment(seed):
    window = Window(dim=2, half_width=1.0)
    env = EnvRealization.from_density(window, UNEVEN_DENSITY)
    replicates = 3000
    counts = np.array(
        [
            _halves(sample_cox(env, 3.0, seed.child(k)))
            for k in range(replicates)
        ]
    )
    correlation = np.corrcoef(counts[:, 0], counts[:, 1])[0, 1]
    assert abs(correlation) < 4 / math.sqrt(replicates)


def test_disjoint_counts_share_the_mixing_variable(seed):
    spec = MixedPoissonSpec(z=EVEN_MIXTURE)
    window = Window(dim=2, half_width=1.0)
    counts = []
    for k in range(1000):
        env = make_environment(spec, window, seed.child(k).branch("env"))
        counts.append(_halves(sample_cox(env, 2.5, seed.child(k))))
    counts = np.array(counts)
    # Cov = (2.5 · 2)² Var Z against Var N = 5 E[Z] + Cov
    correlation = np.corrcoef(counts[:, 0], counts[:, 1])[0, 1]
    assert abs(correlation - 6.25 / 11.25) < 0.1


def test_sample_marked_is_reproducible(small_window):
    env = EnvRealization.from_scalar(
        small_window, 1.0, spec=HomogeneousSpec()
    )
    law = ParetoLaw(scale=0.5, tail=3.0)
    first = sample_marked(env, 1.0, law, Seed.of(9))
    second = sample_marked(env, 1.0, law, Seed.of(9))
    assert np.array_equal(first.points, second.points)
    assert np.array_equal(first.radii, second.radii)
    assert first.intensity == 1.0


def test_restrict_keeps_inner_points():
    mps = MarkedPointSet.from_arrays(
        [[0.0, 0.0], [3.0, 0.0]],
        [1.0, 1.0],
        window=Window(dim=2, half_width=4.0),
    )
    inner = mps.restrict(Window(dim=2, half_width=1.0, margin=1.0))
    assert inner.points.tolist() == [[0.0, 0.0]]
    assert inner.window.half_width == 1.0


def test_marked_point_set_validation():
    window = Window(dim=2, half_width=1.0)
    with pytest.raises(InvalidParameter):
        MarkedPointSet(np.zeros((2, 2)), np.ones(3), window)
    with pytest.raises(InvalidParameter):
        MarkedPointSet(np.array([[5.0, 0.0]]), np.ones(1), window)


def test_marked_point_set_csv():
    mps = MarkedPointSet.from_arrays([[0.5, 0.0]], [1.0])
    buffer = io.StringIO()
    mps.to_csv(buffer)
    assert buffer.getvalue().splitlines() == ["x1,x2,radius", "0.5,0.0,1.0"]
