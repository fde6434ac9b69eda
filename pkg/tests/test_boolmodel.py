import io
import math

import numpy as np
import pytest

from coxperc.boolmodel import (
    ClusterStats,
    InvalidAxis,
    WindowTooSmall,
    brute_force_clusters,
    build_clusters,
    cluster_diameter,
    clusters_to_csv,
    covering_balls,
    crossing_exists,
    g_event,
    giant_cluster_count,
    origin_cluster,
    reach_event,
    union_volume_mc,
)
from coxperc.core import Window
from coxperc.coxsampler import MarkedPointSet
from coxperc.estimators.oracles import boundary_diameter, random_configuration


def test_three_balls_form_two_clusters(three_balls):
    labels = build_clusters(three_balls)
    assert labels.labels.tolist() == [0, 0, 1]
    assert labels.count == 2
    assert [g.tolist() for g in labels.groups()] == [[0, 1], [2]]


def test_empty_configuration_has_no_clusters():
    mps = MarkedPointSet.from_arrays(np.empty((0, 2)), [])
    assert build_clusters(mps).count == 0


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_clustering_matches_brute_force(seed, dim):
    for k in range(30):
        rng = seed.child(k).rng()
        mps = random_configuration(rng, int(rng.integers(1, 201)), dim)
        assert build_clusters(mps) == brute_force_clusters(mps)


def test_heavy_tailed_radii_match_brute_force(rng):
    points = rng.uniform(-20, 20, (300, 2))
    radii = 0.2 * (1 - rng.random(300)) ** (-1 / 1.5)
    mps = MarkedPointSet.from_arrays(points, radii)
    assert build_clusters(mps) == brute_force_clusters(mps)


def test_single_ball_origin_cluster():
    mps = MarkedPointSet.from_arrays([[0.5, 0.0]], [1.0])
    stats = origin_cluster(mps, volume=False)
    assert stats.point_count == 1
    assert stats.diameter == pytest.approx(2.0)
    assert stats.reach == pytest.approx(1.5)
    assert not stats.empty


def test_two_ball_diameter_against_sampling():
    points = np.array([[0.0, 0.0], [3.0, 0.0]])
    radii = np.array([2.0, 2.0])
    assert cluster_diameter(points, radii) == pytest.approx(7.0)
    sampled = boundary_diameter(points, radii, 1e-3)
    assert abs(sampled - 7.0) <= 2e-3


def test_uncovered_origin():
    mps = MarkedPointSet.from_arrays([[5.0, 0.0]], [1.0])
    stats = origin_cluster(mps)
    assert stats.empty
    assert stats.diameter == 0.0
    assert stats == ClusterStats()


def test_origin_cluster_with_labels_agrees(three_balls):
    labels = build_clusters(three_balls)
    explored = origin_cluster(three_balls, volume=False)
    labelled = origin_cluster(three_balls, labels=labels, volume=False)
    assert explored == labelled
    assert explored.point_count == 2
    assert explored.diameter == pytest.approx(7.0)


def test_censored_cluster():
    mps = MarkedPointSet.from_arrays(
        [[0.0, 0.0]], [2.0], window=Window(dim=2, half_width=1.0, margin=1.0)
    )
    assert origin_cluster(mps, volume=False).censored


def _with_origin_ball(rng, n, half):
    points = np.vstack([[0.0, 0.0], rng.uniform(-half, half, (n, 2))])
    radii = np.concatenate([[0.6], rng.uniform(0.2, 1.0, n)])
    return points, radii


def test_adding_a_ball_only_merges_clusters(seed):
    window = Window(dim=2, half_width=10.0, margin=2.0)
    for k in range(40):
        rng = seed.child(k).rng()
        points, radii = _with_origin_ball(rng, 60, 6.0)
        before = MarkedPointSet.from_arrays(points, radii, window)
        extra = MarkedPointSet.from_arrays(
            np.vstack([points, rng.uniform(-6.0, 6.0, (1, 2))]),
            np.append(radii, rng.uniform(0.2, 1.5)),
            window,
        )
        after = build_clusters(extra).labels[: len(before)]
        for group in build_clusters(before).groups():
            assert np.unique(after[group]).size == 1
        small = origin_cluster(before, volume=False)
        large = origin_cluster(extra, volume=False)
        assert large.point_count >= small.point_count
        assert large.diameter >= small.diameter - 1e-12
        assert large.reach >= small.reach - 1e-12


def test_censored_clusters_touch_the_boundary(seed):
    window = Window(dim=2, half_width=3.0, margin=1.0)
    bound = window.padded_half_width
    seen = set()
    for k in range(60):
        rng = seed.child(k).rng()
        points, radii = _with_origin_ball(rng, 40, bound)
        mps = MarkedPointSet.from_arrays(points, radii, window)
        labels = brute_force_clusters(mps)
        members = labels.members(int(labels.labels[0]))
        touching = bool(
            np.any(
                np.max(np.abs(points[members]), axis=1) + radii[members]
                >= bound
            )
        )
        stats = origin_cluster(mps, volume=False)
        assert stats.censored == touching
        seen.add(touching)
    assert seen == {True, False}


def test_inner_cluster_is_not_censored():
    mps = MarkedPointSet.from_arrays(
        [[0.0, 0.0], [1.5, 0.0]],
        [1.0, 1.0],
        window=Window(dim=2, half_width=3.0, margin=1.0),
    )
    stats = origin_cluster(mps, volume=False)
    assert stats.point_count == 2
    assert not stats.censored


def test_covering_balls(three_balls):
    assert covering_balls(three_balls, [1.5, 0.0]).tolist() == [0, 1]
    assert covering_balls(three_balls, [6.5, 0.0]).tolist() == []


def test_union_volume_of_one_disk(seed):
    estimate, se = union_volume_mc([((0.0, 0.0), 1.0)], 200_000, seed)
    assert abs(estimate - math.pi) <= 3 * se


def test_union_volume_of_lens(seed):
    lens = 2 * math.pi / 3 - math.sqrt(3) / 2
    exact = 2 * math.pi - lens
    estimate, se = union_volume_mc(
        [((0.0, 0.0), 1.0), ((1.0, 0.0), 1.0)], 200_000, seed
    )
    assert abs(estimate - exact) <= 3 * se


def test_union_volume_of_intervals_is_exact(seed):
    balls = [((1.0,), 1.0), ((2.0,), 1.0)]
    assert union_volume_mc(balls, 1000, seed) == (3.0, 0.0)
    assert union_volume_mc([], 1000, seed) == (0.0, 0.0)


def test_giant_ball_crosses():
    window = Window(dim=2, half_width=5.0)
    mps = MarkedPointSet.from_arrays([[0.0, 0.0]], [10.0], window=window)
    labels = build_clusters(mps)
    assert crossing_exists(mps, labels, window.inner(), axis=0)
    assert crossing_exists(mps, labels, window.inner(), axis=1)
    with pytest.raises(InvalidAxis):
        crossing_exists(mps, labels, window.inner(), axis=2)


def test_empty_configuration_does_not_cross():
    window = Window(dim=2, half_width=5.0)
    mps = MarkedPointSet.from_arrays(np.empty((0, 2)), [], window=window)
    assert not crossing_exists(mps, build_clusters(mps), window)


def test_two_chains_are_two_giant_clusters():
    xs = np.arange(-5.0, 6.0)
    points = np.concatenate(
        [
            np.stack([xs, np.full(xs.shape, 2.0)], axis=1),
            np.stack([xs, np.full(xs.shape, -2.0)], axis=1),
        ]
    )
    window = Window(dim=2, half_width=5.0, margin=1.0)
    mps = MarkedPointSet.from_arrays(points, [0.6] * 22, window=window)
    labels = build_clusters(mps)
    assert giant_cluster_count(mps, labels, window.inner()) == 2


def test_sparse_configuration_has_no_giant_cluster():
    window = Window(dim=2, half_width=5.0, margin=1.0)
    mps = MarkedPointSet.from_arrays(
        [[0.0, 0.0], [3.0, 3.0]], [0.5, 0.5], window=window
    )
    labels = build_clusters(mps)
    assert giant_cluster_count(mps, labels, window.inner()) == 0


def test_g_event():
    window = Window(dim=2, half_width=10.0)
    empty = MarkedPointSet.from_arrays(np.empty((0, 2)), [], window=window)
    assert not g_event(empty, 1.0)
    big = MarkedPointSet.from_arrays([[0.0, 0.0]], [9.0], window=window)
    assert g_event(big, 1.0, "point")
    assert g_event(big, 1.0, "ball")
    # meets B_1 and reaches past B_8 without covering the origin
    chain = MarkedPointSet.from_arrays(
        [[1.5, 0.0], [5.5, 0.0]], [0.6, 3.5], window=window
    )
    assert not g_event(chain, 1.0, "point")
    assert g_event(chain, 1.0, "ball")
    small = MarkedPointSet.from_arrays([[1.5, 0.0]], [0.6], window=window)
    assert not g_event(small, 1.0, "point")
    assert not g_event(small, 1.0, "ball")


def test_g_event_needs_room():
    window = Window(dim=2, half_width=5.0)
    mps = MarkedPointSet.from_arrays([[0.0, 0.0]], [1.0], window=window)
    with pytest.raises(WindowTooSmall):
        g_event(mps, 1.0)


def test_reach_event():
    assert reach_event(ClusterStats(reach=9.0, empty=False), 1.0)
    assert not reach_event(ClusterStats(reach=8.9, empty=False), 1.0)
    assert not reach_event(ClusterStats(), 0.1)


def test_clusters_csv(three_balls):
    buffer = io.StringIO()
    clusters_to_csv(three_balls, build_clusters(three_balls), buffer)
    lines = buffer.getvalue().splitlines()
    assert lines[0] == "point,x1,x2,radius,cluster"
    assert lines[3] == "2,10.0,0.0,2.0,1"
