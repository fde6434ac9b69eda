import math

import numpy as np
import pytest
from pydantic import ValidationError

from coxperc.common.replicates import ReplicatePool
from coxperc.core import (
    ConstantLaw,
    DimensionMismatch,
    ExponentialLaw,
    IntegerTailLaw,
    InvalidParameter,
    ParetoLaw,
    Seed,
    TwoPointLaw,
    Window,
    ball_intersection_volume,
    balls_overlap,
    covering_range,
    law_moment,
    parse_law,
    unit_ball_volume,
)
from coxperc.core.geometry import clip_segments, segment_ball_length
from coxperc.utils.type_registry import TypeRegistry, UnregisteredKind
from coxperc.utils.union_find import UnionFind


def test_constant_law_is_degenerate(rng):
    law = ConstantLaw(r=2.0)
    assert law.sample(rng) == 2.0
    assert np.all(law.sample(rng, 10) == 2.0)


def test_pareto_respects_its_support(rng):
    samples = ParetoLaw(scale=1.0, tail=3.0).sample(rng, 10_000)
    assert samples.min() >= 1.0


def test_exponential_mean(rng):
    samples = ExponentialLaw(rate=1.0).sample(rng, 10**6)
    assert abs(samples.mean() - 1.0) < 0.005


@pytest.mark.parametrize(
    "law, k, expected",
    [
        (ConstantLaw(r=2.0), 2, 4.0),
        (ParetoLaw(scale=1.0, tail=3.0), 3, math.inf),
        (ParetoLaw(scale=1.0, tail=3.0), 2, 3.0),
        (ExponentialLaw(rate=1.0), 2, 2.0),
        (TwoPointLaw(r1=1.0, p1=0.5, r2=3.0), 1, 2.0),
        (IntegerTailLaw(tail=2.0), 1, math.pi**2 / 6),
    ],
)
def test_moments(law, k, expected):
    value = law_moment(law, k)
    if math.isinf(expected):
        assert math.isinf(value)
    else:
        assert value == pytest.approx(expected, rel=1e-5)


def test_moment_order_must_be_positive():
    with pytest.raises(InvalidParameter):
        law_moment(ConstantLaw(r=1.0), 0)


def test_integer_tail_survival():
    law = IntegerTailLaw(tail=2.0)
    assert float(law.survival(0.5)) == 1.0
    assert float(law.survival(1.5)) == pytest.approx(0.25)
    assert float(law.survival(2.0)) == pytest.approx(1 / 9)


def test_integer_tail_samples_are_integers(rng):
    samples = IntegerTailLaw(tail=3.0).sample(rng, 1000)
    assert np.all(samples >= 1)
    assert np.all(samples == np.floor(samples))


def test_parse_law():
    law = parse_law({"kind": "pareto", "scale": 1.0, "tail": 3.0})
    assert isinstance(law, ParetoLaw)
    assert law.esssup == math.inf
    with pytest.raises(ValidationError):
        parse_law({"kind": "constant", "r": 0.0})


def test_covering_range():
    assert covering_range(ConstantLaw(r=1.5), 1.0, 2) == 1.5
    assert covering_range(ParetoLaw(scale=1.0, tail=2.0), 1.0, 2) is None
    reach = covering_range(ExponentialLaw(rate=1.0), 1.0, 2)
    assert math.isfinite(reach) and reach >= 1.0


@pytest.mark.parametrize(
    "dim, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)]
)
def test_unit_ball_volume(dim, expected):
    assert unit_ball_volume(dim) == pytest.approx(expected)


@pytest.mark.parametrize(
    "c2, expected", [((3.0, 0.0), True), ((4.0, 0.0), False)]
)
def test_balls_overlap_is_strict(c2, expected):
    assert balls_overlap((0.0, 0.0), 2.0, c2, 2.0) is expected


def test_balls_overlap_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        balls_overlap((0.0, 0.0), 1.0, (1.0, 0.0, 0.0), 1.0)


def test_balls_overlap_against_coordinates(rng):
    for _ in range(1000):
        c1, c2 = rng.uniform(-5, 5, (2, 2))
        r1, r2 = rng.uniform(0, 3, 2)
        gap2 = (c1[0] - c2[0]) ** 2 + (c1[1] - c2[1]) ** 2
        assert balls_overlap(c1, r1, c2, r2) == (gap2 < (r1 + r2) ** 2)


@pytest.mark.parametrize(
    "r1, r2, dist, dim, expected",
    [
        (1.0, 1.0, 1.0, 1, 1.0),
        (1.0, 1.0, 1.0, 2, 2 * math.pi / 3 - math.sqrt(3) / 2),
        (1.0, 1.0, 1.0, 3, 5 * math.pi / 12),
        (1.0, 3.0, 0.5, 2, math.pi),
        (1.0, 1.0, 2.5, 2, 0.0),
    ],
)
def test_ball_intersection_volume(r1, r2, dist, dim, expected):
    value = ball_intersection_volume(r1, r2, dist, dim)
    assert value == pytest.approx(expected, abs=1e-12)


def test_segment_ball_length():
    starts = np.array([[-5.0, 0.0], [-5.0, 3.0]])
    ends = np.array([[5.0, 0.0], [5.0, 3.0]])
    lengths = segment_ball_length(starts, ends, np.zeros(2), 2.0)
    assert lengths == pytest.approx([4.0, 0.0])


def test_clip_segments_drops_outside():
    starts = np.array([[-5.0, 0.0], [3.0, 3.0]])
    ends = np.array([[5.0, 0.0], [4.0, 4.0]])
    clipped_starts, clipped_ends = clip_segments(starts, ends, 2.0)
    assert clipped_starts.tolist() == [[-2.0, 0.0]]
    assert clipped_ends.tolist() == [[2.0, 0.0]]


def test_seed_streams_are_pure():
    seed = Seed.of(7)
    assert seed.child(3) == Seed.of(7).child(3)
    assert seed.child(3) != seed.child(4)
    assert seed.branch("positions") != seed.branch("marks")
    assert seed.rng().random() == Seed.of(7).rng().random()
    assert int(Seed.of(-1)) == 2**64 - 1


def test_window_geometry():
    window = Window(dim=2, half_width=2.0, margin=1.0)
    assert window.padded_half_width == 3.0
    assert window.volume == 16.0
    assert window.contains_ball([1.0, 1.0], 2.0)
    assert not window.contains_ball([1.0, 1.0], 2.0, padded=False)
    assert window.contains([[2.5, 0.0]]).tolist() == [True]
    assert window.contains([[2.5, 0.0]], padded=False).tolist() == [False]


def test_window_lattice_reaches_both_ends():
    lattice = Window(dim=1, half_width=1.0).lattice(1.0, 0.5)
    assert lattice.ravel().tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_union_find_labels():
    union_find = UnionFind(5)
    assert union_find.union(3, 4)
    assert union_find.union(0, 3)
    assert not union_find.union(4, 0)
    assert union_find.labels().tolist() == [0, 1, 2, 0, 0]


def test_type_registry():
    registry = TypeRegistry("widget")

    @registry.register("a")
    def first():
        return 1

    assert registry.require("a") is first
    with pytest.raises(ValueError):
        registry.register("a")
    with pytest.raises(UnregisteredKind) as e:
        registry.require("b")
    assert e.value.to_dict()["error"]["code"] == "registry.unregistered_kind"
    assert "widget" in e.value.description


@pytest.mark.parametrize("replicates", [0, -3])
def test_replicate_pool_needs_replicates(seed, replicates):
    with pytest.raises(InvalidParameter):
        ReplicatePool(2).map(lambda i, s: i, seed, replicates)


def test_replicate_pool_keeps_index_order(seed):
    def draw(index, replicate_seed):
        return index, float(replicate_seed.rng().random())

    assert ReplicatePool(3).map(draw, seed, 7) == ReplicatePool(1).map(
        draw, seed, 7
    )
