"""Self-checks of the geometric primitives against independent oracles."""
import logging
import math
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull

from coxperc.boolmodel import (
    brute_force_clusters,
    build_clusters,
    cluster_diameter,
    union_volume_mc,
)
from coxperc.common.report import EstimateReport
from coxperc.core.seeds import Seed
from coxperc.coxsampler import MarkedPointSet

__all__ = (
    "clustering_oracle",
    "diameter_oracle",
    "volume_oracle",
    "random_configuration",
    "random_chain",
    "boundary_diameter",
)

_logger = logging.getLogger("coxperc.estimators")


def random_configuration(
    rng: np.random.Generator, n: int, dim: int
) -> MarkedPointSet:
    """n balls of radius in [0.2, 1) at density near the percolation
    threshold, so the partition has clusters of every size.
    """
    half = 0.9 * n ** (1 / dim)
    points = rng.uniform(-half, half, (n, dim))
    radii = rng.uniform(0.2, 1.0, n)
    return MarkedPointSet.from_arrays(points, radii)


def clustering_oracle(
    n_max: int,
    configurations: int,
    seed: Seed,
    dims: Sequence[int] = (1, 2, 3),
) -> EstimateReport:
    """Fraction of random configurations whose partition matches the
    all-pairs oracle, per dimension.
    """
    matches, mismatched = [], []
    for dim in dims:
        matched = 0
        for k in range(configurations):
            rng = seed.branch(f"dim:{dim}").child(k).rng()
            size = int(rng.integers(1, n_max + 1))
            mps = random_configuration(rng, size, dim)
            if build_clusters(mps) == brute_force_clusters(mps):
                matched += 1
            else:
                mismatched.append([dim, k])
        matches.append(matched)
    if mismatched:
        _logger.warning("partition mismatches: %s", mismatched)
    return EstimateReport.from_proportions(
        "clustering_oracle",
        "dim",
        dims,
        matches,
        configurations,
        int(seed),
        flags={"n_max": n_max, "mismatches": mismatched},
    )


def random_chain(rng: np.random.Generator, size: int):
    """A connected chain of disks in the plane."""
    radii = rng.uniform(0.3, 1.0, size)
    points = np.zeros((size, 2))
    for k in range(1, size):
        angle = rng.uniform(0, 2 * math.pi)
        gap = rng.uniform(0.3, 0.9) * (radii[k - 1] + radii[k])
        points[k] = points[k - 1] + gap * np.array(
            [math.cos(angle), math.sin(angle)]
        )
    return points, radii


def boundary_diameter(
    points: np.ndarray, radii: np.ndarray, pitch: float
) -> float:
    """Largest distance between circle points sampled at ``pitch``."""
    samples = []
    for center, radius in zip(points, radii):
        count = max(8, int(math.ceil(2 * math.pi * radius / pitch)))
        angles = np.linspace(0, 2 * math.pi, count, endpoint=False)
        samples.append(
            center + radius * np.stack([np.cos(angles), np.sin(angles)], 1)
        )
    samples = np.concatenate(samples)
    hull = samples[ConvexHull(samples).vertices]
    gaps = np.linalg.norm(hull[:, None, :] - hull[None], axis=2)
    return float(gaps.max())


def diameter_oracle(
    clusters: int, pitch: float, seed: Seed, max_size: int = 6
) -> EstimateReport:
    """Diameter formula against dense boundary sampling of disk chains.

    The sampled diameter undershoots the exact one by at most the
    sagitta of one pitch, so agreement within 2·pitch is expected.
    """
    exact, sampled = [], []
    for k in range(clusters):
        rng = seed.child(k).rng()
        points, radii = random_chain(rng, int(rng.integers(1, max_size + 1)))
        exact.append(cluster_diameter(points, radii))
        sampled.append(boundary_diameter(points, radii, pitch))
    gaps = np.abs(np.asarray(exact) - np.asarray(sampled))
    return EstimateReport.build(
        "diameter_oracle",
        "cluster",
        range(clusters),
        exact,
        [0.0] * clusters,
        1,
        int(seed),
        columns={"sampled": sampled, "abs_diff": list(gaps)},
        flags={
            "pitch": pitch,
            "max_abs_diff": float(gaps.max()) if clusters else 0.0,
            "within_tolerance": bool(np.all(gaps <= 2 * pitch)),
        },
    )


def volume_oracle(n_samples: int, seed: Seed) -> EstimateReport:
    """Hit-or-miss volumes against closed forms.

    Cases: one unit disk, two unit disks at distance 1 (2π less the
    lens 2π/3 - √3/2), and the intervals (-1, 1) and (0, 2) on the line.
    """
    cases = [
        ([((0.0, 0.0), 1.0)], math.pi),
        (
            [((0.0, 0.0), 1.0), ((1.0, 0.0), 1.0)],
            4 * math.pi / 3 + math.sqrt(3) / 2,
        ),
        ([((0.0,), 1.0), ((1.0,), 1.0)], 3.0),
    ]
    estimates, errors, closed, passed = [], [], [], []
    for k, (balls, value) in enumerate(cases):
        estimate, se = union_volume_mc(balls, n_samples, seed.child(k))
        estimates.append(estimate)
        errors.append(se)
        closed.append(value)
        passed.append(bool(abs(estimate - value) <= max(3 * se, 1e-12)))
    return EstimateReport.build(
        "volume_oracle",
        "case",
        range(len(cases)),
        estimates,
        errors,
        n_samples,
        int(seed),
        columns={"closed_form": closed},
        flags={"within_3se": passed},
    )
