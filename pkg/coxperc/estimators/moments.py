import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np

from coxperc.boolmodel import origin_cluster
from coxperc.common.replicates import ReplicatePool
from coxperc.core.radius_law import RadiusLaw
from coxperc.core.seeds import Seed
from coxperc.core.window import Window
from coxperc.environments import EnvironmentSpec
from coxperc.estimators.exceptions import InvalidLadder
from coxperc.estimators.percolation import ensure_subcritical
from coxperc.estimators.report import MomentLadder, Verdict
from coxperc.estimators.simulation import simulate, simulation_window

__all__ = ("moment_ladder", "ladder_verdict", "check_ladder")

_logger = logging.getLogger("coxperc.estimators")

Observable = Literal["volume", "diameter", "count"]

GROWTH_THRESHOLD = 0.1
CENSORING_THRESHOLD = 0.01
GROWING_DOUBLINGS = 3


def check_ladder(half_widths: Sequence[float]) -> list[float]:
    ladder = [float(h) for h in half_widths]
    if not ladder:
        raise InvalidLadder("the window ladder is empty")
    if ladder[0] <= 0 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidLadder(
            "window half-widths must be positive and increasing"
        )
    return ladder


def _relative_change(previous: float, current: float) -> float:
    if previous == 0:
        return 0.0 if current == 0 else math.inf
    return (current - previous) / previous


def ladder_verdict(
    moments: Sequence[float], censored_fractions: Sequence[float]
) -> tuple[Verdict, list[Optional[float]]]:
    """Classify the growth of a moment across window doublings."""
    changes = [
        _relative_change(a, b) for a, b in zip(moments, moments[1:])
    ]
    if len(changes) >= GROWING_DOUBLINGS and all(
        c >= GROWTH_THRESHOLD for c in changes[-GROWING_DOUBLINGS:]
    ):
        verdict = "growing"
    elif (
        changes
        and abs(changes[-1]) < GROWTH_THRESHOLD
        and censored_fractions[-1] < CENSORING_THRESHOLD
    ):
        verdict = "stabilizing"
    else:
        verdict = "inconclusive"
    return verdict, [None] + changes


def moment_ladder(
    spec: EnvironmentSpec,
    law: RadiusLaw,
    intensity: float,
    s: float,
    observable: Observable,
    half_widths: Sequence[float],
    replicates: int,
    seed: Seed,
    dim: int = 2,
    critical: Optional[float] = None,
    allow_supercritical: bool = False,
    witness_alphas: Optional[Sequence[float]] = None,
    volume_samples: Optional[int] = None,
    pool: Optional[ReplicatePool] = None,
    margin: float = 0.0,
) -> MomentLadder:
    """Censored E[obs^s'] of C_o over nested windows.

    Volume and point count use the exponent s/d, the diameter uses s.
    One configuration is drawn per replicate on the largest window and
    restricted to the smaller ones, so every replicate's observable is
    nondecreasing along the ladder.
    """
    ladder = check_ladder(half_widths)
    if s <= 0:
        raise InvalidLadder("the moment order s must be positive")
    pool = ReplicatePool.resolve(pool)
    critical = ensure_subcritical(
        spec,
        law,
        intensity,
        ladder[0],
        replicates,
        seed,
        dim,
        critical,
        allow_supercritical,
        pool,
        margin,
    )
    exponent = s / dim if observable in ("volume", "count") else s
    alphas = [float(a) for a in (witness_alphas or ladder)]
    window = simulation_window(spec, law, ladder[-1], dim, margin)
    windows = [
        Window(dim=dim, half_width=h, margin=window.margin) for h in ladder
    ]
    with_volume = observable == "volume"

    def replicate(index: int, replicate_seed: Seed):
        mps = simulate(spec, law, intensity, window, replicate_seed)
        values, censored = [], []
        for rung in windows:
            stats = origin_cluster(
                mps.restrict(rung),
                seed=replicate_seed.branch("volume"),
                n_samples=volume_samples,
                volume=with_volume,
            )
            values.append(stats.observable(observable) ** exponent)
            censored.append(stats.censored)
        reach = np.linalg.norm(mps.points, axis=1)
        witness = [bool(np.any(reach + a < mps.radii)) for a in alphas]
        return values, censored, witness

    results = pool.map(replicate, seed, replicates)
    values = np.asarray([r[0] for r in results], dtype=float).reshape(
        replicates, len(ladder)
    )
    censored = np.asarray([r[1] for r in results], dtype=bool).reshape(
        replicates, len(ladder)
    )
    witness = np.asarray([r[2] for r in results], dtype=bool).reshape(
        replicates, len(alphas)
    )
    moments = values.mean(axis=0)
    if replicates > 1:
        errors = values.std(axis=0, ddof=1) / math.sqrt(replicates)
    else:
        errors = np.zeros(len(ladder))
    fractions = censored.mean(axis=0)
    verdict, changes = ladder_verdict(list(moments), list(fractions))
    if fractions[-1] >= CENSORING_THRESHOLD:
        _logger.warning(
            "%.1f%% of origin clusters are censored on the largest window",
            100 * fractions[-1],
        )
    _logger.info(
        "moment ladder for %s^%g: %s", observable, exponent, verdict
    )
    return MomentLadder(
        observable=observable,
        s=s,
        exponent=exponent,
        intensity=intensity,
        half_widths=ladder,
        moments=[float(m) for m in moments],
        standard_errors=[float(e) for e in errors],
        censored_fractions=[float(f) for f in fractions],
        relative_changes=[
            c if c is None or math.isfinite(c) else None for c in changes
        ],
        verdict=verdict,
        witness_alphas=alphas,
        witness_probabilities=[float(w) for w in witness.mean(axis=0)],
        replicates=replicates,
        seed=int(seed),
        flags={
            "critical": critical
            if critical is None or math.isfinite(critical)
            else None,
            "dim": dim,
        },
    )
