import math
from typing import Any, Optional

import numpy as np
from pydantic import Field

from coxperc.common.models import AppBaseModel

__all__ = ("EstimateReport", "wilson_interval", "binomial_se")


def wilson_interval(
    successes: int, n: int, z: float = 1.96
) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denominator = 1 + z**2 / n
    center = (p + z**2 / (2 * n)) / denominator
    half = (
        z * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denominator
    )
    return max(0.0, center - half), min(1.0, center + half)


def binomial_se(successes: int, n: int) -> float:
    if n <= 1:
        return 0.0
    p = successes / n
    return math.sqrt(p * (1 - p) / n)


def _finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class EstimateReport(AppBaseModel):
    """Point estimates over a parameter grid, with uncertainty.

    ``columns`` carries named companion columns parallel to ``grid``
    (closed forms, bounds, diagnostics); ``flags`` carries verdicts and
    scalar metadata. Non-finite values are stored as ``None``.
    """

    name: str
    parameter: str
    grid: list[float]
    estimates: list[Optional[float]]
    standard_errors: list[Optional[float]]
    ci_low: list[Optional[float]] = Field(default_factory=list)
    ci_high: list[Optional[float]] = Field(default_factory=list)
    replicates: int
    seed: int
    columns: dict[str, list[Optional[float]]] = Field(default_factory=dict)
    flags: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def build(
        cls,
        name: str,
        parameter: str,
        grid,
        estimates,
        standard_errors,
        replicates: int,
        seed: int,
        ci_low=None,
        ci_high=None,
        columns: Optional[dict] = None,
        flags: Optional[dict] = None,
    ) -> "EstimateReport":
        def clean(values):
            return [_finite_or_none(v) for v in values]

        return cls(
            name=name,
            parameter=parameter,
            grid=[float(g) for g in grid],
            estimates=clean(estimates),
            standard_errors=clean(standard_errors),
            ci_low=clean(ci_low) if ci_low is not None else [],
            ci_high=clean(ci_high) if ci_high is not None else [],
            replicates=int(replicates),
            seed=int(seed),
            columns={k: clean(v) for k, v in (columns or {}).items()},
            flags=flags or {},
        )

    @classmethod
    def from_proportions(
        cls,
        name: str,
        parameter: str,
        grid,
        successes,
        replicates: int,
        seed: int,
        columns: Optional[dict] = None,
        flags: Optional[dict] = None,
    ) -> "EstimateReport":
        successes = [int(s) for s in successes]
        intervals = [wilson_interval(s, replicates) for s in successes]
        return cls.build(
            name,
            parameter,
            grid,
            [s / replicates if replicates else 0.0 for s in successes],
            [binomial_se(s, replicates) for s in successes],
            replicates,
            seed,
            ci_low=[i[0] for i in intervals],
            ci_high=[i[1] for i in intervals],
            columns=columns,
            flags=flags,
        )

    def column_names(self) -> list[str]:
        names = [self.parameter, "estimate", "se"]
        if self.ci_low:
            names += ["ci_low", "ci_high"]
        return names + list(self.columns) + ["n"]

    def rows(self) -> list[list]:
        """Long-format rows matching ``column_names``."""
        rows = []
        for i, g in enumerate(self.grid):
            row = [g, self.estimates[i], self.standard_errors[i]]
            if self.ci_low:
                row += [self.ci_low[i], self.ci_high[i]]
            row += [values[i] for values in self.columns.values()]
            rows.append(row + [self.replicates])
        return rows

    def is_monotone(self, decreasing: bool = False) -> bool:
        """Monotone up to the width of the Wilson intervals."""
        if not self.ci_low:
            values = np.asarray(self.estimates, dtype=float)
            steps = np.diff(values)
            return bool(np.all(steps <= 0 if decreasing else steps >= 0))
        for i in range(len(self.grid) - 1):
            if decreasing:
                violated = self.ci_high[i] < self.ci_low[i + 1]
            else:
                violated = self.ci_high[i + 1] < self.ci_low[i]
            if violated:
                return False
        return True
