from typing import Literal, Optional

from pydantic import Field

from coxperc.common.models import AppBaseModel
from coxperc.common.report import EstimateReport, wilson_interval

__all__ = ("EstimateReport", "MomentLadder", "Verdict", "wilson_interval")

Verdict = Literal["stabilizing", "growing", "inconclusive"]


class MomentLadder(AppBaseModel):
    """Censored moments E[obs^exponent] of the origin cluster per window.

    ``relative_changes[k]`` compares rung k with rung k - 1 (the first
    entry is ``None``). The witness columns hold the empirical
    P(∃ i: |X_i| + α < ρ_i) on the largest window.
    """

    observable: str
    s: float
    exponent: float
    intensity: float
    half_widths: list[float]
    moments: list[Optional[float]]
    standard_errors: list[Optional[float]]
    censored_fractions: list[float]
    relative_changes: list[Optional[float]]
    verdict: Verdict
    witness_alphas: list[float] = Field(default_factory=list)
    witness_probabilities: list[float] = Field(default_factory=list)
    replicates: int
    seed: int
    flags: dict = Field(default_factory=dict)

    def to_report(self) -> EstimateReport:
        witness = dict(zip(self.witness_alphas, self.witness_probabilities))
        return EstimateReport.build(
            "moment_ladder",
            "half_width",
            self.half_widths,
            self.moments,
            self.standard_errors,
            self.replicates,
            self.seed,
            columns={
                "censored_fraction": self.censored_fractions,
                "relative_change": self.relative_changes,
                "witness": [witness.get(h) for h in self.half_widths],
            },
            flags={
                "verdict": self.verdict,
                "observable": self.observable,
                "s": self.s,
                "exponent": self.exponent,
                "lambda": self.intensity,
                "witness_alphas": self.witness_alphas,
                "witness_probabilities": self.witness_probabilities,
                **self.flags,
            },
        )
