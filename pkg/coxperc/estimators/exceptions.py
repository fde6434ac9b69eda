from coxperc.exceptions import CoxpercError


class EstimatorError(CoxpercError):
    pass


class CompleteCoverage(EstimatorError):
    def __init__(self, dim: int):
        super(CompleteCoverage, self).__init__(
            "estimators.complete_coverage",
            f"E[ρ^{dim}] is infinite, so the Boolean model covers the whole "
            "space almost surely",
        )


class InfiniteMean(EstimatorError):
    def __init__(self):
        super(InfiniteMean, self).__init__(
            "estimators.infinite_mean",
            "E[ρ] is infinite, so the line is covered almost surely",
        )


class NoSupercriticalPhase(EstimatorError):
    def __init__(self, cap: float, half_width: float):
        super(NoSupercriticalPhase, self).__init__(
            "estimators.no_supercritical_phase",
            f"no supercritical phase detected at this scale: crossing "
            f"probability stays below 1/2 up to λ = {cap:g} "
            f"(L = {half_width:g})",
        )


class SupercriticalIntensity(EstimatorError):
    def __init__(self, intensity: float, critical: float):
        super(SupercriticalIntensity, self).__init__(
            "estimators.supercritical_intensity",
            f"λ = {intensity:g} is not below half the estimated critical "
            f"intensity {critical:g}; set allow_supercritical to override",
        )


class LadderOutsideWindow(EstimatorError):
    def __init__(self, needed: float, limit: float):
        super(LadderOutsideWindow, self).__init__(
            "estimators.ladder_outside_window",
            f"the ladder needs a window of half-width {needed:g}, above the "
            f"limit {limit:g}",
        )


class InvalidLadder(EstimatorError):
    def __init__(self, message: str):
        super(InvalidLadder, self).__init__(
            "estimators.invalid_ladder", message
        )
