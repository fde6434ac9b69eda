from coxperc.exceptions import CoxpercError


class BoolModelError(CoxpercError):
    pass


class WindowTooSmall(BoolModelError):
    def __init__(self, needed: float, available: float):
        super(WindowTooSmall, self).__init__(
            "boolmodel.window_too_small",
            f"query needs a window of half-width {needed:g}, "
            f"only {available:g} is sampled",
        )


class InvalidAxis(BoolModelError):
    def __init__(self, axis: int, dim: int):
        super(InvalidAxis, self).__init__(
            "boolmodel.invalid_axis",
            f"axis {axis} does not exist in dimension {dim}",
        )
