from coxperc.exceptions import CoxpercError


class EnvironmentsError(CoxpercError):
    pass


class IncompatibleDimension(EnvironmentsError):
    def __init__(self, kind: str, dim: int):
        super(IncompatibleDimension, self).__init__(
            "environments.incompatible_dimension",
            f"environment '{kind}' is not defined in dimension {dim}",
        )


class MarginTooSmall(EnvironmentsError):
    def __init__(self, kind: str, required: float, margin: float):
        super(MarginTooSmall, self).__init__(
            "environments.margin_too_small",
            f"environment '{kind}' needs a window margin of at least "
            f"{required:g}, got {margin:g}",
        )
        self.required = required


class BallOutsideWindow(EnvironmentsError):
    def __init__(self, center, radius: float):
        super(BallOutsideWindow, self).__init__(
            "environments.ball_outside_window",
            f"ball of radius {radius:g} at {list(center)} leaves the "
            "padded window",
        )


class NoRadiusField(EnvironmentsError):
    def __init__(self, kind: str):
        super(NoRadiusField, self).__init__(
            "environments.no_radius_field",
            f"no stabilization field defined for environment '{kind}'",
        )


class TessellationPadError(EnvironmentsError):
    def __init__(self, pad: float):
        super(TessellationPadError, self).__init__(
            "environments.tessellation_pad",
            f"tessellation edges near the window are not certified with a "
            f"pad of {pad:g}",
        )


class WindowTooSmall(EnvironmentsError):
    def __init__(self, needed: float, available: float):
        super(WindowTooSmall, self).__init__(
            "environments.window_too_small",
            f"query needs Q_{needed:g} inside the padded window "
            f"Q_{available:g}",
        )
