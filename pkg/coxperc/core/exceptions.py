from typing import Optional

from coxperc.exceptions import CoxpercError


class CoreError(CoxpercError):
    pass


class DimensionMismatch(CoreError):
    def __init__(self, expected: int, got: int):
        super(DimensionMismatch, self).__init__(
            "core.dimension_mismatch",
            f"expected a point of dimension {expected}, got {got}",
        )


class InvalidParameter(CoreError):
    def __init__(self, name: str, message: Optional[str] = None):
        super(InvalidParameter, self).__init__(
            "core.invalid_parameter",
            f"invalid parameter '{name}'"
            + (f": {message}" if message else ""),
        )
