from coxperc.core.exceptions import (  # noqa: F401
    CoreError,
    DimensionMismatch,
    InvalidParameter,
)
from coxperc.core.geometry import (  # noqa: F401
    as_point,
    ball_intersection_volume,
    ball_surface,
    ball_volume,
    balls_overlap,
    unit_ball_volume,
)
from coxperc.core.radius_law import (  # noqa: F401
    ConstantLaw,
    ExponentialLaw,
    IntegerTailLaw,
    ParetoLaw,
    RadiusLaw,
    TwoPointLaw,
    covering_range,
    law_moment,
    parse_law,
    sample_radius,
)
from coxperc.core.seeds import Seed  # noqa: F401
from coxperc.core.window import Window  # noqa: F401
