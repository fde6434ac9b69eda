from .builders import ENVIRONMENT_BUILDERS, make_environment
from .connectedness import (
    ConnectednessReport,
    essential_connectedness_audit,
    support_nodes,
)
from .exceptions import (
    BallOutsideWindow,
    EnvironmentsError,
    IncompatibleDimension,
    MarginTooSmall,
    NoRadiusField,
    TessellationPadError,
    WindowTooSmall,
)
from .measure import measure_of_ball
from .radius_field import RadiusField, field_window, radius_field
from .realization import (
    BallSet,
    DensityGrid,
    EnvRealization,
    ManhattanLines,
    Scalar,
    SegmentSet,
)
from .spec import (
    BooleanCountSpec,
    DelaunayEdgesSpec,
    EnvironmentSpec,
    EnvironmentSpecField,
    HomogeneousSpec,
    IndicatorFieldSpec,
    ManhattanGridSpec,
    MixedPoissonSpec,
    ParetoZ,
    ShotNoiseSpec,
    TwoPointZ,
    VoronoiEdgesSpec,
)
from .stabilization import campbell_bound, phi_hat
