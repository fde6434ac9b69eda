from .deviation import deviation_tail, deviation_verdict, truncated_integral
from .exceptions import (
    CompleteCoverage,
    EstimatorError,
    InfiniteMean,
    InvalidLadder,
    LadderOutsideWindow,
    NoSupercriticalPhase,
    SupercriticalIntensity,
)
from .moments import check_ladder, ladder_verdict, moment_ladder
from .one_dim import exact_coverage_probability, one_dim_triviality
from .oracles import clustering_oracle, diameter_oracle, volume_oracle
from .percolation import (
    critical_intensity,
    ensure_subcritical,
    percolation_curve,
    subcritical_decay,
    zero_critical_intensity,
)
from .recursion import (
    recursion_window,
    scaling_recursion_check,
    stabilization_tail,
)
from .report import EstimateReport, MomentLadder, wilson_interval
from .simulation import (
    crosses,
    radius_margin,
    simulate,
    simulate_coupled,
    simulation_window,
    thinned,
)
from .uniqueness import connectedness_rate, uniqueness_report
from .vacant import vacant_closed_form, vacant_probability, vacant_window
