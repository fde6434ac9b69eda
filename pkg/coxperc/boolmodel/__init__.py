from .clusters import (
    ClusterLabels,
    brute_force_clusters,
    build_clusters,
    clusters_to_csv,
    component_of,
    covering_balls,
)
from .events import (
    crossing_exists,
    crossing_labels,
    g_event,
    giant_cluster_count,
    reach_event,
)
from .exceptions import BoolModelError, InvalidAxis, WindowTooSmall
from .observables import (
    ClusterStats,
    cluster_diameter,
    cluster_stats,
    origin_cluster,
    union_volume_mc,
)
