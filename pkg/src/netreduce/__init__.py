"""netreduce: partition the nodes of a network and aggregate it to one node per cluster.

The pipeline is split into two independent stages: partitioning assigns
every node to a cluster (a total busmap) without touching the graph;
aggregation reduces the topology and its properties under a declarative
profile. Voltage- and island-awareness for power grids work with any
distance-based algorithm via +inf masking of the distance matrix.
"""

from . import errors
from .aggregate import (
    CONCAT_UNIQUE,
    COUNT,
    FIRST,
    MAX,
    MEAN,
    MIN,
    PARALLEL_EQUIVALENT,
    SUM,
    AggregationProfile,
    DomainTransform,
    Membership,
    Reducer,
    aggregate,
    aggregate_properties,
    aggregate_topology,
    apply_domain_transforms,
    builtin_profiles,
    get_profile,
    register_profile,
    register_reducer,
    register_transform,
    save_membership,
    weighted_mean,
)
from .clustering import (
    agglomerative,
    allocate_cluster_budget,
    dbscan,
    kmeans,
    kmedoids,
)
from .distance import (
    EARTH_RADIUS_KM,
    DistanceFamily,
    DistanceMatrix,
    FeatureMatrix,
    PtdfMatrix,
    apply_infinity_mask,
    compute_ptdf,
    electrical_distance_matrix,
    feature_matrix,
    geo_distance_matrix,
)
from .ingest import (
    LoaderSpec,
    export_csv,
    load,
    load_csv,
    load_generic_csv,
    load_power_grid_csv,
    register_loader,
)
from .network import (
    AC_KINDS,
    Edge,
    EdgeKind,
    Network,
    Node,
    build_network,
    connected_components,
    induced_subnetwork,
)
from .partition import (
    PartitionResult,
    StrategySpec,
    load_busmap,
    partition,
    register_partitioner,
    save_busmap,
)
from .pipeline import (
    PipelineConfig,
    load_config,
    run_pipeline,
    validate_config,
)
from .preprocess import (
    GroupKind,
    GroupLabeling,
    combine_labelings,
    consolidate_parallel_edges,
    detect_ac_islands,
    group_by_voltage,
)
from .viz import export_dot, export_geojson

__version__ = "0.1.0"

_LAZY = {"NetworkPartitioner", "NetworkReducer", "check_network"}


def __getattr__(name):
    # estimators pull in scikit-learn; keep that off the CLI startup path
    if name in _LAZY:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
