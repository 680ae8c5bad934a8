"""Force-directed graph layouts steered by 0-dimensional persistence barcodes."""

from .analysis import (
    ClusterHierarchy,
    EffectReport,
    cluster_rest_lengths,
    effect_metrics,
    greedy_modularity,
    layout_persistence,
    weighted_modularity,
)
from .barcode import (
    Bar,
    Barcode,
    bar_metadata,
    barcode_to_json,
    brute_force_barcode,
    compute_barcode,
    sort_bars,
)
from .forces import KERNEL_BACKEND, pairwise_repulsion
from .graph import (
    Graph,
    GraphFormatError,
    GraphParseWarning,
    connected_components,
    degree_color_scale,
    parse_graph,
    serialize_graph,
)
from .layout import (
    ForceConfig,
    LayoutState,
    Selection,
    init_layout,
    run,
    step,
)
from .session import Session, feature_gate
from .weighting import (
    MetricMatrix,
    WeightedGraph,
    ego_neighborhood,
    jaccard_weights,
    lengths_from_weights,
    shortest_path_metric,
    weigh_graph,
)

__version__ = "0.1.0"
