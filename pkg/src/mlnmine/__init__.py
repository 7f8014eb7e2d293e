"""Substructure discovery in homogeneous multilayer networks.

The package mines the highest-ranked connected substructures of a
multilayer graph by growing instances one edge at a time within each
layer, composing growth across layers, and ranking the resulting
isomorphism classes by frequency or by graph compression.  Work is
split over vertex-range partitions and worker processes without
affecting results.
"""

from .canonical import (
    CanonicalSubstructure,
    Instance,
    canonical_substructure,
    canonicalize_instance,
    instance_key,
    substructure_key,
)
from .compose import TaggedInstance, compose_step, separate, tag_instance
from .datagen import (
    BUILTIN_PATTERN_NAMES,
    builtin_pattern,
    embed_pattern,
    generate_base,
    pattern_class_key,
    pattern_from_text,
    split_layers,
)
from .engine import (
    DiscoveryConfig,
    DiscoveryResult,
    IterationReport,
    discover,
    ranked_text,
    result_json,
    run_ground_truth,
    write_result,
)
from .errors import (
    ConfigError,
    ContractViolation,
    MiningError,
    ParseError,
    RoutingError,
    ValidationError,
)
from .expand import brute_force_enumerate, dedup, enumerate_by_expansion, expand_instance
from .graph import (
    Edge,
    HoMLN,
    Layer,
    build_adjacency_list,
    make_edge,
    make_layer,
    or_conflate,
    parse_edge_list,
    serialize_edge_list,
)
from .metrics import (
    GraphStats,
    ScoredSubstructure,
    apply_beam,
    freq_score,
    group_isomorphs,
    mdl_score,
)
from .partition import (
    AdjacencyListPartition,
    RangePartitioning,
    make_ranges,
    parse_ranges,
    partition_adjacency,
)

__version__ = "0.1.0"
