"""Verification lab for exact-rational message-passing GNNs, color
refinement, and bit-length complexity measures.

Everything computes over `fractions.Fraction` (no floats in any value
path), so every reported class count, bit-length, and bound check is
exact. See the module docstrings for the measures and experiments.
"""

from .rationals import (
    CapExceeded,
    DimensionMismatch,
    Rat,
    RVec,
    as_rat,
    as_vec,
    bitlen_int,
    bitlen_rat,
    bitlen_vec,
    format_rat,
    format_vec,
    parse_rat,
    rat_arith,
    rat_compare,
)
from .mlp import (
    Layer,
    MLPSpec,
    composed_bound,
    identity_mlp,
    layer_bound_check,
    linear_mlp,
    make_layer,
    make_mlp,
    max_weight_bitlen,
    mlp_forward,
    mlp_from_json,
    mlp_to_json,
    probe_mlp_complexity,
    random_mlp,
    relu_vec,
    safe_layer_bound,
    set_layer_bound_assertions,
    zero_mlp,
)
from .aggregation import (
    AGG_KINDS,
    VALUE_DOMAINS,
    aggregate,
    classify_agg,
    enumerate_domain_scalars,
    log_schedule,
    measure_agg_complexity,
    reciprocal_prime_multiset,
)
from .graphs import (
    FeaturedGraph,
    composition_count,
    compositions,
    diameter,
    edge_slots,
    enumerate_labeled_graphs,
    format_edgelist,
    graph_from_json,
    graph_from_mask,
    graph_to_json,
    labeled_graph_count,
    make_graph,
    parse_edgelist,
    random_graph,
    star_degree_check,
    star_family,
    star_graph,
)
from .refinement import (
    ColorHistory,
    ColorInterner,
    cr_csv_rows,
    cr_run,
    graph_color,
    token_hash,
    vertex_color,
)
from .gnn import (
    EvalResult,
    EvalTrace,
    Evaluator,
    GNNLayer,
    GNNModel,
    Readout,
    constant_model,
    gnn_eval,
    graph_trace_bitlen,
    measure_LN,
    model_from_json,
    model_to_json,
    projection_sum_model,
    random_model,
    trace_bitlen,
    trace_csv_rows,
)
from .dpower import (
    compare_report,
    count_classes,
    exhaustive_summary,
    expobserve_report_from_summary,
    star_collision_witness,
    verify_cr_bound,
    verify_expobserve,
    verify_star_lemma,
)

__version__ = "0.1.0"
