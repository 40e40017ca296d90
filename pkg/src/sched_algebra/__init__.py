"""Algebra of synchronous scheduling interfaces.

Resource-bounded scheduling types with an executable activation semantics,
min/max-plus matrix arithmetic, interface composition laws, and analyses for
network flow, shortest paths, task scheduling and worst-case reaction time.
"""

from .kernel import (
    And,
    Atom,
    Bound,
    Delay,
    DelayB,
    EmbedInterface,
    ExtNat,
    FALSE,
    Implies,
    InL,
    InR,
    Interface,
    NEG_INF,
    Not,
    OPlus,
    OTimes,
    Or,
    POS_INF,
    PairB,
    ParseError,
    SchedAlgebraError,
    ShapeError,
    Table,
    TRUE,
    TypeExpr,
    UNIT,
    Unit,
    UnsupportedTypeError,
    arrow_interface,
    bound_space_shape,
    classify,
    delay_interface,
    embed_interface,
    enumerate_bounds,
    format_bound,
    format_interface,
    format_type,
    parse_interface,
    parse_type,
    pure_bound,
    pure_interface,
)
from .semantics import (
    Activation,
    BudgetError,
    Schedule,
    Universe,
    activation,
    covers2,
    denotation,
    enumerate_universe,
    equivalent,
    is_causal,
    is_persistent,
    refines,
    satisfies,
    schedule_satisfies,
    shift,
    subactivations,
    tighten,
    universe,
)
from .tropical import (
    MAX_PLUS,
    MIN_PLUS,
    TropicalMatrix,
    closure,
    identity,
    kron,
    mat_join,
    mat_meet,
    mat_mul,
    matrix,
)
from .algebra import (
    IOInterface,
    LawReport,
    Obligation,
    fork_and,
    fork_sum,
    io_bundle,
    io_compose,
    io_interface,
    io_kron,
    io_project,
    io_split,
    join_and,
    join_sum,
    law_check,
    law_ids,
    normalize_pure,
    seq_compose,
    simplify_boolean,
    tensor_interleave,
    tensor_sync,
)
from .analyses import (
    CkagModule,
    WeightedGraph,
    build_flow_type,
    build_shortest_type,
    build_task_type,
    critical_path,
    load_ckag,
    load_graph,
    max_throughput,
    merge_controls,
    node_interface,
    parse_ckag,
    parse_graph,
    sequential_step_types,
    shortest_path,
    wcrt_compose,
)

__version__ = "0.1.0"
