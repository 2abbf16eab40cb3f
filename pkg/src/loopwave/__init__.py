"""Loop-parallelism detection via wave label propagation.

Pipeline: parse -> statement graph -> seeded labels -> forward I/O/D wave
-> forward predicate wave -> reduction recognition -> backward liveness
wave -> construct aggregation -> per-loop classification.
"""

from .cli import analyze_source
from .graph import Role, StmtGraph, Usage, build_graph, seed_usage
from .interp import (
    OutOfBounds,
    UnboundVariable,
    dynamic_flow_deps,
    interpret,
    liveness_oracle,
    reduction_reorder_check,
)
from .labels import (
    LabelQuad,
    LabelStore,
    aggregate_constructs,
    dump_labels,
    f_transfer,
    iod_transfer,
    predicate_transfer,
    recognize_reductions,
    run_all,
    seed_labels,
)
from .lang import Program, pretty
from .overlap import MissingRange, Overlap, expand_region, may_overlap
from .parallel import (
    PARALLEL,
    PARALLEL_WITH_TRANSFORMS,
    REDUCTION,
    SEQUENTIAL,
    DependenceReport,
    LoopVerdict,
    Witness,
    classify_all,
    classify_loop,
    eq1_dependence,
    loop_carried_test,
)
from .parser import MiniSyntaxError, SourceProgram, parse_program
from .predicates import CondFact, Interval, PredState, ReductionFact
from .refs import STDOUT, LinExpr, VarRef
from .wave import NonTerminationError, WaveHooks, WaveStats, run_backward, run_forward

__version__ = "0.1.0"

__all__ = [
    "analyze_source",
    "aggregate_constructs",
    "build_graph",
    "classify_all",
    "classify_loop",
    "CondFact",
    "DependenceReport",
    "dump_labels",
    "dynamic_flow_deps",
    "eq1_dependence",
    "expand_region",
    "f_transfer",
    "interpret",
    "Interval",
    "iod_transfer",
    "LabelQuad",
    "LabelStore",
    "LinExpr",
    "liveness_oracle",
    "loop_carried_test",
    "LoopVerdict",
    "may_overlap",
    "MiniSyntaxError",
    "MissingRange",
    "NonTerminationError",
    "OutOfBounds",
    "Overlap",
    "PARALLEL",
    "PARALLEL_WITH_TRANSFORMS",
    "parse_program",
    "predicate_transfer",
    "PredState",
    "pretty",
    "Program",
    "recognize_reductions",
    "REDUCTION",
    "ReductionFact",
    "reduction_reorder_check",
    "Role",
    "run_all",
    "run_backward",
    "run_forward",
    "seed_labels",
    "seed_usage",
    "SEQUENTIAL",
    "SourceProgram",
    "STDOUT",
    "StmtGraph",
    "UnboundVariable",
    "Usage",
    "VarRef",
    "Witness",
    "WaveHooks",
    "WaveStats",
]
