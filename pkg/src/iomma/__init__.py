"""Instrumented two-level memory model for blocked matrix multiplication.

The package executes explicit load/store/FMA schedules against a bounded fast
memory, counts every transfer, and compares the observed traffic against
structural predictions, Loomis-Whitney phase inequalities, asymptotic lower
bounds, and a two-cache read model for Goto-style kernels.
"""

from .algorithms import (
    Algorithm,
    BlockGrid,
    PredictedIO,
    TooSmallError,
    alg_a_schedule,
    alg_b_schedule,
    alg_c_schedule,
    block_size,
    build_schedule,
    naive_schedule,
    predicted_io,
)
from .bounds import (
    BoundReport,
    CapsExceededError,
    GridTooFineError,
    TinyOptimum,
    XYZOptimum,
    fmax,
    grid_search_xyz,
    lower_bound_AB,
    lower_bound_final,
    lower_bound_general,
    lower_bound_MS,
    optimal_M,
    optimal_xyz,
    phase_size_payoff,
    tiny_optimal_schedule,
)
from .goto import (
    DEFAULT_SUBOPTIMAL_THRESHOLD,
    GotoParams,
    GotoReport,
    goto_report,
    l2_reads,
    l3_reads,
)
from .inputs import SplitMix64, seeded_matrices
from .memsim import (
    CapacityExceededError,
    DirtyEvictionError,
    DoubleLoadError,
    ExecutionResult,
    FastMemoryState,
    IncompleteWritebackError,
    MemoryConfig,
    NonResidentOperandError,
    ShapeMismatchError,
    SimulationError,
    StoreNonCError,
    StoreNonResidentError,
    dump_trace,
    execute,
    parse_trace,
    reference_gemm,
)
from .model import (
    Evict,
    Fma,
    IOStats,
    Load,
    Matrix,
    OperandRef,
    OutOfBoundsError,
    ProblemDims,
    Schedule,
    Store,
    TraceEvent,
    fma_count,
    validate_event,
)
from .phases import (
    PHASE_CSV_HEADER,
    EmptyInputError,
    PhaseConfig,
    PhaseReport,
    UnvalidatedTraceError,
    check_capacity,
    check_loomis_whitney,
    partition_phases,
    phase_efficiency,
    phases_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BlockGrid",
    "BoundReport",
    "CapacityExceededError",
    "CapsExceededError",
    "DEFAULT_SUBOPTIMAL_THRESHOLD",
    "DirtyEvictionError",
    "DoubleLoadError",
    "EmptyInputError",
    "Evict",
    "ExecutionResult",
    "FastMemoryState",
    "Fma",
    "GotoParams",
    "GotoReport",
    "GridTooFineError",
    "IncompleteWritebackError",
    "IOStats",
    "Load",
    "Matrix",
    "MemoryConfig",
    "NonResidentOperandError",
    "OperandRef",
    "OutOfBoundsError",
    "PHASE_CSV_HEADER",
    "PhaseConfig",
    "PhaseReport",
    "PredictedIO",
    "ProblemDims",
    "Schedule",
    "ShapeMismatchError",
    "SimulationError",
    "SplitMix64",
    "Store",
    "StoreNonCError",
    "StoreNonResidentError",
    "TinyOptimum",
    "TooSmallError",
    "TraceEvent",
    "UnvalidatedTraceError",
    "XYZOptimum",
    "alg_a_schedule",
    "alg_b_schedule",
    "alg_c_schedule",
    "block_size",
    "build_schedule",
    "check_capacity",
    "check_loomis_whitney",
    "dump_trace",
    "execute",
    "fma_count",
    "fmax",
    "goto_report",
    "grid_search_xyz",
    "l2_reads",
    "l3_reads",
    "lower_bound_AB",
    "lower_bound_final",
    "lower_bound_general",
    "lower_bound_MS",
    "naive_schedule",
    "optimal_M",
    "optimal_xyz",
    "parse_trace",
    "partition_phases",
    "phase_efficiency",
    "phase_size_payoff",
    "phases_to_csv",
    "predicted_io",
    "reference_gemm",
    "seeded_matrices",
    "tiny_optimal_schedule",
    "validate_event",
]
