"""Clifford+T circuit IR, reversible building blocks, and sketch compilation."""

from .compile import (
    compile_formula_sketch,
    compile_or_sketch,
    compile_sketch,
    compile_threshold_sketch,
)
from .io import from_json, parse, parse_text, serialize, to_json, to_qasm_like, to_text
from .ir import (
    CLIFFORD_KINDS,
    GATE_ARITY,
    REVERSIBLE_KINDS,
    TOFFOLI_T_COST,
    Circuit,
    Gate,
    TCountReport,
    expand_macros,
    t_count,
    toffoli3_gates,
)
from .library import (
    CircuitBuilder,
    compare_geq,
    ladder_toffoli_count,
    mcx,
    popcount,
    popcount_shape,
    threshold_t_constant,
    threshold_toffoli_count,
    toffoli3,
    toffoli_ladder,
)

__all__ = [name for name in dir() if not name.startswith("_")]
