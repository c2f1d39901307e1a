"""smlc: transformations and oracles for regular set-multilinear circuits."""

from .circuit import (
    Add,
    Bouquet,
    Circuit,
    CircuitError,
    ConstLeaf,
    Interval,
    Mul,
    OrderAssignment,
    RegularCircuit,
    VarLeaf,
    bouquet_gate_count,
    gate_count,
    infer_order,
    regular,
    stats,
    validate,
)
from .generators import (
    GenConfig,
    det_bouquet,
    det_regular_circuit,
    random_regular_circuit,
    sparse_term_bouquet,
)
from .passes import (
    Direction,
    MonotoneResult,
    compose,
    drop_last_index,
    merge_summands,
    monotone_subsequence,
    project,
    reverse,
)
from .pipeline import (
    ReductionStep,
    Transcript,
    TrimResult,
    VerificationFailed,
    normalize_first,
    reduce_to_single,
    trim_even,
)
from .poly import (
    PRIME,
    SparsePoly,
    equiv_exact,
    equiv_random,
    eval_circuit,
    expand,
    expand_bouquet,
    reference_det,
    reference_perm,
    sign_of_permutation,
)

__version__ = "0.1.0"
