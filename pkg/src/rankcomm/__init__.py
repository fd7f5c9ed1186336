"""Exact tools for additive and m-additive maps on n x n matrix rings that
commute with every matrix of a given rank."""

__version__ = "0.1.0"

from .commutant import (
    CommutantReport,
    MatrixSelector,
    commutant_dimension,
    isolate_quadratic_coeffs,
    replay_additive_proof,
    verify_commuting,
)
from .completion import Completion, SupportPattern, complete_to_rank, verify_completion
from .field import FieldSpec, Scalar, arith, char_guard, int_embed
from .linmap import MatLinMap, NotStandard, StandardForm, apply, decompose, example_map, from_standard, random_map
from .matrix import Mat, commutator, count_rank, enumerate_rank_k, matrix_unit, random_rank_k, rank
from .multitrace import (
    SymMultiMap,
    TraceDecomposition,
    decompose_trace,
    replay_trace_proof,
    symmetrize,
    trace_eval,
    vandermonde_extract,
    verify_trace_commuting,
)

__all__ = [
    "CommutantReport", "Completion", "FieldSpec", "Mat", "MatLinMap", "MatrixSelector", "NotStandard",
    "Scalar", "StandardForm", "SupportPattern", "SymMultiMap", "TraceDecomposition", "apply", "arith",
    "char_guard", "commutant_dimension", "commutator", "complete_to_rank", "count_rank", "decompose",
    "decompose_trace", "enumerate_rank_k", "example_map", "from_standard", "int_embed",
    "isolate_quadratic_coeffs", "matrix_unit", "random_map", "random_rank_k", "rank",
    "replay_additive_proof", "replay_trace_proof", "symmetrize", "trace_eval", "vandermonde_extract",
    "verify_commuting", "verify_completion", "verify_trace_commuting",
]
