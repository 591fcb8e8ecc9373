"""Optimistic QFT circuits: construction, simulation and error verification."""
from ._kernels import BACKEND
from .circuit import Circuit, Gate, depth, export_text, inverse, locality, parse_text
from .qftlib import (
    BlockLayout,
    QftReference,
    QftVariant,
    block_size_for,
    blocked_aqft,
    coppersmith_aqft,
    exact_qft,
    optimistic_qft,
    optimistic_qft_alt,
    reference_qft_state,
)
from .statevec import Statevector, apply_circuit, apply_gate, apply_permutation, basis_state, error_norm_sq

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BlockLayout", "Circuit", "Gate", "QftReference", "QftVariant", "Statevector",
    "apply_circuit", "apply_gate", "apply_permutation", "basis_state", "block_size_for", "blocked_aqft",
    "coppersmith_aqft", "depth", "error_norm_sq", "exact_qft", "export_text", "inverse", "locality",
    "optimistic_qft", "optimistic_qft_alt", "parse_text", "reference_qft_state",
]
