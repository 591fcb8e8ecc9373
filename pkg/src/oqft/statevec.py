"""Dense statevector simulation (qubit 0 is the least significant index bit)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate

MAX_QUBITS = 26


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Statevector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] != 1 << self.n:
            raise StateError(f"expected {1 << self.n} amplitudes for {self.n} qubits, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "Statevector":
        return Statevector(self.n, self.amps.copy())


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"qubit count {n} outside [1, {MAX_QUBITS}]")


def basis_state(n: int, x: int) -> Statevector:
    _check_n(n)
    if not 0 <= x < 1 << n:
        raise StateError(f"basis index {x} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[x] = 1.0
    return Statevector(n, amps)


def from_amplitudes(amps: Sequence[complex]) -> Statevector:
    amps = np.asarray(amps, dtype=np.complex128)
    n = int(amps.shape[0]).bit_length() - 1
    if amps.ndim != 1 or 1 << n != amps.shape[0]:
        raise StateError("amplitude count must be a power of two")
    return Statevector(n, amps)


def random_state(n: int, rng: np.random.Generator) -> Statevector:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(n, v / np.linalg.norm(v))


# -- raw array entry points ------------------------------------------------------

def run_inplace(circuit: Circuit, psi: np.ndarray) -> np.ndarray:
    """Apply ``circuit`` to a ``(2**n, batch)`` or ``(2**n,)`` array in place."""
    if psi.shape[0] != 1 << circuit.n:
        raise StateError(f"array has {psi.shape[0]} rows, circuit needs {1 << circuit.n}")
    if not psi.flags.c_contiguous or psi.dtype != np.complex128:
        raise StateError("kernels need a C-contiguous complex128 array")
    view = psi.reshape(psi.shape[0], -1)
    if len(circuit):
        _kernels.apply_gates(view, *circuit.compiled)
    return psi


def circuit_columns(circuit: Circuit, xs: Sequence[int] | np.ndarray) -> np.ndarray:
    """Columns ``U|x>`` for each ``x`` in ``xs``, shape ``(2**n, len(xs))``."""
    xs = np.asarray(xs, dtype=np.int64)
    psi = np.zeros((1 << circuit.n, xs.shape[0]), dtype=np.complex128)
    psi[xs, np.arange(xs.shape[0])] = 1.0
    return run_inplace(circuit, psi)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    return circuit_columns(circuit, np.arange(1 << circuit.n))


# -- state-level operations ------------------------------------------------------

def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    if max(gate.qubits) >= state.n:
        raise StateError(f"gate {gate.kind}{gate.qubits} out of range for {state.n} qubits")
    return apply_circuit(state, Circuit(state.n, (gate,)))


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    if circuit.n != state.n:
        raise StateError(f"circuit acts on {circuit.n} qubits, state has {state.n}")
    out = state.amps.copy()
    run_inplace(circuit, out)
    return Statevector(state.n, out)


class Permutation:
    """A bijection on ``{0, ..., 2**n - 1}``, checked at construction."""

    def __init__(self, n: int, table: Sequence[int] | np.ndarray):
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (1 << n,):
            raise StateError(f"permutation table needs {1 << n} entries")
        seen = np.zeros(1 << n, dtype=bool)
        if table.min() < 0 or table.max() >= 1 << n:
            raise StateError("permutation image out of range")
        seen[table] = True
        if not seen.all():
            raise StateError("mapping is not a bijection")
        self.n = n
        self.table = table

    @classmethod
    def from_function(cls, n: int, f: Callable[[int], int]) -> "Permutation":
        return cls(n, [f(x) for x in range(1 << n)])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(1 << self.n)
        return Permutation(self.n, inv)

    def __call__(self, x: int) -> int:
        return int(self.table[x])


def apply_permutation(state: Statevector, perm: Permutation) -> Statevector:
    if perm.n != state.n:
        raise StateError(f"permutation on {perm.n} qubits, state has {state.n}")
    out = np.empty_like(state.amps)
    out[perm.table] = state.amps
    return Statevector(state.n, out)


def error_norm_sq(a: Statevector, b: Statevector) -> float:
    """Squared length of the difference vector; global phase counts."""
    if a.n != b.n:
        raise StateError(f"size mismatch: {a.n} vs {b.n} qubits")
    d = a.amps - b.amps
    return float(np.vdot(d, d).real)
