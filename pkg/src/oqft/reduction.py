"""Worst-to-average reductions built on the Weyl-Heisenberg group.

``V(r1, r2)|x> = exp(2*pi*i*r2*x/2**n) |x + r1 mod 2**n>`` (phase, then shift).

The cascade QFT reads its input with qubit 0 as the most significant digit,
so the randomising operator in front of it is applied in that digit order
(``msb_first=True``). Conjugating by the QFT then gives the plain
least-significant-first ``V(r2, -r1)`` on the output side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CPhase, depth, inverse
from .qftlib import QftReference, bit_reverse_array, exact_qft, optimistic_qft
from .statevec import Statevector, StateError, circuit_columns, run_inplace

PURIFIED_MAX_N = 5
EXPECTATION_MAX_N = 8


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class WeylOp:
    n: int
    r1: int
    r2: int

    def __post_init__(self):
        mod = 1 << self.n
        if not (0 <= self.r1 < mod and 0 <= self.r2 < mod):
            raise ReductionError(f"Weyl parameters ({self.r1}, {self.r2}) outside [0, {mod})")

    def conjugate(self) -> "WeylOp":
        """The operator QFT . V^dag . QFT^dag, i.e. V(r2, -r1)."""
        return WeylOp(self.n, self.r2, (-self.r1) % (1 << self.n))


@dataclass(frozen=True)
class ReductionConfig:
    n: int
    m: int
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ReductionError("sample count must be >= 1")
        if not 1 <= self.m <= self.n:
            raise ReductionError(f"block size m={self.m} outside [1, {self.n}]")

    def circuit(self) -> Circuit:
        return optimistic_qft(self.n, self.m)


def _weyl_columns(amps: np.ndarray, n: int, r1, r2, adjoint: bool, msb_first: bool) -> np.ndarray:
    """Apply V(r1, r2) (or its adjoint) along axis 0; r1, r2 may be per-column arrays."""
    mod = 1 << n
    x = np.arange(mod, dtype=np.int64)
    if msb_first:
        # relabel so index value is read with qubit 0 most significant
        rev = bit_reverse_array(x, n)
        amps = amps[rev]
    r1 = np.asarray(r1, dtype=np.int64)
    r2 = np.asarray(r2, dtype=np.int64)
    cols = amps.reshape(mod, -1)
    ncol = cols.shape[1]
    r1 = np.broadcast_to(r1, (ncol,))
    r2 = np.broadcast_to(r2, (ncol,))
    out = np.empty_like(cols)
    cidx = np.arange(ncol)
    if not adjoint:
        ph = np.exp(2j * np.pi * ((np.outer(x, r2)) % mod) / mod)
        dest = (x[:, None] + r1[None, :]) % mod
        out[dest, cidx[None, :]] = cols * ph
    else:
        src = (x[:, None] + r1[None, :]) % mod  # out[y] = conj(phase(y)) * in[y + r1]
        ph = np.exp(-2j * np.pi * ((np.outer(x, r2)) % mod) / mod)
        out[:, :] = cols[src, cidx[None, :]] * ph
    out = out.reshape(amps.shape)
    if msb_first:
        out = out[bit_reverse_array(np.arange(mod), n)]
    return out


def weyl_apply(state: Statevector, op: WeylOp, msb_first: bool = False, adjoint: bool = False) -> Statevector:
    if op.n != state.n:
        raise StateError(f"Weyl operator on {op.n} qubits, state has {state.n}")
    return Statevector(state.n, _weyl_columns(state.amps, op.n, op.r1, op.r2, adjoint, msb_first))


def weyl_unitary(op: WeylOp, msb_first: bool = False) -> np.ndarray:
    return _weyl_columns(np.eye(1 << op.n, dtype=np.complex128), op.n, op.r1, op.r2, False, msb_first)


def weyl_conjugation_check(n: int, r1: int, r2: int) -> float:
    """Max entry of |QFT . V(r1,r2)^dag . QFT^dag - V(r2,-r1)|, column by column."""
    if n > 10:
        raise ReductionError("conjugation check limited to n <= 10")
    op = WeylOp(n, r1 % (1 << n), r2 % (1 << n))
    qft = exact_qft(n)
    cols = circuit_columns(inverse(qft), np.arange(1 << n))
    cols = _weyl_columns(cols, n, op.r1, op.r2, adjoint=True, msb_first=True)
    cols = np.ascontiguousarray(cols)
    run_inplace(qft, cols)
    target = weyl_unitary(op.conjugate())
    return float(np.abs(cols - target).max())


def weyl_twirl(rho: np.ndarray, n: int) -> np.ndarray:
    """(1/4**n) sum_{r1,r2} V rho V^dag, by direct enumeration."""
    mod = 1 << n
    acc = np.zeros_like(rho, dtype=np.complex128)
    for r1 in range(mod):
        for r2 in range(mod):
            V = weyl_unitary(WeylOp(n, r1, r2))
            acc += V @ rho @ V.conj().T
    return acc / mod ** 2


def _reduced_outputs(psi: np.ndarray, n: int, circuit: Circuit, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """V(r2,-r1) . circuit . V_msb(r1,r2) |psi> for each (r1[j], r2[j]) as columns."""
    mod = 1 << n
    cols = np.repeat(psi[:, None], r1.shape[0], axis=1)
    cols = np.ascontiguousarray(_weyl_columns(cols, n, r1, r2, adjoint=False, msb_first=True))
    run_inplace(circuit, cols)
    return _weyl_columns(cols, n, r2, (-r1) % mod, adjoint=False, msb_first=False)


def randomized_reduced_apply(state: Statevector, cfg: ReductionConfig, rng: np.random.Generator,
                             circuit: Circuit | None = None) -> tuple[Statevector, WeylOp]:
    """One draw of the randomized reduction around the optimistic QFT.

    The shift inside V is simulated as an exact permutation; as a gate
    circuit it would be a log-depth classical-quantum adder.
    """
    if state.n != cfg.n:
        raise StateError(f"state has {state.n} qubits, config {cfg.n}")
    mod = 1 << cfg.n
    r1, r2 = (int(v) for v in rng.integers(0, mod, size=2))
    circuit = circuit or cfg.circuit()
    out = _reduced_outputs(state.amps, cfg.n, circuit, np.array([r1]), np.array([r2]))
    return Statevector(cfg.n, out[:, 0]), WeylOp(cfg.n, r1, r2)


def reduced_draw_errors(state: Statevector, cfg: ReductionConfig, circuit: Circuit | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-draw squared errors for ``cfg.samples`` seeded draws; returns (r1, r2, errors)."""
    rng = np.random.default_rng(cfg.seed)
    mod = 1 << cfg.n
    draws = rng.integers(0, mod, size=(cfg.samples, 2))
    circuit = circuit or cfg.circuit()
    ideal = QftReference(cfg.n).columns(np.arange(mod)) @ state.amps
    out = _reduced_outputs(state.amps, cfg.n, circuit, draws[:, 0], draws[:, 1])
    d = out - ideal[:, None]
    return draws[:, 0], draws[:, 1], (np.abs(d) ** 2).sum(axis=0)


def expected_error_exact(state: Statevector, cfg: ReductionConfig, circuit: Circuit | None = None) -> float:
    """Average per-draw error over the whole Weyl group (all 4**n pairs)."""
    if cfg.n > EXPECTATION_MAX_N:
        raise ReductionError(f"exact expectation limited to n <= {EXPECTATION_MAX_N}")
    mod = 1 << cfg.n
    circuit = circuit or cfg.circuit()
    ideal = QftReference(cfg.n).columns(np.arange(mod)) @ state.amps
    total = 0.0
    r2 = np.arange(mod)
    for r1 in range(mod):
        out = _reduced_outputs(state.amps, cfg.n, circuit, np.full(mod, r1), r2)
        d = out - ideal[:, None]
        total += float((d.real ** 2 + d.imag ** 2).sum())
    return total / mod ** 2


def purified_apply(state: Statevector, cfg: ReductionConfig, circuit: Circuit | None = None) -> Statevector:
    """Derandomized reduction on control (2n qubits) x target (n qubits).

    Target occupies qubits 0..n-1, the control register qubits n..3n-1 with
    value ``r1 * 2**n + r2``. Returns the joint state after controlled-V,
    the optimistic QFT on the target, and controlled-V(r2, -r1).
    """
    n = cfg.n
    if n > PURIFIED_MAX_N:
        raise ReductionError(f"purified simulation limited to n <= {PURIFIED_MAX_N}")
    if state.n != n:
        raise StateError(f"state has {state.n} qubits, config {n}")
    mod = 1 << n
    k = mod * mod
    circuit = circuit or cfg.circuit()
    idx = np.arange(k)
    r1, r2 = idx // mod, idx % mod
    joint = np.repeat(state.amps[:, None], k, axis=1) / math.sqrt(k)  # (target, control)
    joint = _weyl_columns(joint, n, r1, r2, adjoint=False, msb_first=True)
    # I (x) circuit on the 3n-qubit joint register, flattened control-major
    flat = np.ascontiguousarray(joint.T).reshape(-1)
    run_inplace(circuit.embed(3 * n), flat)
    joint = flat.reshape(k, mod).T
    joint = _weyl_columns(joint, n, r2, (-r1) % mod, adjoint=False, msb_first=False)
    return Statevector(3 * n, np.ascontiguousarray(joint.T).reshape(-1))


def purified_error(state: Statevector, cfg: ReductionConfig, circuit: Circuit | None = None) -> float:
    """|(U' - I (x) QFT)(uniform (x) psi)|^2."""
    n = cfg.n
    mod = 1 << n
    joint = purified_apply(state, cfg, circuit)
    ideal = QftReference(n).columns(np.arange(mod)) @ state.amps
    target = np.tile(ideal, mod * mod) / mod
    d = joint.amps - target
    return float(np.vdot(d, d).real)


# -- controlled phase gradient ---------------------------------------------------------

def controlled_phase_gradient(n: int, m: int) -> Circuit:
    """|x>|z> -> exp(2*pi*i*x*z/2**n)|x>|z> keeping rotations with exponent <= m.

    ``x`` sits on qubits 0..n-1 and ``z`` on n..2n-1. Time step ``e`` holds
    every kept gate of angle 2*pi/2**e, pairing x_k with z_(n-e-k); each step
    touches every qubit at most once, so the depth is m.
    """
    if not 1 <= m <= n:
        raise ReductionError(f"m={m} outside [1, {n}]")
    gates = []
    for e in range(1, m + 1):
        for k in range(0, n - e + 1):
            j = n - e - k
            gates.append(CPhase(k, n + j, 1, e))
    return Circuit(2 * n, tuple(gates))


def cpg_size_for(n: int, delta: float) -> int:
    """Rotation cutoff m = ceil(log2(2*pi*n/delta)) clamped to [1, n]."""
    if delta <= 0:
        raise ReductionError("delta must be positive")
    return max(1, min(n, math.ceil(math.log2(2 * math.pi * n / delta))))


def cpg_operator_error(n: int, m: int) -> float:
    """Exact operator-norm error: max over the diagonal of |circuit phase - ideal phase|."""
    circ = controlled_phase_gradient(n, m)
    diag = np.ones(1 << (2 * n), dtype=np.complex128)
    run_inplace(circ, diag)
    idx = np.arange(1 << (2 * n), dtype=np.int64)
    x, z = idx & ((1 << n) - 1), idx >> n
    ideal = np.exp(2j * np.pi * ((x * z) & ((1 << n) - 1)) / (1 << n))
    return float(np.abs(diag - ideal).max())


def cpg_depth(n: int, m: int) -> int:
    return depth(controlled_phase_gradient(n, m))
