"""Average-case error functionals for circuits against an ideal unitary."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .circuit import Circuit, inverse
from .qftlib import BlockLayout, QftReference, bit_reverse_array, exact_qft
from .statevec import Statevector, circuit_columns, run_inplace

EXHAUSTIVE_MAX_QUBITS = 14
COLUMN_CHUNK = 512


class MetricError(ValueError):
    pass


class ResourceLimit(MetricError):
    """Requested computation is beyond the desk-scale limits."""


# A reference is anything that yields ideal columns U|x>: a Circuit, an object
# with a ``columns(xs)`` method, or a plain callable x -> Statevector.
Reference = Union[Circuit, QftReference, Callable[[int], Statevector]]


def _qubits_of(ref) -> int | None:
    return getattr(ref, "n", None)


def reference_columns(reference: Reference, xs: np.ndarray) -> np.ndarray:
    if isinstance(reference, Circuit):
        return circuit_columns(reference, xs)
    if hasattr(reference, "columns"):
        return reference.columns(xs)
    return np.stack([reference(int(x)).amps for x in xs], axis=1)


def per_state_errors(test: Circuit, reference: Reference, xs: Sequence[int] | np.ndarray) -> np.ndarray:
    """|test|x> - ref|x>|^2 for every x in xs, computed in column chunks."""
    xs = np.asarray(xs, dtype=np.int64)
    n_ref = _qubits_of(reference)
    if n_ref is not None and n_ref != test.n:
        raise MetricError(f"dimension mismatch: test has {test.n} qubits, reference {n_ref}")
    out = np.empty(xs.shape[0])
    for start in range(0, xs.shape[0], COLUMN_CHUNK):
        chunk = xs[start:start + COLUMN_CHUNK]
        diff = circuit_columns(test, chunk)
        ref = reference_columns(reference, chunk)
        if ref.shape != diff.shape:
            raise MetricError(f"reference columns have shape {ref.shape}, expected {diff.shape}")
        diff -= ref
        out[start:start + chunk.shape[0]] = np.einsum("ij,ij->j", diff.real, diff.real) + np.einsum(
            "ij,ij->j", diff.imag, diff.imag
        )
    return out


@dataclass
class ErrorReport:
    n: int
    m: int | None
    avg_frobenius: float
    per_state: np.ndarray
    bound: float | None = None
    config: dict = field(default_factory=dict)

    def worst(self) -> tuple[int, float]:
        x = int(np.argmax(self.per_state))
        return x, float(self.per_state[x])

    def median(self) -> float:
        return float(np.median(self.per_state))

    def to_record(self) -> str:
        """Line-oriented ``key=value`` summary (per-state data lives in the CSV)."""
        x, e = self.worst()
        lines = [
            f"n={self.n}",
            f"m={'' if self.m is None else self.m}",
            f"avg_frobenius={self.avg_frobenius:.17g}",
            f"bound={'' if self.bound is None else format(self.bound, '.17g')}",
            f"states={self.per_state.shape[0]}",
            f"per_state_max={e:.17g}",
            f"argmax={x}",
            f"median={self.median():.17g}",
        ]
        lines += [f"config.{k}={v}" for k, v in sorted(self.config.items())]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "error"])
        for x, e in enumerate(self.per_state):
            w.writerow([x, f"{e:.17g}"])
        return buf.getvalue()


def parse_record(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


def blocked_bound(n: int, m: int) -> float:
    """Analytic Frobenius bound of the linear-depth block approximation."""
    return 4 * math.pi ** 2 / 3 * (-(-n // m)) / 2 ** m


def frobenius_error_avg(test: Circuit, reference: Reference, m: int | None = None, bound: float | None = None,
                        **config) -> ErrorReport:
    """Exhaustive average over every computational basis input."""
    if test.n > EXHAUSTIVE_MAX_QUBITS:
        raise ResourceLimit(f"exhaustive metric capped at {EXHAUSTIVE_MAX_QUBITS} qubits, got {test.n}")
    errs = per_state_errors(test, reference, np.arange(1 << test.n))
    return ErrorReport(test.n, m, float(errs.sum() / errs.shape[0]), errs, bound, dict(config))


def frobenius_error_sampled(test: Circuit, reference: Reference, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo mean of per-state errors over uniform basis inputs; returns (estimate, stderr)."""
    if samples < 2:
        raise MetricError("need at least 2 samples")
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << test.n, size=samples)
    errs = per_state_errors(test, reference, xs)
    return float(errs.mean()), float(errs.std(ddof=1) / math.sqrt(samples))


@dataclass
class SubspaceReport:
    states: list[int]
    mu: float
    eps: float
    dim_bound: float

    def consistent(self, slack: float = 1e-9) -> bool:
        return len(self.states) <= self.dim_bound * (1 + slack) + slack


def subspace_error(test: Circuit, reference: Reference, states: Sequence[int], eps: float | None = None) -> SubspaceReport:
    """Mean error on the span of the given basis states, with the size bound it implies."""
    states = [int(s) for s in states]
    if not states:
        raise MetricError("subspace needs at least one basis state")
    if len(set(states)) != len(states):
        raise MetricError("subspace basis states must be distinct")
    mu = float(per_state_errors(test, reference, states).mean())
    if eps is None:
        eps = frobenius_error_avg(test, reference).avg_frobenius
    dim_bound = math.inf if mu == 0 else (1 << test.n) * eps / mu
    return SubspaceReport(states, mu, eps, dim_bound)


def lee_distance(z: int, m: int) -> int:
    mod = 1 << m
    z %= mod
    return min(z, (-z) % mod)


def is_bad_state(x: int, n: int, m: int) -> bool:
    """Some even block reads (in QFT digit order) within Lee distance 1 of 0 mod 2**m."""
    layout = BlockLayout(n, m)
    digits = layout.digit_values(x)
    return any(lee_distance(digits[i], layout.width(i)) <= 1 for i in range(0, layout.count, 2))


def qpe_wraparound_profile(m: int, X: int, frac: float) -> np.ndarray:
    """Amplitudes alpha[X'] from phase-estimating (X + frac)/2**m with an m-qubit inverse QFT.

    Prepares sum_Y w^((X+frac) Y)|Y>/2**(m/2) and runs the inverse cascade
    QFT; the result is indexed by the estimate X' (QFT digit order).
    """
    if not 0 <= X < 1 << m:
        raise MetricError(f"X={X} outside [0, 2**{m})")
    if not 0 <= frac < 1:
        raise MetricError(f"frac={frac} outside [0, 1)")
    y = np.arange(1 << m)
    psi = np.exp(2j * np.pi * (X + frac) * y / (1 << m)) / np.sqrt(1 << m)
    run_inplace(inverse(exact_qft(m)), psi)
    out = np.empty_like(psi)
    out[np.arange(1 << m)] = psi[bit_reverse_array(np.arange(1 << m), m)]
    return out


def tail_mass(alpha: np.ndarray, X: int, m: int, t: int) -> float:
    """Probability of estimates farther than t (Lee metric) from X."""
    d = np.array([lee_distance(xp - X, m) for xp in range(1 << m)])
    return float((np.abs(alpha[d > t]) ** 2).sum())


def commutation_sector_matrices(m: int):
    """Block-i pieces of W and W': the m-qubit QFT and the two rotation diagonals.

    Returns (Q, d1, d2) with d1[Y_prev, X_i] = phase of the (i-1, i) rotation
    and d2[X_next, Y_i] = phase of the (i, i+1) rotation.
    """
    size = 1 << m
    Q = circuit_columns(exact_qft(m), np.arange(size))
    vals = np.arange(size)
    rev = bit_reverse_array(vals, m)
    # rotation reads its upper block in QFT digit order, its lower block LSB-first
    d1 = np.exp(2j * np.pi * np.outer(vals, rev) / (1 << (2 * m)))
    d2 = np.exp(2j * np.pi * np.outer(rev, vals) / (1 << (2 * m)))
    return Q, d1, d2


def commutation_gap(m: int) -> float:
    """||W - W'||_F^2 on 3m qubits, where W' moves the first rotation to the end.

    W = rot(i-1,i) . QFT_i . rot(i,i+1) . QFT_i^dag. Both operators are
    block-diagonal in the control values (Y_{i-1}, X_{i+1}), so the sum over
    all 2**(3m) basis inputs is accumulated one control sector at a time.
    """
    if not 1 <= m <= 5:
        raise ResourceLimit(f"commutation gap supported for 1 <= m <= 5, got {m}")
    Q, d1, d2 = commutation_sector_matrices(m)
    Qh = Q.conj().T
    total = 0.0
    for xn in range(1 << m):
        A = Qh @ (d2[xn][:, None] * Q)  # QFT^dag . rot(i,i+1) . QFT on block i
        A2 = np.abs(A) ** 2
        for yp in range(1 << m):
            d = d1[yp]
            # ||A D - D A||_F^2 = sum_jk |A_jk|^2 |d_k - d_j|^2
            total += float((A2 * np.abs(d[None, :] - d[:, None]) ** 2).sum())
    return total


def commutation_circuits(m: int) -> tuple[Circuit, Circuit]:
    """Gate-level W and W' on 3m qubits (blocks i-1, i, i+1 from the bottom)."""
    from .circuit import block_phase_rotation, concat
    from .qftlib import qft_gates

    n = 3 * m
    prev, mid, nxt = range(0, m), range(m, 2 * m), range(2 * m, 3 * m)
    r1 = block_phase_rotation(prev, mid, n=n)
    q = Circuit(n, tuple(qft_gates(mid)))
    r2 = block_phase_rotation(mid, nxt, n=n)
    W = concat(n, [r1, q, r2, inverse(q)])
    Wp = concat(n, [q, r2, inverse(q), r1])
    return W, Wp
