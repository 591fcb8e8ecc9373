"""Gate-level circuit representation, cost metrics and a text exchange format.

Phase angles are stored as dyadic pairs ``(k, e)`` meaning ``2*pi*k / 2**e``.
Pairs are kept reduced (``k`` odd or the zero angle ``0/0``) so structural
equality of gates is exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

KINDS = ("H", "X", "P", "CP", "SWAP")
_ARITY = {"H": 1, "X": 1, "P": 1, "CP": 2, "SWAP": 2}
_CODES = {
    "H": _kernels.H_CODE,
    "X": _kernels.X_CODE,
    "P": _kernels.PHASE_CODE,
    "CP": _kernels.CPHASE_CODE,
    "SWAP": _kernels.SWAP_CODE,
}


class CircuitError(ValueError):
    pass


class ParseError(CircuitError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def reduce_dyadic(k: int, e: int) -> tuple[int, int]:
    """Canonical form of the angle 2*pi*k/2**e."""
    if e < 0:
        raise CircuitError(f"negative dyadic exponent {e}")
    k %= 1 << e
    if k == 0:
        return 0, 0
    while k % 2 == 0:
        k //= 2
        e -= 1
    return k, e


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    k: int = 0
    e: int = 0

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        if len(qs) != _ARITY[self.kind]:
            raise CircuitError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s), got {qs}")
        if any(q < 0 for q in qs):
            raise CircuitError(f"negative qubit index in {qs}")
        if len(qs) == 2 and qs[0] == qs[1]:
            raise CircuitError(f"duplicate qubit index in {self.kind}{qs}")
        object.__setattr__(self, "qubits", qs)
        if self.kind in ("P", "CP"):
            k, e = reduce_dyadic(self.k, self.e)
        else:
            k, e = 0, 0
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "e", e)

    @property
    def theta(self) -> float:
        return 2 * math.pi * self.k / (1 << self.e)

    @property
    def phase(self) -> complex:
        if self.k == 0:
            return 1.0 + 0j
        return cmath.exp(2j * math.pi * self.k / (1 << self.e))

    def inverse(self) -> "Gate":
        if self.kind in ("P", "CP"):
            return Gate(self.kind, self.qubits, -self.k, self.e)
        return self

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.k, self.e)

    def remapped(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.k, self.e)


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def Swap(q1: int, q2: int) -> Gate:
    return Gate("SWAP", (q1, q2))


def Phase(q: int, k: int, e: int) -> Gate:
    """Single-qubit phase exp(2*pi*i*k/2**e) on |1>."""
    return Gate("P", (q,), k, e)


def CPhase(q1: int, q2: int, k: int, e: int) -> Gate:
    """Controlled phase exp(2*pi*i*k/2**e) on |11>."""
    return Gate("CP", (q1, q2), k, e)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError(f"qubit count must be >= 1, got {self.n}")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.n:
                raise CircuitError(f"gate {g.kind}{g.qubits} out of range for {self.n} qubits")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise CircuitError(f"cannot compose circuits on {self.n} and {other.n} qubits")
        return Circuit(self.n, self.gates + other.gates)

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in KINDS}
        for g in self.gates:
            out[g.kind] += 1
        return out

    def embed(self, n: int, qubits: Sequence[int] | None = None) -> "Circuit":
        """Place this circuit on a larger register; ``qubits[i]`` hosts local qubit i."""
        mapping = list(range(self.n)) if qubits is None else list(qubits)
        if len(mapping) != self.n:
            raise CircuitError("embedding needs one target qubit per local qubit")
        return Circuit(n, tuple(g.remapped(mapping) for g in self.gates))

    @cached_property
    def compiled(self):
        """Gate list as flat arrays for the kernels."""
        m = len(self.gates)
        codes = np.empty(m, dtype=np.int64)
        q1 = np.zeros(m, dtype=np.int64)
        q2 = np.zeros(m, dtype=np.int64)
        ph = np.ones(m, dtype=np.complex128)
        for i, g in enumerate(self.gates):
            codes[i] = _CODES[g.kind]
            q1[i] = g.qubits[0]
            if len(g.qubits) == 2:
                q2[i] = g.qubits[1]
            ph[i] = g.phase
        return codes, q1, q2, ph


def concat(n: int, parts: Iterable[Circuit | Iterable[Gate]]) -> Circuit:
    gates: list[Gate] = []
    for p in parts:
        gates.extend(p.gates if isinstance(p, Circuit) else p)
    return Circuit(n, tuple(gates))


def depth(circuit: Circuit) -> int:
    """Greedy layering: each gate goes one layer past the latest layer on its qubits."""
    last = [0] * circuit.n
    d = 0
    for g in circuit.gates:
        layer = max(last[q] for q in g.qubits) + 1
        for q in g.qubits:
            last[q] = layer
        d = max(d, layer)
    return d


def locality(circuit: Circuit) -> int:
    return max((abs(g.qubits[0] - g.qubits[1]) for g in circuit.gates if len(g.qubits) == 2), default=0)


def gate_count(circuit: Circuit) -> int:
    return len(circuit.gates)


def inverse(circuit: Circuit) -> Circuit:
    return Circuit(circuit.n, tuple(g.inverse() for g in reversed(circuit.gates)))


def summary(circuit: Circuit) -> dict:
    return {
        "qubits": circuit.n,
        "gates": gate_count(circuit),
        "depth": depth(circuit),
        "locality": locality(circuit),
        "counts": circuit.counts(),
    }


def block_phase_rotation(block_lo: range, block_hi: range, denom_exp: int | None = None, n: int | None = None) -> Circuit:
    """Phase exp(2*pi*i * X * Y / 2**denom_exp) between two qubit blocks.

    ``Y`` is the value of ``block_lo`` read least-significant-first (bit ``b``
    is qubit ``block_lo[b]``). ``X`` is the value of ``block_hi`` read in QFT
    input-digit order: ``block_hi[0]`` is its most significant digit, so
    qubit ``block_hi[j]`` has weight ``2**(len(block_hi) - 1 - j)``. This is
    the reading under which the rotation splices two local QFTs into one
    contiguous QFT.

    Greedy layering packs the gates into ``max(len(block_lo), len(block_hi))``
    layers.
    """
    lo, hi = list(block_lo), list(block_hi)
    if set(lo) & set(hi):
        raise CircuitError(f"overlapping blocks {block_lo} and {block_hi}")
    if not lo or not hi:
        raise CircuitError("blocks must be non-empty")
    wl, wh = len(lo), len(hi)
    if denom_exp is None:
        denom_exp = wl + wh
    if n is None:
        n = max(lo + hi) + 1
    pairs = []
    # diagonal rounds: every round is a matching, so greedy layering packs them
    if wl <= wh:
        for s in range(wh):
            pairs.extend((b, (b + s) % wh) for b in range(wl))
    else:
        for s in range(wl):
            pairs.extend(((j + s) % wl, j) for j in range(wh))
    gates = []
    for b, j in pairs:
        g = CPhase(lo[b], hi[j], 1 << (b + wh - 1 - j), denom_exp)
        if g.k:
            gates.append(g)
    return Circuit(n, tuple(gates))


# -- text format --------------------------------------------------------------

def export_text(circuit: Circuit) -> str:
    lines = [f"QUBITS {circuit.n}"]
    for g in circuit.gates:
        qs = ",".join(str(q) for q in g.qubits)
        if g.kind in ("P", "CP"):
            lines.append(f"{g.kind} {qs} {g.k}/{g.e}")
        else:
            lines.append(f"{g.kind} {qs}")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> Circuit:
    n = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "QUBITS":
                raise ParseError(lineno, "expected header 'QUBITS n'")
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"bad qubit count {parts[1]!r}") from None
            if n < 1:
                raise ParseError(lineno, "qubit count must be >= 1")
            continue
        kind = parts[0].upper()
        if kind not in _ARITY:
            raise ParseError(lineno, f"unknown gate {parts[0]!r}")
        want = 3 if kind in ("P", "CP") else 2
        if len(parts) != want:
            raise ParseError(lineno, f"{kind} expects {want - 1} field(s)")
        try:
            qs = tuple(int(q) for q in parts[1].split(","))
        except ValueError:
            raise ParseError(lineno, f"bad qubit list {parts[1]!r}") from None
        k = e = 0
        if want == 3:
            try:
                ks, es = parts[2].split("/")
                k, e = int(ks), int(es)
            except ValueError:
                raise ParseError(lineno, f"bad angle {parts[2]!r}, expected k/e") from None
        try:
            g = Gate(kind, qs, k, e)
        except CircuitError as exc:
            raise ParseError(lineno, str(exc)) from None
        if max(g.qubits) >= n:
            raise ParseError(lineno, f"qubit index out of range for {n} qubits")
        gates.append(g)
    if n is None:
        raise ParseError(0, "missing 'QUBITS n' header")
    return Circuit(n, tuple(gates))
