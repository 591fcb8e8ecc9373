"""QFT circuit families and their reference unitary.

Conventions. The QFT built here is the swap-free cascade: qubit 0 receives a
Hadamard first and is then rotated by every higher qubit. Its output on
``|x>`` is the product state whose qubit ``i`` carries the binary fraction
``0.x_i x_{i+1} ... x_{n-1}`` (``x_j`` = bit ``j`` of ``x``). As a matrix this
is ``DFT @ R`` with ``R`` the bit-reversal permutation, i.e. the input is read
with qubit 0 as its most significant digit while the output is read
least-significant-first.

Blocks are ``[i*m, (i+1)*m)`` with block 0 least significant; only the last
block may be narrower. Even blocks start at block 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, CPhase, Gate, H, block_phase_rotation, concat, inverse
from .statevec import Statevector, StateError

VARIANTS = ("exact", "coppersmith", "blocked", "optimistic", "optimistic-alt")


def bit_reverse(x: int, n: int) -> int:
    r = 0
    for _ in range(n):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


def bit_reverse_array(xs: np.ndarray, n: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    r = np.zeros_like(xs)
    for i in range(n):
        r |= ((xs >> i) & 1) << (n - 1 - i)
    return r


@dataclass(frozen=True)
class BlockLayout:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")

    @property
    def count(self) -> int:
        return -(-self.n // self.m)

    @property
    def blocks(self) -> list[range]:
        return [range(i * self.m, min((i + 1) * self.m, self.n)) for i in range(self.count)]

    def width(self, i: int) -> int:
        return len(self.blocks[i])

    def block_values(self, x: int) -> list[int]:
        """X_i with x = sum_i 2**(m*i) * X_i."""
        return [(x >> b.start) & ((1 << len(b)) - 1) for b in self.blocks]

    def digit_values(self, x: int) -> list[int]:
        """Block values in QFT input-digit order (first qubit most significant)."""
        return [bit_reverse(v, len(b)) for v, b in zip(self.block_values(x), self.blocks)]


@dataclass(frozen=True)
class QftVariant:
    kind: str
    m: int | None = None

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"unknown QFT variant {self.kind!r}; choose from {VARIANTS}")
        if self.kind != "exact":
            if self.m is None or self.m < 1:
                raise ValueError(f"variant {self.kind} needs block size m >= 1")

    def build(self, n: int) -> Circuit:
        return build_qft(self, n)

    def tag(self) -> str:
        return self.kind if self.kind == "exact" else f"{self.kind}(m={self.m})"


# -- building blocks -----------------------------------------------------------------

def qft_gates(qubits: Sequence[int], max_exp: int | None = None) -> list[Gate]:
    """Cascade QFT on ``qubits`` (first listed = first digit); drop rotations with exponent > max_exp."""
    qs = list(qubits)
    gates: list[Gate] = []
    for a, q in enumerate(qs):
        gates.append(H(q))
        for b in range(a + 1, len(qs)):
            e = b - a + 1
            if max_exp is None or e <= max_exp:
                gates.append(CPhase(q, qs[b], 1, e))
    return gates


def _local_qft(n: int, block: range) -> Circuit:
    return Circuit(n, tuple(qft_gates(block)))


def _check(n: int, m: int | None = None) -> None:
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if m is not None and not 1 <= m <= n:
        raise ValueError(f"block size m={m} outside [1, {n}]")


@lru_cache(maxsize=256)
def exact_qft(n: int) -> Circuit:
    _check(n)
    return Circuit(n, tuple(qft_gates(range(n))))


@lru_cache(maxsize=256)
def coppersmith_aqft(n: int, m: int) -> Circuit:
    """Keep only rotations whose dyadic exponent is at most m."""
    _check(n, m)
    return Circuit(n, tuple(qft_gates(range(n), max_exp=m)))


@lru_cache(maxsize=256)
def blocked_aqft(n: int, m: int) -> Circuit:
    """Linear-depth block approximation: each block only hears from its upper neighbour."""
    _check(n, m)
    blocks = BlockLayout(n, m).blocks
    parts = []
    for i, blk in enumerate(blocks):
        parts.append(_local_qft(n, blk))
        if i + 1 < len(blocks):
            parts.append(block_phase_rotation(blk, blocks[i + 1], n=n))
    return concat(n, parts)


@lru_cache(maxsize=256)
def optimistic_qft(n: int, m: int) -> Circuit:
    """Five-layer optimistic QFT: constant depth in n, gates span at most two blocks."""
    _check(n, m)
    blocks = BlockLayout(n, m).blocks
    B = len(blocks)
    even = range(0, B, 2)
    odd = range(1, B, 2)

    def rotations(idx):
        return [block_phase_rotation(blocks[i], blocks[i + 1], n=n) for i in idx if i + 1 < B]

    parts = [_local_qft(n, blocks[i]) for i in even]
    parts += rotations(even)
    parts += [_local_qft(n, blocks[i]) for i in odd]
    parts += [inverse(_local_qft(n, blocks[i])) for i in even]
    parts += rotations(odd)
    parts += [_local_qft(n, blocks[i]) for i in even]
    return concat(n, parts)


@lru_cache(maxsize=256)
def optimistic_qft_alt(n: int, m: int) -> Circuit:
    """Same unitary as :func:`optimistic_qft`, written with QFT blocks only.

    Blocks without a partner get a lone local QFT: the top block in the
    first layer when its index is even, and block 0 plus an odd top block in
    the last layer.
    """
    _check(n, m)
    blocks = BlockLayout(n, m).blocks
    B = len(blocks)

    def pair_qfts(start):
        parts = []
        covered = set()
        for i in range(start, B, 2):
            if i + 1 < B:
                span = range(blocks[i].start, blocks[i + 1].stop)
                parts.append(_local_qft(n, span))
                covered.update((i, i + 1))
        return parts, covered

    step1, cov1 = pair_qfts(0)
    step1 += [_local_qft(n, blocks[i]) for i in range(B) if i not in cov1]
    step2 = [inverse(_local_qft(n, b)) for b in blocks]
    step3, cov3 = pair_qfts(1)
    step3 += [_local_qft(n, blocks[i]) for i in range(B) if i not in cov3]
    return concat(n, step1 + step2 + step3)


_BUILDERS: dict[str, Callable[[int, int], Circuit]] = {
    "coppersmith": coppersmith_aqft,
    "blocked": blocked_aqft,
    "optimistic": optimistic_qft,
    "optimistic-alt": optimistic_qft_alt,
}


def build_qft(variant: QftVariant | str, n: int, m: int | None = None) -> Circuit:
    if isinstance(variant, str):
        variant = QftVariant(variant, m)
    if variant.kind == "exact":
        return exact_qft(n)
    return _BUILDERS[variant.kind](n, variant.m)


def qft_builder(variant: QftVariant) -> Callable[[int], Circuit]:
    """Width -> circuit factory; block sizes wider than the register collapse to one block."""
    def build(width: int) -> Circuit:
        if variant.kind == "exact":
            return exact_qft(width)
        return _BUILDERS[variant.kind](width, min(variant.m, width))
    return build


def block_size_for(n: int, eps: float) -> int:
    """Block size ceil(log2(n**2 / eps)) clamped to [1, n]."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    m = math.ceil(math.log2(n * n / eps))
    return max(1, min(n, m))


# -- reference ---------------------------------------------------------------------------

def reference_qft_state(n: int, x: int) -> Statevector:
    """Product-form Fourier state: qubit i carries phase 0.x_i x_{i+1}...x_{n-1}."""
    if not 0 <= x < 1 << n:
        raise StateError(f"basis index {x} out of range for {n} qubits")
    state = np.ones(1, dtype=np.complex128)
    for i in range(n):
        frac = sum(((x >> j) & 1) / 2 ** (j - i + 1) for j in range(i, n))
        factor = np.array([1.0, np.exp(2j * np.pi * frac)]) / np.sqrt(2.0)
        state = np.kron(factor, state)  # higher qubits go to the left
    return Statevector(n, state)


class QftReference:
    """Column oracle for the ideal QFT: ``U|x>`` from the closed form DFT @ R."""

    def __init__(self, n: int):
        self.n = n
        self._roots = np.exp(2j * np.pi * np.arange(1 << n) / (1 << n)) / np.sqrt(1 << n)

    def columns(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        y = np.arange(1 << self.n, dtype=np.int64)
        k = (y[:, None] * bit_reverse_array(xs, self.n)[None, :]) & ((1 << self.n) - 1)
        return self._roots[k]

    def __call__(self, x: int) -> Statevector:
        return Statevector(self.n, self.columns([x])[:, 0])
