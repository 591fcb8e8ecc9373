"""Carry-window adders, a QFT-sandwich modular multiplier, and period finding.

The multiplier is a Beauregard-style construction (Draper adders in Fourier
space plus a comparison ancilla). It stands in for faster QFT-based
multipliers: every QFT it contains comes from a pluggable builder, so an
optimistic QFT can be dropped in to see how its errors propagate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .circuit import Circuit, CPhase, Gate, H, Phase, Swap, X, concat, inverse
from . import errmetrics as em
from .qftlib import QftReference, QftVariant, bit_reverse_array, exact_qft, qft_builder
from .statevec import circuit_columns, run_inplace


class ArithError(ValueError):
    pass


# -- adders ------------------------------------------------------------------------------

def maj(a: int, b: int, c: int) -> int:
    return 1 if a + b + c >= 2 else 0


def exact_add(a: int, b: int, n: int) -> tuple[int, list[int]]:
    """Ripple-carry sum; returns (s, [c_0, ..., c_n])."""
    if not (0 <= a < 1 << n and 0 <= b < 1 << n):
        raise ArithError(f"operands must be {n}-bit")
    c = [0]
    s = 0
    for i in range(n):
        ai, bi = (a >> i) & 1, (b >> i) & 1
        s |= (ai ^ bi ^ c[i]) << i
        c.append(maj(ai, bi, c[i]))
    s |= c[n] << n
    return s, c


def windowed_carries(a, b, n: int, k: int):
    """c_i as the carry out of the k-bit slices just below position i (zero carry-in).

    Works elementwise on integers or integer numpy arrays.
    """
    carries = [a * 0]
    for i in range(1, n + 1):
        lo = max(0, i - k)
        w = i - lo
        mask = (1 << w) - 1
        carries.append((((a >> lo) & mask) + ((b >> lo) & mask)) >> w)
    return carries


def windowed_add(a: int, b: int, n: int, k: int) -> int:
    if not 1 <= k <= n:
        raise ArithError(f"carry window k={k} outside [1, {n}]")
    if not (0 <= a < 1 << n and 0 <= b < 1 << n):
        raise ArithError(f"operands must be {n}-bit")
    c = windowed_carries(a, b, n, k)
    s = 0
    for i in range(n):
        s |= (((a >> i) ^ (b >> i) ^ c[i]) & 1) << i
    return s | (c[n] << n)


def _windowed_add_array(a: np.ndarray, b: np.ndarray, n: int, k: int) -> np.ndarray:
    c = windowed_carries(a, b, n, k)
    s = np.zeros_like(a)
    for i in range(n):
        s |= (((a >> i) ^ (b >> i) ^ c[i]) & 1) << i
    return s | (c[n] << n)


def longest_carry_chain(a: int, b: int, n: int) -> int:
    """Largest distance a carry travels from the position that generated it."""
    longest = 0
    gen = None  # position of the generate feeding the current carry
    for i in range(n):
        ai, bi = (a >> i) & 1, (b >> i) & 1
        if gen is not None:
            longest = max(longest, i - gen)
        if ai & bi:
            gen = i
        elif not (ai ^ bi):
            gen = None
    if gen is not None:
        longest = max(longest, n - gen)
    return longest


def carry_chain_lengths(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Vectorized ``longest_carry_chain`` over integer arrays."""
    a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
    longest = np.zeros(a.shape, dtype=np.int64)
    gen = np.full(a.shape, -1, dtype=np.int64)
    for i in range(n):
        ai, bi = (a >> i) & 1, (b >> i) & 1
        live = gen >= 0
        longest = np.where(live, np.maximum(longest, i - gen), longest)
        gen = np.where(ai & bi, i, np.where(ai ^ bi, gen, -1))
    return np.where(gen >= 0, np.maximum(longest, n - gen), longest)


@dataclass(frozen=True)
class AdderConfig:
    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ArithError(f"carry window k={self.k} outside [1, {self.n}]")


def adder_avg_error(n: int, k: int, samples: int | None = None, seed: int | None = None) -> float:
    """Average per-state error of the windowed adder as a permutation on |a>|b>|0>.

    Both adders map basis states to basis states (|a>|s mod 2**n>|s_n>), so a
    wrong sum contributes 2 and a right one 0. Exhaustive when 2n <= 24,
    otherwise ``samples`` uniform draws.
    """
    AdderConfig(n, k)
    if 2 * n <= 24 and samples is None:
        a, b = np.meshgrid(np.arange(1 << n, dtype=np.int64), np.arange(1 << n, dtype=np.int64), indexing="ij")
        a, b = a.ravel(), b.ravel()
    else:
        if samples is None or seed is None:
            raise ArithError("sampled adder error needs samples and seed")
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 1 << n, size=samples, dtype=np.int64)
        b = rng.integers(0, 1 << n, size=samples, dtype=np.int64)
    wrong = _windowed_add_array(a, b, n, k) != a + b
    return 2.0 * float(wrong.mean())


def adder_union_bound(n: int, k: int) -> float:
    return 2 * (n - k) * 2.0 ** -(k + 1)


# -- modular multiplier ---------------------------------------------------------------------

@dataclass(frozen=True)
class MultiplierLayout:
    """Qubit map: y on 0..n-1, accumulator on n..2n (digit order), flag on 2n+1."""
    n_bits: int

    @property
    def y(self) -> list[int]:
        return list(range(self.n_bits))

    @property
    def acc(self) -> list[int]:
        # acc[p] is the p-th QFT digit; acc integer bit j lives on acc[n_bits - j]
        return list(range(self.n_bits, 2 * self.n_bits + 1))

    @property
    def flag(self) -> int:
        return 2 * self.n_bits + 1

    @property
    def total(self) -> int:
        return 2 * self.n_bits + 2

    def acc_bit(self, j: int) -> int:
        return self.acc[self.n_bits - j]


@dataclass
class ModularMultiplier:
    """|y>|0> -> |c*y mod N>|0> for y < N (exact when the QFT builder is exact)."""
    c: int
    N: int
    n_bits: int
    circuit: Circuit
    layout: MultiplierLayout
    qft_instances: int

    @property
    def n(self) -> int:
        return self.circuit.n


class _Builder:
    def __init__(self, n_bits: int, qft: Callable[[int], Circuit]):
        self.L = MultiplierLayout(n_bits)
        self.w = n_bits + 1
        self.qft_acc = qft(self.w).embed(self.L.total, self.L.acc)
        self.qft_acc_inv = inverse(self.qft_acc)
        self.gates: list[Gate] = []
        self.qfts = 0

    def qft(self, inv=False):
        self.gates.extend((self.qft_acc_inv if inv else self.qft_acc).gates)
        self.qfts += 1

    def phi_add(self, a: int, control: int | None = None, sign: int = 1):
        """Add sign*a to the accumulator while it is in Fourier space."""
        w = self.w
        for p, q in enumerate(self.L.acc):
            # output digit p carries phase a * 2**p / 2**w
            k = (sign * a * (1 << p)) % (1 << w)
            if k == 0:
                continue
            self.gates.append(Phase(q, k, w) if control is None else CPhase(control, q, k, w))

    def cnot(self, ctrl: int, tgt: int):
        self.gates += [H(tgt), CPhase(ctrl, tgt, 1, 1), H(tgt)]

    def mod_add(self, a: int, N: int, control: int):
        """Beauregard modular adder: acc <- acc + a mod N when control is set (acc < N)."""
        msb = self.L.acc_bit(self.w - 1)
        flag = self.L.flag
        self.phi_add(a, control)
        self.phi_add(N, sign=-1)
        self.qft(inv=True)
        self.cnot(msb, flag)
        self.qft()
        self.phi_add(N, flag)
        self.phi_add(a, control, sign=-1)
        self.qft(inv=True)
        self.gates.append(X(msb))
        self.cnot(msb, flag)
        self.gates.append(X(msb))
        self.qft()
        self.phi_add(a, control)

    def cmult(self, c: int, N: int):
        """acc <- acc + c*y mod N."""
        self.qft()
        for j, yq in enumerate(self.L.y):
            self.mod_add((c << j) % N, N, yq)
        self.qft(inv=True)

    def circuit(self) -> Circuit:
        return Circuit(self.L.total, tuple(self.gates))


def modmul_circuit(c: int, N: int, n_bits: int, qft_builder_fn: Callable[[int], Circuit] | None = None) -> ModularMultiplier:
    """In-place multiply by c modulo N: CMULT(c), swap y <-> acc, CMULT(c^-1)^dag."""
    if N >= 1 << n_bits:
        raise ArithError(f"N={N} does not fit in {n_bits} bits")
    if math.gcd(c, N) != 1:
        raise ArithError(f"gcd({c}, {N}) != 1")
    qft = qft_builder_fn or exact_qft
    c %= N
    c_inv = pow(c, -1, N)
    fwd = _Builder(n_bits, qft)
    fwd.cmult(c, N)
    back = _Builder(n_bits, qft)
    back.cmult(c_inv, N)
    L = fwd.L
    swaps = Circuit(L.total, tuple(Swap(L.y[j], L.acc_bit(j)) for j in range(n_bits)))
    circ = concat(L.total, [fwd.circuit(), swaps, inverse(back.circuit())])
    return ModularMultiplier(c, N, n_bits, circ, L, fwd.qfts + back.qfts)


def modmul_columns(mult: ModularMultiplier, ys) -> np.ndarray:
    """Output columns for inputs |y>|0>|0>."""
    return circuit_columns(mult.circuit, np.asarray(ys, dtype=np.int64))


def modmul_subspace_error(mult: ModularMultiplier) -> tuple[float, np.ndarray]:
    """Mean error over inputs y < N against the ideal |c*y mod N>, plus per-y errors."""
    ys = np.arange(mult.N)
    out = modmul_columns(mult, ys)
    out[(mult.c * ys) % mult.N, ys] -= 1.0
    errs = (np.abs(out) ** 2).sum(axis=0)
    return float(errs.mean()), errs


# -- period finding -------------------------------------------------------------------------

@dataclass(frozen=True)
class FactoringConfig:
    N: int
    g: int
    t: int | None = None
    variant: QftVariant = field(default_factory=lambda: QftVariant("exact"))
    r_rand: int | None = None

    def __post_init__(self):
        if not 1 < self.g < self.N:
            raise ArithError(f"need 1 < g < N, got g={self.g}, N={self.N}")
        if math.gcd(self.g, self.N) != 1:
            raise ArithError(f"gcd(g, N) = {math.gcd(self.g, self.N)} != 1")
        if self.N % 2 == 0:
            raise ArithError("N must be odd")
        if self.r_rand is not None and math.gcd(self.r_rand, self.N) != 1:
            raise ArithError("r_rand must be coprime to N")
        if self.n_bits > 6:
            raise ArithError("factoring demo limited to N below 2**6")

    @property
    def n_bits(self) -> int:
        return self.N.bit_length()

    @property
    def counting_bits(self) -> int:
        return self.t if self.t is not None else 2 * math.ceil(math.log2(self.N))


def _convergent_denominators(num: int, den: int, limit: int) -> list[int]:
    """Denominators of the continued-fraction convergents of num/den, up to ``limit``."""
    out: list[int] = []
    q_prev, q = 1, 0
    while den:
        a, (num, den) = num // den, (den, num % den)
        q_prev, q = q, a * q + q_prev
        if q > limit:
            break
        if q not in out:
            out.append(q)
    return out


def factor_from_outcome(k: int, t: int, g: int, N: int) -> int | None:
    """Classical post-processing of one outcome; returns a nontrivial factor or None."""
    for q in _convergent_denominators(k, 1 << t, N):
        for r in (q, 2 * q):
            if r == 0 or pow(g, r, N) != 1 or r % 2:
                continue
            h = pow(g, r // 2, N)
            for cand in (math.gcd(h - 1, N), math.gcd(h + 1, N)):
                if 1 < cand < N:
                    return cand
    return None


@dataclass
class PeriodFindingResult:
    p_success: float
    distribution: np.ndarray
    success_mask: np.ndarray
    qft_instances: int
    sampled_success: float | None = None
    samples: list[int] | None = None

    def histogram(self) -> list[tuple[int, float, bool]]:
        return [(k, float(p), bool(s)) for k, (p, s) in enumerate(zip(self.distribution, self.success_mask))]


@lru_cache(maxsize=64)
def _cached_multiplier(c: int, N: int, n_bits: int, variant: QftVariant) -> ModularMultiplier:
    return modmul_circuit(c, N, n_bits, qft_builder(variant))


def modexp_branches(cfg: FactoringConfig) -> tuple[np.ndarray, int]:
    """Work-register states for every counting value x, shape (2**work, 2**t).

    Column x is the result of multiplying by g**(2**j) for every set bit j of
    x, starting from |r>|0>|0>. Because the counting qubits only ever act as
    controls, this equals the controlled circuit branch by branch.
    """
    t = cfg.counting_bits
    n_bits = cfg.n_bits
    L = MultiplierLayout(n_bits)
    W = np.zeros((1 << L.total, 1), dtype=np.complex128)
    W[(cfg.r_rand or 1) % cfg.N, 0] = 1.0
    qfts = 0
    for j in range(t):
        c = pow(cfg.g, 1 << j, cfg.N)
        mult = _cached_multiplier(c, cfg.N, n_bits, cfg.variant)
        qfts += mult.qft_instances
        moved = np.ascontiguousarray(W.copy())
        run_inplace(mult.circuit, moved)
        W = np.concatenate([W, moved], axis=1)  # new bit j is the high half
    return W, qfts


def outcome_distribution(cfg: FactoringConfig) -> tuple[np.ndarray, int]:
    """Exact measurement distribution of the counting register after an exact inverse QFT."""
    t = cfg.counting_bits
    W, qfts = modexp_branches(cfg)
    # rows: counting value x; columns: work basis states
    A = np.ascontiguousarray(W.T) / math.sqrt(1 << t)
    run_inplace(inverse(exact_qft(t)), A)
    probs = (np.abs(A) ** 2).sum(axis=1)
    # inverse cascade output is read in QFT digit order
    return probs[bit_reverse_array(np.arange(1 << t), t)], qfts


def period_finding_experiment(cfg: FactoringConfig, trials: int = 0, seed: int | None = None) -> PeriodFindingResult:
    t = cfg.counting_bits
    if cfg.n_bits * 2 + 2 + t > 20:
        raise ArithError("experiment exceeds desk-scale qubit budget")
    probs, qfts = outcome_distribution(cfg)
    ok = np.array([factor_from_outcome(k, t, cfg.g, cfg.N) is not None for k in range(1 << t)])
    res = PeriodFindingResult(float(probs[ok].sum()), probs, ok, qfts)
    if trials:
        if seed is None:
            raise ArithError("sampled trials need a seed")
        rng = np.random.default_rng(seed)
        p = probs / probs.sum()
        draws = rng.choice(1 << t, size=trials, p=p)
        res.samples = [int(d) for d in draws]
        res.sampled_success = float(ok[draws].mean())
    return res


# -- success-bound bookkeeping ------------------------------------------------------------

def multiplier_qft_eps(cfg: FactoringConfig) -> float:
    """Average Frobenius error of one multiplier-internal QFT (accumulator width)."""
    width = cfg.n_bits + 1
    circ = qft_builder(cfg.variant)(width)
    return em.frobenius_error_avg(circ, QftReference(width)).avg_frobenius


def fit_success_constant(p0: float, p: float, eps: float, n: int) -> float:
    """c in p = p0 * (1 - c * n * sqrt(eps)); zero when eps vanishes or p >= p0."""
    if eps <= 0 or p >= p0:
        return 0.0
    return (1 - p / p0) / (n * math.sqrt(eps))


def success_lower_bound(p0: float, eps: float, n: int, c: float) -> float:
    return p0 * (1 - c * n * math.sqrt(eps))


def r_rand_survey(cfg: FactoringConfig, count: int, seed: int) -> list[tuple[int, float]]:
    """Exact success probability for ``count`` seeded coprime starting multipliers.

    Draws are with replacement: small N has fewer than ``count`` units.
    """
    units = [r for r in range(1, cfg.N) if math.gcd(r, cfg.N) == 1]
    rng = np.random.default_rng(seed)
    out = []
    for r in rng.choice(units, size=count):
        c = FactoringConfig(cfg.N, cfg.g, cfg.t, cfg.variant, int(r))
        out.append((int(r), period_finding_experiment(c).p_success))
    return out
