"""In-place gate kernels on dense amplitude arrays.

Every kernel takes a C-contiguous complex128 array of shape ``(2**n, batch)``
where bit ``q`` of the row index is qubit ``q``. The batch axis holds
independent states (e.g. all columns of a unitary), so one gate sweep updates
every column.

Two interchangeable backends exist: numba ``@njit`` loops and a pure-numpy
reshape path. ``OQFT_NO_NUMBA=1`` (or numba being absent) selects numpy.
Both perform the same floating-point operations in the same order per
amplitude, so results agree to the last bit on IEEE hardware.
"""
from __future__ import annotations

import os

import numpy as np

H_CODE = 0
X_CODE = 1
PHASE_CODE = 2
CPHASE_CODE = 3
SWAP_CODE = 4

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


# -- numpy path --------------------------------------------------------------

def _split1(psi: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    dim, batch = psi.shape
    v = psi.reshape(dim >> (q + 1), 2, 1 << q, batch)
    return v[:, 0], v[:, 1]


def _split2(psi: np.ndarray, q1: int, q2: int) -> np.ndarray:
    lo, hi = (q1, q2) if q1 < q2 else (q2, q1)
    dim, batch = psi.shape
    return psi.reshape(dim >> (hi + 1), 2, 1 << (hi - lo - 1), 2, 1 << lo, batch)


def np_h(psi, q):
    v0, v1 = _split1(psi, q)
    a = v0.copy()
    v0[...] = (a + v1) * _INV_SQRT2
    v1[...] = (a - v1) * _INV_SQRT2


def np_x(psi, q):
    v0, v1 = _split1(psi, q)
    a = v0.copy()
    v0[...] = v1
    v1[...] = a


def np_phase(psi, q, ph):
    _, v1 = _split1(psi, q)
    v1 *= ph


def np_cphase(psi, q1, q2, ph):
    v = _split2(psi, q1, q2)
    v[:, 1, :, 1] *= ph


def np_swap(psi, q1, q2):
    v = _split2(psi, q1, q2)
    # slot order is (hi, lo); swapping the qubits exchanges |01> and |10>
    a = v[:, 0, :, 1].copy()
    v[:, 0, :, 1] = v[:, 1, :, 0]
    v[:, 1, :, 0] = a


def np_apply_gates(psi, codes, q1s, q2s, phases):
    for g in range(codes.shape[0]):
        c = codes[g]
        if c == H_CODE:
            np_h(psi, q1s[g])
        elif c == X_CODE:
            np_x(psi, q1s[g])
        elif c == PHASE_CODE:
            np_phase(psi, q1s[g], phases[g])
        elif c == CPHASE_CODE:
            np_cphase(psi, q1s[g], q2s[g], phases[g])
        else:
            np_swap(psi, q1s[g], q2s[g])


# -- numba path --------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def nb_h(psi, q):
        dim, batch = psi.shape
        step = 1 << q
        s = _INV_SQRT2
        for base in range(0, dim, 2 * step):
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                for k in range(batch):
                    a = psi[i0, k]
                    b = psi[i1, k]
                    psi[i0, k] = (a + b) * s
                    psi[i1, k] = (a - b) * s

    @njit(cache=True, nogil=True)
    def nb_x(psi, q):
        dim, batch = psi.shape
        step = 1 << q
        for base in range(0, dim, 2 * step):
            for off in range(step):
                i0 = base + off
                i1 = i0 + step
                for k in range(batch):
                    a = psi[i0, k]
                    psi[i0, k] = psi[i1, k]
                    psi[i1, k] = a

    @njit(cache=True, nogil=True)
    def nb_phase(psi, q, ph):
        dim, batch = psi.shape
        step = 1 << q
        for base in range(step, dim, 2 * step):
            for i in range(base, base + step):
                for k in range(batch):
                    psi[i, k] *= ph

    @njit(cache=True, nogil=True)
    def nb_cphase(psi, q1, q2, ph):
        dim, batch = psi.shape
        mask = (1 << q1) | (1 << q2)
        for i in range(dim):
            if i & mask == mask:
                for k in range(batch):
                    psi[i, k] *= ph

    @njit(cache=True, nogil=True)
    def nb_swap(psi, q1, q2):
        dim, batch = psi.shape
        b1 = 1 << q1
        b2 = 1 << q2
        for i in range(dim):
            # visit each |..1..0..> once, partner is |..0..1..>
            if (i & b1) != 0 and (i & b2) == 0:
                j = (i ^ b1) | b2
                for k in range(batch):
                    a = psi[i, k]
                    psi[i, k] = psi[j, k]
                    psi[j, k] = a

    @njit(cache=True, nogil=True)
    def nb_apply_gates(psi, codes, q1s, q2s, phases):
        for g in range(codes.shape[0]):
            c = codes[g]
            if c == 0:
                nb_h(psi, q1s[g])
            elif c == 1:
                nb_x(psi, q1s[g])
            elif c == 2:
                nb_phase(psi, q1s[g], phases[g])
            elif c == 3:
                nb_cphase(psi, q1s[g], q2s[g], phases[g])
            else:
                nb_swap(psi, q1s[g], q2s[g])

    return {
        "h": nb_h,
        "x": nb_x,
        "phase": nb_phase,
        "cphase": nb_cphase,
        "swap": nb_swap,
        "apply_gates": nb_apply_gates,
    }


NUMPY_KERNELS = {
    "h": np_h,
    "x": np_x,
    "phase": np_phase,
    "cphase": np_cphase,
    "swap": np_swap,
    "apply_gates": np_apply_gates,
}

try:
    NUMBA_KERNELS = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_KERNELS = None

USE_NUMBA = NUMBA_KERNELS is not None and os.environ.get("OQFT_NO_NUMBA", "") not in ("1", "true", "yes")
KERNELS = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS
BACKEND = "numba" if USE_NUMBA else "numpy"


def apply_gates(psi: np.ndarray, codes, q1s, q2s, phases, kernels=None) -> None:
    """Run a compiled gate list over ``psi`` in place."""
    (kernels or KERNELS)["apply_gates"](psi, codes, q1s, q2s, phases)
