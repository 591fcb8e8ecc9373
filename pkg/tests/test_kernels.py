import numpy as np
import pytest

from oqft import _kernels
from oqft.qftlib import optimistic_qft
from oqft.circuit import Circuit, H, X, Phase, CPhase, Swap

pytestmark = pytest.mark.skipif(_kernels.NUMBA_KERNELS is None, reason="numba unavailable")


def _mixed(n):
    gates = [H(0), X(n - 1), Phase(1, 3, 3), CPhase(0, n - 1, 1, 4), Swap(1, n - 2), H(n - 1), CPhase(n - 1, 0, 5, 5)]
    return Circuit(n, tuple(gates))


@pytest.mark.parametrize("circ", [_mixed(5), optimistic_qft(9, 2), optimistic_qft(7, 3)], ids=["mixed", "opt9_2", "opt7_3"])
@pytest.mark.parametrize("batch", [1, 3])
def test_backends_agree(circ, batch):
    rng = np.random.default_rng(7)
    psi = rng.normal(size=(1 << circ.n, batch)) + 1j * rng.normal(size=(1 << circ.n, batch))
    a, b = psi.copy(), psi.copy()
    _kernels.apply_gates(a, *circ.compiled, kernels=_kernels.NUMPY_KERNELS)
    _kernels.apply_gates(b, *circ.compiled, kernels=_kernels.NUMBA_KERNELS)
    assert np.allclose(a, b, atol=1e-13)


def test_backend_flag_matches_selection():
    assert _kernels.BACKEND in ("numba", "numpy")
    assert (_kernels.KERNELS is _kernels.NUMBA_KERNELS) == (_kernels.BACKEND == "numba")
