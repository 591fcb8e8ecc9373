import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oqft import qftlib as Q
from oqft.circuit import depth, locality
from oqft.statevec import circuit_unitary
from oracles import dense_unitary, frobenius_avg, qft_matrix


@pytest.mark.parametrize("n", range(1, 7))
def test_exact_qft_matches_fft_oracle(n):
    assert np.abs(dense_unitary(Q.exact_qft(n)) - qft_matrix(n)).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
def test_reference_state_is_fft_column(nx):
    n, x = nx
    assert np.allclose(Q.reference_qft_state(n, x).amps, qft_matrix(n)[:, x], atol=1e-12)


def test_reference_columns_agree_with_product_form():
    ref = Q.QftReference(7)
    xs = np.array([0, 5, 127, 64])
    for j, x in enumerate(xs):
        assert np.allclose(ref.columns(xs)[:, j], Q.reference_qft_state(7, int(x)).amps)


def test_two_blocks_reduce_to_exact():
    for n in (4, 6, 7):
        m = -(-n // 2)
        assert np.abs(circuit_unitary(Q.optimistic_qft(n, m)) - qft_matrix(n)).max() < 1e-10


def test_optimistic_depth_and_locality_scale_with_m():
    for m in (1, 2, 3, 4):
        depths = {depth(Q.optimistic_qft(k * m, m)) for k in (4, 6, 8)}
        assert len(depths) == 1
        assert locality(Q.optimistic_qft(8 * m, m)) <= 2 * m - 1


def test_blocked_and_coppersmith_errors_shrink():
    ref = qft_matrix(7)
    for build in (Q.blocked_aqft, Q.coppersmith_aqft):
        errs = [frobenius_avg(dense_unitary(build(7, m)), ref) for m in (1, 3, 7)]
        assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-20


def test_block_layout():
    lay = Q.BlockLayout(7, 3)
    assert lay.count == 3 and [lay.width(i) for i in range(3)] == [3, 3, 1]
    assert lay.block_values(0b1_101_011) == [0b011, 0b101, 1]
    assert lay.digit_values(0b1_101_011) == [0b110, 0b101, 1]


def test_block_size_for_and_variants():
    assert Q.block_size_for(8, 0.5) <= Q.block_size_for(8, 0.1) <= 8
    with pytest.raises(ValueError):
        Q.QftVariant("mystery", 2)
    with pytest.raises(ValueError):
        Q.optimistic_qft(4, 5)
    assert Q.QftVariant("optimistic", 3).tag() != Q.QftVariant("blocked", 3).tag()


def test_bit_reverse():
    assert Q.bit_reverse(0b0011, 4) == 0b1100
    assert list(Q.bit_reverse_array(np.arange(4), 2)) == [0, 2, 1, 3]


def test_gate_count_and_depth_constants_hold_over_sweep():
    # fit once at the smallest n with four blocks (with and without a ragged tail), enforce for n in 8..18
    fit = [(n, m) for m in (1, 2, 3, 4) for n in (4 * m, 4 * m + 1)]
    cn = max(len(Q.optimistic_qft(n, m)) / (n * m) for n, m in fit)
    cd = max(depth(Q.optimistic_qft(n, m)) / m for n, m in fit)
    for n in range(8, 19):
        for m in range(1, 5):
            c = Q.optimistic_qft(n, m)
            assert len(c) <= cn * n * m
            assert depth(c) <= cd * m
