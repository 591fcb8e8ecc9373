import math

import numpy as np
import pytest

from oqft import errmetrics as em, qftlib as Q
from oracles import (COMMUTATION_GAP_2, OPT_8_2_AVG, OPT_8_2_ONES_ERROR, dense_unitary, frobenius_avg,
                     qft_matrix, qpe_amplitudes)


@pytest.fixture(scope="module")
def opt82():
    return em.frobenius_error_avg(Q.optimistic_qft(8, 2), Q.QftReference(8), m=2)


def test_frozen_optimistic_values(opt82):
    assert opt82.avg_frobenius == pytest.approx(OPT_8_2_AVG, abs=1e-12)
    assert opt82.per_state[255] == pytest.approx(OPT_8_2_ONES_ERROR, abs=1e-12)
    assert opt82.per_state[0] < 1e-20


def test_avg_matches_dense_oracle():
    for build, n, m in [(Q.blocked_aqft, 6, 2), (Q.coppersmith_aqft, 6, 3), (Q.optimistic_qft, 7, 2)]:
        rep = em.frobenius_error_avg(build(n, m), Q.QftReference(n))
        assert rep.avg_frobenius == pytest.approx(frobenius_avg(dense_unitary(build(n, m)), qft_matrix(n)), abs=1e-12)


def test_record_roundtrip(opt82):
    rec = em.parse_record(opt82.to_record())
    assert float(rec["avg_frobenius"]) == opt82.avg_frobenius
    assert int(rec["argmax"]) == opt82.worst()[0]
    lines = opt82.to_csv().splitlines()
    assert lines[0] == "x,error" and len(lines) == 257


def test_sampled_estimate_is_consistent(opt82):
    est, se = em.frobenius_error_sampled(Q.optimistic_qft(8, 2), Q.QftReference(8), samples=400, seed=3)
    assert abs(est - opt82.avg_frobenius) < 5 * se
    assert em.frobenius_error_sampled(Q.optimistic_qft(8, 2), Q.QftReference(8), 50, 9) == \
        em.frobenius_error_sampled(Q.optimistic_qft(8, 2), Q.QftReference(8), 50, 9)


def test_exhaustive_cap():
    with pytest.raises(em.ResourceLimit):
        em.frobenius_error_avg(Q.optimistic_qft(15, 3), Q.QftReference(15))


def test_subspace_error_respects_dimension_bound(opt82):
    bad = [x for x in range(256) if em.is_bad_state(x, 8, 2)]
    rep = em.subspace_error(Q.optimistic_qft(8, 2), Q.QftReference(8), bad, eps=opt82.avg_frobenius)
    assert rep.consistent()
    assert rep.mu == pytest.approx(opt82.per_state[bad].mean())


def test_lee_distance():
    assert em.lee_distance(0, 3) == 0
    assert em.lee_distance(7, 3) == 1
    assert em.lee_distance(-3, 3) == 3
    assert em.lee_distance(4, 3) == 4


def test_bad_state_predicate():
    assert em.is_bad_state(0, 8, 2) and em.is_bad_state(255, 8, 2)
    # even blocks hold 01, which reads as digit value 2 (Lee distance 2 from 0)
    assert not em.is_bad_state(0b00_01_00_01, 8, 2)
    assert em.is_bad_state(0b11_01_00_01, 8, 2) is False


@pytest.mark.parametrize("m,X,frac", [(3, 0, 0.0), (4, 5, 0.25), (5, 31, 0.5), (6, 1, 0.9375)])
def test_qpe_profile_matches_closed_form(m, X, frac):
    alpha = em.qpe_wraparound_profile(m, X, frac)
    assert np.allclose(alpha, qpe_amplitudes(m, X + frac), atol=1e-12)


def test_qpe_profile_validation():
    with pytest.raises(em.MetricError):
        em.qpe_wraparound_profile(3, 8, 0.0)
    with pytest.raises(em.MetricError):
        em.qpe_wraparound_profile(3, 1, 1.0)


def test_commutation_gap_frozen_and_circuit_oracle():
    assert em.commutation_gap(2) == pytest.approx(COMMUTATION_GAP_2, rel=1e-12)
    for m in (1, 2):
        W, W2 = em.commutation_circuits(m)
        dense = np.linalg.norm(dense_unitary(W) - dense_unitary(W2)) ** 2
        assert em.commutation_gap(m) == pytest.approx(dense, rel=1e-10)


def test_blocked_bound_formula():
    assert em.blocked_bound(10, 3) == pytest.approx(4 * math.pi ** 2 / 3 * 4 / 8)
