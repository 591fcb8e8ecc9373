import pytest
from hypothesis import given, strategies as st

from oqft import circuit as C
from oqft.circuit import CPhase, Circuit, H, Phase, Swap, X


def test_reduce_dyadic_canonical():
    assert C.reduce_dyadic(4, 4) == (1, 2)
    assert C.reduce_dyadic(16, 4) == (0, 0)
    assert C.reduce_dyadic(-1, 2) == (3, 2)


def test_gate_validation():
    with pytest.raises(C.CircuitError):
        C.Gate("CP", (1, 1), 1, 2)
    with pytest.raises(C.CircuitError):
        C.Gate("T", (0,))
    with pytest.raises(C.CircuitError):
        Circuit(2, (H(2),))


def test_inverse_negates_phases_and_reverses():
    c = Circuit(3, (H(0), CPhase(0, 1, 1, 3), Phase(2, 1, 2)))
    inv = C.inverse(c)
    assert inv.gates[0] == Phase(2, 3, 2)
    assert inv.gates[1] == CPhase(0, 1, 7, 3)
    assert inv.gates[2] == H(0)


def test_depth_and_locality():
    c = Circuit(4, (H(0), H(1), CPhase(0, 3, 1, 2), Swap(1, 2), X(3)))
    assert C.depth(c) == 3
    assert C.locality(c) == 3
    assert C.gate_count(c) == 5
    assert C.depth(Circuit(2, ())) == 0


def test_block_phase_rotation_depth():
    rot = C.block_phase_rotation(range(0, 3), range(3, 6))
    assert C.depth(rot) == 3
    assert len(rot) == 9
    with pytest.raises(C.CircuitError):
        C.block_phase_rotation(range(0, 3), range(2, 4))


def test_parse_errors_carry_line_numbers():
    with pytest.raises(C.ParseError) as exc:
        C.parse_text("QUBITS 2\nH 0\nCP 0,1 one/2\n")
    assert exc.value.lineno == 3
    with pytest.raises(C.ParseError):
        C.parse_text("H 0\n")


def test_parse_accepts_comments():
    c = C.parse_text("# hello\nQUBITS 3\n\nH 2  # tail\nCP 0,2 1/4\n")
    assert c.gates == (H(2), CPhase(0, 2, 1, 4))


_gate = st.one_of(
    st.builds(H, st.integers(0, 4)),
    st.builds(X, st.integers(0, 4)),
    st.builds(Phase, st.integers(0, 4), st.integers(-40, 40), st.integers(0, 12)),
    st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(-40, 40), st.integers(0, 12))
    .filter(lambda t: t[0] != t[1]).map(lambda t: CPhase(*t)),
    st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda t: t[0] != t[1]).map(lambda t: Swap(*t)),
)


@given(st.lists(_gate, max_size=30))
def test_text_roundtrip(gates):
    c = Circuit(5, tuple(gates))
    assert C.parse_text(C.export_text(c)) == c


@given(st.lists(_gate, max_size=20))
def test_double_inverse_is_identity(gates):
    c = Circuit(5, tuple(gates))
    assert C.inverse(C.inverse(c)) == c
