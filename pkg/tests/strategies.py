"""Hypothesis strategies shared by the property suites."""

from hypothesis import strategies as st

from holoforge.circuit import Circuit
from holoforge.pauli import PauliOperator

ONE_QUBIT = ("I", "X", "Y", "Z", "H", "S", "SDG", "SH")
TWO_QUBIT = ("CX", "CZ")


@st.composite
def paulis(draw, n=None, max_n=12):
    n = draw(st.integers(1, max_n)) if n is None else n
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    return PauliOperator(n, x, z, draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    return draw(paulis(n=n)), draw(paulis(n=n))


@st.composite
def clifford_circuits(draw, n=None, max_n=6, max_gates=12):
    n = draw(st.integers(2, max_n)) if n is None else n
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        if draw(st.booleans()):
            gates.append((draw(st.sampled_from(ONE_QUBIT)), (draw(st.integers(0, n - 1)),)))
        else:
            a, b = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            gates.append((draw(st.sampled_from(TWO_QUBIT)), (a, b)))
    return Circuit(n, tuple(gates))
