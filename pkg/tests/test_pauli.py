import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holoforge.circuit import Circuit, conjugate, pauli_matrix, simulate, unitary
from holoforge.errors import DimensionError
from holoforge.pauli import (
    PauliOperator,
    SymplecticMatrix,
    commutes,
    in_span,
    pauli_mul,
    product,
    rowreduce,
)
from strategies import clifford_circuits, pauli_pairs, paulis

P = PauliOperator.from_string


def test_y_is_i_x_z():
    x, z = P("X"), P("Z")
    assert pauli_mul(x, z) == P("-iY")
    assert np.allclose(pauli_matrix(P("Y")), 1j * pauli_matrix(x) @ pauli_matrix(z))


def test_string_round_trip():
    for text in ("XIZY", "-XYZ", "iZZ", "-iIXI"):
        assert str(P(text)).lstrip("+") == text


def test_five_qubit_generator_product_is_real_with_plus_sign():
    gens = [P(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    prod = product(gens)
    dense = np.eye(32)
    for g in gens:
        dense = dense @ pauli_matrix(g)
    assert np.allclose(dense, pauli_matrix(prod))
    assert prod.exp == 0 and prod.weight <= 5


def test_bits_out_of_range_rejected():
    with pytest.raises(DimensionError):
        PauliOperator(2, x=0b100)


def test_mismatched_lengths_rejected():
    with pytest.raises(DimensionError):
        pauli_mul(P("XX"), P("XXX"))


@given(pauli_pairs())
@settings(max_examples=2000)
def test_commutation_matches_product_order(ab):
    a, b = ab
    ab_, ba = pauli_mul(a, b), pauli_mul(b, a)
    assert ab_.same_bits(ba)
    assert commutes(a, b) == (ab_.exp == ba.exp)
    if not commutes(a, b):
        assert ab_ == -ba


@given(pauli_pairs(max_n=6))
@settings(max_examples=300)
def test_product_matches_dense_matrices(ab):
    a, b = ab
    assert np.allclose(pauli_matrix(pauli_mul(a, b)), pauli_matrix(a) @ pauli_matrix(b))


@given(st.lists(paulis(n=8), min_size=1, max_size=10))
@settings(max_examples=500)
def test_rowreduce_preserves_span(rows):
    m = SymplecticMatrix.from_paulis(rows, 8)
    red = rowreduce(m)
    assert red.rank == m.rank == len(red)
    for r in rows:
        assert in_span(r, red) is not None
    for r in red:
        assert in_span(r, m) is not None


@given(pauli_pairs(max_n=6), st.data())
@settings(max_examples=500)
def test_conjugation_preserves_commutation(ab, data):
    a, b = ab
    c = data.draw(clifford_circuits(n=a.n) if a.n >= 2 else st.just(Circuit(1, (("H", (0,)), ("S", (0,))))))
    assert commutes(a, b) == commutes(conjugate(a, c), conjugate(b, c))


@given(st.data())
@settings(max_examples=300)
def test_conjugation_matches_dense_oracle(data):
    c = data.draw(clifford_circuits(max_n=5))
    p = data.draw(paulis(n=c.n))
    u = unitary(c)
    assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(conjugate(p, c)), atol=1e-12)


@given(st.data())
@settings(max_examples=100)
def test_simulation_preserves_norm(data):
    c = data.draw(clifford_circuits(max_n=6, max_gates=100))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    psi = rng.normal(size=2 ** c.n) + 1j * rng.normal(size=2 ** c.n)
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(simulate(c, psi)) - 1) < 1e-12


def test_in_span_exact_phase_distinguishes_sign():
    m = SymplecticMatrix.from_strings(["XX", "ZZ"])
    assert in_span(P("-YY"), m, exact_phase=True) is not None
    assert in_span(P("YY"), m, exact_phase=True) is None
    assert in_span(P("YY"), m) is not None
