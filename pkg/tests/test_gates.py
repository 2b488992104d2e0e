import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holoforge import gates
from holoforge.circuit import Circuit, apply_pauli, simulate
from holoforge.errors import CapacityError, UnsupportedGateError
from holoforge.gates import (
    PushRule,
    build_push_rule,
    check_transformed_stabilizers,
    cycles_to_map,
    ft_report,
    is_automorphism,
    logical_support,
    pieceable_ccz,
    propagate_error,
    qrm_symmetry_search,
    rule_set,
    steane_symmetry_check,
    t_layer_gate,
    transversal_checks,
    verify_logical_action,
    verify_rule,
)
from holoforge.pauli import PauliOperator
from holoforge.seeds import seed
from strategies import clifford_circuits

RULES = rule_set()


def _rule_id(rule):
    return f"{rule.seed}-{rule.config}-{rule.gate}-{rule.logical}"


@pytest.mark.parametrize("rule", RULES, ids=_rule_id)
def test_push_rule_acts_as_logical_gate(rule):
    check = verify_rule(rule)
    assert check, check.witness
    expected = "clifford" if rule.circuit.is_clifford() else ("statevector" if rule.code().n <= 16 else "codeword")
    assert check.mode == expected


@pytest.mark.parametrize("rule", [r for r in RULES if r.circuit.is_clifford() and r.code().n <= 14], ids=_rule_id)
def test_clifford_and_statevector_verdicts_agree(rule):
    assert verify_rule(rule, "clifford").ok == verify_rule(rule, "statevector").ok


def test_rule_set_size():
    assert len(RULES) == 40


def test_logical_supports():
    assert logical_support("steane", "k2", 0) == (1, 2, 3)
    assert logical_support("steane", "k2", 1) == (2, 3, 4)
    assert logical_support("qrm", "k2", 0) == tuple(range(5, 12))
    assert logical_support("qrm", "k2", 1) == tuple(range(2, 9))
    assert logical_support("steane", "k1") == (2, 3, 4)
    assert logical_support("qrm", "k1") == tuple(range(6, 13))


def test_cx_rule_sizes():
    assert len(build_push_rule("steane", "k2", "CX_12").circuit) == 7
    assert len(build_push_rule("steane", "k2", "CX_21").circuit) == 7
    assert len(build_push_rule("qrm", "k2", "CX_12").circuit) == 18


def test_t_pushes_only_produce_t_type_and_cx():
    for rule in RULES:
        if rule.gate in ("T", "TDG"):
            assert rule.circuit.gate_names() <= {"T", "TDG", "CX"}
            if rule.config == "k1" and rule.seed == "qrm":
                assert rule.circuit.gate_names() <= {"T", "TDG"}


def test_alternating_t_layers():
    assert [t_layer_gate(i) for i in range(1, 5)] == ["TDG", "T", "TDG", "T"]


def test_corrupted_rule_is_reported_with_witness():
    good = build_push_rule("steane", "k2", "H", 0)
    bad = PushRule(good.seed, good.config, good.gate, Circuit(good.circuit.n, good.circuit.gates[1:]), 0)
    check = verify_rule(bad)
    assert not check and check.witness


def test_unsupported_requests():
    with pytest.raises(UnsupportedGateError):
        build_push_rule("five_qubit", "k1", "H")
    with pytest.raises(UnsupportedGateError):
        build_push_rule("steane", "k1", "CX_12")
    with pytest.raises(UnsupportedGateError):
        build_push_rule("steane", "k2", "CCZ")


def test_large_non_diagonal_check_refused():
    code = gates.tensor_code([seed("qrm")] * 2)
    circ = Circuit(30, (("T", (0,)), ("H", (1,))))
    with pytest.raises(CapacityError):
        verify_logical_action(code, circ, Circuit(2, (("T", (0,)),)))


@pytest.mark.parametrize("name", sorted(transversal_checks()))
def test_transversal_gates(name):
    assert transversal_checks()[name]


def test_five_qubit_basis_change_signs():
    assert check_transformed_stabilizers()


@pytest.mark.parametrize("name,size,marks", [("five_qubit", 51, (9, 18, 24, 30, 36)), ("steane", 27, (9, 15, 21))])
def test_pieceable_ccz(name, size, marks):
    piece = pieceable_ccz(name)
    assert len(piece.circuit) == size
    assert piece.circuit.stage_marks == marks
    assert piece.circuit.count("CCZ") == 27
    check = piece.verify()
    assert check, check.witness
    assert len(piece.reports) == 4


def test_five_qubit_ccz_on_encoded_plus_states():
    piece = pieceable_ccz("five_qubit")
    check = verify_logical_action(piece.code, piece.circuit, piece.target(), mode="statevector")
    assert check


def test_steane_cube_rotation_is_automorphism():
    report = steane_symmetry_check()
    assert report.ok
    assert report.permutation == (0, 2, 3, 1, 5, 6, 4)


def test_non_symmetry_rejected():
    ok, detail = is_automorphism(seed("steane"), cycles_to_map([(0, 1)], 7))
    assert not ok and detail


def test_qrm_swap_symmetry():
    perm = qrm_symmetry_search(0, 14)
    assert perm is not None and perm[0] == 14 and perm[14] == 0
    assert is_automorphism(seed("qrm"), perm)[0]


@given(st.data())
@settings(max_examples=200)
def test_propagated_frame_matches_simulation(data):
    c = data.draw(clifford_circuits(max_n=8, max_gates=20))
    loc = data.draw(st.integers(0, len(c)))
    q = data.draw(st.integers(0, c.n - 1))
    letter = data.draw(st.sampled_from("XYZ"))
    report = propagate_error(c, [list(range(c.n))], loc, q, letter)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    psi = rng.normal(size=2 ** c.n) + 1j * rng.normal(size=2 ** c.n)
    before, after = Circuit(c.n, c.gates[:loc]), Circuit(c.n, c.gates[loc:])
    faulty = simulate(after, apply_pauli(simulate(before, psi), PauliOperator.single(c.n, q, letter)))
    assert np.allclose(faulty, apply_pauli(simulate(c, psi), report.final))


def test_propagation_on_fourteen_qubit_rule():
    rule = build_push_rule("qrm", "k2", "CX_12")
    c = rule.circuit
    psi = np.random.default_rng(1).normal(size=2 ** 14).astype(complex)
    for loc in (0, 5, 11):
        rep = propagate_error(c, [list(range(14))], loc, 7, "Y")
        before, after = Circuit(14, c.gates[:loc]), Circuit(14, c.gates[loc:])
        faulty = simulate(after, apply_pauli(simulate(before, psi), PauliOperator.single(14, 7, "Y")))
        assert np.allclose(faulty, apply_pauli(simulate(c, psi), rep.final))


def test_fault_tolerance_of_orderings():
    scans = ft_report()
    assert scans["adjacent CX, reflected order"].ft_ok
    regular = scans["adjacent CX, regular order"]
    assert not regular.ft_ok and regular.witness
    assert scans["non-adjacent CX, regular order"].ft_ok
    assert scans["H through QRM layer"].ft_ok
    assert all(s.faults > 0 for s in scans.values() if s.ft_ok)
