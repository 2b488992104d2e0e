import pytest

from holoforge.assembler import (
    HeteroCodeSpec,
    assemble,
    assemble_by_contraction,
    black_hole,
    contract_legs,
)
from holoforge.erasure import recoverable
from holoforge.errors import CapacityError, ContractionError, ParseError
from holoforge.pauli import commutes, in_span, pauli_mul, same_span
from holoforge.seeds import compute_distance, seed, to_encoding_state

PAIRS = [("steane", "qrm"), ("qrm", "steane"), ("five_qubit", "steane"), ("steane", "five_qubit"),
         ("five_qubit", "qrm"), ("qrm", "five_qubit")]


@pytest.mark.parametrize("center,alternate", PAIRS)
def test_qubit_count_matches_tiling(center, alternate):
    for layers in (0, 1, 2):
        spec = HeteroCodeSpec(center, alternate, layers)
        built = assemble(spec)
        assert built.n == spec.expected_n()
        assert built.k == 1
        assert len(built.code.generators) == built.n - 1


def test_printed_boundary_counts():
    assert [assemble(HeteroCodeSpec("steane", "qrm", L)).n for L in range(3)] == [7, 105, 679]
    assert [assemble(HeteroCodeSpec("qrm", "steane", L)).n for L in range(3)] == [15, 105, 1335]


@pytest.mark.parametrize("center,alternate", [("steane", "qrm"), ("qrm", "steane")])
def test_css_seeds_give_css_networks(center, alternate):
    assert assemble(HeteroCodeSpec(center, alternate, 2)).code.is_css()


def test_mixed_network_is_not_css():
    assert not assemble(HeteroCodeSpec("five_qubit", "steane", 1)).code.is_css()


@pytest.mark.parametrize("center,alternate", PAIRS)
def test_generators_commute_with_logicals(center, alternate):
    code = assemble(HeteroCodeSpec(center, alternate, 1)).code
    code.check()
    for lop in code.logicals():
        assert all(commutes(lop, g) for g in code.generators)


@pytest.mark.parametrize("center,alternate", PAIRS)
def test_single_boundary_erasure_is_harmless(center, alternate):
    code = assemble(HeteroCodeSpec(center, alternate, 1)).code
    for q in range(code.n):
        assert recoverable(code, [q]).all_recoverable()


def test_one_layer_distance_grows():
    code = assemble(HeteroCodeSpec("five_qubit", "steane", 1)).code
    d, exact = compute_distance(code, 3)
    assert d >= 4 and not exact


@pytest.mark.parametrize("spec", [HeteroCodeSpec("five_qubit", "steane", 1),
                                  HeteroCodeSpec("steane", "five_qubit", 1),
                                  HeteroCodeSpec("steane", "qrm", 1, leg_ordering="reflected_steane")])
def test_pushing_agrees_with_contraction(spec):
    fast = assemble(spec).code
    slow = assemble_by_contraction(spec)
    assert fast.n == slow.n
    assert same_span(fast.generators, slow.generators)
    for a, b in zip(fast.logicals(), slow.logicals()):
        assert in_span(pauli_mul(a, b), fast.generators) is not None


def test_serialization_is_reproducible():
    spec = HeteroCodeSpec("qrm", "steane", 1)
    assert assemble(spec).to_text() == assemble(spec).to_text()


def test_black_hole_keeps_centre_qubits_logical():
    built = black_hole(HeteroCodeSpec("steane", "qrm", 1))
    assert built.k == 7
    built.code.check()


def test_cap_enforced(monkeypatch):
    monkeypatch.setenv("HOLOFORGE_CAP", "500")
    with pytest.raises(CapacityError):
        assemble(HeteroCodeSpec("steane", "qrm", 2))


def test_spec_json():
    spec = HeteroCodeSpec.from_json('{"center": "qrm", "alternate": "steane", "layers": 2}')
    assert spec == HeteroCodeSpec("qrm", "steane", 2)
    assert HeteroCodeSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ParseError):
        HeteroCodeSpec.from_json('{"center": "qrm"')
    with pytest.raises(ParseError):
        HeteroCodeSpec.from_json('{"alternate": "qrm"}')


def test_contraction_rejects_bad_legs():
    st = to_encoding_state(seed("steane"))
    with pytest.raises(ContractionError):
        contract_legs(st, st, [(0, 99)])
