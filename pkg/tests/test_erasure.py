import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holoforge.assembler import HeteroCodeSpec, assemble
from holoforge.erasure import (
    ErasureCurve,
    exact_F,
    failure_counts,
    mc_estimate,
    pseudo_threshold,
    recoverable,
    sweep,
)
from holoforge.errors import NotFoundError, ParseError
from holoforge.pauli import pauli_mul
from holoforge.seeds import seed, shorten

SMALL = {
    "five_qubit": seed("five_qubit"),
    "steane": seed("steane"),
    "five_qubit_child": shorten(seed("five_qubit"), 0),
    "steane_child": shorten(seed("steane"), 0),
}


def _survives_off(op, group, erased_mask):
    return any(((pauli_mul(op, s).x | pauli_mul(op, s).z) & erased_mask) == 0 for s in group)


def brute_verdict(code, erased):
    """Logical survives iff some stabilizer-equivalent representative avoids the erased set."""
    mask = sum(1 << q for q in erased)
    group = list(code.stabilizer_elements())
    xs = tuple(_survives_off(op, group, mask) for op in code.logical_x)
    zs = tuple(_survives_off(op, group, mask) for op in code.logical_z)
    return xs, zs


@pytest.mark.parametrize("name", sorted(SMALL))
def test_decoder_matches_brute_force_on_every_erasure_set(name):
    code = SMALL[name]
    for size in range(code.n + 1):
        for erased in itertools.combinations(range(code.n), size):
            v = recoverable(code, erased)
            assert (v.x_recoverable, v.z_recoverable) == brute_verdict(code, erased), erased


def test_seed_failure_counts():
    assert list(failure_counts(seed("five_qubit"))) == [0, 0, 0, 10, 5, 1]
    assert list(failure_counts(seed("steane"))) == [0, 0, 0, 7, 28, 21, 7, 1]


def test_exact_f_endpoints():
    for code in SMALL.values():
        assert exact_F(code, 0.0) == 0.0
        assert exact_F(code, 1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["five_qubit", "steane", "qrm"])
@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
def test_monte_carlo_agrees_with_enumeration(name, p):
    code = seed(name)
    v, s = mc_estimate(code, p, 4000, rng_seed=17)
    assert abs((1 - v) - exact_F(code, p)) <= 3 * max(s, 1e-3)


def test_permutation_sweep_agrees_with_enumeration():
    code = seed("qrm")
    curve = sweep(code, [0.1, 0.2, 0.3, 0.4], 20000, rng_seed=4)
    for p, v, s, _ in curve.points:
        assert abs((1 - v) - exact_F(code, p)) <= 4 * max(s, 1e-3)


def test_subalgebra_never_worse_than_subsystem():
    code = assemble(HeteroCodeSpec("qrm", "steane", 1)).code
    grid = np.linspace(0.05, 0.95, 10)
    a = sweep(code, grid, 2000, 3, "subsystem")
    b = sweep(code, grid, 2000, 3, "subalgebra")
    assert np.all(b.values >= a.values)


_NETWORK = assemble(HeteroCodeSpec("steane", "qrm", 1)).code


@given(st.sets(st.integers(0, _NETWORK.n - 1), max_size=60), st.sets(st.integers(0, _NETWORK.n - 1), max_size=30))
@settings(max_examples=500)
def test_recoverability_is_monotone(a, extra):
    small = recoverable(_NETWORK, a)
    big = recoverable(_NETWORK, a | extra)
    for s, b in zip(small.x_recoverable + small.z_recoverable, big.x_recoverable + big.z_recoverable):
        assert s or not b


@given(st.sets(st.integers(0, _NETWORK.n - 1)))
@settings(max_examples=300)
def test_complementary_recovery(region):
    rest = set(range(_NETWORK.n)) - region
    # recoverable from A means recoverable after erasing A's complement
    from_a = recoverable(_NETWORK, rest)
    from_rest = recoverable(_NETWORK, region)
    if from_a.x_recoverable[0] and from_a.z_recoverable[0]:
        assert not from_rest.x_recoverable[0] and not from_rest.z_recoverable[0]


def test_reruns_are_bit_identical():
    code = assemble(HeteroCodeSpec("five_qubit", "qrm", 1)).code
    a = sweep(code, [0.2, 0.4, 0.6], 3000, rng_seed=99)
    b = sweep(code, [0.2, 0.4, 0.6], 3000, rng_seed=99)
    c = sweep(code, [0.2, 0.4, 0.6], 3000, rng_seed=99, workers=4)
    assert a.to_csv() == b.to_csv() == c.to_csv()
    assert mc_estimate(code, 0.3, 700, 5) == mc_estimate(code, 0.3, 700, 5)


def test_different_seeds_differ():
    code = seed("qrm")
    assert sweep(code, [0.3], 1000, 1).values[0] != sweep(code, [0.3], 1000, 2).values[0]


def test_stderr_formula():
    curve = sweep(seed("steane"), [0.25], 5000, 8)
    p, v, s, t = curve.points[0]
    assert s == pytest.approx(np.sqrt(v * (1 - v) / t))
    assert 0 <= v <= 1


def test_curve_csv_round_trip():
    curve = sweep(seed("steane"), [0.1, 0.2], 500, 1)
    back = ErasureCurve.from_csv(curve.to_csv())
    assert back.to_csv() == curve.to_csv()
    with pytest.raises(ParseError):
        ErasureCurve.from_csv("p,p_rec\n")


def test_crossing_of_concatenation_levels_is_half_for_five_qubit():
    small = sweep(assemble(HeteroCodeSpec("five_qubit", "five_qubit", 1, mode="ttn")).code,
                  np.arange(0.3, 0.71, 0.02), 6000, 2)
    large = sweep(assemble(HeteroCodeSpec("five_qubit", "five_qubit", 2, mode="ttn")).code,
                  np.arange(0.3, 0.71, 0.02), 6000, 2)
    p, (lo, hi) = pseudo_threshold(small, large)
    assert lo - 0.01 <= 0.5 <= hi + 0.01


def test_crossing_missing_from_grid():
    small = sweep(seed("steane"), [0.05, 0.1], 2000, 1)
    large = sweep(assemble(HeteroCodeSpec("steane", "qrm", 1)).code, [0.05, 0.1], 2000, 1)
    with pytest.raises(NotFoundError, match="grid"):
        pseudo_threshold(small, large)


def test_bad_arguments():
    with pytest.raises(ValueError):
        recoverable(seed("steane"), [7])
    with pytest.raises(ValueError):
        sweep(seed("steane"), [0.3, 0.1], 10)
    with pytest.raises(ValueError):
        mc_estimate(seed("steane"), 0.1, 10, criterion="whole")
