"""Acceptance checks 1-9. Each test prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or under pytest with
``-s`` to see the lines; a summary is also printed at session end.
"""

import math
import time

import numpy as np
import pytest

from holoforge import analytic, gates
from holoforge.assembler import HeteroCodeSpec, assemble
from holoforge.erasure import (
    CRITERIA,
    curve_from_profile,
    exact_F,
    pseudo_threshold,
    recoverable,
    survival_profile,
    sweep,
)
from holoforge.errors import NotFoundError
from holoforge.io import parse_grid
from holoforge.pauli import PauliOperator, commutes, pauli_mul
from holoforge.seeds import compute_distance, seed, shorten
from holoforge.tiling import growth_matrix, physical_sequence, ttn_saving

RESULTS = {}

NUMERIC_TARGETS = {("steane", "qrm"): 0.367, ("qrm", "steane"): 0.26,
                   ("five_qubit", "steane"): 0.5, ("steane", "five_qubit"): 0.5}
DIRECTION_PAIRS = (("five_qubit", "qrm"), ("qrm", "five_qubit"))
THEORY_TARGETS = {
    ("steane", "qrm"): (0.355, 0.371), ("qrm", "steane"): (0.231, 0.258),
    ("five_qubit", "qrm"): (0.34, 0.363), ("qrm", "five_qubit"): (0.218, 0.255),
    ("five_qubit", "steane"): (0.458, 0.5), ("steane", "five_qubit"): (0.458, 0.5),
}


def report(number, ok, detail, capsys=None):
    line = f"AC{number} {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def ac1_seed_fidelity():
    t0 = time.perf_counter()
    bad = []
    for name in ("steane", "qrm", "five_qubit"):
        code = seed(name)
        code.check()
        if compute_distance(code, 3) != (3, True):
            bad.append(name)
        for leg in range(code.n):
            child = shorten(code, leg)
            child.check()
            if compute_distance(child, 2) != (2, True):
                bad.append(f"{name} child {leg}")
    dt = time.perf_counter() - t0
    return not bad and dt < 60, f"seed d=3, all children d=2 {'ok' if not bad else bad}; {dt:.1f}s"


def ac2_closed_forms():
    err = 0.0
    for name in ("five_qubit", "steane"):
        f = analytic.seed_function(name)
        err = max(err, max(abs(f(p) - exact_F(seed(name), p)) for p in np.linspace(0, 1, 201)))
    fp = analytic.fixed_point(analytic.seed_function("five_qubit"))
    cross = analytic.fixed_point(analytic.seed_function("five_qubit", "upper", child=True))
    want = (5 - math.sqrt(13)) / 6
    ok = bool(err < 1e-12 and abs(fp - 0.5) <= 1e-6 and abs(cross - want) <= 1e-4)
    return ok, f"max |closed - exact| {err:.1e}; fixed point {fp:.7f}; child crossover {cross:.6f} vs {want:.6f}"


def ac3_growth():
    a = physical_sequence(16, 8, 5)
    lam = growth_matrix(16, 8).eigenvalues()
    lam_err = max(abs(lam[0] - (41 + 4 * math.sqrt(105))), abs(lam[1] - (41 - 4 * math.sqrt(105))))
    saving = ttn_saving(16, 8, 3)
    ok = a[0::2] == [15, 1335, 109455] and a[1::2] == [105, 8625, 707145] and lam_err < 1e-9 \
        and abs(saving - 0.218) <= 0.001
    return ok, f"counts {a}; eigenvalue error {lam_err:.1e}; tree saving {saving:.4f}"


def ac4_holographic_qrm(trials=10_000, rng_seed=11):
    t0 = time.perf_counter()
    grid = parse_grid("0.10:0.30:0.01")
    small = assemble(HeteroCodeSpec("qrm", "qrm", 1)).code
    large = assemble(HeteroCodeSpec("qrm", "qrm", 2)).code
    a = sweep(small, grid, trials, rng_seed)
    b = sweep(large, grid, trials, rng_seed)
    p, (lo, hi) = pseudo_threshold(a, b)
    dt = time.perf_counter() - t0
    ok = abs(p - 0.192) <= 0.02 and dt < 3600
    return ok, f"n={small.n} vs n={large.n}: crossing {p:.4f} [{lo:.4f}, {hi:.4f}], {trials} trials, {dt:.0f}s"


def numeric_crossings(center, alternate, trials=10_000, rng_seed=3, grid="0.05:0.65:0.005"):
    """Crossing of the 0- and 2-layer builds under both criteria (one shared sample)."""
    ps = parse_grid(grid)
    curves = {}
    for layers in (0, 2):
        code = assemble(HeteroCodeSpec(center, alternate, layers)).code
        r_sub, r_alg = survival_profile(code, trials, rng_seed)
        for crit, r in zip(CRITERIA, (r_sub, r_alg)):
            curves[layers, crit] = curve_from_profile(f"{center}/{alternate}-L{layers}", code.n, r, ps, trials, crit)
    out = {}
    for crit in CRITERIA:
        try:
            out[crit] = pseudo_threshold(curves[0, crit], curves[2, crit])[0]
        except NotFoundError:
            out[crit] = None
    return out


def _fmt(v):
    return "none" if v is None else f"{v:.3f}"


def ac5_table_numerics():
    lines, ok = [], True
    for (c, a), want in NUMERIC_TARGETS.items():
        got = numeric_crossings(c, a)["subsystem"]
        good = got is not None and abs(got - want) <= 0.03
        ok &= good
        lines.append(f"{analytic.row_label(c, a)} {_fmt(got)}/{want}")
    for c, a in DIRECTION_PAIRS:
        got = numeric_crossings(c, a)
        good = None not in got.values() and got["subalgebra"] > got["subsystem"]
        ok &= good
        lines.append(f"{analytic.row_label(c, a)} subalgebra {_fmt(got['subalgebra'])} vs subsystem {_fmt(got['subsystem'])}")
    return ok, "; ".join(lines)


def ac6_theory():
    t0 = time.perf_counter()
    worst, lines = 0.0, []
    for (c, a), (theory, upper) in THEORY_TARGETS.items():
        row = analytic.theory_row(c, a)
        worst = max(worst, abs(row.p_theory - theory), abs(row.p_upper - upper))
        lines.append(f"{row.code} {row.p_theory:.3f}/{row.p_upper:.3f}")
    dt = time.perf_counter() - t0
    return worst <= 0.01 and dt < 60, f"max deviation {worst:.4f}; " + ", ".join(lines) + f"; {dt:.1f}s"


def ac7_gate_rules():
    t0 = time.perf_counter()
    failed = [f"{r.seed} {r.config} {r.gate}" for r in gates.rule_set() if not gates.verify_rule(r)]
    failed += [name for name, chk in gates.transversal_checks().items() if not chk]
    signs = gates.check_transformed_stabilizers()
    piece = gates.pieceable_ccz("five_qubit")
    ccz = gates.verify_logical_action(piece.code, piece.circuit, piece.target(), mode="statevector", tol=1e-9)
    steane_ccz = gates.pieceable_ccz("steane").verify()
    dt = time.perf_counter() - t0
    ok = not failed and signs and ccz and steane_ccz and dt < 300
    return bool(ok), (f"{len(gates.rule_set())} rules, failures {failed or 'none'}; signed generators "
                      f"{'exact' if signs else signs.witness}; 15-qubit CCZ {ccz.mode} "
                      f"{'ok' if ccz else ccz.witness}; {dt:.1f}s")


def ac8_fault_tolerance():
    t0 = time.perf_counter()
    scans = gates.ft_report()
    reflected = scans["adjacent CX, reflected order"]
    regular = scans["adjacent CX, regular order"]
    hadamard = scans["H through QRM layer"]
    dt = time.perf_counter() - t0
    ok = reflected.ft_ok and not regular.ft_ok and regular.witness and hadamard.ft_ok and dt < 600
    return bool(ok), (f"reflected ft_ok={reflected.ft_ok} ({reflected.faults} faults); regular witness "
                      f"{regular.witness}; H ft_ok={hadamard.ft_ok}; {dt:.1f}s")


def ac9_properties(cases=100_000, pairs=10_000):
    rng = np.random.default_rng(2024)
    # Pauli algebra: commutation vs product order, associativity, involution up to phase
    pauli_fail = 0
    for _ in range(cases):
        n = int(rng.integers(1, 40))
        ops = [PauliOperator(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)), int(rng.integers(4)))
               for _ in range(3)]
        a, b, c = ops
        ab, ba = pauli_mul(a, b), pauli_mul(b, a)
        if commutes(a, b) != (ab == ba) or not ab.same_bits(ba):
            pauli_fail += 1
        if pauli_mul(ab, c) != pauli_mul(a, pauli_mul(b, c)):
            pauli_fail += 1
        if not pauli_mul(a, a).is_identity_up_to_phase():
            pauli_fail += 1
    # decoder monotonicity on random nested erasure sets
    code = assemble(HeteroCodeSpec("steane", "qrm", 1)).code
    mono_fail = 0
    for _ in range(pairs):
        p = rng.uniform(0.05, 0.6)
        small = np.flatnonzero(rng.random(code.n) < p)
        big = np.union1d(small, np.flatnonzero(rng.random(code.n) < 0.1))
        vs, vb = recoverable(code, small), recoverable(code, big)
        if any(b and not s for s, b in zip(vs.x_recoverable + vs.z_recoverable, vb.x_recoverable + vb.z_recoverable)):
            mono_fail += 1
    # bit-identical reruns, serial and threaded
    grid = [0.1, 0.3, 0.5]
    runs = [sweep(code, grid, 5000, 77, workers=w).to_csv() for w in (1, 1, 4)]
    identical = len(set(runs)) == 1
    # analytic monotonicity
    fns = [analytic.seed_function(n) for n in ("five_qubit", "steane", "qrm")]
    fns += [analytic.seed_function(n, v, child=True) for n in ("five_qubit", "steane", "qrm") for v in ("exact", "upper")]
    flat = [f.label for f in fns if not analytic.is_monotone(f)]
    ok = pauli_fail == 0 and mono_fail == 0 and identical and not flat
    return ok, (f"{cases} Pauli cases ({pauli_fail} failures); {pairs} nested erasure pairs ({mono_fail} violations); "
                f"reruns identical={identical}; non-monotone functions {flat or 'none'}")


CHECKS = {1: ac1_seed_fidelity, 2: ac2_closed_forms, 3: ac3_growth, 4: ac4_holographic_qrm,
          5: ac5_table_numerics, 6: ac6_theory, 7: ac7_gate_rules, 8: ac8_fault_tolerance, 9: ac9_properties}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_acceptance(number, capsys):
    ok, detail = CHECKS[number]()
    report(number, ok, detail, capsys)


if __name__ == "__main__":
    failures = 0
    for number, check in sorted(CHECKS.items()):
        ok, detail = check()
        print(f"AC{number} {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
        failures += not ok
    raise SystemExit(1 if failures else 0)
