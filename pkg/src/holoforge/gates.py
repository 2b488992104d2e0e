"""Logical gate push rules, their verification, the pieceable CCZ and
single-fault propagation through a layer of compiled gates.

Circuits list gates in time order. A push rule maps a gate on the logical
input legs of one seed tensor (``k1``) or of its shortened child (``k2``)
to a circuit on that tensor's physical legs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .circuit import CLIFFORD, Circuit, apply_pauli, conjugate, simulate, unitary
from .errors import CapacityError, NotFoundError, UnsupportedGateError, VerificationError
from .pauli import PauliOperator, SymplecticMatrix, commutes, in_span, pauli_mul, product
from .seeds import (
    REFLECTED_STEANE_ORDER,
    StabilizerCode,
    min_weight_representative,
    permute_code,
    seed,
    seed_id,
    shorten,
)

CONFIGS = ("k1", "k2")
RULE_GATES = ("X", "Z", "H", "S", "T", "TDG", "CX_12", "CX_21")
RULE_SEEDS = ("steane", "qrm")
STATEVECTOR_QUBITS = 16
DIAGONAL = frozenset({"I", "Z", "S", "SDG", "T", "TDG", "CZ", "CCZ"})

# basis change taking the five-qubit code to the frame where ZIZIZ is Z-bar
FIVE_QUBIT_BASIS_CHANGE = (("SH", (0,)), ("Y", (2,)), ("SH", (4,)))
FIVE_QUBIT_TRANSFORMED = ("-YZXIZ", "-ZZZXI", "-IXZZZ", "-ZIXZY")
FIVE_QUBIT_TRANSFORMED_LOGICALS = ("XIXIX", "ZIZIZ")
CCZ_QUBITS = {"five_qubit": (0, 2, 4), "steane": (2, 3, 4)}

# cube rotation about the logical vertex, vertices 1..8 with vertex 1 logical
STEANE_SIGMA_CYCLES = ((2,), (3, 4, 5), (6, 7, 8))


def rule_code(seed_name: str, config: str) -> StabilizerCode:
    if config not in CONFIGS:
        raise UnsupportedGateError(f"unknown input configuration {config!r}")
    code = seed(seed_name)
    return code if config == "k1" else shorten(code, 0)


# -- logical representatives ------------------------------------------------


def lift(code: StabilizerCode, logical: PauliOperator) -> PauliOperator:
    """Physical operator for a Pauli on the k logical legs (exact phase)."""
    if logical.n != code.k:
        raise ValueError(f"logical acts on {logical.n} legs, code has k={code.k}")
    ops = [code.logical_x[i] for i in range(code.k) if (logical.x >> i) & 1]
    ops += [code.logical_z[i] for i in range(code.k) if (logical.z >> i) & 1]
    return product(ops, code.n).times_phase(logical.exp)


def pauli_push(code: StabilizerCode, logical: PauliOperator) -> PauliOperator:
    """Minimal-weight physical representative of a logical Pauli."""
    return min_weight_representative(lift(code, logical), code)


def in_stabilizer(code: StabilizerCode, p: PauliOperator, exact_phase: bool = True) -> bool:
    return in_span(p, code.generators, exact_phase=exact_phase) is not None


def _support_key(support: tuple, n: int):
    edge = support[0] == 0 or support[-1] == n - 1
    centre = (n - 1) / 2
    return (len(support), edge, support[-1] - support[0], sum(abs(q - centre) for q in support), support)


def common_supports(code: StabilizerCode, logical: int) -> list[tuple]:
    """Qubit sets S with +X_S ~ X-bar and +Z_S ~ Z-bar for one logical qubit.

    Sorted by preference: weight, avoiding the first and last leg,
    compactness, closeness to the middle.
    """
    xbar = code.logical_x[logical]
    zbar = code.logical_z[logical]
    found = set()
    for s in code.stabilizer_elements():
        c = pauli_mul(xbar, s)
        if c.z or c.phase_exp % 4:
            continue
        zs = PauliOperator(code.n, 0, c.x, 0)
        if in_stabilizer(code, pauli_mul(zs, zbar)):
            found.add(tuple(q for q in range(code.n) if (c.x >> q) & 1))
    return sorted(found, key=lambda s: _support_key(s, code.n))


@lru_cache(maxsize=None)
def _preferred_support(seed_name: str, config: str, logical: int) -> tuple:
    supports = common_supports(rule_code(seed_name, config), logical)
    if not supports:
        raise NotFoundError(f"no common X/Z support for logical {logical} of {seed_name} {config}")
    return supports[0]


def logical_support(seed_name: str, config: str, logical: int = 0) -> tuple:
    return _preferred_support(seed_id(seed_name), config, logical)


# -- circuit templates ------------------------------------------------------


def spread_gates(support: Sequence[int], centre: Optional[int] = None) -> list:
    """CX gates A (time order) with A X_c A^dag = X_S and A Z_c A^dag = Z_S."""
    support = list(support)
    if len(support) % 2 == 0:
        raise ValueError("spreading needs an odd support")
    c = support[len(support) // 2] if centre is None else centre
    rest = [q for q in support if q != c]
    # pair off from the centre outwards, each pair hanging off a qubit already reached
    gates, reached = [], [c]
    for u, v in zip(rest[0::2], rest[1::2]):
        s = reached[-1]
        gates += [("CX", (s, u)), ("CX", (v, s)), ("CX", (u, v))]
        reached += [u, v]
    return gates


def hadamard_spread(n: int, support: Sequence[int]) -> Circuit:
    """(X_S + Z_S)/sqrt(2) from one H bracketed by CX gates."""
    support = list(support)
    c = support[len(support) // 2]
    a = spread_gates(support, c)
    return Circuit(n, tuple(reversed(a)) + (("H", (c,)),) + tuple(a))


def phase_chain(n: int, support: Sequence[int], gate: str) -> Circuit:
    """a I + b Z_S for a diagonal single-qubit gate via a CX ladder."""
    support = list(support)
    ladder = [("CX", (a, b)) for a, b in zip(support, support[1:])]
    return Circuit(n, tuple(ladder) + ((gate, (support[-1],)),) + tuple(reversed(ladder)))


def gathered_cx(n: int, control: Sequence[int], target: Sequence[int], anchor: Optional[int] = None) -> Circuit:
    """(I + Z_A + X_B - Z_A X_B)/2 for control support A and target support B.

    Needs |A & B| even. The anchor must lie in A.
    """
    a_set, b_set = list(control), list(target)
    overlap = set(a_set) & set(b_set)
    if len(overlap) % 2:
        raise ValueError("control and target supports must overlap evenly")
    if anchor is None:
        anchor = min(overlap) if overlap else a_set[len(a_set) // 2]
    if anchor not in a_set:
        raise ValueError("anchor must lie in the control support")
    gather = [("CX", (c, anchor)) for c in a_set if c != anchor]
    fan = [("CX", (anchor, t)) for t in b_set if t != anchor]
    return Circuit(n, tuple(reversed(gather)) + tuple(fan) + tuple(gather))


def transversal(n: int, gate: str, qubits: Optional[Sequence[int]] = None) -> Circuit:
    qubits = range(n) if qubits is None else qubits
    return Circuit(n, tuple((gate, (q,)) for q in qubits))


def transversal_cx(n: int, pairs: Sequence[tuple]) -> Circuit:
    return Circuit(n, tuple(("CX", (c, t)) for c, t in pairs))


def t_layer_gate(layer: int) -> str:
    """Transversal T-type gate for a QRM layer: T-dagger on odd layers, T on even."""
    if layer < 1:
        raise ValueError("layers count from 1")
    return "TDG" if layer % 2 else "T"


# -- push rules -------------------------------------------------------------


@dataclass(frozen=True)
class PushRule:
    seed: str
    config: str
    gate: str
    circuit: Circuit
    logical: int = 0

    @property
    def k(self) -> int:
        return 1 if self.config == "k1" else 2

    def code(self) -> StabilizerCode:
        return rule_code(self.seed, self.config)

    def target(self) -> Circuit:
        return logical_target(self.gate, self.k, self.logical)

    def to_text(self) -> str:
        return f"# rule {self.seed} {self.config} {self.gate} {self.logical}\n" + self.circuit.to_text()


def logical_target(gate: str, k: int, logical: int = 0) -> Circuit:
    if gate == "CX_12":
        return Circuit(k, (("CX", (0, 1)),))
    if gate == "CX_21":
        return Circuit(k, (("CX", (1, 0)),))
    return Circuit(k, ((gate, (logical,)),))


# transversal gates on the single-input tensors
_K1_TRANSVERSAL = {
    ("steane", "X"): "X", ("steane", "Z"): "Z", ("steane", "H"): "H", ("steane", "S"): "SDG",
    ("qrm", "X"): "X", ("qrm", "Z"): "Z", ("qrm", "S"): "SDG", ("qrm", "T"): "TDG", ("qrm", "TDG"): "T",
}


def build_push_rule(seed_name: str, config: str, gate: str, logical: int = 0) -> PushRule:
    sid = seed_id(seed_name)
    if sid not in RULE_SEEDS:
        raise UnsupportedGateError(f"no push rules for seed {seed_name!r}")
    if gate not in RULE_GATES:
        raise UnsupportedGateError(f"unknown rule gate {gate!r}")
    code = rule_code(sid, config)
    n = code.n
    if gate.startswith("CX"):
        if config != "k2":
            raise UnsupportedGateError("two-input CX rules need the k2 configuration")
        ctrl, tgt = (0, 1) if gate == "CX_12" else (1, 0)
        a_set, b_set = logical_support(sid, config, ctrl), logical_support(sid, config, tgt)
        # Steane: anchor outside the target support (7 gates); QRM: inside the overlap (18 gates)
        outside = [q for q in a_set if q not in b_set]
        anchor = min(outside) if sid == "steane" and outside else None
        circ = gathered_cx(n, a_set, b_set, anchor)
        return PushRule(sid, config, gate, circ, 0)
    if not 0 <= logical < code.k:
        raise UnsupportedGateError(f"logical {logical} out of range for {config}")
    if config == "k1" and (sid, gate) in _K1_TRANSVERSAL:
        return PushRule(sid, config, gate, transversal(n, _K1_TRANSVERSAL[(sid, gate)]), logical)
    if gate in ("X", "Z"):
        rep = pauli_push(code, PauliOperator.single(code.k, logical, gate))
        if rep.phase_exp % 4:
            raise VerificationError(f"representative {rep} carries a sign")
        return PushRule(sid, config, gate, Circuit(n, tuple((gate, (q,)) for q in rep.support)), logical)
    support = logical_support(sid, config, logical)
    if gate == "H":
        return PushRule(sid, config, gate, hadamard_spread(n, support), logical)
    return PushRule(sid, config, gate, phase_chain(n, support, gate), logical)


def rule_set() -> list[PushRule]:
    """Every shipped rule: both seeds, both configurations, both inputs for k2."""
    out = []
    for sid in RULE_SEEDS:
        for config in CONFIGS:
            for gate in RULE_GATES:
                if gate.startswith("CX"):
                    if config == "k2":
                        out.append(build_push_rule(sid, config, gate))
                    continue
                for logical in range(1 if config == "k1" else 2):
                    out.append(build_push_rule(sid, config, gate, logical))
    return out


# -- logical action checks --------------------------------------------------


@dataclass(frozen=True)
class LogicalCheck:
    ok: bool
    mode: str
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _clifford_check(code: StabilizerCode, physical: Circuit, target: Circuit) -> LogicalCheck:
    for i, g in enumerate(code.generators):
        img = conjugate(g, physical)
        if not in_stabilizer(code, img):
            return LogicalCheck(False, "clifford", f"generator {i} {g} -> {img}")
    for i in range(code.k):
        for letter in "XZ":
            lg = PauliOperator.single(code.k, i, letter)
            want = lift(code, conjugate(lg, target))
            got = conjugate(lift(code, lg), physical)
            if not in_stabilizer(code, pauli_mul(want, got)):
                return LogicalCheck(False, "clifford", f"{letter}-bar_{i} -> {got}, expected {want}")
    return LogicalCheck(True, "clifford")


def encoder(code: StabilizerCode, seed_value: int = 7) -> np.ndarray:
    """Columns are the encoded logical basis states (logical i is bit i)."""
    if code.n > STATEVECTOR_QUBITS:
        raise CapacityError(f"statevector encoder limited to {STATEVECTOR_QUBITS} qubits")
    rng = np.random.default_rng(seed_value)
    v = rng.normal(size=1 << code.n) + 1j * rng.normal(size=1 << code.n)
    for g in [*code.generators, *code.logical_z]:
        v = 0.5 * (v + apply_pauli(v, g))
    norm = np.linalg.norm(v)
    if norm < 1e-8:
        raise VerificationError("projection onto the code space vanished")
    v /= norm
    cols = []
    for idx in range(1 << code.k):
        w = v
        for i in range(code.k):
            if (idx >> i) & 1:
                w = apply_pauli(w, code.logical_x[i])
        cols.append(w)
    return np.array(cols).T


def _match_phase(m: np.ndarray, g: np.ndarray, tol: float) -> tuple[bool, float]:
    j = np.unravel_index(np.argmax(np.abs(g)), g.shape)
    if abs(m[j]) < 1e-12:
        return False, float(np.max(np.abs(m - g)))
    ph = m[j] / g[j]
    ph /= abs(ph)
    err = float(np.max(np.abs(m - ph * g)))
    return err < tol, err


def _statevector_check(code: StabilizerCode, physical: Circuit, target: Circuit, tol: float) -> LogicalCheck:
    v = encoder(code)
    uv = np.array([simulate(physical, v[:, j]) for j in range(v.shape[1])]).T
    m = v.conj().T @ uv
    leak = float(np.max(np.abs(uv - v @ m)))
    if leak > tol:
        return LogicalCheck(False, "statevector", f"circuit leaves the code space (residual {leak:.2e})")
    ok, err = _match_phase(m, unitary(target), tol)
    if not ok:
        return LogicalCheck(False, "statevector", f"logical action differs from target (max deviation {err:.2e})")
    return LogicalCheck(True, "statevector")


_PHASE8 = {"I": 0, "Z": 4, "S": 2, "SDG": 6, "T": 1, "TDG": 7}


def diagonal_phase(c: Circuit, bits: int) -> int:
    """Phase of a diagonal circuit on a basis state, in units of pi/4."""
    total = 0
    for g, qs in c.gates:
        if g in _PHASE8:
            if (bits >> qs[0]) & 1:
                total += _PHASE8[g]
        elif g in ("CZ", "CCZ"):
            if all((bits >> q) & 1 for q in qs):
                total += 4
        else:
            raise UnsupportedGateError(f"{g} is not diagonal")
    return total % 8


def codeword_strings(code: StabilizerCode, logical_bits: int) -> list[int]:
    """Basis strings in the support of a CSS logical basis state."""
    gens = list(code.generators)
    xs = [g.x for g in gens if g.z == 0]
    zs = [g for g in gens if g.x == 0]
    if len(xs) + len(zs) != len(gens):
        raise VerificationError("codeword enumeration needs a CSS generator set")
    shift = 0
    for i in range(code.k):
        if (logical_bits >> i) & 1:
            if code.logical_x[i].z:
                raise VerificationError("codeword enumeration needs X-type X-bar")
            shift ^= code.logical_x[i].x
    span = {0}
    for x in xs:
        span |= {s ^ x for s in span}
    strings = [s ^ shift for s in span]
    for g in zs:
        for s in strings[:1]:
            sign = (-1) ** (bin(s & g.z).count("1") + g.phase_exp // 2)
            if sign != 1:
                raise VerificationError("Z-type generators must stabilize |0...0>")
    return strings


def _codeword_check(code: StabilizerCode, physical: Circuit, target: Circuit) -> LogicalCheck:
    offset = None
    for x in range(1 << code.k):
        want = diagonal_phase(target, x)
        for s in codeword_strings(code, x):
            got = (diagonal_phase(physical, s) - want) % 8
            if offset is None:
                offset = got
            elif got != offset:
                return LogicalCheck(False, "codeword", f"logical {x:0{code.k}b}, basis string {s:b}")
    return LogicalCheck(True, "codeword")


def verify_logical_action(code: StabilizerCode, physical: Circuit, target: Circuit,
                          mode: str = "auto", tol: float = 1e-9) -> LogicalCheck:
    """Does ``physical`` act as ``target`` on the code space?

    ``auto`` uses the Heisenberg check for Clifford circuits, dense
    statevectors up to 16 qubits, and basis-string phases for larger
    diagonal circuits on CSS codes.
    """
    if physical.n != code.n or target.n != code.k:
        raise ValueError("circuit sizes do not match the code")
    clifford = physical.is_clifford() and target.is_clifford()
    if mode == "auto":
        if clifford:
            mode = "clifford"
        elif code.n <= STATEVECTOR_QUBITS:
            mode = "statevector"
        elif physical.gate_names() <= DIAGONAL and target.gate_names() <= DIAGONAL:
            mode = "codeword"
        else:
            raise CapacityError(f"no verification mode for a non-Clifford circuit on {code.n} qubits")
    if mode == "clifford":
        if not clifford:
            raise UnsupportedGateError("Clifford mode needs Clifford circuits")
        return _clifford_check(code, physical, target)
    if mode == "statevector":
        return _statevector_check(code, physical, target, tol)
    if mode == "codeword":
        return _codeword_check(code, physical, target)
    raise ValueError(f"unknown mode {mode!r}")


def verify_rule(rule: PushRule, mode: str = "auto") -> LogicalCheck:
    return verify_logical_action(rule.code(), rule.circuit, rule.target(), mode)


# -- codes on several blocks ------------------------------------------------


def tensor_code(codes: Sequence[StabilizerCode], name: Optional[str] = None) -> StabilizerCode:
    n = sum(c.n for c in codes)
    gens, lx, lz = [], [], []
    off = 0
    for c in codes:
        qs = list(range(off, off + c.n))
        gens += [g.embed(n, qs) for g in c.generators]
        lx += [p.embed(n, qs) for p in c.logical_x]
        lz += [p.embed(n, qs) for p in c.logical_z]
        off += c.n
    label = name or "x".join(c.name for c in codes)
    return StabilizerCode(label, n, len(lx), SymplecticMatrix.from_paulis(gens, n), tuple(lx), tuple(lz))


def conjugate_code(code: StabilizerCode, c: Circuit, name: Optional[str] = None) -> StabilizerCode:
    gens = [conjugate(g, c) for g in code.generators]
    return StabilizerCode(
        name or code.name, code.n, code.k, SymplecticMatrix.from_paulis(gens, code.n),
        tuple(conjugate(p, c) for p in code.logical_x),
        tuple(conjugate(p, c) for p in code.logical_z), code.d,
    )


# -- pieceable CCZ ----------------------------------------------------------


def latin_layers(m: int = 3) -> dict:
    """Layer (s, t) holds index triples (i, i+s, i+t) mod m."""
    return {(s, t): [(i, (i + s) % m, (i + t) % m) for i in range(m)] for s in range(m) for t in range(m)}


CCZ_PIECES = (((0, 0), (1, 1), (2, 2)), ((0, 1), (1, 2)), ((0, 2), (2, 0)), ((1, 0), (2, 1)))


@dataclass(frozen=True)
class StageReport:
    stage: str
    constant: tuple
    nonconstant: tuple

    def as_dict(self) -> dict:
        return {"stage": self.stage, "constant": list(self.constant), "nonconstant": list(self.nonconstant)}


@dataclass(frozen=True)
class PieceableCCZ:
    seed: str
    circuit: Circuit
    block_code: StabilizerCode  # the code the CCZ pieces act on (after any basis change)
    code: StabilizerCode  # three copies of the original seed
    reports: tuple

    def target(self) -> Circuit:
        return Circuit(3, (("CCZ", (0, 1, 2)),))

    def verify(self) -> LogicalCheck:
        return verify_logical_action(self.code, self.circuit, self.target())


def _piece_gates(seed_n: int, qubits: Sequence[int], layers: Sequence[tuple]) -> list:
    table = latin_layers(len(qubits))
    gates = []
    for key in layers:
        for i, j, k in table[key]:
            gates.append(("CCZ", (qubits[i], seed_n + qubits[j], 2 * seed_n + qubits[k])))
    return gates


def _constant_generators(code: StabilizerCode, piece: Circuit) -> tuple[tuple, tuple]:
    """Generators left invariant by conjugation with a diagonal piece."""
    support = sorted(piece.support())
    local = {q: i for i, q in enumerate(support)}
    small = piece.remap([local.get(q, 0) for q in range(piece.n)], len(support))
    phases = np.array([diagonal_phase(small, b) for b in range(1 << len(support))])
    const, moving = [], []
    for i, g in enumerate(code.generators):
        shift = sum(1 << local[q] for q in support if (g.x >> q) & 1)
        idx = np.arange(len(phases))
        (const if np.array_equal(phases[idx ^ shift], phases) else moving).append(i)
    return tuple(const), tuple(moving)


def pieceable_ccz(seed_name: str) -> PieceableCCZ:
    """Logical CCZ on three blocks, staged as basis change, four CCZ pieces, undo."""
    sid = seed_id(seed_name)
    if sid not in CCZ_QUBITS:
        raise UnsupportedGateError(f"no pieceable CCZ for {seed_name!r}")
    base = seed(sid)
    n = base.n
    qubits = CCZ_QUBITS[sid]
    change = Circuit(n, FIVE_QUBIT_BASIS_CHANGE if sid == "five_qubit" else ())
    block = conjugate_code(base, change, f"{base.name}~")
    three = tensor_code([block] * 3)
    layer = Circuit(3 * n, tuple((g, tuple(q + b * n for q in qs)) for b in range(3) for g, qs in change.gates))
    gates, marks, reports = list(layer.gates), [], []
    if layer.gates:
        marks.append(len(gates))
    for p_idx, piece_layers in enumerate(CCZ_PIECES):
        piece = Circuit(3 * n, tuple(_piece_gates(n, qubits, piece_layers)))
        const, moving = _constant_generators(three, piece)
        reports.append(StageReport(f"piece {p_idx + 1}", const, moving))
        gates += piece.gates
        marks.append(len(gates))
    gates += layer.inverse().gates
    if not layer.gates:
        marks.pop()
    circuit = Circuit(3 * n, tuple(gates), tuple(marks))
    return PieceableCCZ(sid, circuit, block, tensor_code([base] * 3), tuple(reports))


def check_transformed_stabilizers() -> LogicalCheck:
    """The five-qubit basis change lands exactly on the signed target group."""
    block = conjugate_code(seed("five_qubit"), Circuit(5, FIVE_QUBIT_BASIS_CHANGE))
    want = SymplecticMatrix.from_strings(FIVE_QUBIT_TRANSFORMED)
    for g in block.generators:
        if in_span(g, want, exact_phase=True) is None:
            return LogicalCheck(False, "clifford", f"{g} not in target group")
    for g in want:
        if in_span(g, block.generators, exact_phase=True) is None:
            return LogicalCheck(False, "clifford", f"target {g} not produced")
    for got, s in zip(block.logicals(), FIVE_QUBIT_TRANSFORMED_LOGICALS):
        if in_span(pauli_mul(got, PauliOperator.from_string(s)), block.generators, exact_phase=True) is None:
            return LogicalCheck(False, "clifford", f"logical {got} is not {s}")
    return LogicalCheck(True, "clifford")


# -- transversal checks -----------------------------------------------------


def transversal_checks() -> dict:
    """Named transversal gates and whether each implements its logical gate."""
    st, qr, fq = seed("steane"), seed("qrm"), seed("five_qubit")
    one = lambda g: Circuit(1, ((g, (0,)),))  # noqa: E731
    return {
        "steane H^7 = H": verify_logical_action(st, transversal(7, "H"), one("H")),
        "steane S^7 = S^dag": verify_logical_action(st, transversal(7, "S"), one("SDG")),
        "steane (S^dag)^7 = S": verify_logical_action(st, transversal(7, "SDG"), one("S")),
        "qrm (T^dag)^15 = T": verify_logical_action(qr, transversal(15, "TDG"), one("T")),
        "qrm T^15 = T^dag": verify_logical_action(qr, transversal(15, "T"), one("TDG")),
        "five_qubit (SH)^5 = SH": verify_logical_action(fq, transversal(5, "SH"), one("SH")),
    }


# -- code automorphisms -----------------------------------------------------


def cycles_to_map(cycles: Sequence[tuple], n: int, offset: int = 0) -> list[int]:
    """Permutation as a list ``perm[q]`` from cycle notation (labels start at ``offset``)."""
    perm = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a - offset] = b - offset
    return perm


def is_automorphism(code: StabilizerCode, perm: Sequence[int]) -> tuple[bool, str]:
    """Qubit q moves to perm[q]; stabilizer and each logical must be preserved."""
    order = [0] * code.n
    for q, t in enumerate(perm):
        order[t] = q
    moved = permute_code(code, order)
    for i, g in enumerate(moved.generators):
        if not in_stabilizer(code, g):
            return False, f"generator {i} maps to {g}, outside the stabilizer group"
    for i, (a, b) in enumerate(zip(moved.logicals(), code.logicals())):
        if not in_stabilizer(code, pauli_mul(a, b)):
            return False, f"logical {i} is not preserved"
    return True, ""


@dataclass(frozen=True)
class SymmetryReport:
    permutation: tuple  # 0-based physical qubit map
    ok: bool
    detail: str
    reflected_order: tuple


def steane_symmetry_check(cycles: Sequence[tuple] = STEANE_SIGMA_CYCLES) -> SymmetryReport:
    """Cube rotation fixing the logical vertex, as a physical-qubit permutation.

    Vertex v (1-based, vertex 1 logical) is physical qubit v - 2.
    """
    perm = cycles_to_map([tuple(v - 2 for v in c) for c in cycles], 7)
    ok, detail = is_automorphism(seed("steane"), perm)
    if not ok:
        raise VerificationError(detail)
    return SymmetryReport(tuple(perm), ok, detail, REFLECTED_STEANE_ORDER)


def qrm_symmetry_search(first: int = 0, last: int = 14) -> Optional[tuple]:
    """An automorphism of the QRM code swapping two given qubits, or None.

    QRM qubits are the nonzero points of GF(2)^4 (the columns of the X-type
    generators); candidate permutations come from invertible 4x4 matrices.
    """
    code = seed("qrm")
    xrows = [g.x for g in code.generators if g.z == 0]
    cols = [sum(((r >> q) & 1) << i for i, r in enumerate(xrows)) for q in range(code.n)]
    if sorted(cols) != list(range(1, 1 << len(xrows))):
        return None
    where = {c: q for q, c in enumerate(cols)}
    dim = len(xrows)

    def apply(mat, v):
        out = 0
        for i in range(dim):
            if bin(mat[i] & v).count("1") % 2:
                out |= 1 << i
        return out

    for rows in itertools.product(range(1, 1 << dim), repeat=dim):
        mapped = [apply(rows, c) for c in cols]
        if sorted(mapped) != sorted(cols):
            continue
        perm = [where[m] for m in mapped]
        if perm[first] != last or perm[last] != first:
            continue
        if is_automorphism(code, perm)[0]:
            return tuple(perm)
    return None


# -- single-fault propagation -----------------------------------------------


@dataclass(frozen=True)
class PropagationReport:
    location: int  # error inserted before this gate index
    qubit: int
    letter: str
    final: PauliOperator
    block_weights: tuple
    ft_ok: bool

    def as_dict(self) -> dict:
        return {"location": self.location, "qubit": self.qubit, "letter": self.letter,
                "final": str(self.final), "block_weights": list(self.block_weights), "ft_ok": self.ft_ok}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def push_forward(c: Circuit, error: PauliOperator, location: int = 0) -> PauliOperator:
    """Pauli frame after the gates from ``location`` onwards."""
    return conjugate(error, Circuit(c.n, c.gates[location:]))


def propagate_error(c: Circuit, blocks: Sequence[Sequence[int]], location: int, qubit: int,
                    letter: str) -> PropagationReport:
    """Inject a single-qubit Pauli before gate ``location`` and push it through."""
    covered = sorted(q for b in blocks for q in b)
    if covered != list(range(c.n)):
        raise ValueError("blocks must partition the qubits")
    if not 0 <= location <= len(c.gates):
        raise ValueError("location outside the circuit")
    final = push_forward(c, PauliOperator.single(c.n, qubit, letter), location)
    weights = tuple(sum(1 for q in b if ((final.x | final.z) >> q) & 1) for b in blocks)
    return PropagationReport(location, qubit, letter, final, weights, all(w <= 1 for w in weights))


@dataclass(frozen=True)
class QRMBlock:
    """One boundary tensor: its code, global qubits and the Steane legs it feeds."""

    code: StabilizerCode
    qubits: tuple
    legs: tuple  # per logical slot: (steane block, leg position)


@dataclass(frozen=True)
class FTScenario:
    name: str
    circuit: Circuit
    blocks: tuple


@dataclass(frozen=True)
class FTScan:
    scenario: str
    ft_ok: bool
    faults: int
    witness: Optional[dict] = None

    def as_dict(self) -> dict:
        return {"scenario": self.scenario, "ft_ok": self.ft_ok, "faults": self.faults, "witness": self.witness}


@lru_cache(maxsize=None)
def _k2_qrm() -> StabilizerCode:
    return shorten(seed("qrm"), 0)


class _Layer:
    """Boundary QRM blocks under a ring of Steane tensors.

    Steane block v feeds leg 0 into slot 1 of the shared block b(v-1), legs
    1..5 into single-input blocks a(v, leg) and leg 6 into slot 0 of b(v).
    """

    def __init__(self):
        self.blocks: dict = {}
        self.n = 0

    def block(self, key) -> QRMBlock:
        if key not in self.blocks:
            kind, v = key[0], key[1]
            if kind == "a":
                code, legs = seed("qrm"), ((v, key[2]),)
            else:
                code, legs = _k2_qrm(), ((v, 6), (v + 1, 0))
            self.blocks[key] = QRMBlock(code, tuple(range(self.n, self.n + code.n)), legs)
            self.n += code.n
        return self.blocks[key]

    def slot(self, steane: int, leg: int):
        if leg == 0:
            return self.block(("b", steane - 1)), 1
        if leg == 6:
            return self.block(("b", steane)), 0
        return self.block(("a", steane, leg)), 0


def _support_in(block: QRMBlock, slot: int) -> list[int]:
    config = "k1" if block.code.k == 1 else "k2"
    return [block.qubits[q] for q in logical_support("qrm", config, slot)]


def _logical_cx(layer: _Layer, ctrl: tuple, tgt: tuple) -> list:
    """Gates for CX between two QRM logical slots (time order, global qubits)."""
    (pb, ps), (qb, qs) = ctrl, tgt
    if pb is qb:
        rule = build_push_rule("qrm", "k2", "CX_12" if (ps, qs) == (0, 1) else "CX_21")
        return list(rule.circuit.remap(pb.qubits, layer.n).gates)
    if pb.code.k == 1 and qb.code.k == 1:
        return [("CX", (a, b)) for a, b in zip(pb.qubits, qb.qubits)]
    return [("PENDING", (_support_in(pb, ps), _support_in(qb, qs)))]


def _finish(layer: _Layer, gates: list) -> Circuit:
    out = []
    for g, qs in gates:
        if g == "PENDING":
            out += gathered_cx(layer.n, qs[0], qs[1]).gates
        else:
            out.append((g, qs))
    return Circuit(layer.n, tuple(out))


def steane_pairing(order: Sequence[int], qubit_map: Sequence[int]) -> list[tuple]:
    """Leg-position pairs (control leg, target leg) of a permuted transversal CX.

    Position p holds code qubit ``order[p]``; code qubit q of the control
    block meets code qubit ``qubit_map[q]`` of the target block.
    """
    pos = {q: p for p, q in enumerate(order)}
    return [(p, pos[qubit_map[q]]) for p, q in enumerate(order)]


def cx_scenario(order: Sequence[int] = REFLECTED_STEANE_ORDER, qubit_map: Optional[Sequence[int]] = None,
                separation: int = 1, name: Optional[str] = None) -> FTScenario:
    """Steane-level CX-bar from block 0 to block ``separation``, compiled onto the QRM layer."""
    if qubit_map is None:
        qubit_map = steane_symmetry_check().permutation
    layer = _Layer()
    gates = []
    for pc, pt in steane_pairing(order, qubit_map):
        gates += _logical_cx(layer, layer.slot(0, pc), layer.slot(separation, pt))
    circuit = _finish(layer, gates)
    label = name or f"cx order={''.join(map(str, order))} sep={separation}"
    return FTScenario(label, circuit, tuple(layer.blocks.values()))


def hadamard_scenario(name: str = "H through QRM layer") -> FTScenario:
    """Transversal H on one Steane block pushed into its seven QRM slots."""
    layer = _Layer()
    gates = []
    for leg in range(7):
        blk, slot = layer.slot(0, leg)
        config = "k1" if blk.code.k == 1 else "k2"
        rule = build_push_rule("qrm", config, "H", slot)
        gates += rule.circuit.remap(blk.qubits, layer.n).gates
    gates = [(g, qs) for g, qs in gates]
    return FTScenario(name, Circuit(layer.n, tuple(gates)), tuple(layer.blocks.values()))


@lru_cache(maxsize=None)
def _single_error_table(code_key: str) -> tuple:
    code = seed("qrm") if code_key == "k1" else _k2_qrm()
    gens = list(code.generators)
    table = {}
    for q in range(code.n):
        for letter in "XYZ":
            p = PauliOperator.single(code.n, q, letter)
            syn = tuple(not commutes(p, g) for g in gens)
            table.setdefault(syn, p)
    return code, gens, table


def _damaged_slots(block: QRMBlock, residual: PauliOperator) -> tuple:
    """Slots lost after ideal error correction of this block.

    Distance-3 blocks correct any error equivalent to weight <= 1; the
    two-input blocks only detect, so any nontrivial residual loses both.
    """
    local = residual.restrict(block.qubits)
    if local.x == 0 and local.z == 0:
        return ()
    key = "k1" if block.code.k == 1 else "k2"
    code, gens, table = _single_error_table(key)
    syn = tuple(not commutes(local, g) for g in gens)
    logs = code.logicals()
    trivial = lambda p: not any(syn_bit for syn_bit in (not commutes(p, g) for g in gens)) and all(  # noqa: E731
        commutes(p, lg) for lg in logs)
    if trivial(local):
        return ()
    if key == "k1":
        fix = table.get(syn)
        if fix is not None and trivial(pauli_mul(local, fix)):
            return ()
        return (0,)
    return tuple(range(block.code.k))


def damaged_legs(scenario: FTScenario, residual: PauliOperator) -> dict:
    """Steane block -> set of leg positions carrying a logical error after QRM correction."""
    out: dict = {}
    for blk in scenario.blocks:
        for slot in _damaged_slots(blk, residual):
            v, leg = blk.legs[slot]
            out.setdefault(v, set()).add(leg)
    return out


def ft_scan(scenario: FTScenario) -> FTScan:
    """Every single-qubit X, Y or Z fault at every time step of the circuit.

    Faults are deduplicated: an error before gate t on a qubit that no gate
    touches until gate t' behaves like the same error before gate t'.
    """
    c = scenario.circuit
    touch = {q: [] for q in range(c.n)}
    for t, (_, qs) in enumerate(c.gates):
        for q in qs:
            touch[q].append(t)
    starts = set()
    for q in range(c.n):
        starts.add((0 if not touch[q] else touch[q][0], q))
        for t in touch[q]:
            starts.add((t + 1, q))
    faults = 0
    for t, q in sorted(starts):
        for letter in "XYZ":
            faults += 1
            final = push_forward(c, PauliOperator.single(c.n, q, letter), t)
            dmg = damaged_legs(scenario, final)
            bad = {v: sorted(legs) for v, legs in dmg.items() if len(legs) > 1}
            if bad:
                witness = {"location": t, "qubit": q, "letter": letter, "final_weight": final.weight,
                           "damaged": {str(v): sorted(legs) for v, legs in dmg.items()}}
                return FTScan(scenario.name, False, faults, witness)
    return FTScan(scenario.name, True, faults)


def ft_report() -> dict:
    """The three orderings of interest and the Hadamard push."""
    sym = steane_symmetry_check()
    ident = tuple(range(7))
    scans = [
        ft_scan(cx_scenario(REFLECTED_STEANE_ORDER, sym.permutation, 1, "adjacent CX, reflected order")),
        ft_scan(cx_scenario(ident, ident, 1, "adjacent CX, regular order")),
        ft_scan(cx_scenario(ident, ident, 2, "non-adjacent CX, regular order")),
        ft_scan(hadamard_scenario("H through QRM layer")),
    ]
    return {s.scenario: s for s in scans}
