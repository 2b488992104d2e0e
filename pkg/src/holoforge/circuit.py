"""Gate lists, Clifford conjugation of Paulis and a dense statevector simulator.

Qubit ``j`` is bit ``j`` of a basis-state index. A circuit lists gates in
time order; ``conjugate`` returns ``U P U^dagger`` for the whole circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, ParseError, UnsupportedGateError
from .pauli import PauliOperator

STATEVECTOR_CAP = 16

ARITY = {
    "I": 1, "X": 1, "Y": 1, "Z": 1, "H": 1, "S": 1, "SDG": 1, "T": 1, "TDG": 1, "SH": 1,
    "CX": 2, "CZ": 2, "CCZ": 3,
}
CLIFFORD = frozenset({"I", "X", "Y", "Z", "H", "S", "SDG", "SH", "CX", "CZ"})
_ALIASES = {"S†": "SDG", "T†": "TDG", "SDAG": "SDG", "TDAG": "TDG", "CNOT": "CX", "ID": "I"}
_INVERSE = {"S": "SDG", "SDG": "S", "T": "TDG", "TDG": "T"}

_SQ = np.sqrt(0.5)
_W8 = np.exp(1j * np.pi / 4)
_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "H": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "T": np.diag([1, _W8]),
    "TDG": np.diag([1, np.conj(_W8)]),
}
_MATRICES["SH"] = _MATRICES["S"] @ _MATRICES["H"]


def canonical_gate(name: str) -> str:
    g = name.strip()
    g = _ALIASES.get(g, g).upper()
    g = _ALIASES.get(g, g)
    if g not in ARITY:
        raise UnsupportedGateError(f"unknown gate {name!r}")
    return g


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()
    stage_marks: tuple = field(default=())

    def __post_init__(self):
        norm = []
        for g in self.gates:
            name, qubits = canonical_gate(g[0]), g[1]
            qubits = (int(qubits),) if isinstance(qubits, (int, np.integer)) else tuple(int(q) for q in qubits)
            if len(qubits) != ARITY[name]:
                raise DimensionError(f"{name} takes {ARITY[name]} qubits, got {qubits}")
            if any(q < 0 or q >= self.n for q in qubits):
                raise DimensionError(f"{name}{qubits} out of range for {self.n} qubits")
            if len(set(qubits)) != len(qubits):
                raise DimensionError(f"{name}{qubits} repeats a qubit")
            norm.append((name, qubits))
        object.__setattr__(self, "gates", tuple(norm))
        marks = tuple(self.stage_marks)
        if any(b <= a for a, b in zip(marks, marks[1:])) or any(m < 0 or m > len(norm) for m in marks):
            raise ValueError(f"bad stage marks {marks}")
        object.__setattr__(self, "stage_marks", marks)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise DimensionError("circuit widths differ")
        off = len(self.gates)
        return Circuit(self.n, self.gates + other.gates, self.stage_marks + tuple(m + off for m in other.stage_marks))

    def is_clifford(self) -> bool:
        return all(g in CLIFFORD for g, _ in self.gates)

    def count(self, name: str) -> int:
        name = canonical_gate(name)
        return sum(g == name for g, _ in self.gates)

    def gate_names(self) -> set[str]:
        return {g for g, _ in self.gates}

    def support(self) -> set[int]:
        return {q for _, qs in self.gates for q in qs}

    def inverse(self) -> "Circuit":
        out = []
        for g, qs in reversed(self.gates):
            if g == "SH":
                out += [("SDG", qs), ("H", qs)]
            else:
                out.append((_INVERSE.get(g, g), qs))
        return Circuit(self.n, tuple(out))

    def stages(self) -> list["Circuit"]:
        """Split at the stage marks."""
        cuts = [0, *self.stage_marks, len(self.gates)]
        return [Circuit(self.n, self.gates[a:b]) for a, b in zip(cuts, cuts[1:]) if b > a or a == 0]

    def remap(self, mapping: Sequence[int], n: int | None = None) -> "Circuit":
        """Rename qubit ``j`` to ``mapping[j]`` on an ``n``-qubit register."""
        n = self.n if n is None else n
        return Circuit(n, tuple((g, tuple(mapping[q] for q in qs)) for g, qs in self.gates), self.stage_marks)

    def to_text(self) -> str:
        lines = []
        marks = set(self.stage_marks)
        for i, (g, qs) in enumerate(self.gates):
            if i in marks:
                lines.append("---")
            lines.append(" ".join([g, *map(str, qs)]))
        if len(self.gates) in marks:
            lines.append("---")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "Circuit":
        gates, marks = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line == "---":
                marks.append(len(gates))
                continue
            parts = line.split()
            try:
                name = canonical_gate(parts[0])
                qubits = tuple(int(t) for t in parts[1:])
            except (UnsupportedGateError, ValueError) as exc:
                raise ParseError(str(exc), line=lineno) from None
            if len(qubits) != ARITY[name]:
                raise ParseError(f"{name} needs {ARITY[name]} qubit indices", line=lineno)
            gates.append((name, qubits))
        if n is None:
            n = 1 + max((q for _, qs in gates for q in qs), default=-1)
        return cls(n, tuple(gates), tuple(dict.fromkeys(marks)))


def single_layer(n: int, gate: str, qubits: Iterable[int] | None = None) -> Circuit:
    qubits = range(n) if qubits is None else qubits
    return Circuit(n, tuple((gate, (q,)) for q in qubits))


# -- Heisenberg picture -----------------------------------------------------


def _conj_gate(x: int, z: int, e: int, g: str, qs: tuple) -> tuple[int, int, int]:
    q = qs[0]
    b = 1 << q
    xq = (x >> q) & 1
    zq = (z >> q) & 1
    if g == "I":
        pass
    elif g == "X":
        e += 2 * zq
    elif g == "Z":
        e += 2 * xq
    elif g == "Y":
        e += 2 * (xq ^ zq)
    elif g == "H":
        e += 2 * (xq & zq)
        x = (x & ~b) | (zq << q)
        z = (z & ~b) | (xq << q)
    elif g in ("S", "SDG"):
        if xq:
            z ^= b
            e += 1 if g == "S" else 3
    elif g == "SH":
        x, z, e = _conj_gate(x, z, e, "H", qs)
        x, z, e = _conj_gate(x, z, e, "S", qs)
    elif g == "CX":
        c, t = qs
        x ^= ((x >> c) & 1) << t
        z ^= ((z >> t) & 1) << c
    elif g == "CZ":
        a, t = qs
        xa, xt = (x >> a) & 1, (x >> t) & 1
        e += 2 * (xa & xt)
        z ^= (xa << t) | (xt << a)
    else:
        raise UnsupportedGateError(f"{g} is not Clifford")
    return x, z, e


def conjugate(p: PauliOperator, c: Circuit) -> PauliOperator:
    """Return ``U p U^dagger`` where ``U`` is the circuit unitary."""
    if p.n != c.n:
        raise DimensionError(f"Pauli on {p.n} qubits, circuit on {c.n}")
    bad = c.gate_names() - CLIFFORD
    if bad:
        raise UnsupportedGateError(f"non-Clifford gates {sorted(bad)}")
    x, z, e = p.x, p.z, p.exp
    for g, qs in c.gates:
        x, z, e = _conj_gate(x, z, e, g, qs)
    return PauliOperator(p.n, x, z, e)


# -- dense statevector ------------------------------------------------------


def _check_cap(n: int):
    if n > STATEVECTOR_CAP:
        raise CapacityError(f"statevector limited to {STATEVECTOR_CAP} qubits, got {n}")


def apply_gate(state: np.ndarray, n: int, g: str, qs: tuple) -> np.ndarray:
    """Apply one gate in place when possible; returns the state."""
    if g in _MATRICES:
        q = qs[0]
        m = _MATRICES[g]
        if g in ("Z", "S", "SDG", "T", "TDG"):
            idx = np.arange(state.size)
            state[((idx >> q) & 1) == 1] *= m[1, 1]
            return state
        v = state.reshape(-1, 2, 1 << q)
        a0, a1 = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
        v[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1
        return state
    idx = np.arange(state.size)
    if g == "CX":
        c, t = qs
        sel = idx[(((idx >> c) & 1) == 1) & (((idx >> t) & 1) == 0)]
        partner = sel | (1 << t)
        state[sel], state[partner] = state[partner].copy(), state[sel].copy()
    elif g == "CZ":
        mask = (1 << qs[0]) | (1 << qs[1])
        state[(idx & mask) == mask] *= -1
    elif g == "CCZ":
        mask = (1 << qs[0]) | (1 << qs[1]) | (1 << qs[2])
        state[(idx & mask) == mask] *= -1
    else:
        raise UnsupportedGateError(g)
    return state


def simulate(c: Circuit, input_state: np.ndarray) -> np.ndarray:
    _check_cap(c.n)
    state = np.array(input_state, dtype=complex).reshape(-1)
    if state.size != 1 << c.n:
        raise DimensionError(f"state has {state.size} amplitudes, need {1 << c.n}")
    for g, qs in c.gates:
        apply_gate(state, c.n, g, qs)
    return state


def unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of the circuit (column j is the image of basis state j)."""
    _check_cap(c.n)
    dim = 1 << c.n
    cols = [simulate(c, np.eye(dim, dtype=complex)[:, j]) for j in range(dim)]
    return np.array(cols).T


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Dense matrix of ``p`` in the qubit-j-is-bit-j basis ordering."""
    _check_cap(p.n)
    out = np.array([[1.0 + 0j]])
    # kron puts the first factor on the most significant bit
    for q in reversed(range(p.n)):
        xq, zq = (p.x >> q) & 1, (p.z >> q) & 1
        m = _MATRICES["I"]
        if xq:
            m = _MATRICES["X"] @ m
        if zq:
            m = m @ _MATRICES["Z"]
        out = np.kron(out, m)
    return (1j ** p.exp) * out


def basis_state(n: int, index: int) -> np.ndarray:
    _check_cap(n)
    v = np.zeros(1 << n, dtype=complex)
    v[index] = 1
    return v


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Equality up to a global phase."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return na < tol and nb < tol
    return abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) < tol and abs(na - nb) < tol * max(1.0, na)


def apply_pauli(state: np.ndarray, p: PauliOperator) -> np.ndarray:
    """Return ``p |state>`` without building the dense operator."""
    if state.size != 1 << p.n:
        raise DimensionError(f"state has {state.size} amplitudes, need {1 << p.n}")
    idx = np.arange(state.size)
    parity = np.zeros(state.size, dtype=np.int64)
    z = p.z
    while z:
        q = (z & -z).bit_length() - 1
        parity ^= (idx >> q) & 1
        z &= z - 1
    out = np.empty_like(state, dtype=complex)
    out[idx ^ p.x] = (1j ** p.exp) * (1 - 2 * parity) * state
    return out
