"""Seed stabilizer codes, shortened children and encoding states.

Qubit orderings are kept exactly as printed for each seed; they are chosen
so that logical representatives sit on blocks of neighbouring qubits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, NotFoundError, ParseError, VerificationError
from .pauli import (
    PauliOperator,
    SymplecticMatrix,
    commutes,
    eliminate_on,
    in_span,
    pauli_mul,
)

STEANE_GENERATORS = ("XIXIXIX", "XXIIIXX", "XIIXXXI", "ZIZIZIZ", "ZZIIIZZ", "ZIIZZZI")
STEANE_LOGICALS = ("IIXXXII", "IIZZZII")

QRM_GENERATORS = (
    "XIXIXIXIXIXIXIX", "XIIXXXXXXXIIIII", "XXXXXXIIIIIIIXX", "IIIIXXIIXXIXXXX",
    "ZIZIZIZIZIZIZIZ", "ZIIZZZZZZZIIIII", "ZZZZZZIIIIIIIZZ", "IIIIZZIIZZIZZZZ",
    "ZIZIIIZIIIZIIII", "ZIIZIIZZIIIIIII", "ZZZZIIIIIIIIIII", "ZIIIZIZIZIIIIII",
    "ZIZIZIIIIIIIIIZ", "ZIIZZZIIIIIIIII",
)
QRM_LOGICALS = ("IIIIIIXXXXXXXII", "IZIIIIIIIIIZIZI")

FIVE_QUBIT_GENERATORS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
FIVE_QUBIT_LOGICALS = ("XXXXX", "ZZZZZ")

# Physical-leg order used for Steane blocks so that transversal CX between
# adjacent blocks pairs qubits through the cube's rotation symmetry.
REFLECTED_STEANE_ORDER = (4, 1, 2, 0, 5, 3, 6)


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    name: str
    n: int
    k: int
    generators: SymplecticMatrix
    logical_x: tuple
    logical_z: tuple
    d: Optional[int] = None

    @classmethod
    def from_strings(cls, name, generators, logical_x, logical_z, d=None) -> "StabilizerCode":
        gens = SymplecticMatrix.from_strings(generators)
        lx = tuple(PauliOperator.from_string(s) for s in logical_x)
        lz = tuple(PauliOperator.from_string(s) for s in logical_z)
        return cls(name, gens.n, len(lx), gens, lx, lz, d)

    def __post_init__(self):
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise DimensionError(f"{self.name}: need {self.k} logical pairs")
        if self.generators.n != self.n:
            raise DimensionError(f"{self.name}: generator width {self.generators.n} != n={self.n}")

    @property
    def params(self) -> tuple:
        return (self.n, self.k, self.d)

    def logicals(self) -> list[PauliOperator]:
        """X-bar_0..X-bar_{k-1} followed by Z-bar_0..Z-bar_{k-1}."""
        return [*self.logical_x, *self.logical_z]

    def is_css(self) -> bool:
        return self.generators.is_css()

    def check(self) -> None:
        """Raise VerificationError if any stabilizer-code invariant fails."""
        gens = list(self.generators)
        for i, a in enumerate(gens):
            if not a.is_hermitian:
                raise VerificationError(f"{self.name}: generator {i} is not Hermitian")
            for j in range(i + 1, len(gens)):
                if not commutes(a, gens[j]):
                    raise VerificationError(f"{self.name}: generators {i},{j} anticommute")
        if self.generators.rank != self.n - self.k:
            raise VerificationError(f"{self.name}: rank {self.generators.rank} != n-k={self.n - self.k}")
        for i, (lx, lz) in enumerate(zip(self.logical_x, self.logical_z)):
            for g_idx, g in enumerate(gens):
                if not (commutes(lx, g) and commutes(lz, g)):
                    raise VerificationError(f"{self.name}: logical {i} anticommutes with generator {g_idx}")
            if commutes(lx, lz):
                raise VerificationError(f"{self.name}: X-bar_{i} commutes with Z-bar_{i}")
            for j in range(self.k):
                if j == i:
                    continue
                if not (commutes(lx, self.logical_z[j]) and commutes(lx, self.logical_x[j])
                        and commutes(lz, self.logical_z[j])):
                    raise VerificationError(f"{self.name}: logicals {i},{j} do not pair")
            for op in (lx, lz):
                if in_span(op, self.generators) is not None:
                    raise VerificationError(f"{self.name}: logical {op} lies in the stabilizer group")

    def stabilizer_elements(self):
        """Iterate over every element of the stabilizer group (2^(n-k) of them)."""
        gens = list(self.generators)
        cur = PauliOperator.identity(self.n)
        yield cur
        # Gray-code walk
        for i in range(1, 1 << len(gens)):
            flip = (i & -i).bit_length() - 1
            cur = pauli_mul(cur, gens[flip])
            yield cur

    def to_text(self) -> str:
        d = "?" if self.d is None else str(self.d)
        lines = [f"CODE {self.name} {self.n} {self.k} {d}"]
        lines += [f"S {p}" for p in self.generators]
        lines += [f"LX {i} {p}" for i, p in enumerate(self.logical_x)]
        lines += [f"LZ {i} {p}" for i, p in enumerate(self.logical_z)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StabilizerCode":
        header = None
        gens, lx, lz = [], {}, {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                tag = parts[0]
                if tag == "CODE":
                    header = (parts[1], int(parts[2]), int(parts[3]), None if parts[4] == "?" else int(parts[4]))
                elif tag == "S":
                    gens.append(PauliOperator.from_string(parts[1]))
                elif tag in ("LX", "LZ"):
                    (lx if tag == "LX" else lz)[int(parts[1])] = PauliOperator.from_string(parts[2])
                elif tag in ("LEG", "LEGMAP"):
                    continue
                else:
                    raise ParseError(f"unknown record {tag!r}")
            except ParseError as exc:
                raise ParseError(str(exc), line=lineno) from None
            except (IndexError, ValueError) as exc:
                raise ParseError(f"malformed record: {exc}", line=lineno) from None
        if header is None:
            raise ParseError("missing CODE header")
        name, n, k, d = header
        gm = SymplecticMatrix.from_paulis(gens, n)
        return cls(name, n, k, gm, tuple(lx[i] for i in range(k)), tuple(lz[i] for i in range(k)), d)


@dataclass(frozen=True, eq=False)
class EncodingState:
    """Stabilizer state on physical legs followed by logical legs."""

    total_legs: int
    stabilizers: SymplecticMatrix
    logical_leg_indices: tuple = field(default=())

    def check(self) -> None:
        if self.stabilizers.rank != self.total_legs or len(self.stabilizers) != self.total_legs:
            raise VerificationError(f"encoding state rank {self.stabilizers.rank} != {self.total_legs}")
        rows = list(self.stabilizers)
        for i, a in enumerate(rows):
            for b in rows[i + 1:]:
                if not commutes(a, b):
                    raise VerificationError("encoding state stabilizers anticommute")


def steane() -> StabilizerCode:
    return StabilizerCode.from_strings("steane", STEANE_GENERATORS, STEANE_LOGICALS[:1], STEANE_LOGICALS[1:], d=3)


def qrm() -> StabilizerCode:
    return StabilizerCode.from_strings("qrm", QRM_GENERATORS, QRM_LOGICALS[:1], QRM_LOGICALS[1:], d=3)


def five_qubit() -> StabilizerCode:
    return StabilizerCode.from_strings(
        "five_qubit", FIVE_QUBIT_GENERATORS, FIVE_QUBIT_LOGICALS[:1], FIVE_QUBIT_LOGICALS[1:], d=3
    )


_SEEDS = {"steane": steane, "qrm": qrm, "five_qubit": five_qubit}
_ALIASES = {"happy": "five_qubit", "513": "five_qubit", "5qubit": "five_qubit", "five": "five_qubit",
            "laflamme": "five_qubit", "reed_muller": "qrm"}


def seed_id(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in _SEEDS:
        raise NotFoundError(f"unknown seed code {name!r}; choose from {sorted(_SEEDS)}")
    return key


def seed(name: str) -> StabilizerCode:
    return _SEEDS[seed_id(name)]()


def to_encoding_state(code: StabilizerCode) -> EncodingState:
    """Choi state of the encoder: physical legs 0..n-1, logical legs n..n+k-1."""
    total = code.n + code.k
    rows = [g.tensor(PauliOperator.identity(code.k)) for g in code.generators]
    for i in range(code.k):
        rows.append(code.logical_x[i].tensor(PauliOperator.single(code.k, i, "X")))
        rows.append(code.logical_z[i].tensor(PauliOperator.single(code.k, i, "Z")))
    return EncodingState(total, SymplecticMatrix.from_paulis(rows, total), tuple(range(code.n, total)))


def code_from_state(state: EncodingState, logical_legs: Sequence[int], name: str = "code",
                    d: Optional[int] = None) -> StabilizerCode:
    """Read a code off a stabilizer state by treating ``logical_legs`` as inputs.

    Logical representatives are the state elements acting as a single X or Z
    on one logical leg; phases are preserved exactly.
    """
    logical_legs = list(logical_legs)
    phys = [j for j in range(state.total_legs) if j not in set(logical_legs)]
    pivots, rest = eliminate_on(list(state.stabilizers), logical_legs)
    if len(pivots) != 2 * len(logical_legs):
        raise VerificationError("state does not define an isometry from the chosen legs")
    gens = [p.restrict(phys) for p in rest if p.x or p.z]
    lx = tuple(pivots[(leg, "x")].restrict(phys) for leg in logical_legs)
    lz = tuple(pivots[(leg, "z")].restrict(phys) for leg in logical_legs)
    gm = SymplecticMatrix.from_paulis(gens, len(phys))
    return StabilizerCode(name, len(phys), len(logical_legs), gm, lx, lz, d)


def _rep_key(p: PauliOperator):
    return (p.weight, p.letters())


def min_weight_representative(op: PauliOperator, code: StabilizerCode) -> PauliOperator:
    """Lowest-weight element of op times the stabilizer group (ties: letter order)."""
    best = op
    for s in code.stabilizer_elements():
        cand = pauli_mul(op, s)
        if _rep_key(cand) < _rep_key(best):
            best = cand
    return best


def with_min_weight_logicals(code: StabilizerCode) -> StabilizerCode:
    lx = tuple(min_weight_representative(p, code) for p in code.logical_x)
    lz = tuple(min_weight_representative(p, code) for p in code.logical_z)
    return StabilizerCode(code.name, code.n, code.k, code.generators, lx, lz, code.d)


def shorten(code: StabilizerCode, leg: int = 0, minimal_logicals: bool = True) -> StabilizerCode:
    """Promote physical ``leg`` to a second logical input.

    Logical 0 keeps the original input; logical 1 is the promoted leg. The
    remaining physical legs keep their relative order.
    """
    if code.k != 1:
        raise DimensionError("shortening needs a single-logical code")
    if not 0 <= leg < code.n:
        raise DimensionError(f"leg {leg} out of range for n={code.n}")
    state = to_encoding_state(code)
    d = None if code.d is None else code.d - 1
    child = code_from_state(state, [code.n, leg], f"{code.name}_child{leg}", d)
    return with_min_weight_logicals(child) if minimal_logicals else child


def permute_code(code: StabilizerCode, order: Sequence[int], name: Optional[str] = None) -> StabilizerCode:
    """Relabel qubits: new qubit ``j`` is old qubit ``order[j]``."""
    if sorted(order) != list(range(code.n)):
        raise DimensionError("order must be a permutation")
    gens = SymplecticMatrix.from_paulis([p.restrict(order) for p in code.generators], code.n)
    return StabilizerCode(
        name or code.name, code.n, code.k, gens,
        tuple(p.restrict(order) for p in code.logical_x),
        tuple(p.restrict(order) for p in code.logical_z), code.d,
    )


def compute_distance(code: StabilizerCode, weight_cap: int = 3) -> tuple[int, bool]:
    """Smallest weight of a nontrivial logical operator, searched up to ``weight_cap``.

    Returns ``(d, True)`` when found, else ``(weight_cap + 1, False)`` meaning
    the distance is at least that value.
    """
    if weight_cap < 1:
        raise ValueError("weight_cap must be >= 1")
    gens = list(code.generators)
    logs = code.logicals()
    m = len(gens)
    # per (qubit, letter): syndrome bits then logical-commutation bits
    vec = np.zeros((code.n, 3), dtype=object)
    for q in range(code.n):
        for li, letter in enumerate("XYZ"):
            p = PauliOperator.single(code.n, q, letter)
            v = 0
            for j, g in enumerate(gens):
                v |= (not commutes(p, g)) << j
            for j, lop in enumerate(logs):
                v |= (not commutes(p, lop)) << (m + j)
            vec[q, li] = v
    syn_mask = (1 << m) - 1
    for w in range(1, min(weight_cap, code.n) + 1):
        for qubits in itertools.combinations(range(code.n), w):
            rows = [vec[q] for q in qubits]
            for letters in itertools.product(range(3), repeat=w):
                v = 0
                for r, li in zip(rows, letters):
                    v ^= r[li]
                if v and not (v & syn_mask):
                    return w, True
    return weight_cap + 1, False
