"""Global codes of holographic networks by layer-wise operator pushing.

Every vertex of the tiling carries a seed encoder. An ``a`` vertex uses the
seed itself (its logical leg is the parent leg); a ``b`` vertex uses the
shortened child, whose two logical inputs are the parent legs. Building
outward from the centre, each current physical Pauli is replaced by the
matching logical representative of the child that absorbs it, and every
child contributes its own stabilizers. The result is the code of the whole
network with generators kept in this layered (local) form.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .errors import CapacityError, ContractionError, ParseError, VerificationError
from .pauli import PauliOperator, SymplecticMatrix, pauli_mul
from .seeds import (
    REFLECTED_STEANE_ORDER,
    EncodingState,
    StabilizerCode,
    compute_distance,
    permute_code,
    seed,
    seed_id,
    shorten,
)
from .tiling import A, B, CENTER, TilingLayout, build_layout, physical_sequence

DEFAULT_CAP = 20000
LEG_ORDERINGS = ("paper_default", "reflected_steane")


def build_cap() -> int:
    raw = os.environ.get("HOLOFORGE_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"HOLOFORGE_CAP must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class HeteroCodeSpec:
    seed_center: str
    seed_alternate: str
    layers: int = 1
    black_hole: bool = False
    leg_ordering: str = "paper_default"
    mode: str = "holographic"

    def __post_init__(self):
        object.__setattr__(self, "seed_center", seed_id(self.seed_center))
        object.__setattr__(self, "seed_alternate", seed_id(self.seed_alternate))
        if self.layers < 0:
            raise ValueError("layers must be >= 0")
        if self.leg_ordering not in LEG_ORDERINGS:
            raise ValueError(f"leg_ordering must be one of {LEG_ORDERINGS}")
        if self.black_hole and self.layers < 1:
            raise ValueError("a black-hole build needs at least one layer")

    @property
    def label(self) -> str:
        short = {"steane": "Steane", "qrm": "QRM", "five_qubit": "HaPPY"}
        tag = f"{short[self.seed_center]}/{short[self.seed_alternate]}"
        return tag + ("-bh" if self.black_hole else "") + (f"-{self.mode}" if self.mode != "holographic" else "")

    @property
    def degrees(self) -> tuple[int, int]:
        return seed(self.seed_center).n + 1, seed(self.seed_alternate).n + 1

    def expected_n(self) -> int:
        q1, q2 = self.degrees
        return physical_sequence(q1, q2, self.layers, self.mode)[-1]

    @classmethod
    def from_json(cls, text: str) -> "HeteroCodeSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno) from None
        if not isinstance(data, dict):
            raise ParseError("spec must be a JSON object", line=1)
        try:
            return cls(
                data["center"],
                data["alternate"],
                int(data.get("layers", 1)),
                bool(data.get("black_hole", False)),
                data.get("leg_ordering", "paper_default"),
                data.get("mode", "holographic"),
            )
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps({
            "center": self.seed_center, "alternate": self.seed_alternate, "layers": self.layers,
            "black_hole": self.black_hole, "leg_ordering": self.leg_ordering, "mode": self.mode,
        })


@dataclass(frozen=True)
class PushTable:
    """Images of every logical Pauli pattern on one tensor's open legs."""

    code: StabilizerCode
    images: tuple  # pattern index -> (x, z, exp); pattern bits x1 z1 [x2 z2]

    @property
    def n(self) -> int:
        return self.code.n


def _push_table(code: StabilizerCode) -> PushTable:
    ops = []
    for i in range(code.k):
        ops += [code.logical_x[i], code.logical_z[i]]
    images = []
    for pattern in range(1 << len(ops)):
        acc = PauliOperator.identity(code.n)
        for bit, op in enumerate(ops):
            if (pattern >> bit) & 1:
                acc = pauli_mul(acc, op)
        images.append((acc.x, acc.z, acc.exp))
    return PushTable(code, tuple(images))


@lru_cache(maxsize=None)
def tensor_codes(seed_name: str, leg_ordering: str = "paper_default") -> tuple[PushTable, PushTable]:
    """Push tables for the ``a`` (seed) and ``b`` (child) tensors of one seed."""
    code = seed(seed_name)
    if leg_ordering == "reflected_steane" and code.name == "steane":
        code = permute_code(code, REFLECTED_STEANE_ORDER, "steane_reflected")
    child = shorten(code, 0)
    return _push_table(code), _push_table(child)


def identity_code(n: int) -> StabilizerCode:
    return StabilizerCode(
        f"identity{n}", n, n, SymplecticMatrix.empty(n),
        tuple(PauliOperator.single(n, i, "X") for i in range(n)),
        tuple(PauliOperator.single(n, i, "Z") for i in range(n)), 1,
    )


@dataclass(frozen=True, eq=False)
class AssembledCode:
    code: StabilizerCode
    layout: TilingLayout
    leg_map: tuple  # physical qubit -> (layer vertex, open leg)
    logical_map: dict
    spec: Optional[HeteroCodeSpec] = None
    block_of: tuple = field(default=())  # physical qubit -> outer vertex index

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    def to_text(self) -> str:
        lines = [self.code.to_text().rstrip("\n")]
        lines += [f"LEG {q} {v} {leg}" for q, (v, leg) in enumerate(self.leg_map)]
        return "\n".join(lines) + "\n"


Row = tuple  # (x, z, exp) on Python-int bitsets


def _push_rows(rows: list, owner: list, tables: list, offsets: list, n_new: int) -> list:
    """Push rows through one layer of child tensors.

    ``owner[q] = (child, slot)``: old qubit q feeds logical ``slot`` of child.
    """
    out = []
    for x, z, e in rows:
        patterns: dict = {}
        sup = x | z
        while sup:
            low = sup & -sup
            q = low.bit_length() - 1
            sup ^= low
            child, slot = owner[q]
            bits = (((x >> q) & 1) | (((z >> q) & 1) << 1)) << (2 * slot)
            patterns[child] = patterns.get(child, 0) | bits
        nx = nz = 0
        ne = e
        for child, pat in patterns.items():
            cx, cz, ce = tables[child].images[pat]
            off = offsets[child]
            nx |= cx << off
            nz |= cz << off
            ne += ce
        out.append((nx, nz, ne % 4))
    return out


def _rows_to_code(name, n, gens, lx, lz, d=None) -> StabilizerCode:
    gm = SymplecticMatrix.from_paulis([PauliOperator(n, x, z, e) for x, z, e in gens], n)
    return StabilizerCode(
        name, n, len(lx), gm,
        tuple(PauliOperator(n, x, z, e) for x, z, e in lx),
        tuple(PauliOperator(n, x, z, e) for x, z, e in lz), d,
    )


def assemble(spec: HeteroCodeSpec, cap: Optional[int] = None) -> AssembledCode:
    cap = build_cap() if cap is None else cap
    expected = spec.expected_n()
    if expected > cap:
        raise CapacityError(f"{spec.label} at {spec.layers} layers has n={expected} > cap {cap}")
    q1, q2 = spec.degrees
    layout = build_layout(q1, q2, spec.layers, spec.mode)
    seeds_by_type = {1: spec.seed_center, 2: spec.seed_alternate}

    center = seed(spec.seed_center)
    if spec.leg_ordering == "reflected_steane" and center.name == "steane":
        center = permute_code(center, REFLECTED_STEANE_ORDER, "steane_reflected")
    if spec.black_hole:
        center = identity_code(center.n)
    n = center.n
    gens = [(p.x, p.z, p.exp) for p in center.generators]
    lx = [(p.x, p.z, p.exp) for p in center.logical_x]
    lz = [(p.x, p.z, p.exp) for p in center.logical_z]
    # qubit index of each (vertex, open leg) in the current outer layer
    qubit_of = {(0, j): j for j in range(n)}
    block_of = [0] * n

    for layer in range(1, spec.layers + 1):
        lay = layout.layers[layer]
        a_table, b_table = tensor_codes(seeds_by_type[lay.seed_type], spec.leg_ordering)
        tables, offsets = [], []
        owner = [None] * n
        new_qubit_of = {}
        new_block_of = []
        off = 0
        for v, (kind, parents) in enumerate(zip(lay.kinds, lay.parents)):
            table = a_table if kind == A else b_table
            tables.append(table)
            offsets.append(off)
            for slot, parent in enumerate(parents):
                owner[qubit_of[parent]] = (v, slot)
            for leg in range(table.n):
                new_qubit_of[(v, leg)] = off + leg
            new_block_of += [v] * table.n
            off += table.n
        if any(o is None for o in owner):
            raise VerificationError(f"layer {layer}: some qubits feed no child tensor")
        gens = _push_rows(gens, owner, tables, offsets, off)
        lx = _push_rows(lx, owner, tables, offsets, off)
        lz = _push_rows(lz, owner, tables, offsets, off)
        for table, o in zip(tables, offsets):
            gens += [(p.x << o, p.z << o, p.exp) for p in table.code.generators]
        n = off
        qubit_of = new_qubit_of
        block_of = new_block_of

    leg_map = tuple(sorted(qubit_of, key=qubit_of.get))
    logical_map = {("center", j): j for j in range(len(lx))}
    code = _rows_to_code(spec.label + f"-L{spec.layers}", n, gens, lx, lz)
    return AssembledCode(code, layout, leg_map, logical_map, spec, tuple(block_of))


def black_hole(spec: HeteroCodeSpec, cap: Optional[int] = None) -> AssembledCode:
    if not spec.black_hole:
        spec = HeteroCodeSpec(spec.seed_center, spec.seed_alternate, spec.layers, True, spec.leg_ordering, spec.mode)
    return assemble(spec, cap)


# -- generic contraction (reference path) ----------------------------------


def combine_states(a: EncodingState, b: EncodingState) -> EncodingState:
    rows = [p.tensor(PauliOperator.identity(b.total_legs)) for p in a.stabilizers]
    rows += [PauliOperator.identity(a.total_legs).tensor(p) for p in b.stabilizers]
    total = a.total_legs + b.total_legs
    logical = tuple(a.logical_leg_indices) + tuple(a.total_legs + i for i in b.logical_leg_indices)
    return EncodingState(total, SymplecticMatrix.from_paulis(rows, total), logical)


def self_contract(state: EncodingState, pairs: Sequence[tuple[int, int]]) -> EncodingState:
    """Bell-match each pair of legs of one state and drop them."""
    legs = [leg for pair in pairs for leg in pair]
    if len(set(legs)) != len(legs) or any(not 0 <= leg < state.total_legs for leg in legs):
        raise ContractionError(f"contracted legs must be distinct and in range: {pairs}")
    work = list(state.stabilizers)
    for u, v in pairs:
        for kind in ("x", "z"):
            def diff(p, u=u, v=v, kind=kind):
                bits = p.x if kind == "x" else p.z
                return ((bits >> u) ^ (bits >> v)) & 1

            idx = next((i for i, p in enumerate(work) if diff(p)), None)
            if idx is None:
                continue
            piv = work.pop(idx)
            work = [pauli_mul(p, piv) if diff(p) else p for p in work]
    keep = [j for j in range(state.total_legs) if j not in set(legs)]
    out = []
    for p in work:
        # matched pairs contribute XX and ZZ factors with +1 on the Bell pair
        r = PauliOperator.from_bits(
            [(p.x >> j) & 1 for j in keep], [(p.z >> j) & 1 for j in keep], 0
        )
        r = PauliOperator(r.n, r.x, r.z, p.exp)
        if r.x == 0 and r.z == 0:
            if r.exp != 0:
                raise ContractionError("contraction forces -I (or a non-Hermitian phase) into the group")
            continue
        out.append(r)
    result = SymplecticMatrix.from_paulis(out, len(keep))
    if result.rank != len(keep):
        raise ContractionError(f"contraction is not isometric: rank {result.rank} on {len(keep)} legs")
    logical = tuple(keep.index(j) for j in state.logical_leg_indices if j in keep)
    reduced = SymplecticMatrix.from_paulis(_independent_rows(result), len(keep))
    return EncodingState(len(keep), reduced, logical)


def _independent_rows(m: SymplecticMatrix) -> list:
    rows, acc = [], SymplecticMatrix.empty(m.n)
    for p in m:
        trial = acc.vstack(SymplecticMatrix.from_paulis([p], m.n))
        if trial.rank > acc.rank:
            rows.append(p)
            acc = trial
    return rows


def contract_legs(a: EncodingState, b: EncodingState, pairs: Sequence[tuple[int, int]]) -> EncodingState:
    """Contract leg ``la`` of ``a`` with leg ``lb`` of ``b`` for each pair."""
    for la, lb in pairs:
        if not (0 <= la < a.total_legs and 0 <= lb < b.total_legs):
            raise ContractionError(f"leg pair {(la, lb)} out of range")
    joint = combine_states(a, b)
    return self_contract(joint, [(la, a.total_legs + lb) for la, lb in pairs])


def assemble_by_contraction(spec: HeteroCodeSpec) -> StabilizerCode:
    """Reference build: contract seed encoding states edge by edge.

    Slow (dense Pauli elimination); meant for cross-checking ``assemble`` on
    small networks. Zero-rate builds only.
    """
    from .seeds import code_from_state, to_encoding_state

    if spec.black_hole:
        raise ValueError("reference contraction covers zero-rate builds only")
    q1, q2 = spec.degrees
    layout = build_layout(q1, q2, spec.layers, spec.mode)

    def encoder(name):
        code = seed(name)
        if spec.leg_ordering == "reflected_steane" and code.name == "steane":
            code = permute_code(code, REFLECTED_STEANE_ORDER)
        return code, to_encoding_state(code)

    center, state = encoder(spec.seed_center)
    # current leg index of each open leg (vertex, leg) in the outer layer
    legs = {(0, j): j for j in range(center.n)}
    logical_leg = center.n
    seeds_by_type = {1: spec.seed_center, 2: spec.seed_alternate}
    for layer in range(1, spec.layers + 1):
        lay = layout.layers[layer]
        code, child_state = encoder(seeds_by_type[lay.seed_type])
        new_legs = {}
        for v, (kind, parents) in enumerate(zip(lay.kinds, lay.parents)):
            base = state.total_legs
            parent_slots = [code.n] if kind == A else [code.n, 0]
            opens = [j for j in range(code.n) if j not in parent_slots]
            pairs = [(legs[p], base + slot) for p, slot in zip(parents, parent_slots)]
            joint = combine_states(state, child_state)
            dropped = sorted(i for pr in pairs for i in pr)
            remap = {}
            for old in range(joint.total_legs):
                if old not in dropped:
                    remap[old] = len(remap)
            state = self_contract(joint, pairs)
            legs = {key: remap[i] for key, i in legs.items() if i in remap}
            new_legs = {key: remap[i] for key, i in new_legs.items() if i in remap}
            for leg, j in enumerate(opens):
                new_legs[(v, leg)] = remap[base + j]
            logical_leg = remap[logical_leg]
        legs = new_legs
    order = [legs[key] for key in sorted(legs, key=lambda k: (k[0], k[1]))]
    full = code_from_state(state, [logical_leg], spec.label)
    # put physical qubits in the same (vertex, leg) order as ``assemble``
    phys = [j for j in range(state.total_legs) if j != logical_leg]
    pos = [phys.index(j) for j in order]
    return permute_code(full, pos)


__all__ = [
    "AssembledCode", "HeteroCodeSpec", "PushTable", "assemble", "assemble_by_contraction", "black_hole", "build_cap",
    "combine_states", "compute_distance", "contract_legs", "identity_code", "self_contract",
    "tensor_codes",
]
