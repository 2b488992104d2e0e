"""Phased Pauli operators and symplectic GF(2) matrices.

Convention: Y = iXZ. Internally an operator is stored as ``i**exp * X^x Z^z``
with the X factor to the left on every qubit, and ``x``/``z`` are Python
integers used as packed bitsets (qubit ``j`` is bit ``j``). The printed
phase is the coefficient in front of the I/X/Y/Z letter string, so
``"-iY"`` and ``-1 * X Z`` are the same operator.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import rref_inplace
from .errors import DimensionError, ParseError

_PHASE_PREFIX = {0: "+", 1: "i", 2: "-", 3: "-i"}
_PREFIX_EXP = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_VALUE = (1, 1j, -1, -1j)


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """An n-qubit Pauli operator with a phase in {+1, +i, -1, -i}."""

    n: int
    x: int = 0
    z: int = 0
    exp: int = 0

    def __post_init__(self):
        if self.x >> self.n or self.z >> self.n:
            raise DimensionError(f"bits exceed {self.n} qubits")
        object.__setattr__(self, "exp", self.exp % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse ``[+|-|i|-i]<IXYZ...>``."""
        s = text.strip()
        i = 0
        while i < len(s) and s[i] not in "IXYZ":
            i += 1
        prefix, body = s[:i], s[i:]
        if prefix not in _PREFIX_EXP or not body or set(body) - set("IXYZ"):
            raise ParseError(f"bad Pauli string {text!r}")
        x = z = 0
        ny = 0
        for j, c in enumerate(body):
            if c in "XY":
                x |= 1 << j
            if c in "ZY":
                z |= 1 << j
            ny += c == "Y"
        return cls(len(body), x, z, _PREFIX_EXP[prefix] + ny)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        body = ["I"] * n
        body[qubit] = letter
        return cls.from_string("".join(body))

    @classmethod
    def from_bits(cls, xbits, zbits, phase_exp: int = 0) -> "PauliOperator":
        """Build from 0/1 sequences; ``phase_exp`` is the letter-string phase."""
        xbits = [int(b) & 1 for b in xbits]
        zbits = [int(b) & 1 for b in zbits]
        if len(xbits) != len(zbits):
            raise DimensionError("x and z lengths differ")
        x = sum(b << j for j, b in enumerate(xbits))
        z = sum(b << j for j, b in enumerate(zbits))
        return cls(len(xbits), x, z, phase_exp + _popcount(x & z))

    @property
    def phase_exp(self) -> int:
        """Power of i in front of the letter string."""
        return (self.exp - _popcount(self.x & self.z)) % 4

    @property
    def phase(self) -> complex:
        return _PHASE_VALUE[self.phase_exp]

    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> j) & 1 for j in range(self.n)], dtype=np.uint8)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> j) & 1 for j in range(self.n)], dtype=np.uint8)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [j for j in range(self.n) if (s >> j) & 1]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def is_identity_up_to_phase(self) -> bool:
        return self.x == 0 and self.z == 0

    def letters(self) -> str:
        return "".join("IXZY"[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)] for j in range(self.n))

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.letters()

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.exp + 2)

    def times_phase(self, k: int) -> "PauliOperator":
        """Multiply by ``i**k``."""
        return PauliOperator(self.n, self.x, self.z, self.exp + k)

    def unsigned(self) -> "PauliOperator":
        """Same letters with phase +1."""
        return PauliOperator(self.n, self.x, self.z, _popcount(self.x & self.z))

    def same_bits(self, other: "PauliOperator") -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def restrict(self, qubits: Sequence[int]) -> "PauliOperator":
        """Letters on ``qubits`` (in that order); phase kept on the letter string."""
        xb = [(self.x >> q) & 1 for q in qubits]
        zb = [(self.z >> q) & 1 for q in qubits]
        return PauliOperator.from_bits(xb, zb, self.phase_exp)

    def embed(self, n: int, qubits: Sequence[int]) -> "PauliOperator":
        """Place this operator on ``qubits`` of an n-qubit register."""
        if len(qubits) != self.n:
            raise DimensionError("embedding size mismatch")
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> j) & 1) << q
            z |= ((self.z >> j) & 1) << q
        return PauliOperator(n, x, z, self.exp)

    def tensor(self, other: "PauliOperator") -> "PauliOperator":
        return PauliOperator(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.exp + other.exp,
        )


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Group product ``a b`` with exact phase."""
    if a.n != b.n:
        raise DimensionError(f"cannot multiply {a.n}- and {b.n}-qubit Paulis")
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, a.exp + b.exp + 2 * _popcount(a.z & b.x))


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    if a.n != b.n:
        raise DimensionError(f"cannot compare {a.n}- and {b.n}-qubit Paulis")
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def product(ops: Iterable[PauliOperator], n: Optional[int] = None) -> PauliOperator:
    """Ordered product of ``ops`` (identity when empty)."""
    ops = list(ops)
    if not ops:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliOperator.identity(n)
    return functools.reduce(pauli_mul, ops)


# -- packing helpers --------------------------------------------------------


def n_words(nbits: int) -> int:
    return max(1, (nbits + 63) // 64)


def int_to_words(v: int, words: int) -> np.ndarray:
    return np.frombuffer(v.to_bytes(8 * words, "little"), dtype="<u8").astype(np.uint64)


def words_to_int(a: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(a, dtype="<u8").tobytes(), "little")


def pack_bool_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, nbits) 0/1 array into (rows, words) uint64, bit j of word j//64."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, nbits = bits.shape
    w = n_words(nbits)
    padded = np.zeros((rows, w * 64), dtype=np.uint8)
    padded[:, :nbits] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64).reshape(rows, w)


def unpack_rows(packed: np.ndarray, nbits: int) -> np.ndarray:
    p = np.ascontiguousarray(packed, dtype="<u8")
    as_bytes = p.view(np.uint8).reshape(p.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :nbits]


class SymplecticMatrix:
    """Rows of Pauli operators stored as packed (x | z) words plus phases.

    Instances are treated as immutable; ``rank`` is computed lazily.
    """

    __slots__ = ("n", "xs", "zs", "exps", "_rows", "_rank")

    def __init__(self, n: int, xs: np.ndarray, zs: np.ndarray, exps: np.ndarray):
        self.n = n
        self.xs = np.ascontiguousarray(xs, dtype=np.uint64).reshape(-1, n_words(n))
        self.zs = np.ascontiguousarray(zs, dtype=np.uint64).reshape(-1, n_words(n))
        self.exps = np.ascontiguousarray(exps, dtype=np.int64).reshape(-1) % 4
        self.xs.setflags(write=False)
        self.zs.setflags(write=False)
        self.exps.setflags(write=False)
        self._rows = None
        self._rank = None

    @classmethod
    def from_paulis(cls, paulis: Sequence[PauliOperator], n: Optional[int] = None) -> "SymplecticMatrix":
        paulis = list(paulis)
        if n is None:
            if not paulis:
                raise ValueError("empty matrix needs n")
            n = paulis[0].n
        w = n_words(n)
        xs = np.zeros((len(paulis), w), dtype=np.uint64)
        zs = np.zeros((len(paulis), w), dtype=np.uint64)
        exps = np.zeros(len(paulis), dtype=np.int64)
        for i, p in enumerate(paulis):
            if p.n != n:
                raise DimensionError(f"row {i} has {p.n} qubits, expected {n}")
            xs[i] = int_to_words(p.x, w)
            zs[i] = int_to_words(p.z, w)
            exps[i] = p.exp
        m = cls(n, xs, zs, exps)
        m._rows = tuple(paulis)
        return m

    @classmethod
    def from_strings(cls, strings: Iterable[str]) -> "SymplecticMatrix":
        return cls.from_paulis([PauliOperator.from_string(s) for s in strings])

    @classmethod
    def from_bool(cls, xbits: np.ndarray, zbits: np.ndarray, exps=None) -> "SymplecticMatrix":
        xbits = np.asarray(xbits)
        n = xbits.shape[1]
        if exps is None:
            exps = np.zeros(xbits.shape[0], dtype=np.int64)
        return cls(n, pack_bool_rows(xbits), pack_bool_rows(zbits), exps)

    @classmethod
    def empty(cls, n: int) -> "SymplecticMatrix":
        w = n_words(n)
        return cls(n, np.zeros((0, w), np.uint64), np.zeros((0, w), np.uint64), np.zeros(0, np.int64))

    def __len__(self) -> int:
        return self.xs.shape[0]

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i) -> PauliOperator:
        return self.rows[i]

    @property
    def rows(self) -> tuple[PauliOperator, ...]:
        if self._rows is None:
            self._rows = tuple(
                PauliOperator(self.n, words_to_int(self.xs[i]), words_to_int(self.zs[i]), int(self.exps[i]))
                for i in range(len(self))
            )
        return self._rows

    @property
    def words(self) -> int:
        return self.xs.shape[1]

    def x_part(self) -> np.ndarray:
        return unpack_rows(self.xs, self.n)

    def z_part(self) -> np.ndarray:
        return unpack_rows(self.zs, self.n)

    def stacked(self) -> np.ndarray:
        return np.hstack([self.xs, self.zs])

    @property
    def rank(self) -> int:
        if self._rank is None:
            mat = self.stacked().copy()
            piv = rref_inplace(mat, self.words, 2 * self.words, np.zeros(len(self), np.int64), False)
            self._rank = len(piv)
        return self._rank

    def vstack(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        if other.n != self.n:
            raise DimensionError("column counts differ")
        return SymplecticMatrix(
            self.n,
            np.vstack([self.xs, other.xs]),
            np.vstack([self.zs, other.zs]),
            np.concatenate([self.exps, other.exps]),
        )

    def is_css(self) -> bool:
        """True when every row is purely X-type or purely Z-type."""
        xany = self.xs.any(axis=1)
        zany = self.zs.any(axis=1)
        return not bool(np.any(xany & zany))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymplecticMatrix)
            and self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.exps, other.exps)
        )

    def __hash__(self):
        return hash((self.n, self.xs.tobytes(), self.zs.tobytes(), self.exps.tobytes()))

    def __repr__(self) -> str:
        return f"SymplecticMatrix(n={self.n}, rows={len(self)})"


def rowreduce(m: SymplecticMatrix, keep_zero_rows: bool = False) -> SymplecticMatrix:
    """Reduced row-echelon form over GF(2), pivots ordered x0..x(n-1), z0..z(n-1).

    Row additions multiply Pauli rows, so phases stay exact. Rows that reduce
    to the identity are dropped unless ``keep_zero_rows``.
    """
    w = m.words
    mat = m.stacked().copy()
    exps = m.exps.copy()
    piv = rref_inplace(mat, w, 2 * w, exps, True)
    r = len(piv) if not keep_zero_rows else len(m)
    # pivot bit index b in word wc; columns past n in the x block never occur
    out = SymplecticMatrix(m.n, mat[:r, :w], mat[:r, w:], exps[:r])
    out._rank = len(piv)
    return out


def _reduce_with_tracking(m: SymplecticMatrix):
    """RREF of ``m`` plus, per reduced row, the set of original rows combined."""
    w = m.words
    rows = len(m)
    tw = n_words(rows)
    track = np.zeros((rows, tw), dtype=np.uint64)
    for i in range(rows):
        track[i, i // 64] = np.uint64(1) << np.uint64(i % 64)
    mat = np.hstack([m.xs, m.zs, track])
    piv = rref_inplace(mat, w, 2 * w, np.zeros(rows, np.int64), False)
    return mat[: len(piv)], piv


def in_span(p: PauliOperator, m: SymplecticMatrix, exact_phase: bool = False) -> Optional[np.ndarray]:
    """Coefficients c with prod_i m[i]^c_i equal to p, or None.

    Phases are ignored unless ``exact_phase``; then the ordered product of
    the selected rows (ascending index) must reproduce p's phase exactly.
    """
    if p.n != m.n:
        raise DimensionError(f"operator has {p.n} qubits, matrix has {m.n}")
    if len(m) == 0:
        return np.zeros(0, dtype=np.uint8) if p.x == 0 and p.z == 0 and (not exact_phase or p.exp == 0) else None
    w = m.words
    red, piv = _reduce_with_tracking(m)
    target = np.concatenate([int_to_words(p.x, w), int_to_words(p.z, w)])
    comb = np.zeros(red.shape[1] - 2 * w, dtype=np.uint64)
    for r, c in enumerate(piv):
        if (target[c // 64] >> np.uint64(c % 64)) & np.uint64(1):
            target ^= red[r, : 2 * w]
            comb ^= red[r, 2 * w :]
    if target.any():
        return None
    coeff = unpack_rows(comb[None, :], len(m))[0]
    if exact_phase:
        chosen = [m[i] for i in np.flatnonzero(coeff)]
        got = product(chosen, m.n)
        if got.exp != p.exp:
            return None
    return coeff


def span_contains_all(a: SymplecticMatrix, b: SymplecticMatrix) -> bool:
    """True when every row of ``b`` lies in the row span of ``a`` (phases ignored)."""
    return a.vstack(b).rank == a.rank


def same_span(a: SymplecticMatrix, b: SymplecticMatrix) -> bool:
    return a.n == b.n and a.rank == b.rank and span_contains_all(a, b)


def symplectic_commutation(a: SymplecticMatrix, b: SymplecticMatrix) -> np.ndarray:
    """Matrix of symplectic products a_i . b_j over GF(2)."""
    ax, az = a.x_part().astype(np.int64), a.z_part().astype(np.int64)
    bx, bz = b.x_part().astype(np.int64), b.z_part().astype(np.int64)
    return ((ax @ bz.T + az @ bx.T) % 2).astype(np.uint8)


def eliminate_on(rows: Sequence[PauliOperator], legs: Sequence[int]):
    """Gauss-Jordan on the x/z columns of ``legs`` (x then z per leg, in order).

    Returns ``(pivot_rows, rest)``: ``pivot_rows`` maps each pivot column
    ``(leg, 'x'|'z')`` to the unique reduced row with that pivot, and
    ``rest`` holds the rows that act trivially on every leg in ``legs``.
    Products keep exact phases.
    """
    work = list(rows)
    pivots: dict = {}
    for leg in legs:
        for kind in ("x", "z"):
            bit = 1 << leg

            def hit(p, kind=kind, bit=bit):
                return bool((p.x if kind == "x" else p.z) & bit)

            idx = next((i for i, p in enumerate(work) if hit(p)), None)
            if idx is None:
                continue
            pr = work.pop(idx)
            work = [pauli_mul(p, pr) if hit(p) else p for p in work]
            for key, q in pivots.items():
                if hit(q):
                    pivots[key] = pauli_mul(q, pr)
            pivots[(leg, kind)] = pr
    return pivots, work
