"""Erasure recovery by GF(2) elimination, Monte Carlo curves and crossings.

A logical operator survives an erasure set E when it commutes with every
logical operator supported on E. Erased qubits are inserted one at a time
into a row-reduced basis of their (syndrome | logical-commutation) vectors;
a vector that reduces to a zero syndrome is a logical operator living on E.

Two verdicts per logical qubit:

* subsystem: X-bar and Z-bar both survive;
* subalgebra: at least one of X-bar, Z-bar survives.

Sweeps use the permutation method: one random qubit order per trial gives
the verdict for every erasure count m at once, and
``p_rec(p) = sum_m Binom(n, m, p) R(m)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import erasure_sequence
from .errors import CapacityError, NotFoundError, ParseError
from .pauli import n_words, unpack_rows
from .seeds import StabilizerCode

CRITERIA = ("subsystem", "subalgebra")
EXACT_CAP = 20
BLOCK = 256  # trials per RNG stream


def _check_criterion(criterion: str) -> str:
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    return criterion


@dataclass(frozen=True, eq=False)
class DecoderData:
    """Per-qubit packed vectors for X_q and Z_q."""

    n: int
    k: int
    syn_words: int
    vecs: np.ndarray  # (n, 2, words) uint64


def _pack_columns(bits: np.ndarray) -> np.ndarray:
    """(rows, n) 0/1 -> (n, words) with bit r of column q set when bits[r, q]."""
    rows, n = bits.shape
    w = n_words(rows)
    padded = np.zeros((w * 64, n), dtype=np.uint8)
    padded[:rows] = bits
    packed = np.packbits(padded, axis=0, bitorder="little")  # (w*8, n)
    return np.ascontiguousarray(packed.T).view("<u8").astype(np.uint64).reshape(n, w)


def decoder_data(code: StabilizerCode) -> DecoderData:
    gens = code.generators
    n, k = code.n, code.k
    syn_words = n_words(max(len(gens), 1))
    log_words = n_words(2 * k)
    words = syn_words + log_words
    vecs = np.zeros((n, 2, words), dtype=np.uint64)
    if len(gens):
        gx = unpack_rows(gens.xs, n)
        gz = unpack_rows(gens.zs, n)
        vecs[:, 0, :syn_words] = _pack_columns(gz)  # X_q flags generators with Z at q
        vecs[:, 1, :syn_words] = _pack_columns(gx)
    logs = code.logicals()
    if logs:
        lx = np.array([op.x_bits for op in logs], dtype=np.uint8)
        lz = np.array([op.z_bits for op in logs], dtype=np.uint8)
        vecs[:, 0, syn_words:] = _pack_columns(lz)
        vecs[:, 1, syn_words:] = _pack_columns(lx)
    return DecoderData(n, k, syn_words, vecs)


_DATA_CACHE: dict = {}


def _data(code: StabilizerCode) -> DecoderData:
    key = id(code)
    hit = _DATA_CACHE.get(key)
    if hit is None or hit[0] is not code:
        hit = (code, decoder_data(code))
        _DATA_CACHE[key] = hit
        if len(_DATA_CACHE) > 32:
            _DATA_CACHE.pop(next(iter(_DATA_CACHE)))
    return hit[1]


@dataclass(frozen=True)
class RecoveryVerdict:
    x_recoverable: tuple
    z_recoverable: tuple

    def per_logical(self, criterion: str = "subsystem") -> list[bool]:
        _check_criterion(criterion)
        if criterion == "subsystem":
            return [x and z for x, z in zip(self.x_recoverable, self.z_recoverable)]
        return [x or z for x, z in zip(self.x_recoverable, self.z_recoverable)]

    def all_recoverable(self, criterion: str = "subsystem") -> bool:
        return all(self.per_logical(criterion))


def _lost(data: DecoderData, erased: np.ndarray) -> np.ndarray:
    m = len(erased)
    out_sub = np.empty(max(m, 1), np.uint8)
    out_alg = np.empty(max(m, 1), np.uint8)
    lost = np.zeros(2 * data.k, np.uint8)
    if m:
        erasure_sequence(data.vecs, erased, data.syn_words, data.k, False, out_sub, out_alg, lost)
    return lost


def recoverable(code: StabilizerCode, erased: Iterable[int], criterion: str = "subsystem") -> RecoveryVerdict:
    """Which logical operators can still be reconstructed off the erased set."""
    _check_criterion(criterion)
    erased = np.array(sorted(set(int(q) for q in erased)), dtype=np.int64)
    if len(erased) and (erased[0] < 0 or erased[-1] >= code.n):
        raise ValueError(f"erased qubits out of range for n={code.n}")
    lost = _lost(_data(code), erased)
    k = code.k
    return RecoveryVerdict(tuple(not lost[i] for i in range(k)), tuple(not lost[k + i] for i in range(k)))


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), stream]))


def mc_estimate(code: StabilizerCode, p: float, trials: int, rng_seed: int = 0,
                criterion: str = "subsystem") -> tuple[float, float]:
    """Direct iid sampling: fraction of trials where every logical survives."""
    _check_criterion(criterion)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    data = _data(code)
    ok = 0
    col = 0 if criterion == "subsystem" else 1
    for start in range(0, trials, BLOCK):
        rng = _rng(rng_seed, start // BLOCK)
        count = min(BLOCK, trials - start)
        masks = rng.random((count, code.n)) < p
        for row in masks:
            erased = np.flatnonzero(row).astype(np.int64)
            if not len(erased):
                ok += 1
                continue
            out = np.empty((2, len(erased)), np.uint8)
            lost = np.empty(2 * data.k, np.uint8)
            erasure_sequence(data.vecs, erased, data.syn_words, data.k, False, out[0], out[1], lost)
            ok += int(out[col, -1])
    p_rec = ok / trials
    return p_rec, math.sqrt(p_rec * (1 - p_rec) / trials)


def _survival_block(data: DecoderData, seed: int, block: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Summed survival indicators R_t(m), m = 1..n, over one block of permutations."""
    n = data.n
    sub = np.zeros(n, np.int64)
    alg = np.zeros(n, np.int64)
    rng = _rng(seed, block)
    out_sub = np.empty(n, np.uint8)
    out_alg = np.empty(n, np.uint8)
    lost = np.empty(2 * data.k, np.uint8)
    for _ in range(count):
        order = rng.permutation(n).astype(np.int64)
        erasure_sequence(data.vecs, order, data.syn_words, data.k, True, out_sub, out_alg, lost)
        sub += out_sub
        alg += out_alg
    return sub, alg


def survival_profile(code: StabilizerCode, trials: int, rng_seed: int = 0, workers: int = 1):
    """Estimated R(m) for m = 0..n under both criteria (arrays of length n+1).

    Blocks of trials use independent RNG streams and are summed in block
    order, so the result does not depend on ``workers``.
    """
    data = _data(code)
    blocks = [(b, min(BLOCK, trials - b * BLOCK)) for b in range((trials + BLOCK - 1) // BLOCK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda bc: _survival_block(data, rng_seed, *bc), blocks))
    else:
        parts = [_survival_block(data, rng_seed, *bc) for bc in blocks]
    sub = np.sum([p[0] for p in parts], axis=0)
    alg = np.sum([p[1] for p in parts], axis=0)
    r_sub = np.concatenate([[1.0], sub / trials])
    r_alg = np.concatenate([[1.0], alg / trials])
    return r_sub, r_alg


def binomial_weights(n: int, p: float) -> np.ndarray:
    """Binom(n, m, p) for m = 0..n, computed in log space."""
    m = np.arange(n + 1)
    if p <= 0:
        return (m == 0).astype(float)
    if p >= 1:
        return (m == n).astype(float)
    logc = np.array([math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1) for i in m])
    return np.exp(logc + m * math.log(p) + (n - m) * math.log1p(-p))


@dataclass
class ErasureCurve:
    code_id: str
    criterion: str
    points: list  # (p, p_rec, stderr, trials)
    rng_seed: int = 0
    n: Optional[int] = None
    method: str = "permutation"

    @property
    def grid(self) -> np.ndarray:
        return np.array([pt[0] for pt in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([pt[1] for pt in self.points])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([pt[2] for pt in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# code={self.code_id} n={self.n} criterion={self.criterion} "
                  f"rng_seed={self.rng_seed} method={self.method}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "p_rec", "stderr", "trials"])
        for p, v, s, t in self.points:
            w.writerow([f"{p:.6f}", f"{v:.10f}", f"{s:.10f}", t])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ErasureCurve":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ParseError("missing curve header", line=1)
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        points = []
        for lineno, row in enumerate(csv.reader(lines[2:]), 3):
            try:
                points.append((float(row[0]), float(row[1]), float(row[2]), int(row[3])))
            except (ValueError, IndexError):
                raise ParseError(f"bad curve row {row}", line=lineno) from None
        n = None if meta.get("n") in (None, "None") else int(meta["n"])
        return cls(meta.get("code", "?"), meta.get("criterion", "subsystem"), points,
                   int(meta.get("rng_seed", 0)), n, meta.get("method", "permutation"))


def sweep(code: StabilizerCode, p_grid: Sequence[float], trials: int, rng_seed: int = 0,
          criterion: str = "subsystem", workers: int = 1, method: str = "permutation",
          code_id: Optional[str] = None) -> ErasureCurve:
    """Recovery curve over ``p_grid``.

    ``permutation`` reuses each trial's qubit order for the whole grid;
    ``direct`` runs ``mc_estimate`` per grid point (independent streams).
    The reported stderr is sqrt(p_rec (1 - p_rec) / trials) in both cases.
    """
    _check_criterion(criterion)
    grid = [float(p) for p in p_grid]
    if not grid:
        raise ValueError("empty p grid")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be sorted ascending")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    points = []
    if method == "permutation":
        r_sub, r_alg = survival_profile(code, trials, rng_seed, workers)
        r = r_sub if criterion == "subsystem" else r_alg
        for p in grid:
            v = float(np.clip(binomial_weights(code.n, p) @ r, 0.0, 1.0))
            points.append((p, v, math.sqrt(v * (1 - v) / trials), trials))
    elif method == "direct":
        for i, p in enumerate(grid):
            v, s = mc_estimate(code, p, trials, rng_seed + 1_000_003 * i, criterion)
            points.append((p, v, s, trials))
    else:
        raise ValueError(f"unknown method {method!r}")
    return ErasureCurve(code_id or code.name, criterion, points, rng_seed, code.n, method)


def curve_from_profile(code_id: str, n: int, r: np.ndarray, grid: Sequence[float], trials: int,
                       criterion: str, rng_seed: int = 0) -> ErasureCurve:
    points = []
    for p in grid:
        v = float(np.clip(binomial_weights(n, p) @ r, 0.0, 1.0))
        points.append((float(p), v, math.sqrt(v * (1 - v) / trials), trials))
    return ErasureCurve(code_id, criterion, points, rng_seed, n)


def pseudo_threshold(curve_small: ErasureCurve, curve_large: ErasureCurve, z: float = 1.96):
    """Linear-interpolated crossing of two recovery curves and a z-sigma interval."""
    gs, gl = curve_small.grid, curve_large.grid
    if len(gs) != len(gl) or not np.allclose(gs, gl):
        raise ValueError("curves must share the same p grid")
    d = curve_large.values - curve_small.values
    sig = np.sqrt(curve_large.stderrs ** 2 + curve_small.stderrs ** 2)
    if np.all(np.abs(d) < 1e-15):
        raise NotFoundError("curves coincide; no crossing can be located")
    for i in range(len(d) - 1):
        if d[i] > 0 and d[i + 1] <= 0 or d[i] >= 0 and d[i + 1] < 0:
            p0, p1 = gs[i], gs[i + 1]
            slope = (d[i + 1] - d[i]) / (p1 - p0)
            p_th = p0 - d[i] / slope if slope else (p0 + p1) / 2
            s = max(sig[i], sig[i + 1])
            half = z * s / abs(slope) if slope else (p1 - p0) / 2
            return float(p_th), (float(p_th - half), float(p_th + half))
    if np.all(d >= 0):
        hint = f"larger code is better everywhere on [{gs[0]:.3f}, {gs[-1]:.3f}]; extend the grid upward"
    elif np.all(d <= 0):
        hint = f"smaller code is better everywhere on [{gs[0]:.3f}, {gs[-1]:.3f}]; extend the grid downward"
    else:
        hint = "difference changes sign only from negative to positive; check which curve is larger"
    raise NotFoundError(f"no crossing in grid: {hint}")


# -- exact enumeration ------------------------------------------------------


_TABLES: dict = {}


def _loss_table(code: StabilizerCode) -> np.ndarray:
    """counts[w, s]: erasure sets of size w whose lost-logical signature is s.

    Signature bit i is X-bar_i lost, bit k+i is Z-bar_i lost.
    """
    n, k = code.n, code.k
    if n > EXACT_CAP:
        raise CapacityError(f"exact enumeration limited to n <= {EXACT_CAP}, got {n}")
    data = _data(code)
    counts = np.zeros((n + 1, 1 << (2 * k)), dtype=np.int64)
    lost = np.zeros(2 * k, np.uint8)
    out = np.empty((2, n), np.uint8)
    weights = 1 << np.arange(2 * k)
    for mask in range(1 << n):
        erased = np.array([q for q in range(n) if (mask >> q) & 1], dtype=np.int64)
        if len(erased):
            erasure_sequence(data.vecs, erased, data.syn_words, k, False, out[0], out[1], lost)
            sig = int(lost @ weights)
        else:
            sig = 0
        counts[len(erased), sig] += 1
    return counts


def loss_table(code: StabilizerCode) -> np.ndarray:
    key = code.to_text()
    if key not in _TABLES:
        _TABLES[key] = _loss_table(code)
    return _TABLES[key]


def failure_counts(code: StabilizerCode, criterion: str = "subsystem", logical: Optional[int] = None) -> np.ndarray:
    """Number of size-w erasure sets that lose the logical(s), for w = 0..n.

    With ``logical=None`` a set counts when any logical qubit is lost.
    """
    _check_criterion(criterion)
    table = loss_table(code)
    k = code.k
    sigs = np.arange(table.shape[1])
    targets = range(k) if logical is None else [logical]
    bad = np.zeros_like(sigs, dtype=bool)
    for i in targets:
        xg = (sigs >> i) & 1
        zg = (sigs >> (k + i)) & 1
        bad |= ((xg | zg) if criterion == "subsystem" else (xg & zg)).astype(bool)
    return table[:, bad].sum(axis=1)


def polynomial_value(counts: Sequence[int], p: float) -> float:
    n = len(counts) - 1
    return float(sum(c * p ** w * (1 - p) ** (n - w) for w, c in enumerate(counts)))


def exact_F(code: StabilizerCode, p: float, criterion: str = "subsystem") -> float:
    """Exact probability that some logical qubit is lost, by 2^n enumeration."""
    return polynomial_value(failure_counts(code, criterion), p)
