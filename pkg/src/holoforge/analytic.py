"""Closed-form erasure functions, layered composition and fixed points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotAvailableError, VerificationError
from .erasure import failure_counts, loss_table, polynomial_value
from .seeds import seed, seed_id, shorten
from .tiling import growth_matrix

PROVENANCES = ("paper_closed_form", "enumerated", "upper_bound", "lower_bound")
VARIANTS = ("exact", "upper", "lower")


@dataclass(frozen=True)
class ErasureFunction:
    label: str
    evaluator: Callable[[float], float] = field(repr=False, compare=False)
    provenance: str = "enumerated"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __call__(self, p: float) -> float:
        return float(self.evaluator(p))

    def check(self, step: float = 1e-3, tol: float = 1e-12) -> None:
        if abs(self(0.0)) > tol or abs(self(1.0) - 1) > tol:
            raise VerificationError(f"{self.label}: F(0)={self(0.0)}, F(1)={self(1.0)}")
        if not is_monotone(self, step, tol):
            raise VerificationError(f"{self.label} is not monotone on [0, 1]")


def is_monotone(f: Callable[[float], float], step: float = 1e-3, tol: float = 1e-12) -> bool:
    grid = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    vals = np.array([f(p) for p in grid])
    return bool(np.all(np.diff(vals) >= -tol))


def _five_qubit(p):
    q = 1 - p
    return 1 - (q ** 5 + 5 * q ** 4 * p + 10 * p ** 2 * q ** 3)


def _steane(p):
    q = 1 - p
    return 1 - (q ** 7 + 7 * p * q ** 6 + 21 * p ** 2 * q ** 5 + (35 - 7) * p ** 3 * q ** 4 + 7 * p ** 4 * q ** 3)


def _child_422_weighted(p):
    q = 1 - p
    return 1 - (q ** 4 + 4 * p * q ** 3 + 3 * q ** 2 * p ** 2)


def _child_422_bound(p):
    q = 1 - p
    return 1 - (q ** 4 + 4 * p * q ** 3)


def _child_622_bound(p):
    q = 1 - p
    return 1 - (q ** 6 + 6 * p * q ** 5 + p ** 2 * q ** 4 * (0.5 * 4 * 3 + 4 * 3 / 2) + p ** 3 * q ** 3 * (8 / 2))


_PRINTED = {
    ("five_qubit", False, "exact"): _five_qubit,
    ("steane", False, "exact"): _steane,
    ("five_qubit", True, "exact"): _child_422_weighted,
    ("five_qubit", True, "upper"): _child_422_bound,
    ("steane", True, "upper"): _child_622_bound,
}


@lru_cache(maxsize=None)
def _half_credit_counts(name: str) -> tuple:
    """Child loss counts where a logical keeping one Abelian half scores 1/2."""
    code = shorten(seed(name), 0)
    table = loss_table(code)
    k = code.k
    sigs = np.arange(table.shape[1])
    score = np.zeros(len(sigs))
    for i in range(k):
        xl = (sigs >> i) & 1
        zl = (sigs >> (k + i)) & 1
        score += np.where(xl & zl, 1.0, np.where(xl | zl, 0.5, 0.0))
    return tuple(table.astype(float) @ (score / k))


@lru_cache(maxsize=None)
def _counts(name: str, child: bool, criterion: str = "subsystem") -> tuple:
    code = shorten(seed(name), 0) if child else seed(name)
    return tuple(int(c) for c in failure_counts(code, criterion))


def seed_function(name: str, variant: str = "exact", child: bool = False) -> ErasureFunction:
    """Erasure function of a seed code or of its shortened child.

    Printed closed forms take priority. Otherwise ``exact`` on a child gives
    half credit to a logical qubit with one surviving Abelian half, and
    ``upper`` counts a child as failed as soon as any logical qubit is lost.
    ``lower`` exists only for seeds, where it coincides with ``exact``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    sid = seed_id(name)
    label = f"{sid}{'/child' if child else ''}:{variant}"
    if child and variant == "lower":
        raise NotAvailableError(f"no lower-bound erasure function for the {sid} child")
    if not child:
        variant_used = "exact"
        printed = _PRINTED.get((sid, False, "exact"))
        if printed is not None:
            return ErasureFunction(label, printed, "paper_closed_form")
        counts = _counts(sid, False)
        prov = "enumerated" if variant != "lower" else "lower_bound"
        return ErasureFunction(label, lambda p, c=counts: polynomial_value(c, p), prov)
    printed = _PRINTED.get((sid, True, variant))
    if printed is not None:
        return ErasureFunction(label, printed, "paper_closed_form")
    if variant == "upper":
        counts = _counts(sid, True)
        return ErasureFunction(label, lambda p, c=counts: polynomial_value(c, p), "upper_bound")
    counts = _half_credit_counts(sid)
    return ErasureFunction(label, lambda p, c=counts: polynomial_value(c, p), "enumerated")


def weighted(fs: ErasureFunction, fc: ErasureFunction, qs: float, qc: Optional[float] = None,
             label: Optional[str] = None) -> ErasureFunction:
    """q_s F_s + q_c F_c."""
    qc = 1 - qs if qc is None else qc
    if qs < 0 or qc < 0 or abs(qs + qc - 1) > 1e-12:
        raise ValueError(f"weights must be nonnegative and sum to 1, got ({qs}, {qc})")
    name = label or f"{qs:.4f}*{fs.label}+{qc:.4f}*{fc.label}"
    return ErasureFunction(name, lambda p: qs * fs(p) + qc * fc(p), "enumerated")


@dataclass(frozen=True)
class CompositionPlan:
    """Per-layer functions, outermost (boundary) first."""

    layers: tuple
    weights: Optional[tuple] = None  # per layer (q_s, q_c) applied to (F_s, F_c) pairs

    def __post_init__(self):
        if not self.layers:
            raise ValueError("composition plan is empty")
        if self.weights is not None:
            if len(self.weights) != len(self.layers):
                raise ValueError("one weight pair per layer required")
            for qs, qc in self.weights:
                if qs < 0 or qc < 0 or abs(qs + qc - 1) > 1e-12:
                    raise ValueError(f"bad weights ({qs}, {qc})")

    def functions(self) -> list:
        if self.weights is None:
            return list(self.layers)
        out = []
        for layer, (qs, qc) in zip(self.layers, self.weights):
            fs, fc = layer
            out.append(weighted(fs, fc, qs, qc))
        return out


def compose(plan: CompositionPlan, p: float) -> float:
    for f in plan.functions():
        p = f(p)
    return p


def hetero_composition(ga: ErasureFunction, gb: ErasureFunction, order: str = "ab") -> ErasureFunction:
    """``ab``: G_a acts first (outermost), then G_b. ``ba`` is the reverse."""
    if order == "ab":
        first, second = ga, gb
    elif order == "ba":
        first, second = gb, ga
    else:
        raise ValueError(f"order must be 'ab' or 'ba', got {order!r}")
    return ErasureFunction(f"{second.label}({first.label})", lambda p: second(first(p)), "enumerated")


def fixed_point(f: Callable[[float], float], tol: float = 1e-6, grid: int = 1000) -> float:
    """Interior p with f(p) = p where f - p goes from negative to nonnegative.

    Returns 1.0 when f(p) < p everywhere inside, 0.0 when f(p) >= p everywhere.
    """
    if not is_monotone(f):
        raise ValueError("fixed_point needs a monotone function")
    ps = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    g = np.array([f(p) - p for p in ps])
    up = np.nonzero((g[:-1] < 0) & (g[1:] >= 0))[0]
    if len(up) == 0:
        if np.all(g < 0):
            return 1.0
        if np.all(g >= 0):
            return 0.0
        # sign change only at the grid edge
        return 1.0 if g[0] < 0 else 0.0
    lo, hi = ps[up[0]], ps[up[0] + 1]
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if f(mid) - mid < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


TABLE_ROWS = (
    ("steane", "qrm"),
    ("qrm", "steane"),
    ("five_qubit", "qrm"),
    ("qrm", "five_qubit"),
    ("five_qubit", "steane"),
    ("steane", "five_qubit"),
)

_DISPLAY = {"steane": "Steane", "qrm": "QRM", "five_qubit": "HaPPY"}


def row_label(center: str, alternate: str) -> str:
    return f"{_DISPLAY[seed_id(center)]}/{_DISPLAY[seed_id(alternate)]}"


def layer_weights(center: str, alternate: str) -> tuple:
    """Asymptotic (q_s, q_c) for layers of each seed type."""
    q1, q2 = seed(center).n + 1, seed(alternate).n + 1
    return growth_matrix(q1, q2).perron_fractions(), growth_matrix(q2, q1).perron_fractions()


@dataclass(frozen=True)
class TheoryRow:
    code: str
    p_theory: float
    p_lower: float
    p_upper: float
    weights_center: tuple
    weights_alternate: tuple

    def as_dict(self) -> dict:
        return {"code": self.code, "p_theory": self.p_theory, "p_lower": self.p_lower,
                "p_upper": self.p_upper, "q_center": list(self.weights_center),
                "q_alternate": list(self.weights_alternate)}


def theory_row(center: str, alternate: str) -> TheoryRow:
    """Boundary layer is the centre type: double-layer composite G_b(G_a(p)).

    p_theory weights seed and child by the Perron fractions, p_upper passes
    through seeds only (the tree-style code), p_lower through children only.
    """
    a, b = seed_id(center), seed_id(alternate)
    wa, wb = layer_weights(a, b)
    sa, sb = seed_function(a), seed_function(b)
    ca, cb = seed_function(a, "upper", child=True), seed_function(b, "upper", child=True)
    ga, gb = weighted(sa, ca, *wa), weighted(sb, cb, *wb)
    return TheoryRow(
        row_label(a, b),
        fixed_point(hetero_composition(ga, gb)),
        fixed_point(hetero_composition(ca, cb)),
        fixed_point(hetero_composition(sa, sb)),
        wa, wb,
    )


def table_one_theory(rows: Sequence[tuple] = TABLE_ROWS) -> list[TheoryRow]:
    return [theory_row(c, a) for c, a in rows]


def crossover_422_bound() -> float:
    return (5 - math.sqrt(13)) / 6
