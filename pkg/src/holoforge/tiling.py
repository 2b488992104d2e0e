"""Edge inflation of alternating hyperbolic tilings and boundary counting.

Each layer is a cyclic word of vertices. An ``a`` vertex has one parent leg,
a ``b`` vertex has two (it is shared by two neighbouring branches). Seed
types alternate from layer to layer; layer 0 holds the single centre.

Open-leg routing for a vertex with ``m`` open legs, in leg order:

* centre: every leg feeds its own ``a`` child;
* holographic ``a``/``b`` vertex: leg 0 and leg ``m-1`` feed the ``b``
  children shared with the previous and next vertex of the word, the legs in
  between feed ``a`` children;
* tree mode: every leg feeds its own ``a`` child.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import GeometryError

A, B, CENTER = 0, 1, 2
MODES = ("holographic", "ttn")


def check_hyperbolic(q1: int, q2: int, p: int = 4) -> None:
    """Reject parameters that do not give a hyperbolic alternating tiling."""
    if p != 4:
        raise GeometryError(f"only p=4 (or the tree limit) is supported, got p={p}")
    if q1 < 4 or q2 < 4:
        raise GeometryError(f"vertex degrees must be >= 4, got ({q1}, {q2})")
    if Fraction(1, q1) + Fraction(1, q2) + Fraction(2, p) >= 1:
        raise GeometryError(f"{{{q1},{p // 2},{q2}}} is not hyperbolic")


@dataclass(frozen=True)
class Layer:
    seed_type: int  # 1 = centre seed, 2 = alternate seed
    kinds: tuple  # A / B / CENTER per vertex, cyclic order
    parents: tuple  # per vertex: ((parent vertex, parent open-leg), ...)

    def letters(self) -> list[str]:
        return ["o" if k == CENTER else f"{'ab'[k]}{self.seed_type}" for k in self.kinds]

    @property
    def counts(self) -> tuple[int, int]:
        kinds = np.asarray(self.kinds)
        return int(np.sum(kinds != B)), int(np.sum(kinds == B))


@dataclass(frozen=True)
class TilingLayout:
    q1: int
    q2: int
    layers: tuple
    mode: str = "holographic"
    logical_legs_center: int = 1

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def degree(self, seed_type: int) -> int:
        return self.q1 if seed_type == 1 else self.q2

    def open_legs(self, layer: int, vertex: int) -> int:
        lay = self.layers[layer]
        q = self.degree(lay.seed_type)
        kind = lay.kinds[vertex]
        if kind == CENTER:
            return q - 1
        return q - 1 if kind == A else q - 2

    def open_leg_counts(self, layer: int) -> np.ndarray:
        lay = self.layers[layer]
        q = self.degree(lay.seed_type)
        kinds = np.asarray(lay.kinds)
        return np.where(kinds == B, q - 2, q - 1)

    def to_text(self) -> str:
        lines = [f"# q1={self.q1} q2={self.q2} mode={self.mode}"]
        for i, lay in enumerate(self.layers):
            word = " ".join(f"{v}:{l}" for v, l in enumerate(lay.letters()))
            lines.append(f"L{i} {word}")
        return "\n".join(lines) + "\n"


def center_layout(q1: int, q2: int, mode: str = "holographic") -> TilingLayout:
    if mode not in MODES:
        raise GeometryError(f"unknown mode {mode!r}")
    if mode == "holographic":
        check_hyperbolic(q1, q2)
    return TilingLayout(q1, q2, (Layer(1, (CENTER,), ((),)),), mode)


def route_children(layout: TilingLayout, layer: int):
    """Child specs for the next layer: list of (kind, ((parent, leg), ...))."""
    lay = layout.layers[layer]
    opens = layout.open_leg_counts(layer)
    nv = len(lay.kinds)
    children = []
    if layout.mode == "ttn" or lay.kinds[0] == CENTER:
        for v in range(nv):
            for leg in range(opens[v]):
                children.append((A, ((v, leg),)))
        return children
    for v in range(nv):
        m = int(opens[v])
        if m < 3:
            raise GeometryError(f"vertex with {m} open legs cannot be inflated")
        for leg in range(1, m - 1):
            children.append((A, ((v, leg),)))
        children.append((B, ((v, m - 1), ((v + 1) % nv, 0))))
    return children


def inflate(layout: TilingLayout, steps: int = 1) -> TilingLayout:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    layers = list(layout.layers)
    cur = layout
    for _ in range(steps):
        children = route_children(cur, len(layers) - 1)
        seed_type = 2 if layers[-1].seed_type == 1 else 1
        kinds = tuple(k for k, _ in children)
        parents = tuple(p for _, p in children)
        layers.append(Layer(seed_type, kinds, parents))
        cur = TilingLayout(layout.q1, layout.q2, tuple(layers), layout.mode, layout.logical_legs_center)
    return cur


def build_layout(q1: int, q2: int, depth: int, mode: str = "holographic") -> TilingLayout:
    return inflate(center_layout(q1, q2, mode), depth)


def count_physical(layout: TilingLayout) -> int:
    """Open legs on the outermost layer."""
    return int(layout.open_leg_counts(layout.depth).sum())


def _step_matrix(q: int, mode: str) -> np.ndarray:
    """Maps (n_a, n_b) of a layer with degree q to the next layer's counts."""
    if mode == "ttn":
        return np.array([[q - 1, q - 2], [0, 0]], dtype=object)
    return np.array([[q - 3, q - 4], [1, 1]], dtype=object)


@dataclass(frozen=True)
class GrowthMatrix:
    q1: int
    q2: int
    entries: tuple

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def eigenvalues(self) -> tuple[float, float]:
        (a, b), (c, d) = self.entries
        tr, det = a + d, a * d - b * c
        disc = np.sqrt(float(tr * tr - 4 * det))
        return ((tr + disc) / 2, (tr - disc) / 2)

    def perron_fractions(self) -> tuple[float, float]:
        """Normalised leading eigenvector: asymptotic (a, b) vertex fractions."""
        (a, b), (c, d) = self.entries
        lam = self.eigenvalues()[0]
        v = np.array([float(b), lam - a]) if b else np.array([lam - d, float(c)])
        v = v / v.sum()
        return float(v[0]), float(v[1])

    def to_json(self) -> str:
        return json.dumps({"q1": self.q1, "q2": self.q2, "entries": [list(r) for r in self.entries]})


def growth_matrix(q1: int, q2: int) -> GrowthMatrix:
    """Double-step substitution matrix, starting from a layer of degree q1."""
    check_hyperbolic(q1, q2)
    m = _step_matrix(q2, "holographic").dot(_step_matrix(q1, "holographic"))
    return GrowthMatrix(q1, q2, tuple(tuple(int(v) for v in row) for row in m))


def closed_form_eigenvalues(q1: int, q2: int) -> tuple[float, float]:
    x = (q1 - 2) * (q2 - 2)
    r = np.sqrt(x * (x - 4))
    return ((x - 2 + r) / 2, (x - 2 - r) / 2)


def layer_counts(q1: int, q2: int, depth: int, mode: str = "holographic") -> list[tuple[int, int]]:
    """(n_a, n_b) per layer from exact integer recursion; layer 0 is the centre."""
    if mode == "holographic":
        check_hyperbolic(q1, q2)
    counts = [(1, 0)]
    if depth >= 1:
        counts.append((q1 - 1, 0))
    for layer in range(2, depth + 1):
        q = q1 if (layer - 1) % 2 == 0 else q2
        step = _step_matrix(q, mode)
        na, nb = counts[-1]
        counts.append((int(step[0, 0] * na + step[0, 1] * nb), int(step[1, 0] * na + step[1, 1] * nb)))
    return counts


def physical_sequence(q1: int, q2: int, depth: int, mode: str = "holographic") -> list[int]:
    """Boundary qubit count with the tiling cut after layer 0, 1, ..., depth."""
    out = []
    for layer, (na, nb) in enumerate(layer_counts(q1, q2, depth, mode)):
        q = q1 if layer % 2 == 0 else q2
        out.append(na * (q - 1) + nb * (q - 2))
    return out


def count_physical_closed_form(q1: int, q2: int, i: int, start: str = "center") -> int:
    """Boundary count after ``i`` double steps, by integer matrix powers.

    ``start="center"`` counts degree-q1 layers 0, 2, 4, ...;
    ``start="intermediate"`` counts the degree-q2 layers 1, 3, 5, ....
    """
    if i < 0:
        raise ValueError("i must be >= 0")
    check_hyperbolic(q1, q2)
    if start == "center":
        if i == 0:
            return q1 - 1
        # layer 2 vertex counts, then M^(i-1)
        n = np.array([(q1 - 1) * (q2 - 3), q1 - 1], dtype=object)
        m = np.array(growth_matrix(q1, q2).entries, dtype=object)
        for _ in range(i - 1):
            n = m.dot(n)
        return int(n[0] * (q1 - 1) + n[1] * (q1 - 2))
    if start == "intermediate":
        n = np.array([q1 - 1, 0], dtype=object)
        m = np.array(growth_matrix(q2, q1).entries, dtype=object)
        for _ in range(i):
            n = m.dot(n)
        return int(n[0] * (q2 - 1) + n[1] * (q2 - 2))
    raise ValueError(f"unknown start {start!r}")


def layer_frequencies(layout: TilingLayout) -> list[tuple[float, float]]:
    """(fraction of a vertices, fraction of b vertices) per layer."""
    out = []
    for lay in layout.layers:
        na, nb = lay.counts
        tot = na + nb
        out.append((na / tot, nb / tot))
    return out


def frequencies_from_counts(counts: list[tuple[int, int]]) -> list[tuple[float, float]]:
    return [(na / (na + nb), nb / (na + nb)) for na, nb in counts]


def ttn_saving(q1: int, q2: int, depth: int) -> float:
    """Relative boundary saving of the holographic tiling over the tree."""
    holo = physical_sequence(q1, q2, depth)[-1]
    tree = physical_sequence(q1, q2, depth, mode="ttn")[-1]
    return 1 - holo / tree
