"""The complete colored graph on the roots and its subgraphs.

Adjacency is kept as one 241-bit Python int per vertex and color (bit ``i``
stands for root ``i``). A subgraph for a color set is the OR of its colors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .roots import COLORS, GRAM, N_ROOTS

ALL_COLORS = frozenset(COLORS)

# color sets in which a maximal clique counts as type IV
TYPE_IV_SETS: tuple[frozenset[int], ...] = tuple(
    frozenset(c)
    for r in range(1, 5)
    for c in itertools.combinations(COLORS, r)
    if frozenset(c) != frozenset({-1, 0, 1})
)


def _color_masks() -> dict[int, list[int]]:
    out = {}
    for c in COLORS:
        rows = []
        for i in range(N_ROOTS + 1):
            m = 0
            if i:
                for j in np.flatnonzero(GRAM[i] == c):
                    if j and j != i:
                        m |= 1 << int(j)
            rows.append(m)
        out[c] = rows
    return out


COLOR_MASKS = _color_masks()
VERTEX_MASK = ((1 << (N_ROOTS + 1)) - 1) ^ 1


def parse_colors(spec: str | Iterable[int]) -> frozenset[int]:
    if isinstance(spec, str):
        vals = [int(t) for t in spec.replace(" ", "").split(",") if t]
    else:
        vals = [int(t) for t in spec]
    cs = frozenset(vals)
    if not cs or not cs <= ALL_COLORS:
        raise ValueError(f"color set must be a nonempty subset of {sorted(ALL_COLORS)}, got {sorted(cs)}")
    return cs


def colors_label(c: Iterable[int]) -> str:
    return ",".join(str(x) for x in sorted(c))


@dataclass(frozen=True)
class Subgraph:
    colors: frozenset[int]
    masks: tuple[int, ...] = field(repr=False)

    def neighbors(self, v: int) -> int:
        return self.masks[v]

    def degree(self, v: int) -> int:
        return self.masks[v].bit_count()

    def common_neighbors(self, vertices: Iterable[int]) -> int:
        m = VERTEX_MASK
        for v in vertices:
            m &= self.masks[v]
        return m

    def is_clique(self, vertices: Sequence[int]) -> bool:
        return is_clique(vertices, self.colors)

    def is_maximal(self, vertices: Sequence[int]) -> bool:
        """True iff ``vertices`` is a clique here and no root extends it."""
        return self.is_clique(vertices) and self.common_neighbors(vertices) == 0

    def word_matrix(self) -> np.ndarray:
        """Adjacency as a (241, 4) uint64 array for the compiled kernels."""
        return masks_to_words(self.masks)


def masks_to_words(masks: Sequence[int]) -> np.ndarray:
    out = np.zeros((len(masks), 4), dtype=np.uint64)
    for i, m in enumerate(masks):
        for w in range(4):
            out[i, w] = (m >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def mask_to_words(m: int) -> np.ndarray:
    return masks_to_words([m])[0]


def bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


@lru_cache(maxsize=None)
def build_subgraph(c: frozenset[int] | str | tuple) -> Subgraph:
    cs = parse_colors(c) if not isinstance(c, frozenset) else parse_colors(sorted(c))
    masks = [0] * (N_ROOTS + 1)
    for col in cs:
        cm = COLOR_MASKS[col]
        for i in range(1, N_ROOTS + 1):
            masks[i] |= cm[i]
    return Subgraph(cs, tuple(masks))


def clique_colors(vertices: Sequence[int]) -> frozenset[int]:
    v = np.asarray(sorted(vertices), dtype=np.int64)
    if len(v) < 2:
        return frozenset()
    iu = np.triu_indices(len(v), 1)
    return frozenset(int(x) for x in np.unique(GRAM[np.ix_(v, v)][iu]))


def is_clique(vertices: Sequence[int], colors: Iterable[int]) -> bool:
    if len(set(vertices)) != len(vertices):
        return False
    return clique_colors(vertices) <= frozenset(colors)


def _check_vertices(K: Sequence[int]) -> list[int]:
    ks = sorted(int(v) for v in K)
    if len(set(ks)) != len(ks) or (ks and not (1 <= ks[0] and ks[-1] <= N_ROOTS)):
        raise ValueError("clique must be distinct root indices in 1..240")
    return ks


def is_crosspolytope(K: Sequence[int]) -> bool:
    ks = _check_vertices(K)
    if len(ks) != 14:
        return False
    g = GRAM[np.ix_(ks, ks)]
    zeros = (g == 0).sum(axis=1)
    ones = (g == 1).sum(axis=1)
    return bool((zeros == 1).all() and (ones == 12).all())


def classify_clique_type(K: Sequence[int]) -> set[tuple]:
    """Applicable clique types, as tuples.

    ``("I", c)`` monochromatic of color c, ``("II", "simplex")`` or
    ``("II", "crosspolytope")``, ``("III",)`` for at most three vertices,
    ``("IV", colors)`` for each admissible color set in which K is maximal.
    """
    ks = _check_vertices(K)
    out: set[tuple] = set()
    cols = clique_colors(ks)
    if len(ks) <= 1:
        out.update(("I", c) for c in COLORS)
    elif len(cols) == 1:
        out.add(("I", next(iter(cols))))
    if 1 <= len(ks) <= 8 and cols <= {1}:
        out.add(("II", "simplex"))
    if is_crosspolytope(ks):
        out.add(("II", "crosspolytope"))
    if len(ks) <= 3:
        out.add(("III",))
    for cs in TYPE_IV_SETS:
        if cols <= cs and ks and build_subgraph(cs).common_neighbors(ks) == 0:
            out.add(("IV", cs))
    return out


# --- pattern graphs -------------------------------------------------------

PATTERN_KINDS = ("A", "B", "C-1", "C1", "D", "F")


def pattern_gram(kind: str) -> np.ndarray:
    """Required dot products between role slots (diagonal 2)."""
    if kind == "A":
        g = np.zeros((4, 4), dtype=np.int64)
    elif kind == "B":
        g = np.ones((7, 7), dtype=np.int64)
    elif kind in ("C-1", "C1"):
        a = -1 if kind == "C-1" else 1
        g = np.zeros((5, 5), dtype=np.int64)
        g[0, 3] = g[3, 0] = g[1, 4] = g[4, 1] = a
    elif kind == "D":
        g = np.zeros((5, 5), dtype=np.int64)
        g[:3, :3] = 1
    elif kind == "F":
        g = np.zeros((6, 6), dtype=np.int64)
        g[:5, :5] = 1
    else:
        raise ValueError(f"unknown pattern kind {kind!r}")
    np.fill_diagonal(g, 2)
    return g


# slot -> earlier slot it must follow; this picks one representative per
# permutation of interchangeable roles
_AFTER = {
    "A": {1: 0, 2: 1, 3: 2},
    "B": {d: d - 1 for d in range(1, 7)},
    "C-1": {1: 0},
    "C1": {1: 0},
    "D": {1: 0, 2: 1, 4: 3},
    "F": {1: 0, 2: 1, 3: 2, 4: 3},
}


def find_pattern_sequences(K: Sequence[int], kind: str) -> list[tuple[int, ...]]:
    """Occurrences of a pattern inside K, in the pattern's role order.

    A and B are symmetric under every role permutation, so each occurrence is
    returned once as a sorted tuple. For C the two orientations of each
    alpha-edge are both kept and only the swap of the two alpha-edges is
    identified; D and F are reduced modulo the permutations of their
    interchangeable roles in the same spirit.
    """
    ks = _check_vertices(K)
    g = pattern_gram(kind)
    after = _AFTER[kind]
    r = len(g)
    sub = GRAM[np.ix_(ks, ks)]
    hits: list[tuple[int, ...]] = []
    slots: list[int] = []

    def extend(depth: int) -> None:
        if depth == r:
            hits.append(tuple(ks[i] for i in slots))
            return
        lo = slots[after[depth]] + 1 if depth in after else 0
        for cand in range(lo, len(ks)):
            if cand in slots:
                continue
            if all(sub[cand, slots[j]] == g[depth, j] for j in range(depth)):
                slots.append(cand)
                extend(depth + 1)
                slots.pop()

    extend(0)
    return sorted(hits)


def naive_pattern_sets(K: Sequence[int], kind: str) -> set[frozenset[int]]:
    """All vertex sets in K carrying the pattern (brute-force oracle)."""
    ks = _check_vertices(K)
    g = pattern_gram(kind)
    r = len(g)
    target = sorted(g.ravel().tolist())
    out = set()
    for combo in itertools.combinations(ks, r):
        if sorted(GRAM[np.ix_(combo, combo)].ravel().tolist()) != target:
            continue
        for p in itertools.permutations(combo):
            if (GRAM[np.ix_(p, p)] == g).all():
                out.add(frozenset(combo))
                break
    return out


def maximal_cliques_within(K: Sequence[int], color: int) -> list[tuple[int, ...]]:
    """Maximal monochromatic cliques of ``color`` inside the vertex set K."""
    ks = _check_vertices(K)
    kmask = to_mask(ks)
    adj = {v: COLOR_MASKS[color][v] & kmask for v in ks}
    out: list[tuple[int, ...]] = []

    def bk(R: list[int], P: int, X: int) -> None:
        if not P and not X:
            out.append(tuple(sorted(R)))
            return
        piv = max(bits(P | X), key=lambda u: (P & adj[u]).bit_count())
        for v in bits(P & ~adj[piv]):
            bk(R + [v], P & adj[v], X & adj[v])
            P &= ~(1 << v)
            X |= 1 << v

    bk([], kmask, 0)
    return out


def count_monochromatic_subcliques(
    K: Sequence[int], color: int = 1, r: int = 1, maximal_within_K: bool = True
) -> int:
    """Number of r-subsets of K that are pairwise of ``color``.

    With ``maximal_within_K`` only subsets not contained in a larger such subset
    of K are counted (the chi_r invariant).
    """
    if not 1 <= r <= 8:
        raise ValueError("r must lie in 1..8")
    ks = _check_vertices(K)
    if maximal_within_K:
        return sum(1 for c in maximal_cliques_within(ks, color) if len(c) == r)
    kmask = to_mask(ks)
    adj = {v: COLOR_MASKS[color][v] & kmask for v in ks}

    def count(P: int, depth: int) -> int:
        if depth == r:
            return 1
        total = 0
        for v in bits(P):
            P &= ~(1 << v)
            total += count(P & adj[v], depth + 1)
        return total

    return count(kmask, 0)


def chi_vector(K: Sequence[int]) -> tuple[int, ...]:
    sizes = [len(c) for c in maximal_cliques_within(K, 1)]
    return tuple(sizes.count(r) for r in range(1, 9))
