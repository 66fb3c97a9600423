"""Permutations as numpy index arrays and a Schreier-Sims stabilizer chain.

A permutation ``p`` of ``range(n)`` sends point ``i`` to ``p[i]``. Products
compose right to left: ``compose(g, h)`` applies ``h`` first, i.e. ``g[h]``.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def compose(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    return g[h]


def invert(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=p.dtype)
    return inv


def is_identity(p: np.ndarray) -> bool:
    return bool((p == np.arange(len(p))).all())


def check_perm(p: Sequence[int]) -> np.ndarray:
    arr = np.asarray(p, dtype=np.int64)
    if sorted(arr.tolist()) != list(range(len(arr))):
        raise ValueError("not a permutation")
    return arr


class StabilizerChain:
    """Base and strong generating set built by the Schreier-Sims procedure.

    This is the incremental formulation where adding a generator at a level
    sifts every new Schreier generator into the level below. Transversals map
    the level's base point to each orbit point.
    """

    def __init__(self, degree: int, generators: Iterable[np.ndarray] = (), base_hint: Sequence[int] = ()):
        self.n = degree
        self._id = identity(degree)
        self._hint = list(base_hint)
        self.base: list[int] = []
        self.gens: list[list[np.ndarray]] = []
        self.trans: list[dict[int, np.ndarray]] = []
        self._tinv: list[dict[int, np.ndarray]] = []
        for g in generators:
            self.add(g)

    # -- queries ---------------------------------------------------------------

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out

    def orbit_sizes(self) -> list[int]:
        return [len(t) for t in self.trans]

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        for k in range(start, len(self.base)):
            pt = int(g[self.base[k]])
            ui = self._tinv[k].get(pt)
            if ui is None:
                return g, k
            g = ui[g]
        return g, len(self.base)

    def contains(self, g: np.ndarray) -> bool:
        h, k = self.sift(np.asarray(g, dtype=np.int64))
        return k == len(self.base) and is_identity(h)

    def strong_generators(self) -> list[np.ndarray]:
        seen = {}
        for lvl in self.gens:
            for g in lvl:
                seen.setdefault(g.tobytes(), g)
        return list(seen.values())

    # -- construction ------------------------------------------------------------

    def add(self, g: np.ndarray) -> None:
        g = np.asarray(g, dtype=np.int64)
        if len(g) != self.n:
            raise ValueError("generator has the wrong degree")
        self._add(0, g)

    def _new_level(self, g: np.ndarray) -> None:
        moved = np.flatnonzero(g != self._id)
        pick = next((b for b in self._hint if g[b] != b and b not in self.base), int(moved[0]))
        self.base.append(int(pick))
        self.gens.append([])
        self.trans.append({int(pick): self._id})
        self._tinv.append({int(pick): self._id})

    def _add(self, k: int, g: np.ndarray) -> None:
        h, j = self.sift(g, k)
        if j == len(self.base) and is_identity(h):
            return
        if k == len(self.base):
            self._new_level(g)
        self.gens[k].append(g)
        for u in list(self.trans[k].values()):
            self._close(k, g[u])

    def _close(self, k: int, g: np.ndarray) -> None:
        b = self.base[k]
        trans, tinv = self.trans[k], self._tinv[k]
        stack = [g]
        while stack:
            g = stack.pop()
            pt = int(g[b])
            if pt not in trans:
                trans[pt] = g
                tinv[pt] = invert(g)
                for s in self.gens[k]:
                    stack.append(s[g])
            else:
                h = tinv[pt][g]
                if not is_identity(h):
                    self._add(k + 1, h)


def orbit_under(points: Iterable[int], generators: Sequence[np.ndarray]) -> set[int]:
    orbit = set(int(p) for p in points)
    frontier = list(orbit)
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = int(g[p])
                if q not in orbit:
                    orbit.add(q)
                    nxt.append(q)
        frontier = nxt
    return orbit


def schreier_vector(root: int, generators: Sequence[np.ndarray], n: int) -> dict[int, np.ndarray]:
    """Transversal from ``root``: for each orbit point q an element sending root to q."""
    out = {root: identity(n)}
    frontier = [root]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = int(g[p])
                if q not in out:
                    out[q] = g[out[p]]
                    nxt.append(q)
        frontier = nxt
    return out


def group_order_of(generators: Sequence[np.ndarray], degree: Optional[int] = None) -> int:
    gens = [np.asarray(g, dtype=np.int64) for g in generators]
    if not gens:
        return 1
    return StabilizerChain(degree or len(gens[0]), gens).order()
