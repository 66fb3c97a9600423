"""Random root tuples and cliques with prescribed inner products."""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

import numpy as np

from .roots import GRAM, N_ROOTS

COLORS = (-2, -1, 0, 1)


def random_tuple(rng: np.random.Generator, gram: np.ndarray, tries: int = 200) -> Optional[tuple[int, ...]]:
    """A random ordered root tuple with the given off-diagonal inner products.

    Roots are drawn one at a time from the candidates compatible with the
    roots already chosen; a dead end restarts the draw. Returns None when no
    draw succeeds, which for small Gram matrices means the profile is empty.
    """
    g = np.asarray(gram)
    k = len(g)
    for _ in range(tries):
        out: list[int] = []
        for i in range(k):
            ok = np.ones(N_ROOTS + 1, dtype=bool)
            ok[0] = False
            for j, r in enumerate(out):
                ok &= GRAM[r] == g[i, j]
            cand = np.flatnonzero(ok)
            if len(cand) == 0:
                break
            out.append(int(rng.choice(cand)))
        else:
            return tuple(out)
    return None


def random_clique(rng: np.random.Generator, color: int, size: int, tries: int = 200) -> Optional[tuple[int, ...]]:
    """A random monochromatic clique, as a sorted tuple."""
    g = np.full((size, size), color)
    np.fill_diagonal(g, 2)
    t = random_tuple(rng, g, tries)
    return None if t is None else tuple(sorted(t))


def profile_nonempty(gram: np.ndarray) -> bool:
    """Exhaustive test, anchored at root 1 (W is transitive on roots)."""
    g = np.asarray(gram)
    k = len(g)

    def extend(chosen: list[int]) -> bool:
        if len(chosen) == k:
            return True
        i = len(chosen)
        ok = np.ones(N_ROOTS + 1, dtype=bool)
        ok[0] = False
        for j, r in enumerate(chosen):
            ok &= GRAM[r] == g[i, j]
        return any(extend(chosen + [int(c)]) for c in np.flatnonzero(ok))

    return extend([1])


def pair_profiles() -> list[np.ndarray]:
    return [np.array([[2, a], [a, 2]]) for a in COLORS]


def triple_profiles() -> list[tuple[tuple[int, int, int], np.ndarray]]:
    """All (e1.e2, e2.e3, e1.e3) profiles with their Gram matrices."""
    out = []
    for a, b, c in itertools.product(COLORS, repeat=3):
        g = np.array([[2, a, c], [a, 2, b], [c, b, 2]])
        out.append(((a, b, c), g))
    return out


def orthogonal_gram(r: int) -> np.ndarray:
    return 2 * np.eye(r, dtype=np.int64)


def random_isomorphism(rng: np.random.Generator, K1: Sequence[int], K2: Sequence[int]) -> Optional[dict[int, int]]:
    """A random color-preserving bijection K1 -> K2, or None if there is none."""
    from .weyl import automorphism_group, isomorphisms_exist

    f = isomorphisms_exist(K1, K2)
    if f is None:
        return None
    aut = automorphism_group(K1)
    a = aut.random_element(rng)
    verts = aut.vertices
    # precompose with an automorphism of K1
    return {verts[i]: f[verts[int(a[i])]] for i in range(len(verts))}
