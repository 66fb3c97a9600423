"""The Weyl group acting on the 240 roots.

Group elements are carried as permutations of the padded index range 0..240
(point 0 is always fixed) together with the exact matrix ``4M`` acting on
doubled coordinates; ``4M`` is an integer matrix for every element of W.

Extending a partial isometry uses the fact that W is the full automorphism
group of the lattice. Each committed source/target pair refines the roots into
classes by their inner products with the committed vectors; a lattice
automorphism with the prescribed values must match the class sizes on both
sides. Once the sources span the space every class is a single root and the
matching is the permutation itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .perms import StabilizerChain, identity, invert, orbit_under, schreier_vector
from .roots import GRAM, N_ROOTS, ROOTS, root_index

DEGREE = N_ROOTS + 1
W_ORDER = 696729600

# simple roots (Bourbaki numbering) in doubled coordinates
SIMPLE_ROOTS_DOUBLED = (
    (1, -1, -1, -1, -1, -1, -1, 1),
    (2, 2, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
)
SIMPLE_ROOTS = tuple(root_index(v) for v in SIMPLE_ROOTS_DOUBLED)

_R = ROOTS[1:]


class CapExceeded(RuntimeError):
    """An orbit grew past the configured cap."""


@dataclass(frozen=True)
class WeylElement:
    matrix4: np.ndarray  # 4M on doubled coordinates, integer
    perm: np.ndarray  # length 241, perm[0] == 0

    def __call__(self, i: int) -> int:
        return int(self.perm[i])

    def apply_vector(self, v: Sequence[int]) -> np.ndarray:
        out = self.matrix4 @ np.asarray(v, dtype=np.int64)
        if (out % 4).any():
            raise ArithmeticError("image of a lattice vector is not integral")
        return out // 4

    def __matmul__(self, other: "WeylElement") -> "WeylElement":
        m = self.matrix4 @ other.matrix4
        return WeylElement(m // 4, self.perm[other.perm])

    def inverse(self) -> "WeylElement":
        return WeylElement(self.matrix4.T.copy(), invert(self.perm))

    def is_identity(self) -> bool:
        return bool((self.perm == np.arange(DEGREE)).all())

    def image(self, vertices: Iterable[int]) -> tuple[int, ...]:
        return tuple(int(self.perm[v]) for v in vertices)

    def validate(self) -> None:
        """Orthogonality, lattice preservation and matrix/permutation agreement."""
        m = self.matrix4
        if not (m @ m.T == 16 * np.eye(8, dtype=np.int64)).all():
            raise AssertionError("matrix is not orthogonal")
        imgs = _R @ m.T
        if (imgs % 4).any():
            raise AssertionError("matrix does not preserve the lattice")
        expect = ROOTS[self.perm[1:]]
        if not (imgs // 4 == expect).all():
            raise AssertionError("matrix and permutation disagree")

    def to_json(self) -> list[int]:
        return [int(x) for x in self.perm[1:]]


def element_from_perm(perm: np.ndarray) -> WeylElement:
    """Recover 4M from a root permutation induced by a lattice automorphism."""
    perm = np.asarray(perm, dtype=np.int64)
    S = ROOTS[list(SIMPLE_ROOTS)].T  # columns
    T = ROOTS[perm[list(SIMPLE_ROOTS)]].T
    m4 = np.rint(4 * T @ np.linalg.inv(S)).astype(np.int64)
    if not (_R @ m4.T == 4 * ROOTS[perm[1:]]).all():
        raise ArithmeticError("permutation is not induced by a linear map")
    return WeylElement(m4, perm)


def reflection(e: int) -> WeylElement:
    """x -> x - (x.e) e for the root with index e."""
    d = ROOTS[e]
    m4 = 4 * np.eye(8, dtype=np.int64) - np.outer(d, d)
    perm = np.zeros(DEGREE, dtype=np.int64)
    perm[1:] = _reflect_perm(e)
    return WeylElement(m4, perm)


@lru_cache(maxsize=None)
def _reflect_perm_cached(e: int) -> bytes:
    d = ROOTS[e]
    imgs = _R - np.outer(GRAM[1:, e], d)
    keys = {tuple(r): i for i, r in enumerate(_R.tolist(), start=1)}
    return np.array([keys[tuple(x)] for x in imgs.tolist()], dtype=np.int64).tobytes()


def _reflect_perm(e: int) -> np.ndarray:
    return np.frombuffer(_reflect_perm_cached(int(e)), dtype=np.int64)


def reflection_perm(e: int) -> np.ndarray:
    p = np.zeros(DEGREE, dtype=np.int64)
    p[1:] = _reflect_perm(e)
    return p


def simple_reflections() -> list[WeylElement]:
    return [reflection(e) for e in SIMPLE_ROOTS]


def group_order(generators: Sequence[WeylElement | np.ndarray]) -> int:
    """Order of the group generated, via a stabilizer chain on root indices."""
    perms = [g.perm if isinstance(g, WeylElement) else np.asarray(g, dtype=np.int64) for g in generators]
    if not perms:
        return 1
    return StabilizerChain(DEGREE, perms).order()


@lru_cache(maxsize=1)
def weyl_chain() -> StabilizerChain:
    return StabilizerChain(DEGREE, [reflection_perm(e) for e in SIMPLE_ROOTS])


def random_element(rng: np.random.Generator, length: int = 40) -> WeylElement:
    """Product of random reflections; mixes well after a few dozen factors."""
    perm = identity(DEGREE)
    m4 = 4 * np.eye(8, dtype=np.int64)
    for e in rng.integers(1, N_ROOTS + 1, size=length):
        r = reflection(int(e))
        perm = r.perm[perm]
        m4 = (r.matrix4 @ m4) // 4
    return WeylElement(m4, perm)


# --- orbits -----------------------------------------------------------------


def orbit_size(obj: Sequence[int], generators: Optional[Sequence] = None, *, ordered: bool = True, cap: int = 10**7) -> int:
    """Size of the orbit of a tuple (or, with ``ordered=False``, a set) of roots.

    Breadth-first closure on integer codes; raises CapExceeded above ``cap``.
    """
    gens = [g.perm if isinstance(g, WeylElement) else np.asarray(g) for g in (generators or simple_reflections())]
    k = len(obj)
    if k == 0:
        return 1
    base = np.int64(DEGREE)
    weights = base ** np.arange(k, dtype=np.int64)

    def encode(rows: np.ndarray) -> np.ndarray:
        if not ordered:
            rows = np.sort(rows, axis=1)
        return rows @ weights

    def decode(codes: np.ndarray) -> np.ndarray:
        return (codes[:, None] // weights) % base

    start = np.asarray([list(obj)], dtype=np.int64)
    seen = np.unique(encode(start))
    frontier = seen
    while len(frontier):
        rows = decode(frontier)
        new = np.unique(np.concatenate([encode(g[rows]) for g in gens]))
        new = new[~np.isin(new, seen, assume_unique=True)]
        if len(seen) + len(new) > cap:
            raise CapExceeded(f"orbit exceeds cap {cap}")
        seen = np.union1d(seen, new)
        frontier = new
    return int(len(seen))


# --- extension of partial isometries ----------------------------------------------


def _basis_indices(idx: Sequence[int]) -> list[int]:
    """Positions of a maximal linearly independent prefix-greedy subset."""
    chosen: list[int] = []
    rank = 0
    for pos, i in enumerate(idx):
        trial = ROOTS[[idx[p] for p in chosen] + [i]].astype(float)
        r = np.linalg.matrix_rank(trial)
        if r > rank:
            chosen.append(pos)
            rank = r
            if rank == 8:
                break
    return chosen


def _profile(vecs: list[int], marks: np.ndarray) -> np.ndarray:
    if vecs:
        key = (GRAM[1:, vecs] + 2) @ (5 ** np.arange(len(vecs), dtype=np.int64))
    else:
        key = np.zeros(N_ROOTS, dtype=np.int64)
    return key * 4 + marks


def _marks(sets: Sequence[Sequence[int]]) -> np.ndarray:
    out = np.zeros(N_ROOTS, dtype=np.int64)
    for j, s in enumerate(sets[:2]):
        for v in s:
            out[v - 1] |= 1 << j
    return out


class _Extender:
    """Backtracking search for w in W with w(s_i) = t_i and w(D_j) = D'_j."""

    def __init__(self, src_sets=(), tgt_sets=()):
        if len(src_sets) > 2:
            raise ValueError("at most two set constraints are supported")
        self.ms = _marks(src_sets)
        self.mt = _marks(tgt_sets)
        self.nodes = 0

    def classes_match(self, S: list[int], T: list[int]):
        ks = _profile(S, self.ms)
        kt = _profile(T, self.mt)
        us, cs = np.unique(ks, return_counts=True)
        ut, ct = np.unique(kt, return_counts=True)
        if len(us) != len(ut) or not (us == ut).all() or not (cs == ct).all():
            return None
        return ks, kt, us, cs

    def search(self, S: list[int], T: list[int]) -> Optional[np.ndarray]:
        """S, T: linearly independent sources and their targets."""
        self.nodes += 1
        m = self.classes_match(S, T)
        if m is None:
            return None
        ks, kt, us, cs = m
        if len(S) == 8:
            perm = np.zeros(DEGREE, dtype=np.int64)
            perm[1 + np.argsort(ks)] = 1 + np.argsort(kt)
            return perm
        # candidate sources: roots outside span(S), smallest class first
        if S:
            q, _ = np.linalg.qr(ROOTS[S].T.astype(float))
            resid = _R - (_R @ q) @ q.T
            free = np.flatnonzero((resid * resid).sum(axis=1) > 1e-6)
        else:
            free = np.arange(N_ROOTS)
        size_of = dict(zip(us.tolist(), cs.tolist()))
        sizes = np.array([size_of[k] for k in ks[free].tolist()])
        pick = free[np.lexsort((free, sizes))[0]]
        x = int(pick) + 1
        for y in (np.flatnonzero(kt == ks[pick]) + 1).tolist():
            res = self.search(S + [x], T + [int(y)])
            if res is not None:
                return res
        return None


def _gram_compatible(src: Sequence[int], tgt: Sequence[int]) -> bool:
    return bool((GRAM[np.ix_(src, src)] == GRAM[np.ix_(tgt, tgt)]).all())


def extend_isometry(pairs: Sequence[tuple[int, int]], *, setwise: Optional[tuple[Sequence[int], Sequence[int]]] = None) -> Optional[WeylElement]:
    """An element of W sending each source root to its target, or None.

    ``setwise=(D, D2)`` additionally demands w(D) = D2.
    """
    src = [int(s) for s, _ in pairs]
    tgt = [int(t) for _, t in pairs]
    if len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
        return None
    if not _gram_compatible(src, tgt):
        return None
    if setwise is not None:
        d1, d2 = (sorted(set(int(v) for v in d)) for d in setwise)
        if len(d1) != len(d2):
            return None
        ext = _Extender([d1], [d2])
    else:
        ext = _Extender()
    basis = _basis_indices(src)
    perm = ext.search([src[p] for p in basis], [tgt[p] for p in basis])
    if perm is None:
        return None
    el = element_from_perm(perm)
    assert all(el.perm[s] == t for s, t in zip(src, tgt))
    return el


def are_conjugate(s: Sequence[int], t: Sequence[int]) -> bool:
    """Ordered sequences: is there w in W with w(s_i) = t_i for all i?"""
    if len(s) != len(t):
        return False
    return extend_isometry(list(zip(s, t))) is not None


def conjugating_element(K1: Sequence[int], K2: Sequence[int]) -> Optional[WeylElement]:
    """Some w in W with w(K1) = K2 as sets, or None."""
    if len(set(K1)) != len(set(K2)):
        return None
    return extend_isometry([], setwise=(K1, K2))


def are_conjugate_sets(K1: Sequence[int], K2: Sequence[int]) -> bool:
    return conjugating_element(K1, K2) is not None


def extends_batch(sources: Sequence[int], images: np.ndarray) -> np.ndarray:
    """For full-rank sources: which rows of ``images`` are restrictions of W elements.

    Each row is taken as a Gram-preserving assignment (checked). The unique
    linear extension lies in W iff it maps a Z-basis of the lattice into the
    lattice, tested in exact integer arithmetic.
    """
    src = [int(s) for s in sources]
    images = np.asarray(images, dtype=np.int64)
    basis = _basis_indices(src)
    if len(basis) != 8:
        raise ValueError("extends_batch needs sources of full rank")
    g = GRAM[np.ix_(src, src)]
    ok = np.ones(len(images), dtype=bool)
    for a in range(len(src)):
        for b in range(a + 1, len(src)):
            ok &= GRAM[images[:, a], images[:, b]] == g[a, b]
    S = ROOTS[[src[p] for p in basis]].T.astype(np.int64)  # columns
    det = int(round(np.linalg.det(S.astype(float))))
    adj = np.rint(np.linalg.inv(S.astype(float)) * det).astype(np.int64)
    assert (S @ adj == det * np.eye(8, dtype=np.int64)).all()
    B = ROOTS[list(SIMPLE_ROOTS)].T  # columns, a Z-basis of the lattice
    C = adj @ B  # det * coefficients of each basis vector in the source basis
    T = ROOTS[images[:, basis]]  # (n, 8 sources, 8 coords)
    num = np.einsum("nsc,sb->nbc", T, C)  # det * images of the Z-basis
    divisible = ~(num % det).any(axis=(1, 2))
    img = num // det
    par = img % 2
    inlat = (par == par[:, :, :1]).all(axis=2) & (img.sum(axis=2) % 4 == 0)
    return ok & divisible & inlat.all(axis=1)


# --- stabilizers --------------------------------------------------------------------


def orthogonal_roots(S: Sequence[int]) -> list[int]:
    if not len(S):
        return list(range(1, N_ROOTS + 1))
    mask = (GRAM[1:, list(S)] == 0).all(axis=1)
    return [int(i) + 1 for i in np.flatnonzero(mask)]


def pointwise_stabilizer_order(S: Sequence[int], *, cross_check: bool = False) -> int:
    """Order of the subgroup fixing every root of S.

    Computed as the group generated by reflections in the roots orthogonal to
    S, the parabolic subgroup fixing span(S). With ``cross_check`` and |S| <= 3
    the value is compared with |W| / |orbit of the tuple S|.
    """
    orth = orthogonal_roots(S)
    order = group_order([reflection_perm(e) for e in orth]) if orth else 1
    if cross_check and 0 < len(S) <= 3:
        other = W_ORDER // orbit_size(list(S), ordered=True, cap=240**3)
        if other != order:
            raise AssertionError(f"pointwise stabilizer mismatch: {order} vs {other}")
    return order


def _rank(idx: Sequence[int]) -> int:
    if not len(idx):
        return 0
    return int(np.linalg.matrix_rank(ROOTS[list(idx)].astype(float)))


@dataclass
class SetStabilizer:
    order: int
    image_order: int  # order of the induced group on K
    kernel_order: int  # pointwise stabilizer
    base: list[int]
    orbit_sizes: list[int]
    generators: list[WeylElement] = field(repr=False)


def setwise_stabilizer(K: Sequence[int]) -> SetStabilizer:
    """Stabilizer of the vertex set K in W, via an orbit-stabilizer chain.

    Level i fixes the chosen base vertices b_1..b_{i-1} and finds the orbit of
    b_i inside K; each candidate image is confirmed by an extension search. The
    chain stops once the base spans span(K), where what is left is the
    pointwise stabilizer of K.
    """
    ks = sorted(set(int(v) for v in K))
    target_rank = _rank(ks)
    gens: list[WeylElement] = []
    base: list[int] = []
    orbit_sizes: list[int] = []
    remaining = list(ks)
    while _rank(base) < target_rank:
        # pick the next base vertex raising the rank
        b = next(v for v in remaining if _rank(base + [v]) > _rank(base))
        level_gens = [g.perm for g in gens if all(g.perm[x] == x for x in base)]
        orbit = orbit_under([b], level_gens)
        failed: set[int] = set()
        for u in ks:
            if u in orbit or u in failed:
                continue
            if GRAM[u, u] != GRAM[b, b] or any(GRAM[u, x] != GRAM[b, x] for x in base):
                failed.add(u)
                continue
            w = extend_isometry([(x, x) for x in base] + [(b, u)], setwise=(ks, ks))
            if w is None:
                failed |= orbit_under([u], level_gens)
            else:
                gens.append(w)
                level_gens.append(w.perm)
                orbit = orbit_under([b], level_gens)
        base.append(b)
        orbit_sizes.append(len(orbit))
        remaining.remove(b)
    image = 1
    for s in orbit_sizes:
        image *= s
    kernel = pointwise_stabilizer_order(ks)
    return SetStabilizer(image * kernel, image, kernel, base, orbit_sizes, gens)


def setwise_stabilizer_size(K: Sequence[int]) -> int:
    return setwise_stabilizer(K).order


def conjugates_containing(m: int, stab_A: int, stab_S: int) -> int:
    """Number of conjugates of S containing A: m |H_A| / |H_S|."""
    num = m * stab_A
    if num % stab_S:
        raise ArithmeticError(f"{stab_S} does not divide {m}*{stab_A}; upstream count is inconsistent")
    return num // stab_S


# --- colored-graph automorphisms ------------------------------------------------------


@dataclass
class AutomorphismGroup:
    """Color-preserving permutations of a clique, as a stabilizer chain.

    Permutations act on positions 0..n-1 of ``vertices``.
    """

    vertices: tuple[int, ...]
    order: int
    base: list[int]
    transversals: list[list[np.ndarray]] = field(repr=False)
    generators: list[np.ndarray] = field(repr=False)

    def as_maps(self, perm: np.ndarray) -> dict[int, int]:
        return {self.vertices[i]: self.vertices[int(perm[i])] for i in range(len(self.vertices))}

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        g = np.arange(len(self.vertices), dtype=np.int64)
        for t in self.transversals:
            g = g[t[int(rng.integers(len(t)))]]
        return g

    def iter_chunks(self, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
        """All elements, as row blocks of an (order, n) array."""
        n = len(self.vertices)
        levels = self.transversals

        def rec(level: int, prefix: np.ndarray) -> Iterator[np.ndarray]:
            rest = 1
            for t in levels[level:]:
                rest *= len(t)
            if rest <= chunk or level == len(levels):
                block = np.arange(n, dtype=np.int64)[None, :]
                for t in reversed(levels[level:]):
                    block = np.concatenate([tt[block] for tt in t])
                yield prefix[block]
                return
            for tt in levels[level]:
                yield from rec(level + 1, prefix[tt])

        yield from rec(0, np.arange(n, dtype=np.int64))


class _ColorSearch:
    """Backtracking for color-preserving bijections K1 -> K2 with a fixed prefix."""

    def __init__(self, K1: Sequence[int], K2: Sequence[int]):
        self.k1 = list(K1)
        self.k2 = list(K2)
        self.n = len(K1)
        self.g1 = GRAM[np.ix_(self.k1, self.k1)]
        self.g2 = GRAM[np.ix_(self.k2, self.k2)]
        inv1 = [tuple(sorted(r)) for r in self.g1.tolist()]
        inv2 = [tuple(sorted(r)) for r in self.g2.tolist()]
        self.cls1 = inv1
        self.by_inv2: dict[tuple, int] = {}
        for j, key in enumerate(inv2):
            self.by_inv2[key] = self.by_inv2.get(key, 0) | (1 << j)
        self.nb2 = {}
        for c in (-2, -1, 0, 1):
            self.nb2[c] = [sum(1 << j for j in range(self.n) if self.g2[i, j] == c) for i in range(self.n)]

    def find(self, prefix: Sequence[tuple[int, int]], order: Sequence[int]) -> Optional[np.ndarray]:
        """First bijection extending ``prefix`` (local index pairs), or None."""
        img = [-1] * self.n
        used = 0
        for a, b in prefix:
            if img[a] != -1 or (used >> b) & 1:
                return None
            img[a] = b
            used |= 1 << b
        fixed = [a for a, _ in prefix]
        for i, a in enumerate(fixed):
            if self.cls1[a] not in self.by_inv2 or not (self.by_inv2[self.cls1[a]] >> img[a]) & 1:
                return None
            for a2 in fixed[:i]:
                if self.g1[a, a2] != self.g2[img[a], img[a2]]:
                    return None
        rest = [a for a in order if img[a] == -1]
        placed = list(fixed)

        def rec(pos: int, used: int) -> bool:
            if pos == len(rest):
                return True
            a = rest[pos]
            cand = self.by_inv2.get(self.cls1[a], 0) & ~used
            for p in placed:
                cand &= self.nb2[int(self.g1[a, p])][img[p]]
                if not cand:
                    return False
            while cand:
                low = cand & -cand
                b = low.bit_length() - 1
                cand ^= low
                img[a] = b
                placed.append(a)
                if rec(pos + 1, used | low):
                    return True
                placed.pop()
                img[a] = -1
            return False

        if rec(0, used):
            return np.asarray(img, dtype=np.int64)
        return None


def _search_order(g1: np.ndarray) -> list[int]:
    """Vertex order: rarest color profile first, then by constraint."""
    n = len(g1)
    keys = [tuple(sorted(r)) for r in g1.tolist()]
    freq = {k: keys.count(k) for k in keys}
    return sorted(range(n), key=lambda i: (freq[keys[i]], i))


def automorphism_group(K: Sequence[int], max_size: int = 64) -> AutomorphismGroup:
    """All color-preserving vertex permutations of the clique K."""
    ks = tuple(sorted(set(int(v) for v in K)))
    n = len(ks)
    if n > max_size:
        raise ValueError(f"automorphism search is limited to {max_size} vertices")
    srch = _ColorSearch(ks, ks)
    order_v = _search_order(srch.g1)
    gens: list[np.ndarray] = []
    transversals: list[list[np.ndarray]] = []
    base: list[int] = []
    # deepest level first so each level sees the generators of its stabilizer
    levels = []
    for i, b in enumerate(order_v):
        levels.append((i, b))
    per_level_orbits: dict[int, dict[int, np.ndarray]] = {}
    for i, b in reversed(levels):
        fixed = order_v[:i]
        lvl_gens = [g for g in gens if all(g[x] == x for x in fixed)]
        orbit = orbit_under([b], lvl_gens)
        failed: set[int] = set()
        for u in range(n):
            if u in orbit or u in failed:
                continue
            g = srch.find([(x, x) for x in fixed] + [(b, u)], order_v)
            if g is None:
                failed |= orbit_under([u], lvl_gens)
            else:
                gens.append(g)
                lvl_gens.append(g)
                orbit = orbit_under([b], lvl_gens)
        per_level_orbits[i] = schreier_vector(b, lvl_gens, n)
    order = 1
    for i, b in levels:
        tv = per_level_orbits[i]
        if len(tv) > 1:
            base.append(b)
            transversals.append([tv[u] for u in sorted(tv)])
        order *= len(tv)
    return AutomorphismGroup(ks, order, base, transversals, gens)


def isomorphisms_exist(K1: Sequence[int], K2: Sequence[int]) -> Optional[dict[int, int]]:
    """Some color-preserving bijection K1 -> K2, or None."""
    k1 = sorted(set(K1))
    k2 = sorted(set(K2))
    if len(k1) != len(k2):
        return None
    srch = _ColorSearch(k1, k2)
    if sorted(srch.cls1) != sorted(tuple(sorted(r)) for r in srch.g2.tolist()):
        return None
    img = srch.find([], _search_order(srch.g1))
    if img is None:
        return None
    return {k1[i]: k2[int(img[i])] for i in range(len(k1))}
