"""Orbit classification of cliques and the two conjugacy/extension decision rules.

``decide_conjugate_thm1`` decides whether two cliques are W-conjugate from
their colored-graph isomorphism type alone, with a sum-in-2Λ test for
orthogonal 4-cliques and color-1 7-cliques. ``decide_extension_thm2`` decides
whether an isomorphism between cliques extends to W by checking small pattern
subsequences only, as listed per clique type in ``EXTENSION_TABLE``.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from numba import njit

from .cliques import SearchTask, count_maximal_histogram
from .graph import (
    chi_vector,
    classify_clique_type,
    clique_colors,
    find_pattern_sequences,
    pattern_gram,
)
from .roots import (
    N_ROOTS as N_ROOTS_,
    GRAM,
    ROOTS,
    in_2lambda,
    in_double_plus_double,
    in_double_root_plus_root,
)
from .weyl import (
    are_conjugate_sets,
    automorphism_group,
    conjugates_containing,
    isomorphisms_exist,
    setwise_stabilizer,
)

ALL_EXTEND = ()

# patterns to check per clique type; an empty tuple means every isomorphism extends
EXTENSION_TABLE: dict[tuple, tuple[str, ...]] = {
    ("I", -2): ALL_EXTEND,
    ("I", -1): ALL_EXTEND,
    ("I", 0): ("A",),
    ("I", 1): ("B",),
    # a color-1 clique has no A occurrences; B separates the two 7-clique orbits
    ("II", "simplex"): ("B",),
    ("II", "crosspolytope"): ("B",),
    ("III",): ALL_EXTEND,
    ("IV", frozenset({-2})): ALL_EXTEND,
    ("IV", frozenset({-1})): ALL_EXTEND,
    ("IV", frozenset({0})): ("A",),
    ("IV", frozenset({1})): ALL_EXTEND,
    ("IV", frozenset({-2, -1})): ALL_EXTEND,
    ("IV", frozenset({-2, 0})): ("A",),
    ("IV", frozenset({-2, 1})): ALL_EXTEND,
    ("IV", frozenset({-1, 0})): ("A", "C-1"),
    ("IV", frozenset({-1, 1})): ALL_EXTEND,
    ("IV", frozenset({0, 1})): ALL_EXTEND,
    ("IV", frozenset({-2, -1, 0})): ("A", "C-1"),
    ("IV", frozenset({-2, -1, 1})): ALL_EXTEND,
    ("IV", frozenset({-2, 0, 1})): ("A", "C1", "D", "F"),
    ("IV", frozenset({-2, -1, 0, 1})): ALL_EXTEND,
}

_TYPE_RANK = {"I": 0, "II": 1, "III": 2, "IV": 3}


def _type_sort_key(t: tuple):
    if t[0] == "IV":
        return (3, len(t[1]), tuple(sorted(t[1])))
    return (_TYPE_RANK[t[0]], 0, tuple(str(x) for x in t[1:]))


# --- invariants ---------------------------------------------------------------------


def _ks(K: Iterable[int]) -> list[int]:
    return sorted(set(int(v) for v in K))


def orthogonal_pair_count(K: Sequence[int]) -> int:
    ks = _ks(K)
    g = GRAM[np.ix_(ks, ks)]
    return int((np.triu(g == 0, 1)).sum())


def has_inverse_pair(K: Sequence[int]) -> bool:
    ks = _ks(K)
    return bool((GRAM[np.ix_(ks, ks)] == -2).any())


def sum_in_2lambda(K: Sequence[int]) -> bool:
    return in_2lambda(ROOTS[_ks(K)].sum(axis=0))


def has_orthogonal_subclique(K: Sequence[int], r: int = 7) -> bool:
    """Whether K contains r pairwise orthogonal roots."""
    from .graph import maximal_cliques_within

    return any(len(c) >= r for c in maximal_cliques_within(K, 0))


def _refined_labels(ks: list[int], rounds: int = 3) -> tuple[np.ndarray, list[tuple]]:
    """Color-refinement classes of the vertices of K, numbered canonically.

    Starts from each vertex's multiset of colored triangles, which separates
    graphs that plain degree refinement does not.
    """
    g = GRAM[np.ix_(ks, ks)]
    n = len(ks)
    gl = g.tolist()
    sigs: list[tuple] = []
    for i in range(n):
        tri = sorted(
            (min(gl[i][j], gl[i][k]), max(gl[i][j], gl[i][k]), gl[j][k])
            for j in range(n)
            for k in range(j + 1, n)
            if i != j and i != k
        )
        sigs.append(tuple(tri))
    table = sorted(set(sigs))
    labels = [table.index(sig) for sig in sigs]
    history = [tuple(table)]
    for _ in range(rounds):
        sigs = [(labels[i],) + tuple(sorted((gl[i][j], labels[j]) for j in range(n) if j != i)) for i in range(n)]
        table = sorted(set(sigs))
        new = [table.index(sig) for sig in sigs]
        history.append(tuple(table))
        if len(table) == len(set(labels)):
            break
        labels = new
    return np.asarray(new if n else labels, dtype=np.int64), history


def _walk_counts(ks: list[int]) -> list[tuple[int, ...]]:
    """Closed walk counts tr(A^k), k <= min(|K|, 10), of each color graph inside K.

    These separate regular graphs with different cycle structure, e.g. an
    8-cycle from two 4-cycles.
    """
    g = GRAM[np.ix_(ks, ks)]
    n = len(ks)
    a = (g[None, :, :] == np.array([-2, -1, 0, 1])[:, None, None]).astype(np.int64)
    a[:, np.arange(n), np.arange(n)] = 0
    m = a.copy()
    traces = []
    for _ in range(min(n, 10)):  # 28**10 * 29 stays inside int64
        traces.append(np.trace(m, axis1=1, axis2=2))
        m = m @ a
    return [tuple(int(x) for x in col) for col in np.array(traces).T] if traces else []


def profile_digest(K: Sequence[int]) -> str:
    """W-invariant digest of a clique.

    Combines color-refinement classes of the vertices with the multiset, over
    all 240 roots, of inner products against each class.
    """
    ks = _ks(K)
    n = len(ks)
    labels, history = _refined_labels(ks)
    nl = int(labels.max()) + 1 if n else 0
    # counts[r, (d, l)] = number of k in class l with r.k = d
    width = 5 * nl
    code = (GRAM[1:, ks] + 2) * nl + labels[None, :]
    flat = (np.arange(N_ROOTS_)[:, None] * width + code).ravel()
    counts = np.bincount(flat, minlength=N_ROOTS_ * width).reshape(N_ROOTS_, width).astype(np.uint8)
    rowkeys = np.ascontiguousarray(counts).view(np.dtype((np.void, width))).ravel()
    uniq, mult = np.unique(rowkeys, return_counts=True)
    rows = (uniq.tobytes(), mult)
    h = hashlib.blake2b(digest_size=12)
    h.update(repr(history).encode())
    h.update(repr(_walk_counts(ks)).encode())
    h.update(np.sort(labels).tobytes())
    h.update(rows[0])
    h.update(rows[1].tobytes())
    return h.hexdigest()


@dataclass
class OrbitRecord:
    representative: tuple[int, ...]
    size: int
    stabilizer: int
    aut_order: int
    orthogonal_pairs: int
    inverse_pair: bool
    chi: tuple[int, ...]
    sum_in_2lambda: bool
    orthogonal_7: bool
    members: Optional[int] = None
    certified: bool = True  # False when members were bucketed but not pairwise tested

    def fingerprint(self) -> tuple:
        return (
            self.size,
            self.stabilizer,
            self.aut_order,
            self.orthogonal_pairs,
            self.inverse_pair,
            self.chi,
            self.sum_in_2lambda,
            self.orthogonal_7,
        )

    def orbit_length(self, group_order: int = 696729600) -> int:
        return group_order // self.stabilizer

    def as_dict(self) -> dict:
        d = asdict(self)
        d["representative"] = list(self.representative)
        d["chi"] = list(self.chi)
        return d


def orbit_record(K: Sequence[int], members: Optional[int] = None, certified: bool = True) -> OrbitRecord:
    ks = tuple(_ks(K))
    return OrbitRecord(
        representative=ks,
        size=len(ks),
        stabilizer=setwise_stabilizer(ks).order,
        aut_order=automorphism_group(ks).order,
        orthogonal_pairs=orthogonal_pair_count(ks),
        inverse_pair=has_inverse_pair(ks),
        chi=chi_vector(ks),
        sum_in_2lambda=sum_in_2lambda(ks),
        orthogonal_7=has_orthogonal_subclique(ks, 7),
        members=members,
        certified=certified,
    )


# --- orbit partition ----------------------------------------------------------------


@dataclass
class Partition:
    records: list[OrbitRecord]
    assignment: dict[tuple[int, ...], int] = field(repr=False)  # clique -> record position


def orbit_partition(
    cliques: Iterable[Sequence[int]],
    *,
    dedupe: str = "pairwise",
    sample: int = 20,
    seed: int = 0,
    closed: bool = False,
) -> Partition:
    """Split cliques into W-orbits.

    Cliques are bucketed by a W-invariant digest; within a bucket each clique is
    tested for conjugacy against the bucket's representatives found so far.
    ``dedupe="sample"`` takes the least clique of each bucket as its
    representative and checks conjugacy only for a random sample of members;
    such records are marked uncertified and should be closed off with
    ``census_verify``. With ``closed=True`` the input is promised to be a union
    of whole W-orbits (e.g. all maximal cliques of one size); a sampled bucket
    whose size equals the orbit length of its representative is then certified.
    """
    if dedupe not in ("pairwise", "sample"):
        raise ValueError("dedupe must be 'pairwise' or 'sample'")
    buckets: dict[tuple, list[tuple[int, ...]]] = defaultdict(list)
    for K in cliques:
        ks = tuple(_ks(K))
        buckets[(len(ks), profile_digest(ks))].append(ks)
    rng = np.random.default_rng(seed)
    reps: list[tuple[tuple[int, ...], int, bool]] = []
    assignment: dict[tuple[int, ...], int] = {}
    for key in sorted(buckets, key=lambda k: (k[0], min(buckets[k]))):
        members = sorted(buckets[key])
        if dedupe == "pairwise":
            local: list[int] = []
            counts: dict[int, int] = {}
            for ks in members:
                for pos in local:
                    if are_conjugate_sets(reps[pos][0], ks):
                        assignment[ks] = pos
                        counts[pos] += 1
                        break
                else:
                    reps.append((ks, 0, True))
                    local.append(len(reps) - 1)
                    assignment[ks] = len(reps) - 1
                    counts[len(reps) - 1] = 1
            for pos, c in counts.items():
                reps[pos] = (reps[pos][0], c, True)
        else:
            rep = members[0]
            picks = rng.choice(len(members), size=min(sample, len(members)), replace=False)
            for i in picks:
                if not are_conjugate_sets(rep, members[i]):
                    raise RuntimeError(f"bucket of {rep} holds more than one orbit; rerun with dedupe='pairwise'")
            reps.append((rep, len(members), False))
            for ks in members:
                assignment[ks] = len(reps) - 1
    records = [orbit_record(r, members=c, certified=cert) for r, c, cert in reps]
    if closed:
        for rec in records:
            if not rec.certified and rec.members == rec.orbit_length():
                rec.certified = True
    return Partition(records, assignment)


# --- conjugacy from the isomorphism type --------------------------------------------


def clique_types(K: Sequence[int]) -> set[tuple]:
    return classify_clique_type(K)


def decide_conjugate_thm1(K1: Sequence[int], K2: Sequence[int]) -> bool:
    """Conjugacy of two cliques of types I-IV from isomorphism type and sums."""
    k1, k2 = _ks(K1), _ks(K2)
    for k in (k1, k2):
        if not classify_clique_type(k):
            raise ValueError(f"clique {tuple(k)} is not of type I, II, III or IV")
    if isomorphisms_exist(k1, k2) is None:
        return False
    c1 = clique_colors(k1)
    if len(k1) in (4, 7) and c1 == clique_colors(k2) and c1 == ({0} if len(k1) == 4 else {1}):
        return sum_in_2lambda(k1) == sum_in_2lambda(k2)
    return True


# --- extension by pattern checks ----------------------------------------------------

_SIGNS = {
    "A": (1, 1, 1, 1),
    "B": (1,) * 7,
    "C-1": (1, 1, 1, -1, -1),
    "C1": (1,) * 5,
    "D": (1,) * 5,
    "F": (1,) * 6,
}


def _predicate(kind: str):
    if kind in ("A", "B", "F"):
        return in_2lambda
    if kind in ("C-1", "C1"):
        return in_double_root_plus_root
    return in_double_plus_double


def _matches(seq: Sequence[int], kind: str) -> bool:
    g = pattern_gram(kind)
    s = list(seq)
    return len(s) == len(g) and len(set(s)) == len(s) and bool((GRAM[np.ix_(s, s)] == g).all())


def sequence_value(seq: Sequence[int], kind: str) -> bool:
    v = (ROOTS[list(seq)] * np.asarray(_SIGNS[kind])[:, None]).sum(axis=0)
    return _predicate(kind)(v)


def sequence_conjugacy_criterion(S: Sequence[int], S2: Sequence[int], kind: str) -> bool:
    """Conjugacy of two pattern sequences by the sum-membership tests.

    A, B: same sum-in-2Λ status of the underlying sets. C-1: e1+e2+e3-e4-e5 in
    {2f1+f2}. C1: the plain sum in {2f1+f2}. D: sum in {2f1+2f2}. F: sum in 2Λ.
    Valid for C, D and F only inside the maximal-clique contexts of the table.
    """
    if kind not in _SIGNS:
        raise ValueError(f"unknown pattern kind {kind!r}")
    for s in (S, S2):
        if not _matches(s, kind):
            raise ValueError(f"sequence {tuple(s)} does not carry pattern {kind}")
    return sequence_value(S, kind) == sequence_value(S2, kind)


def choose_context(K1: Sequence[int], K2: Sequence[int]) -> tuple:
    common = classify_clique_type(K1) & classify_clique_type(K2)
    rows = [t for t in common if t in EXTENSION_TABLE]
    if not rows:
        raise ValueError("the two cliques share no type covered by the extension table")
    return min(rows, key=_type_sort_key)


@njit(cache=True)
def _check_perms(perms, seqs, ordered, src_flags, keys, flags, out):
    n_perm = perms.shape[0]
    p, r = seqs.shape
    buf = np.empty(r, dtype=np.int64)
    for a in range(n_perm):
        if not out[a]:
            continue
        for s in range(p):
            for j in range(r):
                buf[j] = perms[a, seqs[s, j]]
            if not ordered:
                buf.sort()
            key = 0
            for j in range(r):
                key = key * 64 + buf[j]
            pos = np.searchsorted(keys, key)
            if pos >= keys.shape[0] or keys[pos] != key:
                out[a] = False  # image is not a pattern occurrence
                break
            if flags[pos] != src_flags[s]:
                out[a] = False
                break
    return out


class ExtensionChecker:
    """Pattern-check decision for many isomorphisms K1 -> K2 at once.

    Isomorphisms are given as arrays over positions: ``perm[i] = j`` sends the
    i-th smallest vertex of K1 to the j-th smallest vertex of K2.
    """

    def __init__(self, K1: Sequence[int], K2: Sequence[int], context: Optional[tuple] = None):
        self.k1 = _ks(K1)
        self.k2 = _ks(K2)
        if len(self.k1) != len(self.k2) or len(self.k1) > 64:
            raise ValueError("cliques must have equal size at most 64")
        self.context = context if context is not None else choose_context(self.k1, self.k2)
        if self.context not in EXTENSION_TABLE:
            raise ValueError(f"context {self.context} is not in the extension table")
        self.kinds = EXTENSION_TABLE[self.context]
        pos1 = {v: i for i, v in enumerate(self.k1)}
        self._plans = []
        for kind in self.kinds:
            seqs = find_pattern_sequences(self.k1, kind)
            if not seqs:
                continue
            local = np.array([[pos1[v] for v in s] for s in seqs], dtype=np.int64)
            src = np.array([sequence_value(s, kind) for s in seqs], dtype=np.bool_)
            keys, flags = self._target_table(kind)
            self._plans.append((kind, local, kind not in ("A", "B"), src, keys, flags))

    def _target_table(self, kind: str):
        ordered = kind not in ("A", "B")
        seqs = find_pattern_sequences(self.k2, kind)
        pos2 = {v: i for i, v in enumerate(self.k2)}
        table = {}
        for s in seqs:
            val = sequence_value(s, kind)
            if ordered:
                variants = _role_orbit(s, kind)
            else:
                variants = [tuple(sorted(s))]
            for var in variants:
                key = 0
                for v in var:
                    key = key * 64 + pos2[v]
                table[key] = val
        keys = np.array(sorted(table), dtype=np.int64)
        flags = np.array([table[k] for k in keys.tolist()], dtype=np.bool_)
        return keys, flags

    def decide_many(self, perms: np.ndarray) -> np.ndarray:
        perms = np.ascontiguousarray(perms, dtype=np.int64)
        out = np.ones(len(perms), dtype=np.bool_)
        for _, local, ordered, src, keys, flags in self._plans:
            _check_perms(perms, local, ordered, src, keys, flags, out)
        return out

    def decide(self, f: Mapping[int, int]) -> bool:
        pos2 = {v: i for i, v in enumerate(self.k2)}
        perm = np.array([[pos2[f[v]] for v in self.k1]], dtype=np.int64)
        return bool(self.decide_many(perm)[0])


def _role_orbit(seq: tuple[int, ...], kind: str) -> list[tuple[int, ...]]:
    if kind in ("C-1", "C1"):
        syms = [(0, 1, 2, 3, 4), (1, 0, 2, 4, 3)]
    elif kind == "D":
        syms = [p + q for p in itertools.permutations(range(3)) for q in ((3, 4), (4, 3))]
    else:
        syms = [p + (5,) for p in itertools.permutations(range(5))]
    return list({tuple(seq[i] for i in p) for p in syms})


def _check_isomorphism(K1: Sequence[int], K2: Sequence[int], f: Mapping[int, int]) -> None:
    k1, k2 = _ks(K1), _ks(K2)
    if sorted(f) != k1 or sorted(f.values()) != k2:
        raise ValueError("f must be a bijection K1 -> K2")
    src = k1
    tgt = [f[v] for v in k1]
    if not (GRAM[np.ix_(src, src)] == GRAM[np.ix_(tgt, tgt)]).all():
        raise ValueError("f does not preserve colors")


def decide_extension_thm2(
    K1: Sequence[int], K2: Sequence[int], f: Mapping[int, int], context: Optional[tuple] = None
) -> bool:
    """Whether the color isomorphism f: K1 -> K2 extends to an element of W."""
    _check_isomorphism(K1, K2, f)
    return ExtensionChecker(K1, K2, context).decide(f)


# --- census completeness ------------------------------------------------------------


def count_conjugate_subsets(S: Sequence[int], A: Sequence[int]) -> int:
    """Number of subsets of S that are W-conjugate to A."""
    ks = _ks(S)
    a = _ks(A)
    target_gram = sorted(GRAM[np.ix_(a, a)].ravel().tolist())
    digest = profile_digest(a)
    total = 0
    for combo in itertools.combinations(ks, len(a)):
        g = sorted(GRAM[np.ix_(combo, combo)].ravel().tolist())
        if g != target_gram or profile_digest(combo) != digest:
            continue
        if are_conjugate_sets(a, combo):
            total += 1
    return total


@dataclass
class CensusReport:
    colors: tuple[int, ...]
    seed: tuple[int, ...]
    seed_stabilizer: int
    rows: list[dict]
    by_size: dict[int, dict]
    ok: bool


def census_verify(
    colors,
    seed: Sequence[int],
    reps: Sequence[OrbitRecord],
    histogram: Optional[Mapping[int, int]] = None,
    sizes: Optional[Iterable[int]] = None,
) -> CensusReport:
    """Check that the orbit representatives account for every seeded clique.

    For each representative S the number of seed conjugates it contains (m) and
    the stabilizer sizes give m |W_A| / |W_S| conjugates of S through the seed;
    per size these must add up to the seeded histogram.
    """
    from .graph import parse_colors

    cs = parse_colors(colors) if not isinstance(colors, frozenset) else colors
    sd = tuple(_ks(seed))
    stab_a = setwise_stabilizer(sd).order
    if histogram is None:
        histogram = count_maximal_histogram(SearchTask.make(cs, sd))
    wanted = set(sizes) if sizes is not None else {r.size for r in reps}
    rows = []
    totals: dict[int, int] = defaultdict(int)
    for rec in reps:
        if rec.size not in wanted:
            continue
        m = count_conjugate_subsets(rec.representative, sd)
        c = conjugates_containing(m, stab_a, rec.stabilizer)
        totals[rec.size] += c
        rows.append({"representative": rec.representative, "m": m, "stabilizer": rec.stabilizer, "contribution": c})
    by_size = {}
    for s in sorted(wanted):
        obs = int(histogram.get(s, 0))
        by_size[s] = {"predicted": totals.get(s, 0), "observed": obs, "ok": totals.get(s, 0) == obs}
    return CensusReport(tuple(sorted(cs)), sd, stab_a, rows, by_size, all(v["ok"] for v in by_size.values()))
