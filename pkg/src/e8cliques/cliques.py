"""Exhaustive and seeded clique enumeration in the subgraphs of the root graph.

Maximal-clique searches run Bron-Kerbosch with pivoting in a compiled kernel.
A search is split into independent top-level branches, one per candidate
vertex, so that runs can be parallelised, budgeted and checkpointed.
"""

from __future__ import annotations

import json
import os
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .graph import (
    VERTEX_MASK,
    bits,
    build_subgraph,
    colors_label,
    is_clique,
    is_crosspolytope,
    mask_to_words,
    parse_colors,
)
from .roots import GRAM, N_ROOTS, ROOTS

TIER_BUDGETS = {"fast": 10**7, "standard": 10**10, "deep": None}
TIER_ENV = "E8CLIQUES_TIER"


class BudgetExceeded(RuntimeError):
    """A search visited more nodes than its tier allows."""


def default_tier() -> str:
    tier = os.environ.get(TIER_ENV, "standard")
    if tier not in TIER_BUDGETS:
        raise ValueError(f"{TIER_ENV}={tier!r}; expected one of {sorted(TIER_BUDGETS)}")
    return tier


@dataclass(frozen=True)
class SearchTask:
    colors: frozenset[int]
    seed: tuple[int, ...] = ()
    min_size: int = 0
    # sizes whose cliques are handed to the sink; None means all
    emit_sizes: Optional[frozenset[int]] = None

    @classmethod
    def make(cls, colors, seed: Iterable[int] = (), min_size: int = 0, emit_sizes=None) -> "SearchTask":
        cs = parse_colors(colors) if not isinstance(colors, frozenset) else colors
        sd = tuple(sorted(int(v) for v in seed))
        if not is_clique(sd, cs):
            raise ValueError(f"seed {sd} is not a clique in colors {colors_label(cs)}")
        es = None if emit_sizes is None else frozenset(int(s) for s in emit_sizes)
        return cls(cs, sd, int(min_size), es)

    def signature(self) -> dict:
        return {"colors": sorted(self.colors), "seed": list(self.seed), "min_size": self.min_size}


@dataclass
class SearchResult:
    histogram: dict[int, int]
    nodes: int
    branches: int
    resumed: int = 0

    def __post_init__(self):
        self.histogram = {k: v for k, v in sorted(self.histogram.items()) if v}


def _branches(task: SearchTask):
    g = build_subgraph(task.colors)
    cand = g.common_neighbors(task.seed) if task.seed else VERTEX_MASK
    cand &= ~sum(1 << v for v in task.seed)
    return g, cand


def _run_branch(adj, g, cand: int, v: int, task: SearchTask, budget: int, collect: bool):
    lower = cand & ((1 << v) - 1)
    higher = cand & ~((1 << (v + 1)) - 1)
    nb = g.masks[v]
    P = mask_to_words(higher & nb)
    X = mask_to_words(lower & nb)
    r0 = len(task.seed) + 1
    hist = np.zeros(_kernels.MAXD + 1, dtype=np.int64)
    empty_out = np.zeros((0, 1), dtype=np.int16)
    nodes, _, aborted = _kernels.bk_maximal(adj, P, X, r0, task.min_size, hist, 1, 0, empty_out, budget)
    if aborted:
        return nodes, None, None
    cliques = None
    if collect:
        sizes = np.flatnonzero(hist)
        if task.emit_sizes is not None:
            sizes = [s for s in sizes if s in task.emit_sizes]
        want = int(sum(hist[s] for s in sizes))
        cliques = []
        if want:
            lo, hi = int(min(sizes)), int(max(sizes))
            out = np.zeros((int(hist[lo : hi + 1].sum()), hi - r0 + 1), dtype=np.int16)
            h2 = np.zeros_like(hist)
            _, nout, _ = _kernels.bk_maximal(adj, P, X, r0, task.min_size, h2, lo, hi, out, -1)
            base = task.seed + (v,)
            for row in out[:nout]:
                extra = tuple(int(x) for x in row if x)
                size = len(base) + len(extra)
                if task.emit_sizes is None or size in task.emit_sizes:
                    cliques.append(tuple(sorted(base + extra)))
    return nodes, hist, cliques


class _Checkpoint:
    """Append-only log of finished top-level branches."""

    def __init__(self, path: str, task: SearchTask):
        self.path = path
        self.done: dict[int, tuple[dict[int, int], int]] = {}
        self._lock = threading.Lock()
        sig = task.signature()
        if os.path.exists(path):
            with open(path) as fh:
                lines = [json.loads(line) for line in fh if line.strip()]
            if not lines or lines[0].get("task") != sig:
                raise ValueError(f"checkpoint {path} belongs to a different task")
            for rec in lines[1:]:
                self.done[rec["branch"]] = ({int(k): v for k, v in rec["hist"].items()}, rec["nodes"])
        else:
            with open(path, "w") as fh:
                fh.write(json.dumps({"task": sig}) + "\n")

    def record(self, v: int, hist: dict[int, int], nodes: int) -> None:
        with self._lock, open(self.path, "a") as fh:
            fh.write(json.dumps({"branch": v, "hist": {str(k): c for k, c in hist.items()}, "nodes": nodes}) + "\n")
            fh.flush()
            os.fsync(fh.fileno())


def enumerate_maximal(
    task: SearchTask,
    sink: Optional[Callable[[tuple[int, ...]], None]] = None,
    *,
    workers: int = 1,
    tier: Optional[str] = None,
    checkpoint: Optional[str] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SearchResult:
    """Every maximal clique of the color subgraph containing the seed.

    Maximality is relative to the whole subgraph: a vertex that extends a
    clique containing the seed is adjacent to every seed vertex, so it lies in
    the candidate set searched here. Cliques reach ``sink`` in a fixed order
    independent of ``workers``.
    """
    if sink is not None and checkpoint is not None:
        raise ValueError("checkpointing stores counts only; it cannot be combined with a clique sink")
    tier = tier or default_tier()
    budget = TIER_BUDGETS[tier]
    g, cand = _branches(task)
    if cand == 0:
        hist = {len(task.seed): 1} if len(task.seed) >= task.min_size else {}
        if sink is not None and hist and (task.emit_sizes is None or len(task.seed) in task.emit_sizes):
            sink(task.seed)
        return SearchResult(hist, 0, 0)
    adj = g.word_matrix()
    order = bits(cand)
    ck = _Checkpoint(checkpoint, task) if checkpoint else None
    total = Counter()
    nodes_total = 0
    resumed = 0
    todo = []
    for v in order:
        if ck and v in ck.done:
            h, n = ck.done[v]
            total.update(h)
            nodes_total += n
            resumed += 1
        else:
            todo.append(v)
    remaining = [None if budget is None else budget - nodes_total]
    lock = threading.Lock()

    def job(v):
        with lock:
            b = remaining[0]
        n, hist, cl = _run_branch(adj, g, cand, v, task, -1 if b is None else max(b, 0), sink is not None)
        if hist is None:
            raise BudgetExceeded(f"tier {tier!r} node budget {budget} exceeded in branch at vertex {v}")
        h = {int(s): int(c) for s, c in enumerate(hist) if c}
        with lock:
            if remaining[0] is not None:
                remaining[0] -= n
        if ck:
            ck.record(v, h, n)
        return n, h, cl

    results = {}
    if workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for v, res in zip(todo, pool.map(job, todo)):
                results[v] = res
                if progress:
                    progress(len(results) + resumed, len(order))
    else:
        for v in todo:
            results[v] = job(v)
            if progress:
                progress(len(results) + resumed, len(order))
    for v in todo:
        n, h, cl = results[v]
        nodes_total += n
        total.update(h)
        if sink is not None:
            for c in cl:
                sink(c)
    if budget is not None and nodes_total > budget:
        raise BudgetExceeded(f"tier {tier!r} node budget {budget} exceeded")
    return SearchResult(dict(total), nodes_total, len(order), resumed)


def count_maximal_histogram(task: SearchTask, **kw) -> dict[int, int]:
    """Size histogram of the maximal cliques containing the seed."""
    return enumerate_maximal(task, None, **kw).histogram


def collect_maximal(task: SearchTask, **kw) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    enumerate_maximal(task, out.append, **kw)
    return out


def enumerate_k_cliques(colors, k: int, required: Sequence[int] = (), collect: bool = False):
    """Cliques of size k in the color subgraph containing ``required``.

    Returns the count, or with ``collect`` an (n, k) array of sorted indices.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    g = build_subgraph(parse_colors(colors) if not isinstance(colors, frozenset) else colors)
    req = tuple(sorted(int(v) for v in required))
    if not is_clique(req, g.colors):
        raise ValueError("required vertices do not form a clique")
    d = k - len(req)
    if d < 0:
        return np.zeros((0, k), dtype=np.int16) if collect else 0
    if d == 0:
        return np.array([req], dtype=np.int16) if collect else 1
    cand = g.common_neighbors(req) & ~sum(1 << v for v in req) if req else VERTEX_MASK
    counts = k_clique_profile(g, cand, d)
    n = counts[d]
    if not collect:
        return n
    out = np.zeros((n, d), dtype=np.int16)
    c2 = np.zeros(d + 2, dtype=np.int64)
    _kernels.k_cliques(g.word_matrix(), mask_to_words(cand), d, c2, d, out)
    if req:
        out = np.hstack([np.tile(np.array(req, dtype=np.int16), (n, 1)), out])
        out.sort(axis=1)
    return out


def k_clique_profile(g, cand: int, kmax: int) -> list[int]:
    """counts[d] = number of d-cliques inside the candidate mask, d <= kmax."""
    counts = np.zeros(kmax + 2, dtype=np.int64)
    _kernels.k_cliques(g.word_matrix(), mask_to_words(cand), kmax, counts, -1, np.zeros((0, 1), dtype=np.int16))
    counts[0] = 1
    return [int(x) for x in counts[: kmax + 1]]


def clique_counts(colors, kmax: int) -> dict[int, int]:
    """Number of k-cliques for k = 1..kmax in one pass."""
    g = build_subgraph(parse_colors(colors) if not isinstance(colors, frozenset) else colors)
    prof = k_clique_profile(g, VERTEX_MASK, kmax)
    return {k: prof[k] for k in range(1, kmax + 1)}


# --- faces of the root polytope ----------------------------------------------


def enumerate_crosspolytopes() -> list[tuple[int, ...]]:
    """All 7-crosspolytope faces, each once, as sorted 14-tuples."""
    ones = build_subgraph(frozenset({1}))
    zero = build_subgraph(frozenset({0}))
    seen = set()
    for e in range(1, N_ROOTS + 1):
        for f in bits(zero.masks[e]):
            if f < e:
                continue
            face = tuple(sorted([e, f] + bits(ones.masks[e] & ones.masks[f])))
            seen.add(face)
    out = sorted(seen)
    for face in out:
        assert is_crosspolytope(face)
    return out


def face_counts() -> dict[str, int]:
    """Number of k-faces for k = 1..7 (k-simplices plus crosspolytopes at k = 7)."""
    counts = clique_counts(frozenset({1}), 8)
    out = {f"{k}-simplex": counts[k + 1] for k in range(1, 8)}
    out["7-crosspolytope"] = len(enumerate_crosspolytopes())
    return out


def face_count_tuple() -> tuple[int, ...]:
    fc = face_counts()
    return tuple(fc[f"{k}-simplex"] for k in range(1, 8)) + (fc["7-crosspolytope"],)


def facet_normal(face: Sequence[int]) -> np.ndarray:
    """Outward normal of a facet, in doubled coordinates.

    For an 8-vertex simplex this is a third of the vertex sum, which pairs to 3
    with each vertex. For a crosspolytope it is the sum of an opposite pair,
    which pairs to 2 with each vertex.
    """
    ks = sorted(int(v) for v in face)
    if len(ks) == 8 and is_clique(ks, {1}):
        s = ROOTS[ks].sum(axis=0)
        if (s % 3).any():
            raise ValueError("vertex sum of a 7-simplex is not divisible by 3")
        n = s // 3
        level = 3
    elif is_crosspolytope(ks):
        e = ks[0]
        f = next(v for v in ks if GRAM[e, v] == 0)
        n = ROOTS[e] + ROOTS[f]
        level = 2
    else:
        raise ValueError("facet_normal expects a 7-simplex or a 7-crosspolytope")
    dots = (ROOTS[1:] @ n) // 4
    inside = dots[np.asarray(ks) - 1]
    assert (inside == level).all() and (np.delete(dots, np.asarray(ks) - 1) < level).all()
    return n

