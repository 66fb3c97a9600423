"""The E8 lattice and its 240 roots in doubled integer coordinates.

Every lattice vector ``a`` is stored as ``2a``, an integer 8-vector. A doubled
vector lies in the lattice iff its entries share one parity and their sum is
divisible by 4. Roots carry a canonical index 1..240: the 128 half-integer
roots in lexicographic order come first, then the 112 integer roots.

Index arrays are 1-based throughout the package. ``ROOTS`` and ``GRAM`` carry a
zero row/column at position 0 so that a root index can be used directly.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from typing import NamedTuple, Sequence, Union

import numpy as np

N_ROOTS = 240
COLORS = (-2, -1, 0, 1)


class Root(NamedTuple):
    index: int
    coords: tuple[int, ...]  # doubled coordinates


def _build_roots() -> np.ndarray:
    half = [v for v in itertools.product((-1, 1), repeat=8) if v.count(-1) % 2 == 0]
    whole = []
    for i, j in itertools.combinations(range(8), 2):
        for a in (-2, 2):
            for b in (-2, 2):
                v = [0] * 8
                v[i], v[j] = a, b
                whole.append(tuple(v))
    table = np.zeros((N_ROOTS + 1, 8), dtype=np.int64)
    table[1:] = sorted(half) + sorted(whole)
    return table


ROOTS = _build_roots()
ROOTS.setflags(write=False)

# dot products between roots; GRAM[0] and GRAM[:, 0] are padding
GRAM = (ROOTS @ ROOTS.T) // 4
GRAM.setflags(write=False)

_INDEX = {tuple(int(x) for x in ROOTS[i]): i for i in range(1, N_ROOTS + 1)}

# anchors from the canonical numbering
assert tuple(ROOTS[1]) == (-1,) * 8 and tuple(ROOTS[128]) == (1,) * 8
assert tuple(ROOTS[129]) == (-2, -2, 0, 0, 0, 0, 0, 0)
assert tuple(ROOTS[240]) == (2, 2, 0, 0, 0, 0, 0, 0)

Vec = Union[int, Sequence[int], np.ndarray]


def generate_root_system() -> list[Root]:
    """All 240 roots in canonical index order."""
    return [Root(i, tuple(int(x) for x in ROOTS[i])) for i in range(1, N_ROOTS + 1)]


def as_vector(v: Vec) -> np.ndarray:
    """Doubled coordinates of ``v``; an int is read as a root index."""
    if isinstance(v, (int, np.integer)):
        if not 1 <= v <= N_ROOTS:
            raise IndexError(f"root index {v} outside 1..{N_ROOTS}")
        return ROOTS[int(v)]
    arr = np.asarray(v, dtype=np.int64)
    if arr.shape != (8,):
        raise ValueError(f"expected 8 doubled coordinates, got shape {arr.shape}")
    return arr


def root_index(v: Sequence[int]) -> int:
    """Canonical index of the root with doubled coordinates ``v``."""
    try:
        return _INDEX[tuple(int(x) for x in v)]
    except KeyError:
        raise ValueError(f"{tuple(v)} is not a root") from None


def in_lattice(v: Vec) -> bool:
    a = as_vector(v)
    par = a % 2
    return bool((par == par[0]).all() and a.sum() % 4 == 0)


def _require_lattice(v: Vec) -> np.ndarray:
    a = as_vector(v)
    if not in_lattice(a):
        raise ValueError(f"{tuple(int(x) for x in a)} is not a doubled lattice vector")
    return a


def dot(a: Vec, b: Vec) -> int:
    """Exact inner product of two lattice vectors."""
    s = int(as_vector(a) @ as_vector(b))
    if s % 4:
        raise ValueError("inner product is not an integer; inputs are not lattice vectors")
    return s // 4


def neighbor_histogram(e: int) -> dict[int, int]:
    """Counts of each color between root ``e`` and the other 239 roots."""
    row = np.delete(GRAM[as_index(e), 1:], as_index(e) - 1)
    return {c: int((row == c).sum()) for c in (1, 0, -1, -2)}


def as_index(e: Vec) -> int:
    if isinstance(e, (int, np.integer)):
        as_vector(e)
        return int(e)
    return root_index(as_vector(e))


def in_2lambda(v: Vec) -> bool:
    """True iff ``v`` is twice a lattice vector."""
    a = _require_lattice(v)
    if (a % 2).any():
        return False
    return in_lattice(a // 2)


def in_2lambda_many(vs: np.ndarray) -> np.ndarray:
    """Vectorised ``in_2lambda`` for rows of doubled lattice vectors (unchecked)."""
    vs = np.asarray(vs, dtype=np.int64)
    even = (vs % 2 == 0).all(axis=1)
    h = vs // 2
    par = h % 2
    same = (par == par[:, :1]).all(axis=1)
    return even & same & (h.sum(axis=1) % 4 == 0)


def _is_root_rows(vs: np.ndarray) -> np.ndarray:
    return (vs * vs).sum(axis=-1) == 8


def in_double_root_plus_root(v: Vec) -> bool:
    """True iff ``v = 2f1 + f2`` for roots f1, f2 (scan over f1)."""
    a = _require_lattice(v)
    return bool(_is_root_rows(a - 2 * ROOTS[1:]).any())


def in_double_plus_double(v: Vec) -> bool:
    """True iff ``v = 2f1 + 2f2`` for roots f1, f2 (scan over f1)."""
    a = _require_lattice(v)
    if (a % 2).any() or not in_lattice(a // 2):
        return False
    return bool(_is_root_rows(a // 2 - ROOTS[1:]).any())


def roots_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"x{k}" for k in range(1, 9)])
    for i in range(1, N_ROOTS + 1):
        w.writerow([i] + [int(x) for x in ROOTS[i]])
    return buf.getvalue()


def roots_json() -> str:
    rows = [{"index": i, "doubled": [int(x) for x in ROOTS[i]]} for i in range(1, N_ROOTS + 1)]
    return json.dumps(rows)


def vector_sum(indices: Sequence[int]) -> np.ndarray:
    """Doubled coordinates of the sum of the given roots."""
    return ROOTS[np.asarray(list(indices), dtype=np.int64)].sum(axis=0)
