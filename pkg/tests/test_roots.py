import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from e8cliques.roots import (
    GRAM,
    N_ROOTS,
    ROOTS,
    as_vector,
    dot,
    generate_root_system,
    in_2lambda,
    in_2lambda_many,
    in_double_plus_double,
    in_double_root_plus_root,
    in_lattice,
    neighbor_histogram,
    root_index,
    roots_csv,
    roots_json,
    vector_sum,
)

root_ids = st.integers(min_value=1, max_value=N_ROOTS)


def lattice_vectors(max_terms=6):
    """Integer combinations of roots, so always in the lattice."""
    return st.lists(st.tuples(root_ids, st.integers(-3, 3)), min_size=0, max_size=max_terms).map(
        lambda terms: sum((c * ROOTS[i] for i, c in terms), np.zeros(8, dtype=np.int64))
    )


def test_root_count_and_norms():
    roots = generate_root_system()
    assert len(roots) == 240
    assert [r.index for r in roots] == list(range(1, 241))
    assert all(int(np.dot(r.coords, r.coords)) == 8 for r in roots)
    assert len({tuple(r.coords) for r in roots}) == 240


def test_index_anchors():
    assert tuple(ROOTS[1]) == (-1,) * 8
    assert tuple(ROOTS[128]) == (1,) * 8
    assert tuple(ROOTS[129]) == (-2, -2, 0, 0, 0, 0, 0, 0)
    assert tuple(ROOTS[240]) == (2, 2, 0, 0, 0, 0, 0, 0)


def test_two_blocks_are_lexicographic():
    half = [tuple(r) for r in ROOTS[1:129]]
    whole = [tuple(r) for r in ROOTS[129:241]]
    assert half == sorted(half) and whole == sorted(whole)
    assert all(all(abs(x) == 1 for x in r) for r in half)
    assert all(sorted(abs(x) for x in r) == [0] * 6 + [2, 2] for r in whole)


def test_generation_is_deterministic():
    a = [tuple(r.coords) for r in generate_root_system()]
    b = [tuple(r.coords) for r in generate_root_system()]
    assert a == b


def test_gram_matches_coordinates():
    g = ROOTS[1:] @ ROOTS[1:].T
    assert (g % 4 == 0).all()
    assert (GRAM[1:, 1:] == g // 4).all()
    assert (GRAM[0] == 0).all() and (GRAM[:, 0] == 0).all()


@pytest.mark.parametrize("e", [1, 17, 128, 129, 200, 240])
def test_neighbor_histogram(e):
    h = neighbor_histogram(e)
    assert h == {1: 56, 0: 126, -1: 56, -2: 1}
    assert sum(h.values()) == 239


def test_neighbor_histogram_all_roots():
    for e in range(1, N_ROOTS + 1):
        assert neighbor_histogram(e) == {1: 56, 0: 126, -1: 56, -2: 1}


def test_dot_basics():
    neg = root_index(-ROOTS[5])
    assert dot(5, 5) == 2
    assert dot(5, neg) == -2
    assert dot(ROOTS[240], ROOTS[129]) == -2


def test_dot_rejects_non_lattice():
    with pytest.raises(ValueError):
        dot((1, 0, 0, 0, 0, 0, 0, 0), (1, 0, 0, 0, 0, 0, 0, 0))


def test_in_2lambda_examples():
    # plain coordinates, doubled on the way in
    assert in_2lambda(2 * np.array([5, 3, 3, 3, -1, 1, 1, 1]))
    assert in_2lambda((0,) * 8)
    assert not in_2lambda(2 * np.array([2, 4, 4, 4, 1, -1, -1, -1]))
    with pytest.raises(ValueError):
        in_2lambda((1, 0, 0, 0, 0, 0, 0, 0))


def test_in_2lambda_many_agrees():
    rng = np.random.default_rng(3)
    vs = np.array([ROOTS[rng.integers(1, 241, size=4)].sum(axis=0) for _ in range(200)])
    assert in_2lambda_many(vs).tolist() == [in_2lambda(v) for v in vs]


@given(lattice_vectors())
def test_lattice_closed_under_root_combinations(v):
    assert in_lattice(v)
    assert in_2lambda(2 * v)


@given(root_ids, root_ids)
def test_double_root_plus_root_oracle(a, b):
    v = 2 * ROOTS[a] + ROOTS[b]
    assert in_double_root_plus_root(v)
    assert in_double_plus_double(2 * ROOTS[a] + 2 * ROOTS[b])


def _brute_2f1_f2():
    out = set()
    for a, b in itertools.product(range(1, 241), repeat=2):
        out.add(tuple(2 * ROOTS[a] + ROOTS[b]))
    return out


def test_double_root_plus_root_exact_set():
    # random sums of three roots against the brute-force image of (f1, f2) -> 2f1 + f2
    image = _brute_2f1_f2()
    rng = np.random.default_rng(0)
    for _ in range(400):
        idx = rng.integers(1, 241, size=3)
        v = ROOTS[idx[0]] + ROOTS[idx[1]] + ROOTS[idx[2]]
        assert in_double_root_plus_root(v) == (tuple(v) in image)


def test_double_plus_double_requires_even():
    assert not in_double_plus_double(ROOTS[1])
    assert in_double_plus_double(np.zeros(8, dtype=np.int64))  # 2e + 2(-e)


def test_as_vector_and_index_roundtrip():
    for i in (1, 77, 240):
        assert root_index(as_vector(i)) == i
    with pytest.raises(ValueError):
        root_index((1, 1, 1, 1, 1, 1, 1, 1, 1))


def test_vector_sum():
    assert (vector_sum([1, 128]) == 0).all()


def test_exports():
    lines = roots_csv().strip().splitlines()
    assert len(lines) == 241
    import json

    data = json.loads(roots_json())
    assert len(data) == 240
