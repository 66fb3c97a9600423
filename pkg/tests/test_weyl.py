import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from e8cliques.cliques import enumerate_crosspolytopes
from e8cliques.roots import GRAM, N_ROOTS, ROOTS, in_2lambda, root_index
from e8cliques.sampling import random_clique, random_tuple
from e8cliques.weyl import (
    SIMPLE_ROOTS,
    W_ORDER,
    WeylElement,
    are_conjugate,
    are_conjugate_sets,
    automorphism_group,
    conjugates_containing,
    conjugating_element,
    element_from_perm,
    extend_isometry,
    extends_batch,
    group_order,
    isomorphisms_exist,
    orbit_size,
    pointwise_stabilizer_order,
    random_element,
    reflection,
    setwise_stabilizer,
    simple_reflections,
)

SIXTEEN = (1, 8, 26, 31, 43, 46, 52, 53, 76, 77, 83, 86, 98, 103, 121, 128)
TWELVE = (240, 214, 196, 184, 11, 36, 49, 46, 22, 69, 74, 84)

seeds = st.integers(0, 2**32 - 1)


def test_simple_roots_form_e8_diagram():
    g = GRAM[np.ix_(SIMPLE_ROOTS, SIMPLE_ROOTS)]
    assert (np.diag(g) == 2).all()
    edges = {(i, j) for i in range(8) for j in range(i + 1, 8) if g[i, j] == -1}
    assert len(edges) == 7 and (g[np.triu_indices(8, 1)] >= -1).all()
    assert abs(round(np.linalg.det(g.astype(float)))) == 1  # unimodular


def test_group_order_from_simple_reflections():
    assert group_order(simple_reflections()) == W_ORDER


def test_group_order_from_all_reflections():
    assert group_order([reflection(e) for e in range(1, N_ROOTS + 1)]) == W_ORDER


def test_reflection_properties():
    for e in (1, 100, 240):
        r = reflection(e)
        r.validate()
        neg = root_index(-ROOTS[e])
        assert r(e) == neg
        assert (r @ r).is_identity()


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_elements_are_lattice_automorphisms(seed):
    rng = np.random.default_rng(seed)
    a, b = random_element(rng), random_element(rng)
    for w in (a, b, a @ b, a.inverse()):
        w.validate()
    assert (a @ a.inverse()).is_identity()
    assert element_from_perm(a.perm).matrix4.tolist() == a.matrix4.tolist()
    v = ROOTS[7] + ROOTS[9]
    assert (a.apply_vector(v) == ROOTS[a(7)] + ROOTS[a(9)]).all()


def test_element_from_perm_rejects_junk():
    p = np.arange(N_ROOTS + 1)
    p[[1, 2]] = p[[2, 1]]
    with pytest.raises(ArithmeticError):
        element_from_perm(p)


def test_orbit_sizes():
    assert orbit_size([240]) == 240
    assert orbit_size([240, 184]) == 30240  # ordered orthogonal pairs
    assert orbit_size([240, 184], ordered=False) == 15120


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 12))
def test_extension_recovers_images(seed, k):
    rng = np.random.default_rng(seed)
    w = random_element(rng)
    src = rng.choice(np.arange(1, N_ROOTS + 1), size=k, replace=False).tolist()
    g = extend_isometry([(s, w(s)) for s in src])
    assert g is not None
    g.validate()
    assert all(g(s) == w(s) for s in src)
    if np.linalg.matrix_rank(ROOTS[src].astype(float)) == 8:
        assert (g.perm == w.perm).all()  # the action is faithful


def test_extension_rejects_gram_mismatch():
    r = int(np.flatnonzero(GRAM[240] == 1)[0])
    assert GRAM[240, 184] == 0
    assert extend_isometry([(240, 240), (184, r)]) is None
    assert extend_isometry([(1, 2), (2, 2)]) is None


def test_identity_on_basis_extends_to_identity():
    w = extend_isometry([(e, e) for e in SIMPLE_ROOTS])
    assert w is not None and w.is_identity()


def test_y_and_o_quadruples_not_conjugate():
    rng = np.random.default_rng(11)
    quads = [random_tuple(rng, 2 * np.eye(4, dtype=int)) for _ in range(40)]
    flags = [in_2lambda(ROOTS[list(q)].sum(axis=0)) for q in quads]
    y = next(q for q, f in zip(quads, flags) if not f)
    o = next(q for q, f in zip(quads, flags) if f)
    assert not are_conjugate(y, o)
    assert not are_conjugate_sets(y, o)
    assert are_conjugate(y, y[::-1])


def test_conjugating_element_maps_sets():
    rng = np.random.default_rng(2)
    w = random_element(rng)
    img = tuple(sorted(w.image(TWELVE)))
    g = conjugating_element(TWELVE, img)
    assert g is not None and sorted(g.image(TWELVE)) == list(img)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_extends_batch_matches_extension(seed):
    rng = np.random.default_rng(seed)
    K = random_clique(rng, 0, 8)
    aut = automorphism_group(K)
    perms = np.array([aut.random_element(rng) for _ in range(20)])
    images = np.array(K)[perms]
    fast = extends_batch(K, images)
    slow = [extend_isometry(list(zip(K, row))) is not None for row in images.tolist()]
    assert fast.tolist() == slow


def test_pointwise_stabilizers():
    assert pointwise_stabilizer_order([]) == W_ORDER
    assert pointwise_stabilizer_order([240], cross_check=True) == 2903040
    assert pointwise_stabilizer_order([240, 184], cross_check=True) == 23040
    assert pointwise_stabilizer_order(list(SIMPLE_ROOTS)) == 1


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(1, 3))
def test_pointwise_stabilizer_cross_check(seed, k):
    rng = np.random.default_rng(seed)
    S = rng.choice(np.arange(1, N_ROOTS + 1), size=k, replace=False).tolist()
    pointwise_stabilizer_order(S, cross_check=True)


@pytest.mark.parametrize(
    "K,order",
    [(TWELVE, 3888), (SIXTEEN, 344064), ((240, 184), 46080), ((240,), 2903040)],
)
def test_setwise_stabilizer_orders(K, order):
    st_ = setwise_stabilizer(K)
    assert st_.order == order
    for g in st_.generators:
        assert sorted(g.image(K)) == sorted(K)


def test_crosspolytope_stabilizer():
    cp = enumerate_crosspolytopes()[0]
    assert setwise_stabilizer(cp).order == 322560


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(2, 3))
def test_orbit_stabilizer_for_small_sets(seed, k):
    rng = np.random.default_rng(seed)
    S = rng.choice(np.arange(1, N_ROOTS + 1), size=k, replace=False).tolist()
    assert setwise_stabilizer(S).order * orbit_size(S, ordered=False, cap=10**7) == W_ORDER


def test_conjugates_containing():
    assert conjugates_containing(21, 46080, 144) == 6720
    with pytest.raises(ArithmeticError):
        conjugates_containing(1, 3, 2)


def brute_automorphisms(K):
    ks = sorted(K)
    g = GRAM[np.ix_(ks, ks)]
    return sum(1 for p in itertools.permutations(range(len(ks))) if (g[np.ix_(p, p)] == g).all())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, N_ROOTS), min_size=1, max_size=7, unique=True))
def test_automorphism_order_vs_brute_force(K):
    aut = automorphism_group(K)
    assert aut.order == brute_automorphisms(K)
    elems = np.concatenate(list(aut.iter_chunks(chunk=7)))
    assert len(elems) == aut.order == len({e.tobytes() for e in elems})
    ks = list(aut.vertices)
    g = GRAM[np.ix_(ks, ks)]
    for p in elems[:50]:
        assert (g[np.ix_(p, p)] == g).all()


def test_automorphism_orders_of_known_cliques():
    assert automorphism_group(TWELVE).order == 31104
    assert automorphism_group(SIXTEEN).order == 10321920
    assert automorphism_group(enumerate_crosspolytopes()[0]).order == 645120


def test_isomorphisms():
    rng = np.random.default_rng(9)
    w = random_element(rng)
    img = w.image(TWELVE)
    f = isomorphisms_exist(TWELVE, img)
    assert f is not None
    for a, b in itertools.combinations(TWELVE, 2):
        assert GRAM[a, b] == GRAM[f[a], f[b]]
    assert isomorphisms_exist(TWELVE, SIXTEEN) is None


def test_weyl_element_json():
    w = reflection(5)
    assert isinstance(w, WeylElement)
    assert len(w.to_json()) == 240
