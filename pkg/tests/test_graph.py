import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from e8cliques.cliques import enumerate_crosspolytopes
from e8cliques.graph import (
    PATTERN_KINDS,
    TYPE_IV_SETS,
    bits,
    build_subgraph,
    chi_vector,
    classify_clique_type,
    clique_colors,
    colors_label,
    count_monochromatic_subcliques,
    find_pattern_sequences,
    is_clique,
    is_crosspolytope,
    maximal_cliques_within,
    naive_pattern_sets,
    parse_colors,
    pattern_gram,
    to_mask,
)
from e8cliques.roots import GRAM, N_ROOTS
from e8cliques.sampling import random_clique, random_tuple

SIXTEEN = (1, 8, 26, 31, 43, 46, 52, 53, 76, 77, 83, 86, 98, 103, 121, 128)
TWELVE = (240, 214, 196, 184, 11, 36, 49, 46, 22, 69, 74, 84)


def test_parse_colors():
    assert parse_colors("-1,0") == frozenset({-1, 0})
    assert parse_colors([1]) == frozenset({1})
    assert colors_label({0, -2}) == "-2,0"
    with pytest.raises(ValueError):
        parse_colors("2")
    with pytest.raises(ValueError):
        parse_colors("")


def test_type_iv_sets():
    assert len(TYPE_IV_SETS) == 14
    assert frozenset({-1, 0, 1}) not in TYPE_IV_SETS


def test_subgraph_degrees():
    degs = {0: 126, 1: 56, -1: 56, -2: 1}
    for c, d in degs.items():
        g = build_subgraph(frozenset({c}))
        assert all(g.degree(v) == d for v in range(1, N_ROOTS + 1))
    g = build_subgraph("-1,0")
    assert g.degree(5) == 182


def test_mask_roundtrip():
    vs = [1, 64, 65, 128, 240]
    assert bits(to_mask(vs)) == vs


def test_subgraph_clique_and_maximality():
    g = build_subgraph("-2,0")
    assert g.is_clique(SIXTEEN)
    assert g.is_maximal(SIXTEEN)
    assert not g.is_maximal(SIXTEEN[:-1])


def test_word_matrix_matches_masks():
    g = build_subgraph("0,1")
    w = g.word_matrix()
    for v in (1, 100, 240):
        m = sum(int(w[v, k]) << (64 * k) for k in range(w.shape[1]))
        assert m == g.masks[v]


def test_classify_types():
    assert ("IV", frozenset({-2, 0})) in classify_clique_type(SIXTEEN)
    assert ("IV", frozenset({-1, 0})) in classify_clique_type(TWELVE)
    single = classify_clique_type([7])
    assert {("I", c) for c in (-2, -1, 0, 1)} <= single
    assert ("III",) in single
    cp = enumerate_crosspolytopes()[0]
    t = classify_clique_type(cp)
    assert ("II", "crosspolytope") in t
    assert ("II", "simplex") not in t


def test_simplex_type():
    rng = np.random.default_rng(1)
    K = random_clique(rng, 1, 8)
    t = classify_clique_type(K)
    assert ("II", "simplex") in t and ("I", 1) in t
    assert ("IV", frozenset({1})) in t  # 8 is the largest color-1 clique


def test_crosspolytope_shape():
    cps = enumerate_crosspolytopes()
    assert len(cps) == 2160
    for cp in cps[:50]:
        assert is_crosspolytope(cp)
        assert clique_colors(cp) == frozenset({0, 1})


def test_is_clique():
    assert is_clique(SIXTEEN, {-2, 0})
    assert not is_clique(SIXTEEN, {0})
    assert not is_clique((1, 1), {0})


@pytest.mark.parametrize("kind", PATTERN_KINDS)
def test_pattern_gram_symmetric(kind):
    g = pattern_gram(kind)
    assert (g == g.T).all() and (np.diag(g) == 2).all()


def _pattern_host(kind, seed):
    """A random occurrence of the pattern plus a few random roots."""
    rng = np.random.default_rng(seed)
    occ = random_tuple(rng, pattern_gram(kind))
    extra = rng.choice(np.arange(1, N_ROOTS + 1), size=8, replace=False).tolist()
    return sorted(set(occ) | set(extra))


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("kind", PATTERN_KINDS)
def test_pattern_sequences_match_oracle(kind, seed):
    K = _pattern_host(kind, seed)
    seqs = find_pattern_sequences(K, kind)
    assert seqs
    g = pattern_gram(kind)
    for s in seqs:
        assert (GRAM[np.ix_(s, s)] == g).all()
    assert {frozenset(s) for s in seqs} == naive_pattern_sets(K, kind)


def test_pattern_counts_in_known_cliques():
    assert len(find_pattern_sequences(SIXTEEN, "A")) == len(naive_pattern_sets(SIXTEEN, "A"))
    assert find_pattern_sequences(SIXTEEN, "B") == []


def test_c_sequences_keep_orientations():
    seqs = find_pattern_sequences(TWELVE, "C-1")
    # both orientations of each alpha-edge pair survive, the edge swap does not
    keys = {(s[0], s[3]) for s in seqs}
    assert any((b, a) in keys for a, b in keys)
    swapped = {(s[1], s[0], s[2], s[4], s[3]) for s in seqs}
    assert not (swapped & set(seqs))


def _nx_graph(K, color):
    G = nx.Graph()
    G.add_nodes_from(K)
    for a, b in itertools.combinations(K, 2):
        if GRAM[a, b] == color:
            G.add_edge(a, b)
    return G


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, N_ROOTS), min_size=1, max_size=30, unique=True), st.sampled_from([-1, 0, 1]))
def test_maximal_cliques_within_vs_networkx(K, color):
    ours = sorted(maximal_cliques_within(K, color))
    theirs = sorted(tuple(sorted(c)) for c in nx.find_cliques(_nx_graph(sorted(K), color)))
    assert ours == theirs


def test_count_monochromatic_subcliques():
    K = random_clique(np.random.default_rng(2), 1, 8)
    for r in range(1, 9):
        assert count_monochromatic_subcliques(K, 1, r, maximal_within_K=False) == len(list(itertools.combinations(K, r)))
    assert count_monochromatic_subcliques(K, 1, 8) == 1
    assert count_monochromatic_subcliques(K, 1, 7) == 0


def test_chi_vector():
    assert chi_vector(SIXTEEN) == (16, 0, 0, 0, 0, 0, 0, 0)
    K = random_clique(np.random.default_rng(5), 1, 8)
    assert chi_vector(K) == (0, 0, 0, 0, 0, 0, 0, 1)
