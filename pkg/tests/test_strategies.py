from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pamsim.strategies import (
    CapExceeded,
    StrategySet,
    bell,
    canonicalize,
    enumerate_section_limited,
    enumerate_standard_order,
    filter_proper_colorings,
    is_standard_order,
    iter_standard_order_blocks,
    materialization_cap,
    reduction_ratio,
    section_count,
    section_counts,
    section_limited_count,
    standard_order_count,
    stirling2,
    surjective_only,
)


def brute_canonical_words(X, d):
    """Oracle: canonical relabeling of every word in d^X."""
    seen = set()
    for w in itertools.product(range(d), repeat=X):
        relabel = {}
        out = []
        for c in w:
            relabel.setdefault(c, len(relabel) + 1)
            out.append(relabel[c])
        seen.add(tuple(out))
    return seen


def stirling_by_inclusion_exclusion(n, k):
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def test_stirling_and_bell_oracles():
    for n in range(0, 12):
        for k in range(0, n + 2):
            assert stirling2(n, k) == (stirling_by_inclusion_exclusion(n, k) if k <= n else 0)
    # Bell numbers from the Bell triangle
    row, bells = [1], [1]
    for _ in range(14):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
        bells.append(row[0])
    assert [bell(n) for n in range(15)] == bells


def test_standard_order_count_frozen_values():
    assert standard_order_count(10, 4) == 43947
    assert standard_order_count(9, 3) == 3281
    assert standard_order_count(6, 6) == bell(6) == 203


@pytest.mark.parametrize("X,d", [(1, 1), (3, 2), (4, 3), (5, 2), (5, 5), (6, 3)])
def test_enumeration_matches_brute_force(X, d):
    ss = enumerate_standard_order(X, d)
    words = {tuple(int(c) for c in w) for w in ss.words}
    assert len(words) == len(ss) == standard_order_count(X, d)
    assert words == brute_canonical_words(X, d)
    assert np.all(is_standard_order(ss.words))
    ss.check()


def test_blocks_partition_the_word_set():
    full = {tuple(w) for w in enumerate_standard_order(8, 3).words.tolist()}
    blocks = [tuple(w) for b in iter_standard_order_blocks(8, 3, prefix_len=3) for w in b.tolist()]
    assert len(blocks) == len(set(blocks)) == len(full)
    assert set(blocks) == full


def test_orthogonality_pruning_keeps_exactly_the_proper_colorings():
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (4, 5)]
    direct = enumerate_standard_order(6, 3, edges=edges)
    filtered = filter_proper_colorings(enumerate_standard_order(6, 3), edges)
    assert {tuple(w) for w in direct.words.tolist()} == {tuple(w) for w in filtered.words.tolist()}
    for w in direct.words:
        assert all(w[u] != w[v] for u, v in edges)


def test_canonicalize_is_idempotent_and_relabel_invariant():
    rng = np.random.default_rng(0)
    words = rng.integers(1, 5, size=(200, 7)).astype(np.uint8)
    canon = canonicalize(words)
    assert np.all(is_standard_order(canon))
    assert np.array_equal(canonicalize(canon), canon)
    perm = np.array([0, 3, 1, 4, 2], dtype=np.uint8)
    assert np.array_equal(canonicalize(perm[words]), canon)


def test_cap_is_enforced(monkeypatch):
    with pytest.raises(CapExceeded):
        enumerate_standard_order(10, 4, cap=1000)
    monkeypatch.setenv("PAM_SIM_CAP", "50")
    assert materialization_cap() == 50
    with pytest.raises(CapExceeded):
        enumerate_standard_order(6, 3)


def test_strategy_set_rejects_duplicates_and_bad_words():
    with pytest.raises(AssertionError):
        StrategySet(3, 2, np.array([[1, 1, 2], [1, 1, 2]], dtype=np.uint8)).check()
    with pytest.raises(AssertionError):
        StrategySet(3, 2, np.array([[1, 3, 2]], dtype=np.uint8)).check()


def test_surjective_only():
    ss = surjective_only(enumerate_standard_order(6, 4))
    assert len(ss) == stirling2(6, 4)
    assert len(surjective_only(enumerate_standard_order(3, 5))) == 1


def test_reduction_ratio():
    from fractions import Fraction

    assert reduction_ratio(1, 3, 4) == Fraction(24, 64 * 1)
    assert reduction_ratio(2, 3, 2) == 0
    assert reduction_ratio(4, 2, 2) == Fraction(1, 2) ** 4


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=12), st.integers(0, 11), st.permutations([1, 2, 3, 4]))
def test_section_count_invariances(word, shift, perm):
    k = shift % len(word)
    rotated = word[k:] + word[:k]
    relabeled = [perm[c - 1] for c in word]
    assert section_count(word) == section_count(rotated) == section_count(relabeled)
    assert section_count(word) != 1
    assert section_counts(np.array([word]))[0] == section_count(word)


@pytest.mark.parametrize("X,d,k", [(6, 2, 2), (6, 3, 4), (8, 3, 6), (7, 4, 7), (8, 2, 0)])
def test_section_limited_matches_filtering(X, d, k):
    ss = enumerate_section_limited(X, d, k)
    got = {tuple(w) for w in ss.words.tolist()}
    want = {w for w in (tuple(int(c) for c in row) for row in enumerate_standard_order(X, d).words)
            if section_count(w) <= k}
    assert len(got) == len(ss) == section_limited_count(X, d, k)
    assert got == want
