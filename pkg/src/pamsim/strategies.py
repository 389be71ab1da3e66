"""Alice's deterministic strategies as words over the message alphabet.

A strategy is a word ``w`` of length X with letters in 1..d_C; ``w[x]`` is the
message sent on input x.  Relabeling the messages never changes what Bob can
do with them, so sets are canonicalized to standard order (restricted growth
strings: first occurrences of letters appear as 1, 2, 3, ...).

Word sets are numpy ``uint8`` arrays of shape (N, X).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_CAP = 10**8


class CapExceeded(RuntimeError):
    """Enumeration would exceed the configured materialization cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} strategies exceed the cap of {cap} (set PAM_SIM_CAP to raise it)")
        self.count = count
        self.cap = cap


def materialization_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("PAM_SIM_CAP")
    return int(float(env)) if env else DEFAULT_CAP


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, S(n, k)."""
    if n < 0 or k < 0:
        raise ValueError("stirling2 needs n, k >= 0")
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    # iterate over n to avoid deep recursion
    row = [1] + [0] * k  # S(0, j)
    for m in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def bell(n: int) -> int:
    return sum(stirling2(n, j) for j in range(n + 1))


def standard_order_count(X: int, d_C: int) -> int:
    """Number of standard-order words: sum_{j <= d_C} S(X, j)."""
    return sum(stirling2(X, j) for j in range(1, min(d_C, X) + 1))


@dataclass(frozen=True)
class StrategySet:
    X: int
    d_C: int
    words: np.ndarray
    standard_order: bool = True
    ortho_edges: tuple[tuple[int, int], ...] | None = None
    max_sections: int | None = None
    surjective: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        w = np.asarray(self.words, dtype=np.uint8).reshape(-1, self.X)
        w.setflags(write=False)
        object.__setattr__(self, "words", w)

    def __len__(self) -> int:
        return self.words.shape[0]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.words:
            yield tuple(int(c) for c in row)

    def export_lines(self) -> str:
        """Newline-delimited words, one digit per input (letters 1..d_C)."""
        sep = "" if self.d_C < 10 else " "
        return "\n".join(sep.join(str(int(c)) for c in row) for row in self.words) + "\n"

    def check(self) -> None:
        """Assert the set invariants (used by tests and debug runs)."""
        w = self.words
        if len(w) and (w.min() < 1 or w.max() > self.d_C):
            raise AssertionError("letter outside 1..d_C")
        if len({row.tobytes() for row in w}) != len(w):
            raise AssertionError("duplicate words")
        if self.standard_order and len(w) and not np.all(is_standard_order(w)):
            raise AssertionError("word not in standard order")
        if self.ortho_edges:
            for u, v in self.ortho_edges:
                if np.any(w[:, u] == w[:, v]):
                    raise AssertionError("improper coloring")
        if self.max_sections is not None and len(w):
            if section_counts(w).max() > self.max_sections:
                raise AssertionError("section cap violated")


def is_standard_order(words: np.ndarray) -> np.ndarray:
    words = np.atleast_2d(words)
    running = np.maximum.accumulate(words, axis=1)
    ok = words[:, 0] == 1
    ok &= np.all(words[:, 1:] <= running[:, :-1] + 1, axis=1)
    return ok


def canonicalize(words: np.ndarray) -> np.ndarray:
    """Relabel every word to standard order (first occurrences ascending)."""
    words = np.atleast_2d(np.asarray(words))
    out = np.zeros_like(words, dtype=np.uint8)
    for i, row in enumerate(words):
        mapping: dict[int, int] = {}
        for j, c in enumerate(row):
            c = int(c)
            if c not in mapping:
                mapping[c] = len(mapping) + 1
            out[i, j] = mapping[c]
    return out


def _edges_into(edges: Iterable[tuple[int, int]] | None, X: int) -> list[list[int]]:
    back: list[list[int]] = [[] for _ in range(X)]
    for u, v in edges or ():
        u, v = (u, v) if u < v else (v, u)
        if u == v:
            raise ValueError("self-loop in orthogonality graph")
        if v >= X:
            raise ValueError("edge outside the input range")
        back[v].append(u)
    return back


def _extend(prefix: np.ndarray, X: int, d_C: int, back: list[list[int]]) -> np.ndarray:
    words = prefix
    for i in range(prefix.shape[1], X):
        if words.shape[0] == 0:
            return np.zeros((0, X), dtype=np.uint8)
        running = words.max(axis=1)
        parts = []
        for c in range(1, d_C + 1):
            ok = running + 1 >= c
            for u in back[i]:
                ok &= words[:, u] != c
            sel = words[ok]
            if sel.shape[0]:
                parts.append(np.hstack([sel, np.full((sel.shape[0], 1), c, dtype=np.uint8)]))
        words = np.vstack(parts) if parts else np.zeros((0, i + 1), dtype=np.uint8)
    return words


def iter_standard_order_blocks(
    X: int,
    d_C: int,
    edges: Sequence[tuple[int, int]] | None = None,
    prefix_len: int | None = None,
) -> Iterator[np.ndarray]:
    """Stream standard-order words in blocks sharing a common prefix.

    Blocks partition the word set, so independent workers can take disjoint
    subsets of prefixes.
    """
    if X < 1 or d_C < 1:
        raise ValueError("need X >= 1 and d_C >= 1")
    back = _edges_into(edges, X)
    if prefix_len is None:
        prefix_len = max(1, X - 9)
    prefix_len = min(prefix_len, X)
    prefixes = _extend(np.ones((1, 1), dtype=np.uint8), prefix_len, d_C, back)
    for p in prefixes:
        block = _extend(p[None, :], X, d_C, back)
        if block.shape[0]:
            yield block


def enumerate_standard_order(
    X: int,
    d_C: int,
    *,
    edges: Sequence[tuple[int, int]] | None = None,
    cap: int | None = None,
) -> StrategySet:
    """All standard-order words of length X over at most d_C letters.

    With ``edges`` only proper colorings of that graph are generated (pruning
    happens during generation, not afterwards).
    """
    if X < 1 or d_C < 1:
        raise ValueError("need X >= 1 and d_C >= 1")
    limit = materialization_cap(cap)
    if edges is None:
        count = standard_order_count(X, d_C)
        if count > limit:
            raise CapExceeded(count, limit)
    words = _extend(np.ones((1, 1), dtype=np.uint8), X, d_C, _edges_into(edges, X))
    if words.shape[0] > limit:
        raise CapExceeded(words.shape[0], limit)
    return StrategySet(
        X, d_C, words,
        ortho_edges=tuple(sorted(tuple(sorted(e)) for e in edges)) if edges else None,
    )


def filter_proper_colorings(strategies: StrategySet, edges: Sequence[tuple[int, int]], n: int | None = None) -> StrategySet:
    """Keep the words that give distinct messages to every edge's endpoints."""
    if n is not None and n != strategies.X:
        raise ValueError(f"graph has {n} vertices but words have length {strategies.X}")
    w = strategies.words
    keep = np.ones(w.shape[0], dtype=bool)
    for u, v in edges:
        if max(u, v) >= strategies.X:
            raise ValueError("edge outside the input range")
        keep &= w[:, u] != w[:, v]
    merged = set(strategies.ortho_edges or ()) | {tuple(sorted(e)) for e in edges}
    return StrategySet(
        strategies.X, strategies.d_C, w[keep],
        standard_order=strategies.standard_order,
        ortho_edges=tuple(sorted(merged)) or None,
        max_sections=strategies.max_sections,
        surjective=strategies.surjective,
    )


def surjective_only(strategies: StrategySet) -> StrategySet:
    """Words using every message at least once (all words if X < d_C)."""
    w = strategies.words
    target = min(strategies.d_C, strategies.X)
    keep = w.max(axis=1) == target if len(w) else np.zeros(0, dtype=bool)
    return StrategySet(
        strategies.X, strategies.d_C, w[keep],
        standard_order=strategies.standard_order,
        ortho_edges=strategies.ortho_edges,
        max_sections=strategies.max_sections,
        surjective=True,
    )


def reduction_ratio(n_bases: int, d_Q: int, d_C: int) -> Fraction:
    """(d_C! / (d_C^d_Q (d_C - d_Q)!))^n for n disjoint complete bases; 0 if d_C < d_Q."""
    if d_C < 1:
        raise ValueError("d_C must be positive")
    if d_C < d_Q:
        return Fraction(0)
    single = Fraction(math.factorial(d_C), d_C**d_Q * math.factorial(d_C - d_Q))
    return single**n_bases


def section_count(word: Sequence[int]) -> int:
    """Number of cyclic positions x with word[x] != word[x+1 mod X]."""
    w = list(word)
    return sum(1 for i in range(len(w)) if w[i] != w[(i + 1) % len(w)])


def section_counts(words: np.ndarray) -> np.ndarray:
    words = np.atleast_2d(words)
    return np.sum(words != np.roll(words, -1, axis=1), axis=1)


def _cyclic_standard_colorings(k: int, d_C: int) -> np.ndarray:
    """Standard-order sequences of length k, neighbours (cyclically) distinct."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    edges = [(i, i + 1) for i in range(k - 1)]
    if k > 2:
        edges.append((0, k - 1))
    seqs = _extend(np.ones((1, 1), dtype=np.uint8), k, d_C, _edges_into(edges, k))
    if k == 2:
        seqs = seqs[seqs[:, 0] != seqs[:, 1]]
    return seqs


def iter_section_limited_blocks(X: int, d_C: int, k_max: int, block: int = 200_000) -> Iterator[np.ndarray]:
    """Stream canonical words with at most ``k_max`` cyclic message changes.

    A word with k changes is fixed by the change positions p_1 < ... < p_k
    and the messages of the k cyclic segments; the segment holding input 0
    comes first, so standard order of the word is standard order of the
    segment sequence and no deduplication is needed.
    """
    if X < 1 or k_max < 0:
        raise ValueError("need X >= 1 and k_max >= 0")
    yield np.ones((1, X), dtype=np.uint8)
    t = np.arange(X)
    for k in range(2, min(k_max, X) + 1):
        colorings = _cyclic_standard_colorings(k, d_C)
        if colorings.shape[0] == 0:
            continue
        combos = itertools.combinations(range(X), k)
        while True:
            chunk = np.array(list(itertools.islice(combos, max(1, block // len(colorings)))), dtype=np.int64)
            if chunk.size == 0:
                break
            seg = (chunk[:, None, :] < t[None, :, None]).sum(axis=2) % k
            out = colorings[:, seg]  # (n_colorings, n_combos, X)
            yield out.reshape(-1, X).astype(np.uint8)


def section_limited_count(X: int, d_C: int, k_max: int) -> int:
    total = 1
    for k in range(2, min(k_max, X) + 1):
        total += math.comb(X, k) * len(_cyclic_standard_colorings(k, d_C))
    return total


def enumerate_section_limited(X: int, d_C: int, k_max: int, *, cap: int | None = None) -> StrategySet:
    limit = materialization_cap(cap)
    count = section_limited_count(X, d_C, k_max)
    if count > limit:
        raise CapExceeded(count, limit)
    words = np.vstack(list(iter_section_limited_blocks(X, d_C, k_max)))
    return StrategySet(X, d_C, words, max_sections=k_max)


def response_scores(
    words: np.ndarray,
    coeffs: np.ndarray,
    d_C: int,
    *,
    with_choice: bool = False,
):
    """Best-response values of each Alice strategy against a linear functional.

    For a word w this is ``sum_{c,y} max_b sum_{x : w[x] = c} coeffs[b, x, y]``:
    Bob, seeing message c, outputs the b that maximizes the functional.
    ``coeffs`` may be int64, float or object (exact) arrays of shape (B, X, Y).
    With ``with_choice`` also returns Bob's argmax table of shape (N, d_C, Y).
    """
    words = np.atleast_2d(words)
    B, X, Y = coeffs.shape
    N = words.shape[0]
    dtype = coeffs.dtype
    total = np.zeros(N, dtype=dtype) if dtype != object else np.array([0] * N, dtype=object)
    choice = np.zeros((N, d_C, Y), dtype=np.int8) if with_choice else None
    flat = coeffs.transpose(1, 0, 2).reshape(X, B * Y)
    for c in range(1, d_C + 1):
        mask = (words == c)
        if not mask.any():
            continue
        mask = mask.astype(np.int64) if dtype != object else mask.astype(object)
        sums = (mask @ flat).reshape(N, B, Y)
        best = sums.max(axis=1)
        total = total + best.sum(axis=1)
        if with_choice:
            choice[:, c - 1, :] = sums.argmax(axis=1)
    if with_choice:
        return total, choice
    return total
