"""Orthogonality graphs, exact chromatic numbers and chromatic polynomials."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .quantum import DimensionError, QuantumState

ORTHO_TOL = 1e-9
HADAMARD_CAP = 16


@dataclass(frozen=True)
class OrthogonalityGraph:
    """Simple undirected graph on vertices 0..n-1.

    ``labels[v]`` is the index of the state behind vertex v, when known.
    """

    n: int
    edges: frozenset
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("self-loop")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges) -> "OrthogonalityGraph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def complete(cls, n: int) -> "OrthogonalityGraph":
        return cls(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    def disjoint_union(self, other: "OrthogonalityGraph") -> "OrthogonalityGraph":
        shifted = {(u + self.n, v + self.n) for u, v in other.edges}
        return OrthogonalityGraph(self.n + other.n, frozenset(set(self.edges) | shifted))

    def induced(self, vertices: Sequence[int]) -> "OrthogonalityGraph":
        index = {v: i for i, v in enumerate(vertices)}
        edges = {(index[u], index[v]) for u, v in self.edges if u in index and v in index}
        return OrthogonalityGraph(len(vertices), frozenset(edges))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "OrthogonalityGraph":
        return cls.from_edges(int(data["n"]), [tuple(e) for e in data["edges"]])

    def edge_list_text(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.sorted_edges())


def build_orthogonality_graph(states: Sequence[QuantumState], exact=None) -> OrthogonalityGraph:
    """Edge (x, x') iff tr(rho_x rho_x') = 0.

    ``exact`` may be a family's :class:`~pamsim.families.ExactData`; its
    integer vectors are then tested exactly instead of against ``ORTHO_TOL``.
    """
    if not states:
        raise ValueError("no states")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionError("states of different dimension")
    n = len(states)
    if exact is not None and getattr(exact, "states", None) and len(exact.states) == n:
        return OrthogonalityGraph(n, frozenset(exact.orthogonal_pairs()))
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if abs(np.real(np.trace(states[i].matrix @ states[j].matrix))) < ORTHO_TOL:
                edges.add((i, j))
    return OrthogonalityGraph(n, frozenset(edges))


# ---------------------------------------------------------------------------
# chromatic number
# ---------------------------------------------------------------------------

def _colorable(adj: list[set[int]], k: int) -> list[int] | None:
    """DSATUR-ordered backtracking; returns a proper k-coloring or None."""
    n = len(adj)
    colors = [-1] * n
    sat: list[set[int]] = [set() for _ in range(n)]

    def pick() -> int:
        best, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                kv = (len(sat[v]), len(adj[v]), -v)
                if key is None or kv > key:
                    best, key = v, kv
        return best

    def rec(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        # symmetry breaking: only one fresh color is ever tried
        for c in range(min(k, used + 1)):
            if c in sat[v]:
                continue
            colors[v] = c
            changed = [u for u in adj[v] if colors[u] < 0 and c not in sat[u]]
            for u in changed:
                sat[u].add(c)
            if rec(done + 1, max(used, c + 1)):
                return True
            for u in changed:
                sat[u].discard(c)
            colors[v] = -1
        return False

    return colors if rec(0, 0) else None


def chromatic_number(g: OrthogonalityGraph) -> int:
    if g.n < 1:
        raise ValueError("empty graph")
    adj = g.adjacency()
    if not g.edges:
        return 1
    lower = 2
    # a clique found greedily gives a quick lower bound
    order = sorted(range(g.n), key=lambda v: -len(adj[v]))
    for v in order:
        clique = [v]
        for u in order:
            if u != v and all(u in adj[w] for w in clique):
                clique.append(u)
        lower = max(lower, len(clique))
    k = lower
    while _colorable(adj, k) is None:
        k += 1
    return k


def proper_coloring(g: OrthogonalityGraph, k: int) -> list[int] | None:
    return _colorable(g.adjacency(), k)


# ---------------------------------------------------------------------------
# chromatic polynomial
# ---------------------------------------------------------------------------

def _poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _poly_sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    n = max(len(a), len(b))
    a = a + (0,) * (n - len(a))
    b = b + (0,) * (n - len(b))
    return tuple(x - y for x, y in zip(a, b))


def _falling(n: int) -> tuple[int, ...]:
    p: tuple[int, ...] = (1,)
    for i in range(n):
        p = _poly_mul(p, (-i, 1))
    return p


def _components(n: int, edges: frozenset) -> list[tuple[int, frozenset]]:
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        idx = {v: i for i, v in enumerate(sorted(comp))}
        comps.append((len(comp), frozenset((idx[u], idx[v]) for u, v in edges if u in idx)))
    return comps


def _relabel_key(n: int, edges: frozenset) -> tuple[int, frozenset]:
    """Deterministic relabeling by (degree, old index).

    Equal keys mean identical edge sets, so the memo can never conflate two
    non-isomorphic graphs; it only misses some isomorphic repeats.
    """
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    order = sorted(range(n), key=lambda v: (-deg[v], v))
    idx = {v: i for i, v in enumerate(order)}
    return n, frozenset((min(idx[u], idx[v]), max(idx[u], idx[v])) for u, v in edges)


class ChromaticPolynomial:
    """Deletion-contraction with a bounded memo; coefficients lowest degree first."""

    def __init__(self, memo_limit: int = 200_000):
        self.memo: dict = {}
        self.memo_limit = memo_limit

    def __call__(self, n: int, edges: frozenset) -> tuple[int, ...]:
        if not edges:
            return (0,) * n + (1,)
        comps = _components(n, edges)
        if len(comps) > 1:
            p: tuple[int, ...] = (1,)
            for cn, ce in comps:
                p = _poly_mul(p, self._connected(cn, ce))
            return p
        return self._connected(n, edges)

    def _connected(self, n: int, edges: frozenset) -> tuple[int, ...]:
        if not edges:
            return (0,) * n + (1,)
        m = len(edges)
        if m == n * (n - 1) // 2:
            return _falling(n)
        if m == n - 1:  # tree
            return _poly_mul((0, 1), tuple(math.comb(n - 1, i) * (-1) ** (n - 1 - i) for i in range(n)))
        key = _relabel_key(n, edges)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        n, edges = key
        deg = [0] * n
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        leaf = next((v for v in range(n) if deg[v] == 1), None)
        if leaf is not None:
            # P(G) = (k - 1) P(G - leaf)
            rest = [v for v in range(n) if v != leaf]
            idx = {v: i for i, v in enumerate(rest)}
            sub = frozenset((idx[a], idx[b]) for a, b in edges if leaf not in (a, b))
            result = _poly_mul((-1, 1), self._connected(n - 1, sub))
        else:
            u, v = max(edges, key=lambda e: (deg[e[0]] + deg[e[1]], e))
            deleted = edges - {(u, v)}
            # contract v into u
            idx = {w: (w if w < v else w - 1) for w in range(n) if w != v}
            merged = set()
            for a, b in deleted:
                a2 = idx[u] if a == v else idx[a]
                b2 = idx[u] if b == v else idx[b]
                if a2 != b2:
                    merged.add((min(a2, b2), max(a2, b2)))
            result = _poly_sub(self(n, deleted), self(n - 1, frozenset(merged)))
        if len(self.memo) < self.memo_limit:
            self.memo[key] = result
        return result


def chromatic_polynomial(g: OrthogonalityGraph) -> tuple[int, ...]:
    return ChromaticPolynomial()(g.n, g.edges)


def chromatic_polynomial_value(g: OrthogonalityGraph, k: int) -> int:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return sum(c * k**i for i, c in enumerate(chromatic_polynomial(g)))


# ---------------------------------------------------------------------------
# Hadamard graphs
# ---------------------------------------------------------------------------

def hadamard_graph(d_Q: int, cap: int = HADAMARD_CAP) -> OrthogonalityGraph:
    """Vertices {+-1}^d_Q (lexicographic, +1 first); edges between orthogonal vectors."""
    if d_Q < 1:
        raise ValueError("d_Q must be positive")
    if d_Q > cap:
        raise ValueError(f"Hadamard graph H({d_Q}) exceeds the cap d_Q <= {cap}")
    verts = np.array(list(product((1, -1), repeat=d_Q)), dtype=np.int64)
    gram = verts @ verts.T
    iu, ju = np.nonzero(np.triu(gram == 0, 1))
    return OrthogonalityGraph(len(verts), frozenset(zip(iu.tolist(), ju.tolist())))


def independence_number(g: OrthogonalityGraph) -> int:
    """Exact maximum independent set size by branch and bound on bitmasks."""
    n = g.n
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    best = 0

    def rec(cand: int, size: int) -> None:
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        v = (cand & -cand).bit_length() - 1
        rec(cand & ~nbr[v] & ~(1 << v), size + 1)
        if nbr[v] & cand:
            rec(cand & ~(1 << v), size)

    rec((1 << n) - 1, 0)
    return best


def _is_prime_power(k: int) -> bool:
    if k == 1:
        return True  # k = 2^0
    for p in range(2, k + 1):
        if k % p == 0:
            while k % p == 0:
                k //= p
            return k == 1
    return False


def hadamard_alpha_formula(k: int) -> int:
    """4 sum_{i<k} C(4k-1, i)."""
    return 4 * sum(math.comb(4 * k - 1, i) for i in range(k))


def _fraction_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class HadamardBound:
    d_Q: int
    k: int
    alpha: int
    bound: Fraction
    weak_bound: Fraction

    def to_json(self) -> dict:
        return {
            "d_Q": self.d_Q,
            "k": self.k,
            "alpha": self.alpha,
            "bound": _fraction_text(self.bound),
            "bound_float": float(self.bound),
            "weak_bound": _fraction_text(self.weak_bound),
            "weak_bound_float": float(self.weak_bound),
        }


def hadamard_lower_bound(d_Q: int) -> HadamardBound:
    """chi(H(4k)) >= 2^{4k} / (4 sum_{i<k} C(4k-1, i)) > (27/16)^k for prime-power k."""
    if d_Q < 4 or d_Q % 4:
        raise ValueError("d_Q must be a positive multiple of 4")
    k = d_Q // 4
    if not _is_prime_power(k):
        raise ValueError(f"k = {k} is not a prime power")
    alpha = hadamard_alpha_formula(k)
    bound = Fraction(2 ** (4 * k), alpha)
    weak = Fraction(27, 16) ** k
    assert bound > weak
    return HadamardBound(d_Q, k, alpha, bound, weak)


def dumps(g: OrthogonalityGraph) -> str:
    return json.dumps(g.to_json())
