"""Linear programs deciding whether a behavior has a classical model.

A classical model with message alphabet size d_C is shared randomness over
deterministic encodings ``lambda: x -> c`` (words in ``StrategySet``) and a
response table ``p'(b|c,y,lambda)``.  The explicit LP has variables

    pi(lambda) >= 0,   p'(b, c, y, lambda) >= 0   (weights, not yet normalized)

and rows

    R1(b,x,y):   sum_lambda p'(b, lambda_x, y, lambda) = p(b|x,y)
    R2(lambda,c,y):  sum_b p'(b,c,y,lambda) - pi(lambda) = 0
    R3:          sum_lambda pi(lambda) = 1.

The robustness variant mixes white noise: R1 becomes
``sum p' - eta (p - 1/B) = 1/B`` and the objective is ``max eta``.

Large instances are solved by column generation over the vertices of the
classical set (an encoding together with a deterministic response table),
which needs only ``(B-1) X Y + 1`` rows.  The result is then expanded into a
primal point and row multipliers of the explicit LP above, and re-checked
there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import lp as lpmod
from .graphs import OrthogonalityGraph
from .lp import LPOutcome, RationalLP, verify_certificate
from .quantum import Behavior, QuantumState, Scenario, born_behavior, pure_overlap, trace_distance
from .strategies import (
    StrategySet,
    enumerate_section_limited,
    enumerate_standard_order,
    filter_proper_colorings,
    response_scores,
    surjective_only,
)

MODES = ("feasibility", "robustness")
FULL_VERIFY_LIMIT = 300_000  # explicit-LP variables; above this the implicit check runs
DISTANCE_DENOMINATOR = 10**12
PRICING_BATCH = 40
BLOCK = 100_000

ZERO = Fraction(0)


@dataclass(frozen=True)
class SimulationProblem:
    behavior: Behavior
    d_C: int
    strategies: StrategySet
    mode: str = "feasibility"
    eta_max: Fraction | None = Fraction(1)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.strategies.X != self.behavior.X:
            raise ValueError("strategy words and behavior disagree on X")
        if self.strategies.d_C != self.d_C:
            raise ValueError("strategy set was built for a different d_C")
        if not self.behavior.is_exact:
            object.__setattr__(self, "behavior", self.behavior.as_fractions())
        if self.eta_max is not None:
            object.__setattr__(self, "eta_max", Fraction(self.eta_max))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.behavior.B, self.behavior.X, self.behavior.Y

    def with_strategies(self, strategies: StrategySet) -> "SimulationProblem":
        return SimulationProblem(self.behavior, self.d_C, strategies, self.mode, self.eta_max)

    def with_mode(self, mode: str) -> "SimulationProblem":
        return SimulationProblem(self.behavior, self.d_C, self.strategies, mode, self.eta_max)


def make_problem(
    behavior: Behavior,
    d_C: int,
    mode: str = "feasibility",
    *,
    strategies: StrategySet | None = None,
    eta_max=Fraction(1),
    cap: int | None = None,
) -> SimulationProblem:
    """Problem over all standard-order encodings unless ``strategies`` is given."""
    if strategies is None:
        strategies = enumerate_standard_order(behavior.X, d_C, cap=cap)
    return SimulationProblem(behavior, d_C, strategies, mode, eta_max)


# ---------------------------------------------------------------------------
# explicit LP
# ---------------------------------------------------------------------------

class _Layout:
    """Variable and row numbering of the explicit LP."""

    def __init__(self, problem: SimulationProblem):
        self.B, self.X, self.Y = problem.shape
        self.N = len(problem.strategies)
        self.d = problem.d_C
        self.robust = problem.mode == "robustness"
        self.n_pp = self.N * self.d * self.Y * self.B
        self.eta = self.N + self.n_pp if self.robust else None
        self.n_vars = self.N + self.n_pp + (1 if self.robust else 0)
        self.n_r1 = self.B * self.X * self.Y
        self.r3 = self.n_r1 + self.N * self.d * self.Y
        self.n_rows = self.r3 + 1

    def pp(self, b: int, c: int, y: int, k: int) -> int:
        """Index of p'(b, c, y, lambda_k); c is 0-based here."""
        return self.N + ((k * self.d + c) * self.Y + y) * self.B + b

    def r1(self, b: int, x: int, y: int) -> int:
        return (b * self.X + x) * self.Y + y

    def r2(self, k: int, c: int, y: int) -> int:
        return self.n_r1 + (k * self.d + c) * self.Y + y


def _rhs_r1(problem: SimulationProblem, b: int, x: int, y: int) -> Fraction:
    p = problem.behavior.p[b, x, y]
    return Fraction(1, problem.behavior.B) if problem.mode == "robustness" else p


def _eta_coeff(problem: SimulationProblem, b: int, x: int, y: int) -> Fraction:
    return -(problem.behavior.p[b, x, y] - Fraction(1, problem.behavior.B))


def _build_explicit(problem: SimulationProblem) -> RationalLP:
    lay = _Layout(problem)
    words = problem.strategies.words
    out = RationalLP("max")
    for k in range(lay.N):
        out.add_variable(f"pi[{k}]")
    for k in range(lay.N):
        for c in range(lay.d):
            for y in range(lay.Y):
                for b in range(lay.B):
                    out.add_variable(f"p[{b},{c + 1},{y},{k}]")
    if lay.robust:
        out.add_variable("eta", 0, problem.eta_max)
    r1 = [dict() for _ in range(lay.n_r1)]
    for k in range(lay.N):
        w = words[k]
        for x in range(lay.X):
            c = int(w[x]) - 1
            for y in range(lay.Y):
                for b in range(lay.B):
                    r1[lay.r1(b, x, y)][lay.pp(b, c, y, k)] = 1
    for b in range(lay.B):
        for x in range(lay.X):
            for y in range(lay.Y):
                row = r1[lay.r1(b, x, y)]
                if lay.robust:
                    row[lay.eta] = _eta_coeff(problem, b, x, y)
                out.add_constraint(row, lpmod.EQ, _rhs_r1(problem, b, x, y), f"R1[{b},{x},{y}]")
    for k in range(lay.N):
        for c in range(lay.d):
            for y in range(lay.Y):
                row = {lay.pp(b, c, y, k): 1 for b in range(lay.B)}
                row[k] = -1
                out.add_constraint(row, lpmod.EQ, 0, f"R2[{k},{c + 1},{y}]")
    out.add_constraint({k: 1 for k in range(lay.N)}, lpmod.EQ, 1, "R3")
    if lay.robust:
        out.set_objective({lay.eta: 1}, "max")
    return out


def build_feasibility_lp(problem: SimulationProblem) -> RationalLP:
    """Explicit feasibility LP (no objective)."""
    if problem.mode != "feasibility":
        problem = problem.with_mode("feasibility")
    return _build_explicit(problem)


def build_robustness_lp(problem: SimulationProblem) -> RationalLP:
    """Explicit LP maximizing the white-noise visibility eta in [0, eta_max]."""
    if problem.mode != "robustness":
        problem = problem.with_mode("robustness")
    return _build_explicit(problem)


# ---------------------------------------------------------------------------
# pruning
# ---------------------------------------------------------------------------

def exclusion_graph(behavior: Behavior) -> OrthogonalityGraph:
    """Pairs (x, x') that some measurement separates with certainty.

    An edge means p(b|x,y) = 1 and p(b|x',y) = 0 for some y, b.  A classical
    model can then never send x and x' the same message with positive
    weight, so such encodings may be dropped without changing feasibility.
    """
    p = behavior.as_fractions().p if not behavior.is_exact else behavior.p
    B, X, Y = p.shape
    edges = set()
    for y in range(Y):
        for b in range(B):
            ones = [x for x in range(X) if p[b, x, y] == 1]
            zeros = [x for x in range(X) if p[b, x, y] == 0]
            for u in ones:
                for v in zeros:
                    edges.add((min(u, v), max(u, v)))
    return OrthogonalityGraph.from_edges(X, edges)


def prune_strategies(problem: SimulationProblem, graph: OrthogonalityGraph) -> SimulationProblem:
    """Keep only encodings that are proper colorings of ``graph``.

    Sound for feasibility whenever every edge is perfectly distinguished by
    the behavior (see :func:`exclusion_graph`), for instance when the
    measurement set contains the projectors onto the prepared pure states.
    In robustness mode the noisy behavior has no deterministic entries, so
    the pruned optimum is only a lower bound on eta*: a pruned value of 1
    still certifies simulability, a pruned value below 1 certifies nothing.
    """
    if graph.n != problem.behavior.X:
        raise ValueError("graph size differs from the number of preparations")
    if not graph.edges:
        return problem
    return problem.with_strategies(filter_proper_colorings(problem.strategies, graph.sorted_edges(), graph.n))


# ---------------------------------------------------------------------------
# column generation
# ---------------------------------------------------------------------------

def _lcm_denominators(values) -> int:
    L = 1
    for v in values:
        d = v.denominator
        if L % d:
            L = L * d // math.gcd(L, d)
    return L


def _integer_array(values: np.ndarray, L: int) -> np.ndarray:
    """values * L as an exact integer array (int64 when it cannot overflow)."""
    flat = [int(v * L) for v in values.ravel()]
    big = max((abs(v) for v in flat), default=0)
    dtype = np.int64 if big * values.size < 2**62 else object
    return np.array(flat, dtype=dtype).reshape(values.shape)


def _response_table(words: np.ndarray, G: np.ndarray, d: int):
    """Per encoding: best response score and Bob's table D[c, y] (uint8)."""
    scores, choice = response_scores(words, G, d, with_choice=True)
    return scores, choice


def _min_response(words: np.ndarray, G: np.ndarray, d: int) -> np.ndarray:
    """m[k, c, y] = min_b sum_{x: w_k[x] = c+1} G[b, x, y]."""
    B, X, Y = G.shape
    N = words.shape[0]
    flat = G.transpose(1, 0, 2).reshape(X, B * Y)
    out = np.zeros((N, d, Y), dtype=G.dtype)
    for c in range(d):
        mask = (words == c + 1).astype(G.dtype if G.dtype != object else np.int64)
        if G.dtype == object:
            mask = mask.astype(object)
        out[:, c, :] = (mask @ flat).reshape(N, B, Y).min(axis=1)
    return out


class _VertexMaster:
    """Restricted master over (encoding, response table) columns."""

    def __init__(self, problem: SimulationProblem, batch: int):
        self.problem = problem
        self.B, self.X, self.Y = problem.shape
        self.d = problem.d_C
        self.words = problem.strategies.words
        self.batch = batch
        self.robust = problem.mode == "robustness"
        self.n_match = (self.B - 1) * self.X * self.Y
        self.norm_row = self.n_match
        self.cols: list[tuple[int, np.ndarray]] = []
        self.lp = RationalLP("max")
        self.offset = 0
        if self.robust:
            self.lp.add_variable("eta", 0, problem.eta_max)
            self.offset = 1
        # start from one encoding with Bob's constant responses
        initial = []
        for b in range(self.B):
            D = np.full((self.d, self.Y), b, dtype=np.int8)
            initial.append((0, D))
        coeff_lists = []
        for k, D in initial:
            self.lp.add_variable(f"w{len(self.cols)}")
            coeff_lists.append(self.column(k, D))
            self.cols.append((k, D))
        rows = [dict() for _ in range(self.n_match + 1)]
        for j, coeffs in enumerate(coeff_lists):
            for r, a in coeffs.items():
                rows[r][self.offset + j] = a
        p = problem.behavior.p
        for b in range(self.B - 1):
            for x in range(self.X):
                for y in range(self.Y):
                    r = self.row(b, x, y)
                    if self.robust:
                        rows[r][0] = _eta_coeff(problem, b, x, y)
                    self.lp.add_constraint(rows[r], lpmod.EQ, _rhs_r1(problem, b, x, y))
        self.lp.add_constraint(rows[self.norm_row], lpmod.EQ, 1)
        if self.robust:
            self.lp.set_objective({0: 1}, "max")
        self.rounds = 0

    def row(self, b: int, x: int, y: int) -> int:
        return (b * self.X + x) * self.Y + y

    def column(self, k: int, D: np.ndarray) -> dict[int, int]:
        w = self.words[k]
        coeffs = {}
        for x in range(self.X):
            c = int(w[x]) - 1
            for y in range(self.Y):
                b = int(D[c, y])
                if b < self.B - 1:
                    coeffs[self.row(b, x, y)] = 1
        coeffs[self.norm_row] = 1
        return coeffs

    def oracle(self, v: list, phase: int):
        """Exact pricing: return the encodings whose best column improves."""
        self.rounds += 1
        u = np.array(v[: self.n_match], dtype=object).reshape(self.B - 1, self.X, self.Y)
        u0 = v[self.norm_row]
        g = np.empty((self.B, self.X, self.Y), dtype=object)
        g[: self.B - 1] = -u
        g[self.B - 1] = ZERO
        L = _lcm_denominators(list(g.ravel()) + [Fraction(u0)])
        G = _integer_array(g, L)
        threshold = int(Fraction(u0) * L)
        best: list[tuple[int, int, np.ndarray]] = []
        for start in range(0, self.words.shape[0], BLOCK):
            chunk = self.words[start:start + BLOCK]
            scores, choice = _response_table(chunk, G, self.d)
            gain = scores - threshold
            idx = np.nonzero(gain > 0)[0]
            if idx.size == 0:
                continue
            vals = gain[idx]
            order = sorted(range(idx.size), key=lambda i: (-vals[i], int(idx[i])))[: self.batch]
            for i in order:
                best.append((int(vals[i]), start + int(idx[i]), choice[idx[i]].copy()))
            best.sort(key=lambda t: (-t[0], t[1]))
            del best[self.batch:]
        out = []
        for _, k, D in best:
            self.cols.append((k, D))
            out.append((self.column(k, D), 0))
        return out


@dataclass
class SimulationVerdict:
    mode: str
    d_C: int
    status: str  # feasible | infeasible | optimal | unbounded | undecided
    strategy_count: int
    eta: Fraction | None = None
    outcome: LPOutcome | None = None  # certificate for the explicit LP
    verified: bool | None = None
    verification: str = ""
    pivots: int = 0
    columns: int = 0
    rounds: int = 0
    rationalized: bool = False
    info: dict = field(default_factory=dict)

    @property
    def simulable(self) -> bool | None:
        if self.status == "feasible" or self.status == "unbounded":
            return True
        if self.status == "infeasible":
            return False
        if self.status == "optimal":
            return self.eta >= 1
        return None

    def match_multipliers(self, shape: tuple[int, int, int]) -> np.ndarray:
        """Row multipliers of the behavior-matching rows as a (B, X, Y) array."""
        if self.outcome is None or self.outcome.dual is None:
            raise ValueError("verdict carries no row multipliers")
        B, X, Y = shape
        return np.array(self.outcome.dual[: B * X * Y], dtype=object).reshape(B, X, Y)

    def to_json(self, certificate_file: str | None = None) -> dict:
        return {
            "d_C": self.d_C,
            "mode": self.mode,
            "status": self.status,
            "eta": None if self.eta is None else lpmod.fraction_str(self.eta),
            "strategy_count": self.strategy_count,
            "certificate_file": certificate_file,
            "verified": self.verified,
            "verification": self.verification,
            "rationalized": self.rationalized,
            "pivots": self.pivots,
            "columns": self.columns,
        }


def _expand_primal(problem: SimulationProblem, cols, w: Sequence[Fraction], eta) -> list[Fraction]:
    lay = _Layout(problem)
    x = [ZERO] * lay.n_vars
    for (k, D), wk in zip(cols, w):
        if not wk:
            continue
        x[k] += wk
        for c in range(lay.d):
            for y in range(lay.Y):
                i = lay.pp(int(D[c, y]), c, y, k)
                x[i] += wk
    if lay.robust:
        x[lay.eta] = Fraction(eta)
    return x


def _expand_dual(problem: SimulationProblem, v: Sequence[Fraction]) -> list[Fraction]:
    """Row multipliers of the explicit LP from those of the vertex master.

    R1 rows of the last outcome get 0, R3 gets the normalization multiplier,
    and each R2 row gets the smallest value that keeps every p' column
    dual-feasible.
    """
    lay = _Layout(problem)
    B, X, Y = lay.B, lay.X, lay.Y
    n_match = (B - 1) * X * Y
    V1 = np.empty((B, X, Y), dtype=object)
    V1[: B - 1] = np.array(v[:n_match], dtype=object).reshape(B - 1, X, Y)
    V1[B - 1] = ZERO
    L = _lcm_denominators(V1.ravel())
    G = _integer_array(V1, L)
    dual = list(V1.ravel())
    words = problem.strategies.words
    for start in range(0, lay.N, BLOCK):
        m = _min_response(words[start:start + BLOCK], G, lay.d)
        dual.extend(Fraction(-int(val), L) for val in m.ravel())
    dual.append(Fraction(v[n_match]))
    return dual


def _empty_verdict(problem: SimulationProblem) -> SimulationVerdict:
    lay = _Layout(problem)
    farkas = [ZERO] * lay.n_rows
    farkas[lay.r3] = Fraction(-1)
    out = LPOutcome("infeasible", dual=farkas)
    return SimulationVerdict(problem.mode, problem.d_C, "infeasible", 0, outcome=out,
                             rationalized=problem.behavior.rationalized)


def solve_problem(
    problem: SimulationProblem,
    *,
    max_pivots: int | None = None,
    batch: int = PRICING_BATCH,
    verify: bool = True,
) -> SimulationVerdict:
    """Decide the problem exactly by column generation and certify the verdict."""
    if len(problem.strategies) == 0:
        verdict = _empty_verdict(problem)
    else:
        master = _VertexMaster(problem, batch)
        out = lpmod.solve(master.lp, max_pivots=max_pivots, oracle=master.oracle)
        verdict = SimulationVerdict(
            problem.mode, problem.d_C, out.status, len(problem.strategies),
            pivots=out.pivots, columns=len(master.cols), rounds=master.rounds,
            rationalized=problem.behavior.rationalized,
        )
        off = master.offset
        if out.status == "undecided":
            verdict.info = dict(out.info)
            return verdict
        if out.status == "infeasible":
            verdict.outcome = LPOutcome("infeasible", dual=_expand_dual(problem, out.dual), pivots=out.pivots)
        elif out.status == "feasible":
            verdict.outcome = LPOutcome("feasible", primal=_expand_primal(problem, master.cols, out.primal[off:], None),
                                        pivots=out.pivots)
        elif out.status == "optimal":
            eta = out.primal[0]
            verdict.eta = eta
            verdict.outcome = LPOutcome(
                "optimal",
                primal=_expand_primal(problem, master.cols, out.primal[off:], eta),
                dual=_expand_dual(problem, out.dual),
                objective=eta,
                pivots=out.pivots,
            )
        else:  # unbounded robustness LP (eta_max = None)
            x = _expand_primal(problem, master.cols, out.primal[off:], out.primal[0])
            r = _expand_primal(problem, master.cols, out.ray[off:], out.ray[0])
            verdict.outcome = LPOutcome("unbounded", primal=x, ray=r, objective=out.primal[0], pivots=out.pivots)
    if verify:
        verdict.verified, verdict.verification = verify_verdict(problem, verdict)
    return verdict


def verify_verdict(problem: SimulationProblem, verdict: SimulationVerdict) -> tuple[bool, str]:
    """Re-check the explicit-LP certificate, materializing the LP when it is small."""
    if verdict.outcome is None:
        return False, "none"
    lay = _Layout(problem)
    if lay.n_vars <= FULL_VERIFY_LIMIT:
        return verify_certificate(_build_explicit(problem), verdict.outcome), "explicit"
    return verify_implicit(problem, verdict.outcome), "implicit"


# ---------------------------------------------------------------------------
# implicit certificate check (same conditions as verify_certificate on the
# explicit LP, evaluated without building it)
# ---------------------------------------------------------------------------

def _split_primal(lay: _Layout, x: Sequence[Fraction]):
    if x is None or len(x) != lay.n_vars:
        raise ValueError("malformed primal vector")
    pi = list(x[: lay.N])
    pp = x[lay.N: lay.N + lay.n_pp]
    eta = x[lay.eta] if lay.robust else None
    return pi, pp, eta


def _check_point(problem: SimulationProblem, lay: _Layout, x, homogeneous: bool) -> bool:
    pi, pp, eta = _split_primal(lay, x)
    if any(v < 0 for v in pi) or any(v < 0 for v in pp):
        return False
    if lay.robust:
        if homogeneous:
            if problem.eta_max is not None and eta > 0:
                return False
            if eta < 0:
                return False
        elif eta < 0 or (problem.eta_max is not None and eta > problem.eta_max):
            return False
    if sum(pi, ZERO) != (0 if homogeneous else 1):
        return False
    block = lay.d * lay.Y * lay.B
    support = {k for k, v in enumerate(pi) if v}
    for i, v in enumerate(pp):
        if v:
            support.add(i // block)
    acc = np.empty((lay.B, lay.X, lay.Y), dtype=object)
    acc[...] = ZERO
    words = problem.strategies.words
    for k in sorted(support):
        base = k * block
        for c in range(lay.d):
            for y in range(lay.Y):
                s = ZERO
                for b in range(lay.B):
                    s += pp[base + (c * lay.Y + y) * lay.B + b]
                if s != pi[k]:
                    return False
        for x_ in range(lay.X):
            c = int(words[k][x_]) - 1
            for y in range(lay.Y):
                for b in range(lay.B):
                    acc[b, x_, y] += pp[base + (c * lay.Y + y) * lay.B + b]
    for b in range(lay.B):
        for x_ in range(lay.X):
            for y in range(lay.Y):
                lhs = acc[b, x_, y]
                if lay.robust:
                    lhs += _eta_coeff(problem, b, x_, y) * eta
                rhs = ZERO if homogeneous else _rhs_r1(problem, b, x_, y)
                if lhs != rhs:
                    return False
    return True


def _dual_parts(lay: _Layout, v):
    if v is None or len(v) != lay.n_rows:
        raise ValueError("malformed row multipliers")
    V1 = np.array([Fraction(a) for a in v[: lay.n_r1]], dtype=object).reshape(lay.B, lay.X, lay.Y)
    z = [Fraction(a) for a in v[lay.n_r1: lay.r3]]
    return V1, z, Fraction(v[lay.r3])


def _columns_nonnegative(problem: SimulationProblem, lay: _Layout, V1, z, V3) -> bool:
    """A^T v >= 0 on every p' and pi column."""
    L = _lcm_denominators(list(V1.ravel()) + z + [V3])
    G = _integer_array(V1, L)
    Z = np.array([int(a * L) for a in z], dtype=object).reshape(lay.N, lay.d, lay.Y)
    words = problem.strategies.words
    for start in range(0, lay.N, BLOCK):
        m = _min_response(words[start:start + BLOCK], G, lay.d).astype(object)
        if np.any(m + Z[start:start + BLOCK] < 0):
            return False
    piv = int(V3 * L) - Z.reshape(lay.N, -1).sum(axis=1)
    return bool(np.all(piv >= 0))


def _eta_column(problem: SimulationProblem, lay: _Layout, V1) -> Fraction:
    total = ZERO
    for b in range(lay.B):
        for x in range(lay.X):
            for y in range(lay.Y):
                total += V1[b, x, y] * _eta_coeff(problem, b, x, y)
    return total


def _rhs_dot(problem: SimulationProblem, lay: _Layout, V1, V3) -> Fraction:
    total = V3
    for b in range(lay.B):
        for x in range(lay.X):
            for y in range(lay.Y):
                total += V1[b, x, y] * _rhs_r1(problem, b, x, y)
    return total


def verify_implicit(problem: SimulationProblem, out: LPOutcome) -> bool:
    lay = _Layout(problem)
    if out.status == "undecided":
        return False
    if out.status == "feasible":
        return _check_point(problem, lay, out.primal, False)
    if out.status == "unbounded":
        if not lay.robust or not _check_point(problem, lay, out.primal, False):
            return False
        return _check_point(problem, lay, out.ray, True) and out.ray[lay.eta] > 0
    V1, z, V3 = _dual_parts(lay, out.dual)
    if not _columns_nonnegative(problem, lay, V1, z, V3):
        return False
    bound = _rhs_dot(problem, lay, V1, V3)
    a_eta = _eta_column(problem, lay, V1) if lay.robust else ZERO
    if out.status == "infeasible":
        low = ZERO
        if lay.robust and a_eta < 0:
            if problem.eta_max is None:
                return False
            low = a_eta * problem.eta_max
        return low > bound
    if out.status == "optimal":
        if not lay.robust or not _check_point(problem, lay, out.primal, False):
            return False
        red = 1 - a_eta
        if red > 0:
            if problem.eta_max is None:
                return False
            bound += red * problem.eta_max
        return out.primal[lay.eta] == bound
    raise ValueError(f"unknown status {out.status!r}")


# ---------------------------------------------------------------------------
# state-discrimination bound
# ---------------------------------------------------------------------------

def round_down(value: float, denominator: int = DISTANCE_DENOMINATOR) -> Fraction:
    """Rational lower bound on a float distance.

    One unit of the grid is subtracted to absorb floating-point error in the
    eigenvalue computation, so the result never exceeds the true value.
    """
    n = math.floor(value * denominator) - 1
    return Fraction(max(n, 0), denominator)


def sqrt_floor(q: Fraction, denominator: int = DISTANCE_DENOMINATOR) -> Fraction:
    """floor(sqrt(q) * denominator) / denominator, exactly."""
    if q < 0:
        raise ValueError("negative argument")
    scaled = q * denominator * denominator
    return Fraction(math.isqrt(scaled.numerator // scaled.denominator), denominator)


@dataclass(frozen=True)
class DiscriminationProblem:
    states: tuple
    d_C: int
    distances: tuple  # rational lower bounds on the trace distances, symmetric
    exact: bool = False

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise ValueError("need at least one state")
        if self.d_C < 1:
            raise ValueError("d_C must be positive")
        D = self.distances
        if len(D) != n or any(len(r) != n for r in D):
            raise ValueError("distance matrix has the wrong shape")
        for i in range(n):
            if D[i][i] != 0:
                raise ValueError("distance matrix must have a zero diagonal")
            for j in range(n):
                if D[i][j] != D[j][i] or not 0 <= D[i][j] <= 1:
                    raise ValueError("distances must be symmetric and in [0, 1]")


def discrimination_problem(states: Sequence[QuantumState] | Scenario, d_C: int) -> DiscriminationProblem:
    """Trace distances, rounded down onto the 1e-12 grid.

    For integer-vector families (pure states) the distance is sqrt(1 - t) with
    t the exact rational overlap, and the floor is taken exactly.
    """
    exact = None
    if isinstance(states, Scenario):
        if states.exact is not None and states.exact.states:
            exact = states.exact
        states = states.states
    states = tuple(states)
    n = len(states)
    D = [[ZERO] * n for _ in range(n)]
    from .families import overlap

    for i in range(n):
        for j in range(i + 1, n):
            if exact is not None:
                t = overlap(exact.states[i], exact.states[j])
                val = sqrt_floor(1 - t)
            else:
                val = round_down(trace_distance(states[i], states[j]))
            D[i][j] = D[j][i] = val
    return DiscriminationProblem(states, d_C, tuple(tuple(r) for r in D), exact is not None)


def discrimination_strategies(problem: DiscriminationProblem, edges=None) -> StrategySet:
    """Standard-order encodings using exactly min(d_C, X) messages."""
    X = len(problem.states)
    return surjective_only(enumerate_standard_order(X, problem.d_C, edges=edges))


def build_discrimination_lp(problem: DiscriminationProblem, edges=None) -> RationalLP:
    """pi over encodings; for each pair, the weight on encodings that split it
    must reach the pair's trace distance."""
    strategies = discrimination_strategies(problem, edges)
    words = strategies.words
    X = len(problem.states)
    out = RationalLP("max")
    for w in words:
        out.add_variable("pi[" + "".join(str(int(c)) for c in w) + "]" if problem.d_C < 10
                         else "pi[" + ",".join(str(int(c)) for c in w) + "]")
    for i in range(X):
        for j in range(i + 1, X):
            split = np.nonzero(words[:, i] != words[:, j])[0]
            out.add_constraint({int(k): 1 for k in split}, lpmod.GE, problem.distances[i][j], f"pair[{i},{j}]")
    out.add_constraint({k: 1 for k in range(len(words))}, lpmod.EQ, 1, "norm")
    return out


# ---------------------------------------------------------------------------
# real-qubit ring with limited sections
# ---------------------------------------------------------------------------

def real_qubit_section_problem(X: int, Y: int, d_C: int, k_max: int, *,
                               mode: str = "feasibility", cap: int | None = None) -> SimulationProblem:
    from .families import real_qubit_ring

    scenario = real_qubit_ring(X, Y)
    behavior = born_behavior(scenario).as_fractions()
    strategies = enumerate_section_limited(X, d_C, k_max, cap=cap)
    return SimulationProblem(behavior, d_C, strategies, mode)


def sample_classical_behavior(
    rng: np.random.Generator,
    X: int,
    Y: int,
    B: int,
    d_C: int,
    strategies: StrategySet | None = None,
    support: int = 4,
    denominator: int = 12,
) -> Behavior:
    """Exact behavior of a random classical model with d_C messages.

    Random rational weights on a few encodings, each paired with a random
    rational response table p'(b|c,y).
    """
    if strategies is None:
        strategies = enumerate_standard_order(X, d_C)
    idx = rng.choice(len(strategies), size=min(support, len(strategies)), replace=False)
    raw = rng.integers(1, denominator + 1, size=len(idx))
    weights = [Fraction(int(r), int(raw.sum())) for r in raw]
    p = np.empty((B, X, Y), dtype=object)
    p[...] = ZERO
    for k, wk in zip(idx, weights):
        word = strategies.words[k]
        table = rng.integers(0, denominator + 1, size=(d_C, Y, B)) + 0
        table[..., 0] += 1  # keep every row nonzero
        for x in range(X):
            c = int(word[x]) - 1
            for y in range(Y):
                tot = int(table[c, y].sum())
                for b in range(B):
                    p[b, x, y] += wk * Fraction(int(table[c, y, b]), tot)
    return Behavior(p)


def pure_state_distance(psi, phi) -> float:
    return math.sqrt(max(0.0, 1.0 - pure_overlap(psi, phi)))
