from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from pamsim.lp import EQ, GE, LE, LPOutcome, RationalLP, solve, verify_certificate


def random_lp(rng, m, n, with_objective=True, sense="max"):
    lp = RationalLP(sense)
    for j in range(n):
        kind = rng.integers(0, 4)
        if kind == 0:
            lp.add_variable(lower=0)
        elif kind == 1:
            lp.add_variable(lower=None, upper=None)
        elif kind == 2:
            lp.add_variable(lower=int(rng.integers(-3, 3)), upper=None)
        else:
            lo = int(rng.integers(-3, 2))
            lp.add_variable(lower=lo, upper=lo + int(rng.integers(0, 4)))
    for _ in range(m):
        coeffs = {j: Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for j in range(n) if rng.random() < 0.7}
        rel = (LE, GE, EQ)[rng.integers(0, 3)]
        lp.add_constraint(coeffs, rel, Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 3))))
    if with_objective:
        lp.set_objective({j: int(rng.integers(-3, 4)) for j in range(n)})
    return lp


def scipy_oracle(lp):
    """(status, objective) from HiGHS in floating point."""
    n = lp.num_vars
    c = np.zeros(n)
    if lp.objective:
        for j, a in lp.objective.items():
            c[j] = float(a)
    if lp.sense == "max":
        c = -c
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for con in lp.constraints:
        row = np.zeros(n)
        for j, a in con.coeffs.items():
            row[j] = float(a)
        if con.relation == LE:
            A_ub.append(row), b_ub.append(float(con.rhs))
        elif con.relation == GE:
            A_ub.append(-row), b_ub.append(-float(con.rhs))
        else:
            A_eq.append(row), b_eq.append(float(con.rhs))
    bounds = [(None if lo is None else float(lo), None if up is None else float(up)) for lo, up in zip(lp.lower, lp.upper)]
    res = linprog(c, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None, bounds=bounds, method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[res.status]
    obj = None if status != "optimal" else (-res.fun if lp.sense == "max" else res.fun)
    return status, obj


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6), st.sampled_from(["max", "min"]))
def test_random_lps_agree_with_highs(seed, m, n, sense):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, m, n, sense=sense)
    out = solve(lp)
    status, obj = scipy_oracle(lp)
    if status == "infeasible":
        assert out.status == "infeasible"
    elif status == "unbounded":
        # HiGHS may report unbounded for an infeasible-and-unbounded dual pair
        assert out.status in ("unbounded", "infeasible")
    else:
        assert out.status == "optimal"
        assert float(out.objective) == pytest.approx(obj, abs=1e-7)
    assert verify_certificate(lp, out)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_feasibility_lps(seed):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), with_objective=False)
    out = solve(lp)
    assert out.status in ("feasible", "infeasible")
    assert verify_certificate(lp, out)
    assert (out.status == "infeasible") == (scipy_oracle(lp)[0] == "infeasible")


def test_hand_built_farkas_certificate():
    # x1 + x2 <= 1, x1 >= 1, x2 >= 1: adding the rows with weights (1, -1, -1) gives 0 <= -1
    lp = RationalLP()
    a, b = lp.add_variable(), lp.add_variable()
    lp.add_constraint({a: 1, b: 1}, LE, 1)
    lp.add_constraint({a: 1}, GE, 1)
    lp.add_constraint({b: 1}, GE, 1)
    hand = LPOutcome("infeasible", dual=[Fraction(1), Fraction(-1), Fraction(-1)])
    assert verify_certificate(lp, hand)
    assert not verify_certificate(lp, LPOutcome("infeasible", dual=[Fraction(1), Fraction(-1), Fraction(0)]))
    assert not verify_certificate(lp, LPOutcome("infeasible", dual=[Fraction(-1), Fraction(1), Fraction(1)]))
    out = solve(lp)
    assert out.status == "infeasible" and verify_certificate(lp, out)


def test_two_coloring_of_a_triangle():
    # in a triangle each color class holds at most one vertex, so two
    # classes cannot cover three vertices
    lp = RationalLP()
    x = {(v, c): lp.add_variable(f"x{v}{c}") for v in range(3) for c in range(2)}
    for v in range(3):
        lp.add_constraint({x[v, 0]: 1, x[v, 1]: 1}, EQ, 1)
    for c in range(2):
        lp.add_constraint({x[v, c]: 1 for v in range(3)}, LE, 1)
    out = solve(lp)
    assert out.status == "infeasible"
    assert verify_certificate(lp, out)
    bad = LPOutcome("infeasible", dual=[d + (1 if i == 0 else 0) for i, d in enumerate(out.dual)])
    assert not verify_certificate(lp, bad)


def test_perturbed_certificates_fail():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(200):
        lp = random_lp(rng, 4, 4)
        out = solve(lp)
        if out.status == "optimal":
            primal = list(out.primal)
            primal[0] += Fraction(1, 7)
            bad = LPOutcome("optimal", primal=primal, dual=out.dual, objective=out.objective)
            good_obj = lp.objective_value(primal) == out.objective
            if not good_obj:
                assert not verify_certificate(lp, bad)
                checked += 1
        if out.status == "infeasible":
            dual = [v * -1 for v in out.dual]
            if any(dual):
                assert not verify_certificate(lp, LPOutcome("infeasible", dual=dual))
                checked += 1
    assert checked > 20


def test_row_scaling_invariance():
    rng = np.random.default_rng(3)
    for _ in range(40):
        lp = random_lp(rng, 4, 5)
        factors = [Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9))) for _ in range(lp.num_rows)]
        a, b = solve(lp), solve(lp.scaled(factors))
        assert a.status == b.status
        if a.status == "optimal":
            assert a.objective == b.objective
        assert verify_certificate(lp.scaled(factors), b)


def test_json_round_trip():
    rng = np.random.default_rng(4)
    lp = random_lp(rng, 4, 4)
    again = RationalLP.from_json(lp.to_json())
    assert again.to_json() == lp.to_json()
    out = solve(lp)
    back = LPOutcome.from_json(out.to_json())
    assert back.status == out.status and verify_certificate(again, back)


def test_malformed_certificate_raises():
    lp = RationalLP()
    lp.add_variable()
    lp.add_constraint({0: 1}, GE, 2)
    lp.add_constraint({0: 1}, LE, 1)
    with pytest.raises(ValueError):
        verify_certificate(lp, LPOutcome("infeasible", dual=[Fraction(1)]))


def test_pivot_cap_gives_undecided():
    lp = random_lp(np.random.default_rng(5), 8, 8)
    assert solve(lp, max_pivots=10**6).status != "undecided"
    big = RationalLP()
    for j in range(30):
        big.add_variable()
    for i in range(30):
        big.add_constraint({j: (i * j) % 7 + 1 for j in range(30)}, GE, i + 1)
    big.set_objective({j: -1 for j in range(30)})
    assert solve(big, max_pivots=2).status == "undecided"
    assert not verify_certificate(big, solve(big, max_pivots=2))


def test_unbounded_ray():
    lp = RationalLP()
    a, b = lp.add_variable(), lp.add_variable()
    lp.add_constraint({a: 1, b: -1}, LE, 1)
    lp.set_objective({a: 1, b: 1})
    out = solve(lp)
    assert out.status == "unbounded" and verify_certificate(lp, out)


def test_column_generation_matches_direct_solve():
    # max sum x_j  s.t.  sum_j a_ij x_j <= b_i with columns revealed by an oracle
    rng = np.random.default_rng(6)
    cols = [{i: int(rng.integers(0, 5)) for i in range(4)} for _ in range(25)]
    costs = [int(rng.integers(1, 6)) for _ in range(25)]
    rhs = [10, 12, 7, 9]

    def build(k):
        lp = RationalLP("max")
        for _ in range(k):
            lp.add_variable()
        for i in range(4):
            lp.add_constraint({j: cols[j][i] for j in range(k)}, LE, rhs[i])
        lp.set_objective({j: costs[j] for j in range(k)})
        return lp

    full = solve(build(25))
    start = build(1)

    def oracle(v, phase):
        out = []
        for j in range(1, 25):
            price = costs[j] - sum(v[i] * cols[j][i] for i in range(4))
            if price > 0:
                out.append((cols[j], costs[j]))
        return out[:3]

    gen = solve(start, oracle=oracle)
    assert gen.status == full.status == "optimal"
    assert gen.objective == full.objective
    assert verify_certificate(start, gen)
