from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from pamsim import simulability as S
from pamsim.families import OCTAHEDRON, named_family
from pamsim.lp import LPOutcome, solve, verify_certificate
from pamsim.quantum import Povm, QuantumState, Scenario, born_behavior, helstrom_effect


def random_qubit_behavior(rng, X, Y, states=None):
    if states is None:
        states = rng.normal(size=(X, 3))
    states = np.asarray(states, dtype=float)
    states = states / np.linalg.norm(states, axis=1)[:, None]
    meas = rng.normal(size=(Y, 3))
    sc = Scenario(tuple(QuantumState.from_bloch(s) for s in states), tuple(Povm.from_bloch(m) for m in meas))
    return born_behavior(sc).as_fractions()


def octahedron_behavior(rng, X, Y):
    """States drawn from the octahedron, measured along coordinate axes and one random direction."""
    idx = [0, 1] + list(rng.choice(np.arange(2, 6), size=X - 2, replace=False))  # always one antipodal pair
    states = [OCTAHEDRON[i] for i in rng.permutation(idx)]
    axes = [(1, 0, 0), (0, 1, 0), (0, 0, 1)][: Y - 1] + [tuple(rng.normal(size=3))]
    sc = Scenario(tuple(QuantumState.from_bloch(s) for s in states), tuple(Povm.from_bloch(m) for m in axes))
    return born_behavior(sc).as_fractions()


def direct(problem):
    lp = S.build_robustness_lp(problem) if problem.mode == "robustness" else S.build_feasibility_lp(problem)
    out = solve(lp)
    assert verify_certificate(lp, out)
    return out


@pytest.mark.parametrize("seed", range(8))
def test_column_generation_agrees_with_direct_solve(seed):
    rng = np.random.default_rng(seed)
    beh = random_qubit_behavior(rng, 4, 2)
    for d in (2, 3):
        for mode in ("feasibility", "robustness"):
            pr = S.make_problem(beh, d, mode)
            v = S.solve_problem(pr)
            ref = direct(pr)
            assert v.verified
            assert v.status == ref.status
            if mode == "robustness":
                assert v.eta == ref.objective


def test_explicit_and_implicit_verifiers_agree():
    rng = np.random.default_rng(10)
    for k in range(6):
        beh = random_qubit_behavior(rng, 4, 2)
        for d, mode in ((2, "feasibility"), (2, "robustness"), (3, "feasibility"), (3, "robustness")):
            pr = S.make_problem(beh, d, mode)
            v = S.solve_problem(pr, verify=False)
            explicit = verify_certificate(S._build_explicit(pr), v.outcome)
            assert explicit == S.verify_implicit(pr, v.outcome) is True
            # tamper with one multiplier or one weight
            bad = LPOutcome(v.outcome.status, primal=v.outcome.primal, dual=v.outcome.dual, ray=v.outcome.ray,
                            objective=v.outcome.objective)
            if bad.dual is not None:
                bad.dual = list(bad.dual)
                bad.dual[k % len(bad.dual)] += Fraction(1, 3)
            else:
                bad.primal = list(bad.primal)
                bad.primal[0] += Fraction(1, 3)
            assert verify_certificate(S._build_explicit(pr), bad) == S.verify_implicit(pr, bad)


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_classical_models_are_feasible(seed):
    rng = np.random.default_rng(100 + seed)
    X, Y, B, d = int(rng.integers(3, 6)), int(rng.integers(1, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 4))
    beh = S.sample_classical_behavior(rng, X, Y, B, d)
    v = S.solve_problem(S.make_problem(beh, d))
    assert v.status == "feasible" and v.verified
    r = S.solve_problem(S.make_problem(beh, d, "robustness"))
    assert r.eta >= 1 and r.verified


def test_eta_is_monotone_in_alphabet_size():
    rng = np.random.default_rng(20)
    for _ in range(4):
        beh = random_qubit_behavior(rng, 5, 3)
        etas = [S.solve_problem(S.make_problem(beh, d, "robustness")).eta for d in (1, 2, 3, 4, 5)]
        assert etas == sorted(etas)
        assert etas[-1] == 1  # d_C = X is the perfect encoding


@pytest.mark.parametrize("seed", range(6))
def test_pruned_and_unpruned_feasibility_agree(seed):
    rng = np.random.default_rng(200 + seed)
    X = int(rng.integers(4, 7))
    beh = octahedron_behavior(rng, X, 3)
    g = S.exclusion_graph(beh)
    assert g.edges
    for d in (1, 2, 3):
        full = S.make_problem(beh, d)
        a, b = S.solve_problem(full), S.solve_problem(S.prune_strategies(full, g))
        assert a.status == b.status
        assert a.verified and b.verified


@pytest.mark.parametrize("seed", range(6))
def test_pruned_robustness_is_a_lower_bound(seed):
    # white noise removes the deterministic entries that justify pruning,
    # so below eta = 1 the pruned optimum can only be smaller
    rng = np.random.default_rng(200 + seed)
    X = int(rng.integers(4, 7))
    beh = octahedron_behavior(rng, X, 3)
    g = S.exclusion_graph(beh)
    for d in (2, 3):
        full = S.make_problem(beh, d, "robustness")
        a, b = S.solve_problem(full), S.solve_problem(S.prune_strategies(full, g))
        assert b.eta <= a.eta
        assert (a.eta == 1) == (b.eta == 1)


def test_exclusion_graph_on_yu_oh():
    beh = named_family("yu-oh-10x4").exact.behavior()
    g = S.exclusion_graph(beh)
    assert len(g.edges) == 12
    # every edge pairs a state that is an eigenvector of some measurement with one orthogonal to it
    for u, v in g.edges:
        assert any({beh.p[b, u, y], beh.p[b, v, y]} == {0, 1} for b in range(2) for y in range(4))


def test_empty_strategy_set_is_infeasible_with_certificate():
    beh = named_family("mub3-pair").exact.behavior()
    pr = S.make_problem(beh, 2)
    pruned = S.prune_strategies(pr, S.exclusion_graph(beh))
    assert len(pruned.strategies) == 0
    v = S.solve_problem(pruned)
    assert v.status == "infeasible" and v.verified


def test_trivial_encodings():
    for name in ("mub3-pair", "octahedron-5meas"):
        sc = named_family(name)
        beh = sc.exact.behavior() if sc.exact.states else born_behavior(sc).as_fractions()
        assert S.solve_problem(S.make_problem(beh, beh.X)).status == "feasible"
        assert S.solve_problem(S.make_problem(beh, 1)).status == "infeasible"


# -- discrimination LP ------------------------------------------------------

def test_discrimination_two_orthogonal_states():
    states = [QuantumState.from_vector([1, 0]), QuantumState.from_vector([0, 1])]
    for d, want in ((1, "infeasible"), (2, "feasible")):
        lp = S.build_discrimination_lp(S.discrimination_problem(states, d))
        out = solve(lp)
        assert out.status == want and verify_certificate(lp, out)


def test_discrimination_mub_pair():
    sc = named_family("mub3-pair")
    for d, want in ((3, "infeasible"), (4, "infeasible"), (5, "feasible"), (6, "feasible")):
        pr = S.discrimination_problem(sc, d)
        assert pr.exact
        lp = S.build_discrimination_lp(pr)
        out = solve(lp)
        assert out.status == want and verify_certificate(lp, out)


def test_distances_never_exceed_true_values():
    rng = np.random.default_rng(30)
    for _ in range(50):
        u, v = rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3) + 1j * rng.normal(size=3)
        d = S.pure_state_distance(u, v)
        q = S.round_down(d)
        assert q <= Fraction(d) and Fraction(d) - q < Fraction(3, 10**12)
    for t in (Fraction(1, 3), Fraction(1, 2), Fraction(2, 9), Fraction(0), Fraction(1)):
        r = S.sqrt_floor(1 - t)
        assert r * r <= 1 - t < (r + Fraction(1, 10**12)) ** 2


@pytest.mark.parametrize("seed", range(6))
def test_discrimination_lp_is_necessary(seed):
    rng = np.random.default_rng(300 + seed)
    X = int(rng.integers(3, 5))
    vecs = [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(X)]
    states = [QuantumState.from_vector(v) for v in vecs]
    meas = [Povm((helstrom_effect(a, b), np.eye(2) - helstrom_effect(a, b).matrix))
            for a, b in itertools.combinations(states, 2)]
    beh = born_behavior(Scenario(tuple(states), tuple(meas))).as_fractions()
    for d in range(1, X + 1):
        feasible = S.solve_problem(S.make_problem(beh, d)).status == "feasible"
        disc = solve(S.build_discrimination_lp(S.discrimination_problem(states, d))).status == "feasible"
        if feasible:
            assert disc


# -- section-limited ring ---------------------------------------------------

def test_ring_with_four_messages_is_feasible():
    v = S.solve_problem(S.real_qubit_section_problem(8, 4, 4, 8))
    assert v.status == "feasible" and v.verified


def test_ring_with_constant_strategies_is_infeasible():
    for d in (2, 3):
        v = S.solve_problem(S.real_qubit_section_problem(8, 4, d, 0))
        assert v.status == "infeasible" and v.verified


def test_ring_eta_monotone_in_section_cap():
    etas = []
    for k in (0, 2, 4, 6, 8):
        pr = S.real_qubit_section_problem(8, 4, 2, k, mode="robustness")
        v = S.solve_problem(pr)
        assert v.verified
        etas.append(v.eta)
    assert etas == sorted(etas)
    assert etas[-1] < 1  # one bit does not suffice
