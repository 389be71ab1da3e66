from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pamsim import simulability as S
from pamsim.families import named_family
from pamsim.quantum import Povm, QuantumState, Scenario, born_behavior
from pamsim.strategies import CapExceeded
from pamsim.witness import (
    Witness,
    bound_table,
    classical_bound,
    classical_bound_detail,
    hesse_witness,
    named_witness,
    quantum_value,
    witness_from_bloch,
    witness_from_dual,
    yu_oh_witness,
)


def brute_bound(coeffs, d):
    """Oracle: every word in d^X, Bob's best outcome per (message, measurement)."""
    B, X, Y = coeffs.shape
    best = None
    for word in itertools.product(range(d), repeat=X):
        total = Fraction(0)
        for c in range(d):
            xs = [x for x in range(X) if word[x] == c]
            for y in range(Y):
                total += max(sum((coeffs[b, x, y] for x in xs), Fraction(0)) for b in range(B))
        best = total if best is None else max(best, total)
    return best


coeff_arrays = st.integers(1, 3).flatmap(
    lambda B: st.integers(1, 5).flatmap(
        lambda X: st.integers(1, 3).flatmap(
            lambda Y: st.lists(st.integers(-5, 5), min_size=B * X * Y, max_size=B * X * Y).map(
                lambda v: np.array([Fraction(a) for a in v], dtype=object).reshape(B, X, Y)))))


@settings(max_examples=80, deadline=None)
@given(coeff_arrays, st.integers(1, 4))
def test_classical_bound_matches_brute_force(coeffs, d):
    w = Witness(coeffs)
    assert classical_bound(w, d) == brute_bound(coeffs, d)


@settings(max_examples=40, deadline=None)
@given(coeff_arrays)
def test_bound_chain_properties(coeffs):
    w = Witness(coeffs)
    chain = [classical_bound(w, d) for d in range(1, w.X + 2)]
    assert chain == sorted(chain)
    assert chain[-1] == chain[-2] == w.algebraic_maximum()
    single = sum((max(sum(coeffs[b, :, y]) for b in range(w.B)) for y in range(w.Y)), Fraction(0))
    assert chain[0] == single


def test_fractional_coefficients():
    w = Witness(np.array([[[Fraction(1, 2)], [Fraction(-1, 3)]], [[Fraction(-1, 2)], [Fraction(1, 3)]]], dtype=object))
    assert classical_bound(w, 1) == Fraction(1, 6)
    assert classical_bound(w, 2) == Fraction(5, 6)


def test_bound_dominates_classical_models():
    rng = np.random.default_rng(1)
    for _ in range(20):
        X, Y, B, d = 4, 2, 2, 2
        beh = S.sample_classical_behavior(rng, X, Y, B, d)
        w = Witness(np.array([Fraction(int(v)) for v in rng.integers(-4, 5, size=B * X * Y)], dtype=object).reshape(B, X, Y))
        assert w.value(beh) <= classical_bound(w, d)


def test_detail_reports_an_optimal_word():
    w, _ = named_witness("W_6,5,2")
    det = classical_bound_detail(w, 3)
    assert det.value == 10 and len(det.strategy) == 6 and max(det.strategy) <= 3


def test_cap_exceeded():
    w, _ = named_witness("W_10,4,2")
    with pytest.raises(CapExceeded):
        classical_bound(w, 4, cap=100)


def test_correlator_form():
    w = Witness.from_correlator([[1, -2], [3, 0]])
    assert w.B == 2 and w.correlator()[1][0] == 3
    with pytest.raises(ValueError):
        Witness(np.zeros((2, 2, 2, 2), dtype=object))


def test_json_round_trip_and_validation():
    w = hesse_witness()
    again = Witness.from_json(w.to_json())
    assert np.all(again.coeffs == w.coeffs) and again.name == w.name
    bad = w.to_json()
    bad["coeffs"] = bad["coeffs"][:1]
    with pytest.raises(ValueError):
        Witness.from_json(bad)
    with pytest.raises(ValueError):
        Witness.from_json({"X": 1})


def test_quantum_value_shape_mismatch():
    w, _ = named_witness("W_6,5,2")
    with pytest.raises(ValueError):
        quantum_value(w, named_family("mub3-pair"))


def test_bloch_witness_is_exact_for_integer_vectors():
    w = witness_from_bloch([(1, 0, 0), (0, 1, 0)], [(1, 1, 0)])
    assert w.coeffs[0, 0, 0] == Fraction(1, 2)
    with pytest.raises(ValueError):
        witness_from_bloch([(1, 0, 0)], [(0, 0, 0)])


def test_yu_oh_quantum_value_is_exact():
    w = yu_oh_witness()
    beh = named_family("yu-oh-10x4").exact.behavior()
    assert w.value(beh) == 72


def test_named_witness_aliases():
    assert named_witness("W1042")[0].name == "W_10,4,2"
    with pytest.raises(ValueError):
        named_witness("W_1,1,1")


def test_bound_table_ratios():
    w, sc = named_witness("W_6,5,2")
    tb = bound_table(w, [2, 3], sc)
    assert tb.chain() == [8, 10]
    assert tb.ratios[3] == pytest.approx(tb.quantum / 10 - 1)


def random_qubit_behavior(rng, X, Y):
    st_ = rng.normal(size=(X, 3))
    me = rng.normal(size=(Y, 3))
    sc = Scenario(tuple(QuantumState.from_bloch(s / np.linalg.norm(s)) for s in st_), tuple(Povm.from_bloch(m) for m in me))
    return born_behavior(sc).as_fractions()


def test_dual_witness_separates():
    rng = np.random.default_rng(7)
    found = 0
    while found < 4:
        beh = random_qubit_behavior(rng, 5, 3)
        for mode in ("feasibility", "robustness"):
            v = S.solve_problem(S.make_problem(beh, 2, mode))
            if not v.simulable:
                w = witness_from_dual(v, (beh.X, beh.Y, beh.B))
                assert w.value(beh) > classical_bound(w, 2)
                found += 1


def test_dual_witness_rejects_simulable_verdicts():
    beh = S.sample_classical_behavior(np.random.default_rng(0), 4, 2, 2, 2)
    v = S.solve_problem(S.make_problem(beh, 2))
    with pytest.raises(ValueError):
        witness_from_dual(v, (4, 2, 2))


def test_hesse_witness_coefficients():
    w = hesse_witness()
    assert w.shape == (9, 4, 3)
    assert set(w.coeffs.ravel()) <= {Fraction(-1), Fraction(1)}
    assert w.value(named_family("hesse-sic-mub").exact.behavior()) == 36
    assert math.isclose(quantum_value(w, named_family("hesse-sic-mub")), 36, abs_tol=1e-9)
