from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from pamsim import protocol as P


def simpson(f, a, b, n=200_000):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def test_closed_form_pieces_and_quadrature():
    cf = P.average_cost_closed_form()
    assert cf.value == pytest.approx(1.5 - math.sin(math.pi * math.log2(3)) / math.pi
                                     - math.sin(2 * math.pi * math.log2(3)) / (2 * math.pi), abs=1e-15)
    assert sum(cf.pieces) == pytest.approx(cf.value, abs=1e-12)
    assert P.average_cost_quadrature() == pytest.approx(cf.value, abs=1e-12)
    edges = (0.0,) + P.ALPHA_EDGES + (math.pi,)
    total = sum(simpson(lambda a, s=s: P.scheme_cost(s, a) * np.sin(a) / 2, lo, hi, 20_000)
                for s, lo, hi in zip(P.SCHEMES, edges[:-1], edges[1:]))
    assert total == pytest.approx(cf.value, abs=1e-10)


def test_entropy_floor_against_simpson():
    assert P.entropy_floor() == pytest.approx(simpson(lambda a: P.entropy(a) * np.sin(a) / 2, 0, math.pi), abs=1e-8)


def test_piecewise_is_the_minimum_and_between_floor_and_two_bits():
    grid = np.linspace(0, math.pi, 1000)
    costs = np.stack([P.scheme_cost(s, grid) for s in P.SCHEMES])
    pw = P.piecewise_cost(grid)
    assert np.allclose(pw, costs.min(axis=0), atol=1e-12)
    assert np.all(pw >= P.entropy(grid) - 1e-12)
    assert np.all(pw <= 2 + 1e-12)


def test_crossovers_are_continuous():
    for (s, t), a in zip(zip(P.SCHEMES, P.SCHEMES[1:]), P.ALPHA_EDGES):
        assert P.scheme_cost(s, a) == pytest.approx(P.scheme_cost(t, a), abs=1e-12)
        assert P.select_scheme(max(a - 1e-9, 0)) == s
        assert P.select_scheme(min(a + 1e-9, math.pi)) == t


def test_select_scheme_range():
    assert P.select_scheme(0.0) == "A+" and P.select_scheme(math.pi) == "A-"
    with pytest.raises(ValueError):
        P.select_scheme(-0.1)
    a = np.linspace(0, math.pi, 777)
    assert [P.SCHEMES[i] for i in P.scheme_index(a)] == [P.select_scheme(float(v)) for v in a]


def test_codes_round_trip_and_are_prefix_free():
    for s in P.SCHEMES:
        assert P.is_prefix_free(s)
        for r in P.REGIONS:
            msg = P.encode(r, s)
            assert P.decode(msg) == P.RegionLabel(*r)
            assert P.decode(msg.symbols, s) == P.RegionLabel(*r)
            assert msg.bits() <= 3 and msg.bits_rounded() <= 3
    with pytest.raises(P.DecodeError):
        P.decode(((P.BIT, 1),), "A+")
    with pytest.raises(P.DecodeError):
        P.decode(((P.BIT, 0), (P.BIT, 0)), "A+")
    with pytest.raises(ValueError):
        P.encode((0, 0), "Z")


def test_cost_accounting_identity_is_exact():
    # lengths as (bits, trits); expected length = a + b log2(3) with rational a, b
    def length(scheme, region):
        syms = P.encode(region, scheme).symbols
        return sum(1 for k, _ in syms if k == P.BIT), sum(1 for k, _ in syms if k == P.TRIT)

    integrands = {
        "A+": lambda r: (Fraction(3, 2) + Fraction(3, 2) * r, 0),
        "B+": lambda r: (r, 1),
        "C": lambda r: (Fraction(2), 0),
        "B-": lambda r: (1 - r, 1),
        "A-": lambda r: (3 - Fraction(3, 2) * r, 0),
    }
    for r in (Fraction(k, 24) for k in range(25)):
        q = r / 2
        probs = {(0, 0): Fraction(1, 2) - q, (1, 1): Fraction(1, 2) - q, (0, 1): q, (1, 0): q}
        for s in P.SCHEMES:
            a = sum(probs[reg] * length(s, reg)[0] for reg in P.REGIONS)
            b = sum(probs[reg] * length(s, reg)[1] for reg in P.REGIONS)
            want = integrands[s](r)
            assert (a, b) == (want[0], want[1])
            assert P.expected_length(s, float(r) * math.pi) == pytest.approx(float(a) + float(b) * math.log2(3), abs=1e-12)


def test_region_distribution_chi_square():
    rng = P.stream(1, "chi2")
    n = 10**6
    alpha = 1.1
    x = P.uniform_sphere(rng, n)
    l1 = P.uniform_sphere(rng, n)
    # l2 at angle alpha from l1 along a random perpendicular direction
    r = P.uniform_sphere(rng, n)
    perp = r - np.einsum("ij,ij->i", r, l1)[:, None] * l1
    perp /= np.linalg.norm(perp, axis=1)[:, None]
    l2 = math.cos(alpha) * l1 + math.sin(alpha) * perp
    i = P.theta(np.einsum("ij,ij->i", x, l1))
    j = P.theta(np.einsum("ij,ij->i", x, l2))
    observed = [np.sum((i == a) & (j == b)) for a, b in P.REGIONS]
    probs = P.region_probabilities(alpha)
    expected = [n * probs[reg] for reg in P.REGIONS]
    assert stats.chisquare(observed, expected).pvalue > 0.001


def test_alpha_distribution_ks():
    _, _, alpha = P.sample_shared_batch(P.stream(2, "ks"), 200_000)
    assert stats.kstest(alpha, lambda a: (1 - np.cos(a)) / 2).pvalue > 0.001


def test_streams_are_deterministic_and_distinct():
    a = P.stream(5, "shared", 0).random(4)
    assert np.array_equal(a, P.stream(5, "shared", 0).random(4))
    assert not np.array_equal(a, P.stream(5, "shared", 1).random(4))
    assert not np.array_equal(a, P.stream(5, "ties", 0).random(4))
    assert not np.array_equal(a, P.stream(6, "shared", 0).random(4))


def test_shared_randomness_validation():
    with pytest.raises(ValueError):
        P.SharedRandomness(np.array([1.0, 0, 0]), np.array([2.0, 0, 0]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_single_round_matches_vectorized_rule(seed):
    rng = np.random.default_rng(seed)
    x, y = P.uniform_sphere(rng, 2)
    s = P.sample_shared(rng)
    out, msg = P.simulate_round(x, y, s)
    region = P.region_of(x, s)
    assert msg.scheme == P.select_scheme(s.alpha)
    v = (2 * region.i - 1) * s.l1 + (2 * region.j - 1) * s.l2
    assert out == (1 if y @ v >= 0 else -1)


def test_bob_tie_uses_coin():
    s = P.SharedRandomness(np.array([1.0, 0, 0]), np.array([1.0, 0, 0]))
    r = P.RegionLabel(1, 0)  # l1 - l2 = 0
    assert P.bob_output(r, s, (0, 0, 1), coin=1) == 1
    assert P.bob_output(r, s, (0, 0, 1), coin=-1) == -1


def test_monte_carlo_correlators_and_determinism():
    states = [(0, 0, 1), (1, 0, 0), (0.6, 0.8, 0)]
    meas = [(0, 0, 1), (0, 1, 0)]
    res = P.run_simulation(states, meas, 200_000, seed=3)
    want = np.array(states, dtype=float) @ np.array(meas, dtype=float).T
    assert np.all(np.abs(res.correlators - want) < 4 * res.correlator_errors + 1e-3)
    again = P.run_simulation(states, meas, 200_000, seed=3)
    assert np.array_equal(res.correlators, again.correlators)
    assert res.cost.average_bits == again.cost.average_bits
    chunked = P.run_simulation(states, meas, 200_000, seed=3, chunk=30_000)
    assert chunked.cost.average_bits == pytest.approx(res.cost.average_bits, abs=1e-12)


def test_cost_report_fields():
    res = P.run_simulation(None, [(0, 0, 1)], 50_000, seed=1, curve_points=11)
    rep = res.cost.to_json()
    assert rep["worst_case_bits"] <= 3 and rep["worst_case_bits_trits_as_two_bits"] <= 3
    assert sum(rep["scheme_counts"].values()) == 50_000
    assert len(rep["curve"]) == 11
    with pytest.raises(ValueError):
        P.run_simulation([(0, 0, 0.5)], [(0, 0, 1)], 10)
    with pytest.raises(ValueError):
        P.run_simulation(None, [(0, 0, 1)], 0)
