"""Variable-length qubit simulation protocol and its communication cost.

Alice and Bob share two uniform unit vectors l1, l2.  Alice sends the region
(i, j) = (Theta(x.l1), Theta(x.l2)) of her Bloch vector, encoded with one of
five prefix codes chosen by the angle alpha between l1 and l2.  Bob outputs
sgn(y.(s1 l1 + s2 l2)) with s = 2c - 1.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from .quantum import Behavior, BlochVector

LOG2_3 = math.log2(3)
SCHEMES = ("A+", "B+", "C", "B-", "A-")
REGIONS = ((0, 0), (1, 1), (0, 1), (1, 0))

# alpha thresholds: alpha = pi * log2(beta) at beta = 9/8, 4/3, 3/2, 16/9
BETA_EDGES = (Fraction(9, 8), Fraction(4, 3), Fraction(3, 2), Fraction(16, 9))
ALPHA_EDGES = tuple(math.pi * math.log2(float(b)) for b in BETA_EDGES)


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

def stream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Counter-based (Philox) generator for a named, optionally indexed substream.

    Distinct (name, index) pairs give statistically independent streams, and
    a stream depends only on (seed, name, index), never on call order.
    """
    key = (zlib.crc32(name.encode()),) + tuple(int(i) for i in index)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    norm = np.linalg.norm(v, axis=1)
    bad = norm == 0
    while np.any(bad):  # probability zero, kept for completeness
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norm = np.linalg.norm(v, axis=1)
        bad = norm == 0
    return v / norm[:, None]


@dataclass(frozen=True)
class SharedRandomness:
    l1: np.ndarray
    l2: np.ndarray

    def __post_init__(self):
        for v in (self.l1, self.l2):
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValueError("shared vectors must be unit vectors")

    @property
    def alpha(self) -> float:
        return float(np.arccos(np.clip(np.dot(self.l1, self.l2), -1.0, 1.0)))


def sample_shared(rng: np.random.Generator) -> SharedRandomness:
    v = uniform_sphere(rng, 2)
    return SharedRandomness(v[0], v[1])


def sample_shared_batch(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(l1, l2, alpha) arrays for n rounds."""
    l1 = uniform_sphere(rng, n)
    l2 = uniform_sphere(rng, n)
    alpha = np.arccos(np.clip(np.einsum("ij,ij->i", l1, l2), -1.0, 1.0))
    return l1, l2, alpha


# ---------------------------------------------------------------------------
# regions and codes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionLabel:
    i: int
    j: int

    def __post_init__(self):
        if self.i not in (0, 1) or self.j not in (0, 1):
            raise ValueError("region labels are bits")

    @property
    def name(self) -> str:
        return f"S{self.i}{self.j}"


def theta(z):
    """Heaviside step with Theta(0) = 1."""
    return (np.asarray(z) >= 0).astype(np.int8)


def region_of(x, s: SharedRandomness) -> RegionLabel:
    x = BlochVector.coerce(x).as_array()
    return RegionLabel(int(np.dot(x, s.l1) >= 0), int(np.dot(x, s.l2) >= 0))


def select_scheme(alpha: float) -> str:
    """Scheme for beta = 2^(alpha/pi), with the interval ends as in the code table:
    A+ [1, 9/8], B+ (9/8, 4/3], C (4/3, 3/2), B- [3/2, 16/9), A- [16/9, 2]."""
    if not 0 <= alpha <= math.pi:
        raise ValueError("alpha must lie in [0, pi]")
    a1, a2, a3, a4 = ALPHA_EDGES
    if alpha <= a1:
        return "A+"
    if alpha <= a2:
        return "B+"
    if alpha < a3:
        return "C"
    if alpha < a4:
        return "B-"
    return "A-"


def scheme_index(alpha: np.ndarray) -> np.ndarray:
    """Vectorized :func:`select_scheme` returning indices into SCHEMES."""
    a1, a2, a3, a4 = ALPHA_EDGES
    idx = np.full(alpha.shape, 4, dtype=np.int8)
    idx[alpha < a4] = 3
    idx[alpha < a3] = 2
    idx[alpha <= a2] = 1
    idx[alpha <= a1] = 0
    return idx


BIT, TRIT = "bit", "trit"


def _b(s: str) -> tuple:
    return tuple((BIT, int(ch)) for ch in s)


CODEBOOK: dict[str, dict[tuple[int, int], tuple]] = {
    "A+": {(0, 0): _b("0"), (1, 1): _b("10"), (0, 1): _b("110"), (1, 0): _b("111")},
    "B+": {
        (0, 0): ((TRIT, 0),),
        (1, 1): ((TRIT, 1),),
        (0, 1): ((TRIT, 2), (BIT, 0)),
        (1, 0): ((TRIT, 2), (BIT, 1)),
    },
    "C": {(0, 0): _b("00"), (1, 1): _b("11"), (0, 1): _b("01"), (1, 0): _b("10")},
    "B-": {
        (0, 0): ((TRIT, 2), (BIT, 1)),
        (1, 1): ((TRIT, 2), (BIT, 0)),
        (0, 1): ((TRIT, 1),),
        (1, 0): ((TRIT, 0),),
    },
    "A-": {(0, 0): _b("111"), (1, 1): _b("110"), (0, 1): _b("10"), (1, 0): _b("0")},
}


@dataclass(frozen=True)
class CodedMessage:
    symbols: tuple
    scheme: str

    def bits(self) -> float:
        """Length with a trit counted as log2(3) bits."""
        return sum(1.0 if kind == BIT else LOG2_3 for kind, _ in self.symbols)

    def bits_rounded(self) -> int:
        """Length with a trit counted as two bits."""
        return sum(1 if kind == BIT else 2 for kind, _ in self.symbols)

    def text(self) -> str:
        return "".join(f"{v}{'₂' if kind == BIT else '₃'}" for kind, v in self.symbols)


class DecodeError(ValueError):
    pass


def encode(region: RegionLabel | tuple[int, int], scheme: str) -> CodedMessage:
    if scheme not in CODEBOOK:
        raise ValueError(f"unknown scheme {scheme!r}")
    key = (region.i, region.j) if isinstance(region, RegionLabel) else tuple(region)
    return CodedMessage(CODEBOOK[scheme][key], scheme)


def decode(msg: CodedMessage | Sequence, scheme: str | None = None) -> RegionLabel:
    """Read symbols until they form a codeword of the scheme."""
    if isinstance(msg, CodedMessage):
        symbols, scheme = msg.symbols, scheme or msg.scheme
    else:
        symbols = tuple(msg)
    if scheme not in CODEBOOK:
        raise ValueError(f"unknown scheme {scheme!r}")
    inverse = {word: region for region, word in CODEBOOK[scheme].items()}
    for n in range(1, len(symbols) + 1):
        if symbols[:n] in inverse:
            if n != len(symbols):
                raise DecodeError("trailing symbols after a complete codeword")
            return RegionLabel(*inverse[symbols[:n]])
    raise DecodeError(f"{symbols!r} is not a codeword of scheme {scheme}")


def is_prefix_free(scheme: str) -> bool:
    words = list(CODEBOOK[scheme].values())
    return not any(a != b and b[: len(a)] == a for a in words for b in words)


def region_probabilities(alpha: float) -> dict[tuple[int, int], float]:
    """Probability of each region at fixed alpha, averaged over the shared vectors."""
    q = alpha / (2 * math.pi)
    return {(0, 0): 0.5 - q, (1, 1): 0.5 - q, (0, 1): q, (1, 0): q}


def expected_length(scheme: str, alpha: float) -> float:
    probs = region_probabilities(alpha)
    return sum(probs[r] * encode(r, scheme).bits() for r in REGIONS)


def scheme_cost(scheme: str, alpha):
    """Closed-form average length of a scheme at angle alpha (vectorizes)."""
    a = np.asarray(alpha, dtype=float) / math.pi
    return {
        "A+": 1.5 + 1.5 * a,
        "B+": LOG2_3 + a,
        "C": 2.0 + 0.0 * a,
        "B-": LOG2_3 + 1 - a,
        "A-": 3.0 - 1.5 * a,
    }[scheme]


def piecewise_cost(alpha):
    """Cost of the scheme selected at each alpha."""
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    costs = np.stack([np.broadcast_to(scheme_cost(s, a), a.shape) for s in SCHEMES])
    out = costs[scheme_index(a).astype(np.int64), np.arange(a.size)]
    return out if np.ndim(alpha) else float(out[0])


def entropy(alpha):
    """Shannon entropy (bits) of the region distribution at angle alpha."""
    q = np.asarray(alpha, dtype=float) / (2 * math.pi)
    r = 0.5 - q

    def xlog(t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, t * np.log2(np.where(t > 0, t, 1.0)), 0.0)

    h = -2 * (xlog(q) + xlog(r))
    return h if np.ndim(alpha) else float(h)


# ---------------------------------------------------------------------------
# cost integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    value: float
    pieces: tuple[float, float, float]  # A+, B+ and C parts of the symmetric form


def average_cost_closed_form() -> ClosedForm:
    """3/2 - sin(pi log2 3)/pi - sin(2 pi log2 3)/(2 pi), plus the three pieces
    of the folded integral over [0, pi/2] (weight sin alpha)."""
    value = 1.5 - math.sin(math.pi * LOG2_3) / math.pi - math.sin(2 * math.pi * LOG2_3) / (2 * math.pi)
    a1, a2 = ALPHA_EDGES[0], ALPHA_EDGES[1]

    def asin_int(a):  # integral of alpha sin(alpha) from 0 to a
        return math.sin(a) - a * math.cos(a)

    p1 = 1.5 * (1 - math.cos(a1)) + 1.5 / math.pi * asin_int(a1)
    p2 = LOG2_3 * (math.cos(a1) - math.cos(a2)) + (asin_int(a2) - asin_int(a1)) / math.pi
    p3 = 2 * math.cos(a2)
    return ClosedForm(value, (p1, p2, p3))


def average_cost_quadrature() -> float:
    """Adaptive quadrature of (sin alpha / 2) L(alpha) over the five scheme intervals."""
    edges = (0.0,) + ALPHA_EDGES + (math.pi,)
    total = 0.0
    for s, lo, hi in zip(SCHEMES, edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda a, s=s: scheme_cost(s, a) * math.sin(a) / 2, lo, hi, epsabs=1e-14, epsrel=1e-14)
        total += val
    return total


def entropy_floor() -> float:
    val, _ = integrate.quad(lambda a: entropy(a) * math.sin(a) / 2, 0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def cost_curve(points: int = 181) -> list[dict]:
    """Per-alpha costs of every scheme, the piecewise minimum and the entropy floor."""
    rows = []
    for a in np.linspace(0.0, math.pi, points):
        row = {"alpha": float(a)}
        for s in SCHEMES:
            row[s] = float(scheme_cost(s, a))
        row["piecewise"] = float(piecewise_cost(float(a)))
        row["entropy"] = float(entropy(float(a)))
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# one round and Monte Carlo
# ---------------------------------------------------------------------------

def bob_output(region: RegionLabel, s: SharedRandomness, measurement, coin: int = 1) -> int:
    """+1 or -1; ``coin`` (+1/-1) settles an exact tie."""
    y = BlochVector.coerce(measurement).as_array()
    v = (2 * region.i - 1) * s.l1 + (2 * region.j - 1) * s.l2
    t = float(np.dot(y, v))
    if t > 0:
        return 1
    if t < 0:
        return -1
    return 1 if coin >= 0 else -1


def simulate_round(x, measurement, s: SharedRandomness, coin: int = 1) -> tuple[int, CodedMessage]:
    """Alice encodes, Bob decodes and answers; returns (outcome, message)."""
    scheme = select_scheme(s.alpha)
    msg = encode(region_of(x, s), scheme)
    region = decode(msg, select_scheme(s.alpha))
    return bob_output(region, s, measurement, coin), msg


LENGTHS = np.array([[encode(r, s).bits() for r in REGIONS] for s in SCHEMES])
LENGTHS_ROUNDED = np.array([[encode(r, s).bits_rounded() for r in REGIONS] for s in SCHEMES])
_REGION_INDEX = np.array([[0, 2], [3, 1]])  # [i][j] -> position in REGIONS


@dataclass
class CostReport:
    average_bits: float
    standard_error: float
    worst_case_bits: float
    worst_case_bits_rounded: int
    rounds: int
    per_state_average: list[float] = field(default_factory=list)
    per_state_error: list[float] = field(default_factory=list)
    scheme_counts: dict[str, int] = field(default_factory=dict)
    curve: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "average_bits": self.average_bits,
            "standard_error": self.standard_error,
            "worst_case_bits": self.worst_case_bits,
            "worst_case_bits_trits_as_two_bits": self.worst_case_bits_rounded,
            "rounds": self.rounds,
            "per_state_average": self.per_state_average,
            "per_state_error": self.per_state_error,
            "scheme_counts": self.scheme_counts,
            "closed_form": average_cost_closed_form().value,
            "curve": self.curve,
        }


@dataclass
class SimulationResult:
    behavior: Behavior
    correlators: np.ndarray
    correlator_errors: np.ndarray
    cost: CostReport


class _Moments:
    """Chunked sums combined with exactly rounded summation."""

    def __init__(self, shape=()):
        self.sums: list[np.ndarray] = []
        self.squares: list[np.ndarray] = []
        self.n = 0

    def add(self, values: np.ndarray, axis: int = 0) -> None:
        self.sums.append(np.sum(values, axis=axis, dtype=float))
        self.squares.append(np.sum(np.square(values, dtype=float), axis=axis))
        self.n += values.shape[axis]

    def mean_and_error(self):
        s = np.vectorize(lambda *xs: math.fsum(xs))(*self.sums) if len(self.sums) > 1 else self.sums[0]
        q = np.vectorize(lambda *xs: math.fsum(xs))(*self.squares) if len(self.squares) > 1 else self.squares[0]
        mean = s / self.n
        var = np.maximum(q / self.n - mean**2, 0.0) * self.n / max(self.n - 1, 1)
        return mean, np.sqrt(var / self.n)


def _rounds_for_states(xs: np.ndarray, ys: np.ndarray, n: int, seed: int, label: int, chunk: int,
                       length_stats: _Moments, out_stats: _Moments, counts: np.ndarray, worst: list) -> None:
    # one substream per shared vector and sequential draws only, so the
    # result does not depend on the chunk size
    l1_rng = stream(seed, "shared", label, 1)
    l2_rng = stream(seed, "shared", label, 2)
    tie_rng = stream(seed, "ties", label)
    done = 0
    while done < n:
        m = min(chunk, n - done)
        l1 = uniform_sphere(l1_rng, m)
        l2 = uniform_sphere(l2_rng, m)
        alpha = np.arccos(np.clip(np.einsum("ij,ij->i", l1, l2), -1.0, 1.0))
        x = xs if xs.ndim == 1 else xs[done:done + m]
        dot1 = l1 @ x if x.ndim == 1 else np.einsum("ij,ij->i", l1, x)
        dot2 = l2 @ x if x.ndim == 1 else np.einsum("ij,ij->i", l2, x)
        i, j = theta(dot1), theta(dot2)
        sch = scheme_index(alpha)
        reg = _REGION_INDEX[i, j]
        lengths = LENGTHS[sch, reg]
        length_stats.add(lengths)
        counts += np.bincount(sch, minlength=5)
        worst[0] = max(worst[0], float(lengths.max()))
        worst[1] = max(worst[1], int(LENGTHS_ROUNDED[sch, reg].max()))
        v = (2 * i - 1)[:, None] * l1 + (2 * j - 1)[:, None] * l2
        t = v @ ys.T  # (m, Y)
        outs = np.sign(t)
        ties = outs == 0
        if np.any(ties):
            outs[ties] = np.where(tie_rng.random(int(ties.sum())) < 0.5, 1.0, -1.0)
        out_stats.add(outs)
        done += m


def run_simulation(
    states: Sequence | None,
    measurements: Sequence,
    rounds: int,
    seed: int = 0,
    *,
    chunk: int = 1_000_000,
    curve_points: int = 0,
) -> SimulationResult:
    """Monte Carlo run of the protocol.

    With a list of states each state is simulated for ``rounds`` rounds on
    its own substream.  With ``states=None`` every round draws a fresh
    uniformly random state and the behavior estimate has a single row.
    """
    if rounds < 1:
        raise ValueError("rounds must be positive")
    ys = np.array([BlochVector.coerce(m).as_array() for m in measurements], dtype=float)
    if ys.ndim != 2 or len(ys) == 0:
        raise ValueError("need at least one measurement")
    ys = ys / np.linalg.norm(ys, axis=1)[:, None]
    counts = np.zeros(5, dtype=np.int64)
    worst = [0.0, 0]
    total_len = _Moments()
    per_avg, per_err, corr, corr_err = [], [], [], []
    if states is None:
        xs = uniform_sphere(stream(seed, "states"), rounds)
        ls, os_ = _Moments(), _Moments()
        _rounds_for_states(xs, ys, rounds, seed, 0, chunk, ls, os_, counts, worst)
        total_len = ls
        m, e = ls.mean_and_error()
        per_avg.append(float(m))
        per_err.append(float(e))
        cm, ce = os_.mean_and_error()
        corr.append(cm)
        corr_err.append(ce)
    else:
        for label, st in enumerate(states):
            x = BlochVector.coerce(st).as_array()
            if abs(np.linalg.norm(x) - 1) > 1e-9:
                raise ValueError("states must be pure (unit Bloch vectors)")
            ls, os_ = _Moments(), _Moments()
            _rounds_for_states(x, ys, rounds, seed, label, chunk, ls, os_, counts, worst)
            total_len.sums.extend(ls.sums)
            total_len.squares.extend(ls.squares)
            total_len.n += ls.n
            m, e = ls.mean_and_error()
            per_avg.append(float(m))
            per_err.append(float(e))
            cm, ce = os_.mean_and_error()
            corr.append(cm)
            corr_err.append(ce)
    avg, err = total_len.mean_and_error()
    corr = np.array(corr)
    corr_err = np.array(corr_err)
    p = np.stack([(1 + corr) / 2, (1 - corr) / 2])
    report = CostReport(
        average_bits=float(avg),
        standard_error=float(err),
        worst_case_bits=worst[0],
        worst_case_bits_rounded=worst[1],
        rounds=int(total_len.n),
        per_state_average=per_avg,
        per_state_error=per_err,
        scheme_counts={s: int(c) for s, c in zip(SCHEMES, counts)},
        curve=cost_curve(curve_points) if curve_points else [],
    )
    return SimulationResult(Behavior(np.clip(p, 0.0, 1.0)), corr, corr_err, report)
