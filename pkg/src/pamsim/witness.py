"""Dimension witnesses: exact classical bounds and quantum values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .families import named_family
from .lp import LPOutcome, fraction_str
from .quantum import Behavior, Scenario, born_behavior
from .strategies import CapExceeded, iter_standard_order_blocks, materialization_cap, standard_order_count

DUAL_DENOMINATOR_BOUND = 10**6


@dataclass(frozen=True)
class Witness:
    """Linear functional sum_{b,x,y} coeffs[b, x, y] p(b|x,y) with exact coefficients."""

    coeffs: np.ndarray  # object array of Fraction, shape (B, X, Y)
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=object)
        if c.ndim != 3:
            raise ValueError("coefficients must be indexed [b][x][y]")
        c = np.vectorize(Fraction, otypes=[object])(c) if c.size else c
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def B(self) -> int:
        return self.coeffs.shape[0]

    @property
    def X(self) -> int:
        return self.coeffs.shape[1]

    @property
    def Y(self) -> int:
        return self.coeffs.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.X, self.Y, self.B

    @classmethod
    def from_correlator(cls, c, name: str = "") -> "Witness":
        """sum_{x,y} c[x][y] E_{x,y}, with E = p(0|x,y) - p(1|x,y)."""
        c = np.asarray(c, dtype=object)
        if c.ndim != 2:
            raise ValueError("correlator coefficients must be an X-by-Y table")
        return cls(np.stack([c, -c]), name)

    def correlator(self) -> np.ndarray:
        if self.B != 2 or np.any(self.coeffs[0] != -self.coeffs[1]):
            raise ValueError("witness is not in correlator form")
        return self.coeffs[0]

    def value(self, behavior: Behavior):
        """Exact for exact behaviors, float otherwise."""
        if (behavior.B, behavior.X, behavior.Y) != self.coeffs.shape:
            raise ValueError("behavior shape does not match the witness")
        if behavior.is_exact:
            return sum((c * p for c, p in zip(self.coeffs.ravel(), behavior.p.ravel())), Fraction(0))
        return float(np.sum(self.coeffs.astype(float) * behavior.as_float()))

    def algebraic_maximum(self) -> Fraction:
        return sum((max(self.coeffs[:, x, y]) for x in range(self.X) for y in range(self.Y)), Fraction(0))

    def to_json(self) -> dict:
        return {
            "X": self.X,
            "Y": self.Y,
            "B": self.B,
            "name": self.name,
            "coeffs": [[[fraction_str(v) for v in row] for row in plane] for plane in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Witness":
        try:
            X, Y, B = int(data["X"]), int(data["Y"]), int(data["B"])
            arr = np.empty((B, X, Y), dtype=object)
            raw = data["coeffs"]
            if len(raw) != B:
                raise ValueError("coefficient table does not match B")
            for b, plane in enumerate(raw):
                if len(plane) != X:
                    raise ValueError("coefficient table does not match X")
                for x, row in enumerate(plane):
                    if len(row) != Y:
                        raise ValueError("coefficient table does not match Y")
                    for y, v in enumerate(row):
                        arr[b, x, y] = Fraction(v)
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed witness: {exc}") from exc
        return cls(arr, str(data.get("name", "")))


def witness_from_bloch(states: Sequence, meas_vectors: Sequence, name: str = "") -> Witness:
    """Correlator witness with c[i][j] = (x_i . y_j) / 2.

    Integer or Fraction inputs give exact coefficients; floats are taken at
    their exact binary value.
    """
    rows = []
    for m in meas_vectors:
        if all(v == 0 for v in m):
            raise ValueError("zero measurement vector")
    for s in states:
        if len(s) != 3:
            raise ValueError("state Bloch vectors need three components")
        rows.append([
            sum((Fraction(a) * Fraction(b) for a, b in zip(s, m)), Fraction(0)) / 2
            for m in meas_vectors
        ])
    return Witness.from_correlator(rows, name)


def _integer_coeffs(w: Witness) -> tuple[np.ndarray, int]:
    L = 1
    for v in w.coeffs.ravel():
        L = L * v.denominator // math.gcd(L, v.denominator)
    ints = [int(v * L) for v in w.coeffs.ravel()]
    big = max((abs(v) for v in ints), default=0)
    dtype = np.int64 if big * w.X * w.Y < 2**62 else object
    return np.array(ints, dtype=dtype).reshape(w.coeffs.shape), L


@dataclass
class BoundResult:
    value: Fraction
    strategy: tuple[int, ...]
    count: int


def classical_bound_detail(w: Witness, d_C: int, *, cap: int | None = None) -> BoundResult:
    """Exhaustive maximum over standard-order encodings with at most d_C messages.

    Relabeling messages does not change the objective, so one encoding per
    relabeling class suffices.  Bob's best response is applied per message
    and measurement.
    """
    if d_C < 1:
        raise ValueError("d_C must be positive")
    d = min(d_C, w.X)
    count = standard_order_count(w.X, d)
    limit = materialization_cap(cap)
    if count > limit:
        raise CapExceeded(count, limit)
    from .strategies import response_scores

    G, L = _integer_coeffs(w)
    best, best_word = None, None
    for block in iter_standard_order_blocks(w.X, d):
        scores = response_scores(block, G, d)
        i = int(np.argmax(scores))
        if best is None or scores[i] > best:
            best, best_word = scores[i], tuple(int(c) for c in block[i])
    return BoundResult(Fraction(int(best), L), best_word, count)


def classical_bound(w: Witness, d_C: int, *, cap: int | None = None) -> Fraction:
    return classical_bound_detail(w, d_C, cap=cap).value


def quantum_value(w: Witness, scenario: Scenario | Behavior) -> float:
    """sum c p_Q with p_Q from the Born rule."""
    behavior = scenario if isinstance(scenario, Behavior) else born_behavior(scenario)
    if (behavior.B, behavior.X, behavior.Y) != w.coeffs.shape:
        raise ValueError(
            f"scenario shape (B={behavior.B}, X={behavior.X}, Y={behavior.Y}) "
            f"does not match witness (B={w.B}, X={w.X}, Y={w.Y})"
        )
    return float(np.sum(w.coeffs.astype(float) * behavior.as_float()))


def _scale_to_integers(c: np.ndarray) -> np.ndarray:
    L = 1
    for v in c.ravel():
        L = L * v.denominator // math.gcd(L, v.denominator)
        if L > DUAL_DENOMINATOR_BOUND:
            return c
    scaled = [v * L for v in c.ravel()]
    g = 0
    for v in scaled:
        g = math.gcd(g, int(v))
    if g > 1:
        scaled = [v / g for v in scaled]
    return np.array(scaled, dtype=object).reshape(c.shape)


def witness_from_dual(outcome, shape: tuple[int, int, int], name: str = "dual") -> Witness:
    """Separating witness from the behavior-matching row multipliers.

    ``outcome`` is the certificate of a feasibility or robustness LP in the
    explicit layout (an :class:`LPOutcome`, or a simulability verdict
    carrying one).  With multipliers y on the matching rows, ``c = -y``
    scores every classical behavior at most the R3 multiplier while the
    tested behavior scores strictly more.
    """
    if hasattr(outcome, "outcome") and not isinstance(outcome, LPOutcome):
        outcome = outcome.outcome
    if outcome is None or outcome.dual is None:
        raise ValueError("outcome carries no dual values")
    if outcome.status == "feasible":
        raise ValueError("behavior is simulable; no separating witness")
    if outcome.status == "optimal" and outcome.objective is not None and outcome.objective >= 1:
        raise ValueError("visibility reaches 1; no separating witness")
    if outcome.status not in ("optimal", "infeasible"):
        raise ValueError(f"cannot extract a witness from status {outcome.status!r}")
    X, Y, B = shape
    if len(outcome.dual) < B * X * Y:
        raise ValueError("dual vector shorter than the behavior-matching rows")
    y = np.array([Fraction(v) for v in outcome.dual[: B * X * Y]], dtype=object).reshape(B, X, Y)
    return Witness(_scale_to_integers(-y), name)


# ---------------------------------------------------------------------------
# named witnesses
# ---------------------------------------------------------------------------

# Yu-Oh correlator table, printed with rows = measurements (y) and
# columns = states (x); c[x][y] = YU_OH_TABLE[y][x].
YU_OH_TABLE = (
    (-2, 3, 3, 3, -3, -3, -3, 2, 2, 2),
    (3, -2, 3, 3, 2, 2, -3, -3, -3, 2),
    (3, 3, -2, 3, 2, -3, 2, -3, 2, -3),
    (3, 3, 3, -2, -3, 2, 2, 2, -3, -3),
)


def yu_oh_witness() -> Witness:
    """Correlator witness on yu-oh-10x4.

    The '+' outcome of measurement y is the complement of the projector onto
    the y-th vector (outcome index 1 of the family), so
    E = 1 - 2|<psi_x|phi_y>|^2 and the quantum value is +72.
    """
    c = np.array(YU_OH_TABLE, dtype=object).T
    return Witness(np.stack([-c, c]), "W_10,4,2")


def hesse_witness() -> Witness:
    """c^b_{x,y} = 4 p_Q(b|x,y) - 1 on the Hesse SIC states measured in the four MUBs."""
    p = named_family("hesse-sic-mub").exact.behavior().p
    return Witness(4 * p - 1, "W_9,4,3")


WITNESS_FAMILIES = {
    "W_6,5,2": "octahedron-5meas",
    "W_6,10,2": "octahedron-10meas",
    "W_10,4,2": "yu-oh-10x4",
    "W_9,4,3": "hesse-sic-mub",
}


def named_witness(name: str) -> tuple[Witness, Scenario]:
    key = name.replace("W", "W_", 1) if name.startswith("W") and not name.startswith("W_") else name
    key = {"W_652": "W_6,5,2", "W_6102": "W_6,10,2", "W_1042": "W_10,4,2", "W_943": "W_9,4,3"}.get(key, key)
    if key not in WITNESS_FAMILIES:
        raise ValueError(f"unknown witness {name!r}; known: {', '.join(WITNESS_FAMILIES)}")
    scenario = named_family(WITNESS_FAMILIES[key])
    if key == "W_10,4,2":
        return yu_oh_witness(), scenario
    if key == "W_9,4,3":
        return hesse_witness(), scenario
    ex = scenario.exact
    return witness_from_bloch(ex.bloch_states, ex.bloch_measurements, key), scenario


@dataclass
class BoundTable:
    name: str
    bounds: dict[int, Fraction]
    quantum: float
    ratios: dict[int, float] = field(default_factory=dict)

    def chain(self) -> list[Fraction]:
        return [self.bounds[d] for d in sorted(self.bounds)]

    def to_json(self) -> dict:
        return {
            "witness": self.name,
            "bounds": {str(d): fraction_str(v) for d, v in sorted(self.bounds.items())},
            "quantum_value": self.quantum,
            "violation": {str(d): r for d, r in sorted(self.ratios.items())},
        }


def bound_table(w: Witness, d_values: Sequence[int], scenario: Scenario | None = None,
                *, cap: int | None = None) -> BoundTable:
    bounds = {d: classical_bound(w, d, cap=cap) for d in d_values}
    q = quantum_value(w, scenario) if scenario is not None else float("nan")
    ratios = {d: q / float(v) - 1 for d, v in bounds.items() if v > 0}
    return BoundTable(w.name, bounds, q, ratios)
