"""Named state/measurement families with exact integer data.

Vectors are kept in their printed, unnormalized integer form over the
Eisenstein integers Z[w], w = exp(2 pi i / 3).  Inner products are computed
exactly there, so orthogonality tests and the Born probabilities
|<psi|phi>|^2 / (|psi|^2 |phi|^2) of these families are exact rationals.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .quantum import Behavior, Povm, QuantumState, Scenario

OMEGA = complex(-0.5, math.sqrt(3) / 2)


@dataclass(frozen=True)
class Eisenstein:
    """a + b*w with w^2 = -1 - w."""

    a: int
    b: int = 0

    def __add__(self, o):
        o = _eis(o)
        return Eisenstein(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Eisenstein(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-_eis(o))

    def __mul__(self, o):
        o = _eis(o)
        return Eisenstein(self.a * o.a - self.b * o.b, self.a * o.b + self.b * o.a - self.b * o.b)

    __rmul__ = __mul__

    def conj(self) -> "Eisenstein":
        # conj(w) = w^2 = -1 - w
        return Eisenstein(self.a - self.b, -self.b)

    def norm(self) -> int:
        """|z|^2."""
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __complex__(self) -> complex:
        return self.a + self.b * OMEGA


def _eis(v) -> Eisenstein:
    return v if isinstance(v, Eisenstein) else Eisenstein(int(v), 0)


W = Eisenstein(0, 1)
W2 = W * W


def inner(u, v) -> Eisenstein:
    """<u|v> = sum conj(u_i) v_i."""
    acc = Eisenstein(0)
    for ui, vi in zip(u, v):
        acc = acc + _eis(ui).conj() * _eis(vi)
    return acc


def norm2(u) -> int:
    return sum(_eis(c).norm() for c in u)


def overlap(u, v) -> Fraction:
    """|<u|v>|^2 / (|u|^2 |v|^2), exactly."""
    return Fraction(inner(u, v).norm(), norm2(u) * norm2(v))


def to_complex(u) -> np.ndarray:
    return np.array([complex(_eis(c)) for c in u])


@dataclass(frozen=True)
class ExactData:
    """Integer description of a family.

    ``measurements[y]`` lists outcomes as ``(vector, complement)``: the effect
    is |v><v| normalized, or its complement ``1 - |v><v|`` when ``complement``.
    ``bloch_states`` / ``bloch_measurements`` are set for qubit families given
    by integer Bloch vectors.
    """

    states: tuple
    measurements: tuple
    bloch_states: tuple | None = None
    bloch_measurements: tuple | None = None

    def behavior(self) -> Behavior:
        if self.bloch_states is not None:
            raise ValueError("Bloch families have irrational probabilities; use born_behavior")
        X, Y = len(self.states), len(self.measurements)
        B = max(len(m) for m in self.measurements)
        p = np.empty((B, X, Y), dtype=object)
        p[...] = Fraction(0)
        for y, meas in enumerate(self.measurements):
            for b, (vec, complement) in enumerate(meas):
                for x, st in enumerate(self.states):
                    t = overlap(st, vec)
                    p[b, x, y] = 1 - t if complement else t
        return Behavior(p)

    def orthogonal_pairs(self) -> list[tuple[int, int]]:
        n = len(self.states)
        return [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if inner(self.states[i], self.states[j]).is_zero()
        ]


YU_OH_VECTORS = (
    (1, 1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, -1),
    (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, -1, 0), (1, 0, -1), (0, 1, -1),
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
)

HESSE_SIC = (
    (0, 1, -1), (-1, 0, 1), (1, -1, 0),
    (0, 1, -W), (-W, 0, 1), (1, -W, 0),
    (0, 1, -W2), (-W2, 0, 1), (1, -W2, 0),
)

MUB3 = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 1, 1), (1, W, W2), (1, W2, W)),
    ((1, W, W), (W, 1, W), (W, W, 1)),
    ((1, W2, W2), (W2, 1, W2), (W2, W2, 1)),
)

OCTAHEDRON = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))

OCTAHEDRON_5MEAS = ((1, -1, 1), (1, -1, 0), (1, 0, -1), (1, 2, -1), (1, 2, 2))

OCTAHEDRON_10MEAS = (
    (1, 1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, -1), (1, 1, 0),
    (1, 0, 1), (0, 1, 1), (1, -1, 0), (1, 0, -1), (0, 1, -1),
)

FAMILY_NAMES = (
    "yu-oh-13",
    "yu-oh-10x4",
    "hesse-sic-mub",
    "octahedron-5meas",
    "octahedron-10meas",
    "real-qubit-ring",
    "mub3-pair",
)


def _binary_projectors(vectors):
    return tuple(((v, False), (v, True)) for v in vectors)


def _exact_scenario(name: str, data: ExactData) -> Scenario:
    states = [QuantumState.from_vector(to_complex(v)) for v in data.states]
    meas = []
    for outcomes in data.measurements:
        mats = []
        for vec, complement in outcomes:
            u = to_complex(vec)
            proj = np.outer(u, u.conj()) / np.vdot(u, u).real
            mats.append(np.eye(len(u)) - proj if complement else proj)
        meas.append(Povm(tuple(mats)))
    return Scenario(tuple(states), tuple(meas), name=name, exact=data)


def _bloch_scenario(name: str, states, meas_vectors) -> Scenario:
    data = ExactData(
        states=(), measurements=(),
        bloch_states=tuple(states), bloch_measurements=tuple(meas_vectors),
    )
    return Scenario(
        tuple(QuantumState.from_bloch(s) for s in states),
        tuple(Povm.from_bloch(m) for m in meas_vectors),
        name=name,
        exact=data,
    )


def real_qubit_ring(X: int, Y: int) -> Scenario:
    """Rebit states at angles 2 pi x / X and binary measurements at pi y / Y, x, y 1-based."""
    if X < 1 or Y < 1 or X % 2 or Y % 2:
        raise ValueError("real-qubit-ring needs positive even X and Y")
    states = [
        QuantumState.from_bloch((math.cos(2 * math.pi * x / X), 0.0, math.sin(2 * math.pi * x / X)))
        for x in range(1, X + 1)
    ]
    meas = [
        Povm.from_bloch((math.cos(math.pi * y / Y), 0.0, math.sin(math.pi * y / Y)))
        for y in range(1, Y + 1)
    ]
    return Scenario(tuple(states), tuple(meas), name=f"real-qubit-ring({X},{Y})")


_RING = re.compile(r"^real-qubit-ring[\(:](\d+)[,:](\d+)\)?$")


def named_family(name: str, X: int | None = None, Y: int | None = None) -> Scenario:
    """Build one of the named scenarios.

    ``real-qubit-ring`` takes ``X`` and ``Y`` either as keyword arguments or
    inline, e.g. ``"real-qubit-ring(32,16)"``.
    """
    m = _RING.match(name)
    if m:
        return real_qubit_ring(int(m.group(1)), int(m.group(2)))
    if name == "real-qubit-ring":
        if X is None or Y is None:
            raise ValueError("real-qubit-ring requires X and Y")
        return real_qubit_ring(X, Y)
    if name == "yu-oh-13":
        data = ExactData(YU_OH_VECTORS, _binary_projectors(YU_OH_VECTORS))
    elif name == "yu-oh-10x4":
        data = ExactData(YU_OH_VECTORS[:10], _binary_projectors(YU_OH_VECTORS[:4]))
    elif name == "hesse-sic-mub":
        data = ExactData(HESSE_SIC, tuple(tuple((v, False) for v in basis) for basis in MUB3))
    elif name == "mub3-pair":
        states = MUB3[0] + MUB3[1]
        data = ExactData(states, tuple(tuple((v, False) for v in basis) for basis in MUB3[:2]))
    elif name == "octahedron-5meas":
        return _bloch_scenario(name, OCTAHEDRON, OCTAHEDRON_5MEAS)
    elif name == "octahedron-10meas":
        return _bloch_scenario(name, OCTAHEDRON, OCTAHEDRON_10MEAS)
    else:
        raise ValueError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
    return _exact_scenario(name, data)
