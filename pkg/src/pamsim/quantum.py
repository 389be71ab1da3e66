"""Finite-dimensional quantum objects for prepare-and-measure scenarios.

States and effects are stored as complex128 numpy matrices.  Spectral
computations go through :func:`hermitian_eigh`, a cyclic Jacobi solver on the
real symmetric embedding of a Hermitian matrix, so results do not depend on
the LAPACK build.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class DimensionError(ValueError):
    """Objects of incompatible Hilbert-space dimension were combined."""


# ---------------------------------------------------------------------------
# Jacobi eigensolver
# ---------------------------------------------------------------------------

def _jacobi_symmetric(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a real symmetric matrix.

    Sweeps over (p, q) pairs in row-major order until the off-diagonal mass
    is negligible.  Returns (eigenvalues, eigenvectors as columns), unsorted.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:  # theta^2 would overflow; t ~ 1/(2 theta)
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def hermitian_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix via its real embedding.

    ``[[Re H, -Im H], [Im H, Re H]]`` has the spectrum of ``H`` with every
    eigenvalue doubled.  Returns ascending eigenvalues and orthonormal complex
    eigenvectors (columns).
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    emb = np.block([[h.real, -h.imag], [h.imag, h.real]])
    emb = 0.5 * (emb + emb.T)
    vals, vecs = _jacobi_symmetric(emb)
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    # Each complex eigenvector appears twice (u and i*u); keep a maximal
    # orthonormal subset via Gram-Schmidt over the complexified candidates.
    out_vals: list[float] = []
    out_vecs: list[np.ndarray] = []
    for k in range(2 * n):
        u = vecs[:n, k] + 1j * vecs[n:, k]
        for w in out_vecs:
            u = u - np.vdot(w, u) * w
        norm = np.linalg.norm(u)
        if norm > 1e-6:
            out_vecs.append(u / norm)
            out_vals.append(vals[k])
        if len(out_vecs) == n:
            break
    return np.array(out_vals), np.column_stack(out_vecs)


def hermitian_eigvalsh(h: np.ndarray) -> np.ndarray:
    vals, _ = _jacobi_symmetric(
        np.block([[np.real(h), -np.imag(h)], [np.imag(h), np.real(h)]])
    )
    return np.sort(vals)[::2]


def nonnegative_projector(h: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    """Projector onto the eigenspace of ``h`` with eigenvalues >= -tol."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    emb = np.block([[h.real, -h.imag], [h.imag, h.real]])
    vals, vecs = _jacobi_symmetric(0.5 * (emb + emb.T))
    keep = vecs[:, vals >= -tol]
    p_emb = keep @ keep.T
    # The embedded projector has the block form [[Re P, -Im P], [Im P, Re P]].
    return p_emb[:n, :n] + 1j * p_emb[n:, :n]


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------

def _as_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    arr.setflags(write=False)
    return arr


def _is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


@dataclass(frozen=True)
class QuantumState:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not _is_hermitian(m):
            raise ValueError("state is not Hermitian")
        if abs(np.trace(m) - 1) > TOL_TRACE:
            raise ValueError(f"state trace {np.trace(m).real:.3g} != 1")
        if hermitian_eigvalsh(m)[0] < -TOL_PSD:
            raise ValueError("state is not positive semidefinite")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, vec) -> "QuantumState":
        v = np.asarray(vec, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero state vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_bloch(cls, bloch) -> "QuantumState":
        b = BlochVector.coerce(bloch)
        return cls(bloch_operator(b))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class Effect:
    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not _is_hermitian(m):
            raise ValueError("effect is not Hermitian")
        ev = hermitian_eigvalsh(m)
        if ev[0] < -TOL_PSD or ev[-1] > 1 + TOL_PSD:
            raise ValueError("effect eigenvalues outside [0, 1]")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    effects: tuple[Effect, ...]

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        object.__setattr__(self, "effects", effects)
        if not effects:
            raise ValueError("POVM needs at least one effect")
        dims = {e.dim for e in effects}
        if len(dims) != 1:
            raise DimensionError("POVM effects have different dimensions")
        total = sum(e.matrix for e in effects)
        if np.max(np.abs(total - np.eye(effects[0].dim))) > TOL_TRACE:
            raise ValueError("POVM effects do not sum to the identity")

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __len__(self) -> int:
        return len(self.effects)

    @classmethod
    def projective(cls, vectors) -> "Povm":
        """Rank-one projective measurement from (unnormalized) basis vectors."""
        mats = []
        for v in vectors:
            v = np.asarray(v, dtype=complex)
            v = v / np.linalg.norm(v)
            mats.append(np.outer(v, v.conj()))
        return cls(tuple(Effect(m) for m in mats))

    @classmethod
    def binary(cls, vector) -> "Povm":
        """Two-outcome measurement {|v><v|, 1 - |v><v|}."""
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        p = np.outer(v, v.conj())
        return cls((Effect(p), Effect(np.eye(len(v)) - p)))

    @classmethod
    def from_bloch(cls, direction) -> "Povm":
        """Qubit projective measurement along a Bloch direction; outcome 0 is '+'."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        plus = 0.5 * (np.eye(2) + d[0] * PAULI_X + d[1] * PAULI_Y + d[2] * PAULI_Z)
        return cls((Effect(plus), Effect(np.eye(2) - plus)))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @classmethod
    def coerce(cls, v) -> "BlochVector":
        if isinstance(v, BlochVector):
            return v
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def bloch_operator(b) -> np.ndarray:
    """½(1 + r·σ)."""
    r = BlochVector.coerce(b).as_array()
    if np.linalg.norm(r) > 1 + 1e-9:
        raise ValueError("Bloch vector outside the unit ball")
    return 0.5 * (np.eye(2) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)


@dataclass(frozen=True)
class Scenario:
    """States and measurements of a finite prepare-and-measure setting.

    ``exact`` optionally carries the integer-vector data of a named family
    (see :mod:`pamsim.families`) so that exact rational behaviors can be
    derived without going through floating point.
    """

    states: tuple[QuantumState, ...]
    measurements: tuple[Povm, ...]
    name: str = ""
    exact: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if not self.states:
            raise ValueError("scenario has no states")
        dims = {s.dim for s in self.states} | {m.dim for m in self.measurements}
        if len(dims) != 1:
            raise DimensionError(f"inconsistent dimensions in scenario: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def shape(self) -> tuple[int, int, int]:
        """(X, Y, B); B is the largest outcome count over measurements."""
        b = max((len(m) for m in self.measurements), default=1)
        return len(self.states), len(self.measurements), b


@dataclass(frozen=True)
class Behavior:
    """Table p(b|x,y) with index order [b][x][y].

    ``p`` is a float array, or an object array of ``Fraction`` when the
    behavior is known exactly.
    """

    p: np.ndarray
    rationalized: bool = False

    def __post_init__(self):
        p = np.asarray(self.p)
        if p.ndim != 3:
            raise ValueError("behavior table must be indexed [b][x][y]")
        if p.dtype != object:
            p = p.astype(float)
            if np.any(p < -TOL_TRACE) or np.any(p > 1 + TOL_TRACE):
                raise ValueError("probabilities outside [0, 1]")
            if np.max(np.abs(p.sum(axis=0) - 1.0)) > TOL_TRACE:
                raise ValueError("behavior rows do not sum to 1")
        else:
            for b in range(p.shape[0]):
                for x in range(p.shape[1]):
                    for y in range(p.shape[2]):
                        if not 0 <= p[b, x, y] <= 1:
                            raise ValueError("probabilities outside [0, 1]")
            if any(sum(p[:, x, y]) != 1 for x in range(p.shape[1]) for y in range(p.shape[2])):
                raise ValueError("exact behavior rows do not sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def B(self) -> int:
        return self.p.shape[0]

    @property
    def X(self) -> int:
        return self.p.shape[1]

    @property
    def Y(self) -> int:
        return self.p.shape[2]

    @property
    def is_exact(self) -> bool:
        return self.p.dtype == object

    def as_float(self) -> np.ndarray:
        return self.p.astype(float)

    def as_fractions(self, tol: float = 1e-9) -> "Behavior":
        """Exact copy; float entries are rationalized by continued fractions.

        The last outcome of every row absorbs the rounding so rows sum to 1
        exactly.  The result is flagged ``rationalized``.
        """
        if self.is_exact:
            return self
        max_den = int(round(1 / tol))
        B, X, Y = self.p.shape
        q = np.empty((B, X, Y), dtype=object)
        for x in range(X):
            for y in range(Y):
                acc = Fraction(0)
                for b in range(B - 1):
                    f = Fraction(float(self.p[b, x, y])).limit_denominator(max_den)
                    f = min(max(f, Fraction(0)), 1 - acc)
                    q[b, x, y] = f
                    acc += f
                q[B - 1, x, y] = 1 - acc
        return Behavior(q, rationalized=True)

    def correlators(self) -> np.ndarray:
        """E[x, y] = p(0|x,y) - p(1|x,y) for binary behaviors."""
        if self.B != 2:
            raise ValueError("correlators need binary outcomes")
        return self.as_float()[0] - self.as_float()[1]

    def to_json(self) -> dict:
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else float(v)

        return {
            "X": self.X,
            "Y": self.Y,
            "B": self.B,
            "p": [[[enc(self.p[b, x, y]) for y in range(self.Y)] for x in range(self.X)] for b in range(self.B)],
            "rationalized": self.rationalized,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Behavior":
        raw = data["p"]
        exact = any(isinstance(v, str) for plane in raw for row in plane for v in row)
        if exact:
            arr = np.empty((data["B"], data["X"], data["Y"]), dtype=object)
            for b, plane in enumerate(raw):
                for x, row in enumerate(plane):
                    for y, v in enumerate(row):
                        arr[b, x, y] = Fraction(v)
        else:
            arr = np.array(raw, dtype=float)
        if arr.shape != (data["B"], data["X"], data["Y"]):
            raise ValueError("behavior table does not match declared X, Y, B")
        return cls(arr, rationalized=bool(data.get("rationalized", False)))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def born_behavior(scenario: Scenario) -> Behavior:
    """p(b|x,y) = Re tr(rho_x M_{b|y}), zero-padded for measurements with fewer outcomes."""
    X, Y, B = scenario.shape
    p = np.zeros((B, X, Y))
    for y, povm in enumerate(scenario.measurements):
        if povm.dim != scenario.dim:
            raise DimensionError("measurement dimension differs from state dimension")
        for b, eff in enumerate(povm.effects):
            for x, st in enumerate(scenario.states):
                p[b, x, y] = np.real(np.trace(st.matrix @ eff.matrix))
    near = (p < 0) & (p > -TOL_TRACE)
    p[near] = 0.0
    p[(p > 1) & (p < 1 + TOL_TRACE)] = 1.0
    return Behavior(p)


def _check_same_dim(a: QuantumState, b: QuantumState) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def trace_distance(a: QuantumState, b: QuantumState) -> float:
    """½‖ρ_a − ρ_b‖₁ from the eigenvalues of the difference."""
    _check_same_dim(a, b)
    ev = hermitian_eigvalsh(a.matrix - b.matrix)
    return float(min(max(0.5 * np.sum(np.abs(ev)), 0.0), 1.0))


def helstrom_effect(a: QuantumState, b: QuantumState) -> Effect:
    """Projector onto the nonnegative eigenspace of ρ_a − ρ_b.

    Zero eigenvalues count as nonnegative, so identical inputs give the
    identity effect.
    """
    _check_same_dim(a, b)
    p = nonnegative_projector(a.matrix - b.matrix)
    return Effect(0.5 * (p + p.conj().T))


def discrimination_success(a: QuantumState, b: QuantumState, effect: Effect) -> float:
    """Equal-prior success probability guessing 'a' on ``effect``, 'b' on its complement."""
    pa = np.real(np.trace(a.matrix @ effect.matrix))
    pb = np.real(np.trace(b.matrix @ (np.eye(a.dim) - effect.matrix)))
    return float(0.5 * (pa + pb))


def pure_overlap(psi: Sequence[complex], phi: Sequence[complex]) -> float:
    """|<psi|phi>|^2 for normalized copies of the vectors."""
    u = np.asarray(psi, dtype=complex)
    v = np.asarray(phi, dtype=complex)
    return float(abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real))
