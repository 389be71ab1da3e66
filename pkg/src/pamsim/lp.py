"""Exact rational linear programming with checkable certificates.

The solver is a revised primal simplex over exact rationals (gmpy2 ``mpq``
when available) with an explicit basis inverse.  Every verdict ships a
certificate that :func:`verify_certificate` re-checks from scratch:

* ``feasible`` / ``optimal`` carry a primal point,
* ``optimal`` also carries row multipliers ``dual`` whose bound equals the
  objective,
* ``infeasible`` carries a Farkas vector in ``dual``,
* ``unbounded`` carries a feasible point and an improving ray.

Sign convention for row multipliers ``v`` (maximization and Farkas): ``v_i >= 0``
on ``<=`` rows, ``v_i <= 0`` on ``>=`` rows, free on ``==`` rows, so every
row-feasible ``x`` obeys ``v.A x <= v.b``.  For minimization the signs flip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

try:  # gmpy2 is several times faster than fractions for pivoting
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

LE, EQ, GE = "<=", "==", ">="
RELATIONS = (LE, EQ, GE)
DEFAULT_MAX_PIVOTS = 10**7


def Q(v):
    if isinstance(v, str):
        return _Q(Fraction(v))
    return _Q(v)


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(int(v.numerator), int(v.denominator))


def fraction_str(v) -> str:
    f = to_fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    relation: str
    rhs: Fraction
    name: str = ""


class RationalLP:
    """Sparse LP ``opt c.x  s.t.  rows (<=, ==, >=) rhs,  lower <= x <= upper``.

    Without an objective the program is a pure feasibility problem.
    Variables default to ``x >= 0``; ``None`` bounds are infinite.
    """

    def __init__(self, sense: str = "max"):
        if sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        self.sense = sense
        self.variables: list[str] = []
        self.lower: list[Fraction | None] = []
        self.upper: list[Fraction | None] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, Fraction] | None = None

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_rows(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str = "", lower=0, upper=None) -> int:
        self.variables.append(name or f"x{len(self.variables)}")
        self.lower.append(None if lower is None else to_fraction(lower))
        self.upper.append(None if upper is None else to_fraction(upper))
        return len(self.variables) - 1

    def add_constraint(self, coeffs: Mapping[int, object], relation: str, rhs, name: str = "") -> int:
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        row = {}
        for j, a in coeffs.items():
            if not 0 <= j < self.num_vars:
                raise ValueError(f"row {name!r} references unknown variable {j}")
            a = to_fraction(a)
            if a:
                row[int(j)] = a
        self.constraints.append(Constraint(row, relation, to_fraction(rhs), name))
        return len(self.constraints) - 1

    def set_objective(self, coeffs: Mapping[int, object], sense: str | None = None) -> None:
        if sense is not None:
            if sense not in ("max", "min"):
                raise ValueError("sense must be 'max' or 'min'")
            self.sense = sense
        self.objective = {int(j): to_fraction(a) for j, a in coeffs.items() if a}

    def objective_value(self, x: Sequence) -> Fraction:
        if not self.objective:
            return Fraction(0)
        return sum((a * to_fraction(x[j]) for j, a in self.objective.items()), Fraction(0))

    def scaled(self, factors: Sequence) -> "RationalLP":
        """Copy with row i multiplied by ``factors[i]`` (> 0)."""
        out = RationalLP(self.sense)
        out.variables = list(self.variables)
        out.lower = list(self.lower)
        out.upper = list(self.upper)
        out.objective = None if self.objective is None else dict(self.objective)
        for con, f in zip(self.constraints, factors):
            f = to_fraction(f)
            if f <= 0:
                raise ValueError("scaling factors must be positive")
            out.constraints.append(
                Constraint({j: a * f for j, a in con.coeffs.items()}, con.relation, con.rhs * f, con.name)
            )
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "sense": self.sense,
            "variables": [
                {
                    "name": n,
                    "lower": None if lo is None else fraction_str(lo),
                    "upper": None if up is None else fraction_str(up),
                }
                for n, lo, up in zip(self.variables, self.lower, self.upper)
            ],
            "objective": None
            if self.objective is None
            else [[j, fraction_str(a)] for j, a in sorted(self.objective.items())],
            "rows": [
                {
                    "name": c.name,
                    "coeffs": [[j, fraction_str(a)] for j, a in sorted(c.coeffs.items())],
                    "relation": c.relation,
                    "rhs": fraction_str(c.rhs),
                }
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalLP":
        lp = cls(data.get("sense", "max"))
        for v in data["variables"]:
            lp.add_variable(
                v.get("name", ""),
                None if v.get("lower", "0") is None else Fraction(v.get("lower", "0")),
                None if v.get("upper") is None else Fraction(v["upper"]),
            )
        for r in data["rows"]:
            lp.add_constraint({int(j): Fraction(a) for j, a in r["coeffs"]}, r["relation"], Fraction(r["rhs"]), r.get("name", ""))
        if data.get("objective") is not None:
            lp.set_objective({int(j): Fraction(a) for j, a in data["objective"]})
        return lp

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass
class LPOutcome:
    status: str  # feasible | infeasible | optimal | unbounded | undecided
    primal: list[Fraction] | None = None
    dual: list[Fraction] | None = None
    ray: list[Fraction] | None = None
    objective: Fraction | None = None
    pivots: int = 0
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        enc = lambda vs: None if vs is None else [fraction_str(v) for v in vs]  # noqa: E731
        return {
            "status": self.status,
            "objective": None if self.objective is None else fraction_str(self.objective),
            "primal": enc(self.primal),
            "dual": enc(self.dual),
            "ray": enc(self.ray),
            "pivots": self.pivots,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "LPOutcome":
        dec = lambda vs: None if vs is None else [Fraction(v) for v in vs]  # noqa: E731
        return cls(
            data["status"],
            dec(data.get("primal")),
            dec(data.get("dual")),
            dec(data.get("ray")),
            None if data.get("objective") is None else Fraction(data["objective"]),
            int(data.get("pivots", 0)),
        )


class ResourceCapExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# revised simplex
# ---------------------------------------------------------------------------

ColumnOracle = Callable[[list, int], Iterable[tuple[dict, object]]]


class _Simplex:
    """Standard-form engine: max c.s, A s = b (b >= 0), s >= 0.

    Columns are sparse dicts {row: mpq}.  Basic columns index ``basis``.
    """

    def __init__(self, m: int, b: list, max_pivots: int, degenerate_switch: int = 5000):
        self.m = m
        self.b = b
        self.cols: list[dict] = []
        self.cost: list = []
        self.artificial: list[bool] = []
        self.basis: list[int] = [-1] * m
        self.Binv: list[list] = []
        self.xB: list = []
        self.pivots = 0
        self.max_pivots = max_pivots
        self.degenerate_switch = degenerate_switch

    def add_column(self, col: dict, cost=0, artificial: bool = False) -> int:
        self.cols.append(col)
        self.cost.append(Q(cost))
        self.artificial.append(artificial)
        return len(self.cols) - 1

    def start(self, basis: list[int]) -> None:
        self.basis = list(basis)
        one, zero = Q(1), Q(0)
        self.Binv = [[one if i == j else zero for j in range(self.m)] for i in range(self.m)]
        # initial basis columns are unit vectors
        for i, j in enumerate(self.basis):
            if self.cols[j].get(i) != 1 or len(self.cols[j]) != 1:
                raise AssertionError("initial basis must be an identity")
        self.xB = list(self.b)

    def duals(self, cost: list) -> list:
        y = [Q(0)] * self.m
        for i, j in enumerate(self.basis):
            cb = cost[j]
            if cb:
                row = self.Binv[i]
                for r in range(self.m):
                    if row[r]:
                        y[r] += cb * row[r]
        return y

    def reduced(self, j: int, y: list, cost: list):
        d = cost[j]
        for r, a in self.cols[j].items():
            if y[r]:
                d -= y[r] * a
        return d

    def direction(self, j: int) -> list:
        col = self.cols[j]
        u = [Q(0)] * self.m
        for r, a in col.items():
            for i in range(self.m):
                bir = self.Binv[i][r]
                if bir:
                    u[i] += bir * a
        return u

    def pivot(self, leave: int, enter: int, u: list) -> None:
        piv = u[leave]
        rowl = self.Binv[leave]
        inv = 1 / piv
        rowl = [v * inv for v in rowl]
        self.Binv[leave] = rowl
        xl = self.xB[leave] * inv
        self.xB[leave] = xl
        nz = [r for r in range(self.m) if rowl[r]]
        for i in range(self.m):
            if i != leave and u[i]:
                f = u[i]
                row = self.Binv[i]
                for r in nz:
                    row[r] -= f * rowl[r]
                self.xB[i] -= f * xl
        self.basis[leave] = enter
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise ResourceCapExceeded(f"pivot cap {self.max_pivots} exceeded")

    def run(self, cost: list, forbid_artificial: bool = False):
        """Iterate to optimality.  Returns ('optimal', None) or ('unbounded', j).

        Entering column: largest reduced cost (smallest index on ties).
        Leaving row: lexicographic minimum of (x_B, B^-1 row) / u, which keeps
        every row lexicographically positive and so cannot cycle.  If a very
        long degenerate streak still occurs (possible after artificials were
        pivoted out), fall back to Bland's smallest-index rule until the
        objective moves.
        """
        degenerate = 0
        while True:
            y = self.duals(cost)
            inbasis = set(self.basis)
            bland = degenerate >= self.degenerate_switch
            enter, best = -1, Q(0)
            for j in range(len(self.cols)):
                if j in inbasis or (forbid_artificial and self.artificial[j]):
                    continue
                d = self.reduced(j, y, cost)
                if d > 0:
                    if bland:
                        enter = j
                        break
                    if d > best:
                        enter, best = j, d
            if enter < 0:
                return "optimal", None
            u = self.direction(enter)
            leave = -1
            if forbid_artificial:
                # zero-level artificials left in the basis must leave first
                for i, j in enumerate(self.basis):
                    if self.artificial[j] and u[i] and (leave < 0 or j < self.basis[leave]):
                        leave = i
            if leave < 0:
                ties: list[int] = []
                ratio = None
                for i in range(self.m):
                    if u[i] > 0:
                        t = self.xB[i] / u[i]
                        if ratio is None or t < ratio:
                            ratio, ties = t, [i]
                        elif t == ratio:
                            ties.append(i)
                if not ties:
                    return "unbounded", enter
                leave = self._break_tie(ties, u, bland)
                degenerate = degenerate + 1 if ratio == 0 else 0
            else:
                degenerate += 1
            self.pivot(leave, enter, u)

    def _break_tie(self, ties: list[int], u: list, bland: bool) -> int:
        if len(ties) == 1:
            return ties[0]
        if bland:
            return min(ties, key=lambda i: self.basis[i])
        for r in range(self.m):
            best = None
            keep = []
            for i in ties:
                t = self.Binv[i][r] / u[i]
                if best is None or t < best:
                    best, keep = t, [i]
                elif t == best:
                    keep.append(i)
            ties = keep
            if len(ties) == 1:
                return ties[0]
        return min(ties, key=lambda i: self.basis[i])

    def drive_out_artificials(self) -> None:
        """Pivot zero-level artificials out of the basis where possible."""
        for i in range(self.m):
            j = self.basis[i]
            if not self.artificial[j]:
                continue
            row = self.Binv[i]
            inbasis = set(self.basis)
            for k in range(len(self.cols)):
                if k in inbasis or self.artificial[k]:
                    continue
                val = Q(0)
                for r, a in self.cols[k].items():
                    if row[r]:
                        val += row[r] * a
                if val:
                    self.pivot(i, k, self.direction(k))
                    break

    def values(self) -> list:
        s = [Q(0)] * len(self.cols)
        for i, j in enumerate(self.basis):
            s[j] = self.xB[i]
        return s


class _StandardForm:
    """Map between a :class:`RationalLP` and the engine's standard form."""

    def __init__(self, lp: RationalLP, max_pivots: int):
        self.lp = lp
        n = lp.num_vars
        self.var_cols: list[list[tuple[int, int]]] = []  # (std col, sign) per variable
        self.shift: list = []  # x_j = shift_j + sum sign * s
        rows_b: list = []
        self.row_sign: list[int] = []
        std_rows: list[dict] = []  # row -> {std col: coeff} built column-wise below
        for j in range(n):
            lo, up = lp.lower[j], lp.upper[j]
            if lo is not None and up is not None and lo > up:
                raise ValueError(f"variable {lp.variables[j]} has empty bounds")
        m_orig = lp.num_rows
        bound_rows = [j for j in range(n) if lp.lower[j] is not None and lp.upper[j] is not None]
        self.bound_row = {j: m_orig + k for k, j in enumerate(bound_rows)}
        m = m_orig + len(bound_rows)
        self.m_orig = m_orig
        rhs = [Q(c.rhs) for c in lp.constraints] + [Q(0)] * len(bound_rows)
        columns: list[dict] = []
        col_var: list[int] = []
        for j in range(n):
            lo, up = lp.lower[j], lp.upper[j]
            if lo is not None:
                self.shift.append(Q(lo))
                signs = [1]
            elif up is not None:
                self.shift.append(Q(up))
                signs = [-1]
            else:
                self.shift.append(Q(0))
                signs = [1, -1]
            entries = []
            for sg in signs:
                entries.append((len(columns), sg))
                columns.append({})
                col_var.append(j)
            self.var_cols.append(entries)
            if j in self.bound_row:
                r = self.bound_row[j]
                columns[entries[0][0]][r] = Q(1)
                rhs[r] = Q(up) - Q(lo)
        for i, con in enumerate(lp.constraints):
            for j, a in con.coeffs.items():
                aq = Q(a)
                rhs[i] -= aq * self.shift[j]
                for col, sg in self.var_cols[j]:
                    columns[col][i] = aq if sg == 1 else -aq
        # slacks
        slack_of_row: dict[int, int] = {}
        for i, con in enumerate(lp.constraints):
            if con.relation != EQ:
                slack_of_row[i] = len(columns)
                columns.append({i: Q(1) if con.relation == LE else Q(-1)})
                col_var.append(-1)
        for j, r in self.bound_row.items():
            slack_of_row[r] = len(columns)
            columns.append({r: Q(1)})
            col_var.append(-1)
        sign = [1] * m
        for i in range(m):
            if rhs[i] < 0:
                sign[i] = -1
                rhs[i] = -rhs[i]
        for col in columns:
            for r in list(col):
                if sign[r] < 0:
                    col[r] = -col[r]
        self.sign = sign
        self.col_var = col_var
        self.engine = _Simplex(m, rhs, max_pivots)
        cost_obj = [Q(0)] * len(columns)
        if lp.objective:
            flip = 1 if lp.sense == "max" else -1
            for j, a in lp.objective.items():
                for col, sg in self.var_cols[j]:
                    cost_obj[col] = Q(a) * sg * flip
        for k, col in enumerate(columns):
            self.engine.add_column(col, cost_obj[k])
        basis = []
        for i in range(m):
            sl = slack_of_row.get(i)
            if sl is not None and columns[sl][i] == 1:
                basis.append(sl)
            else:
                basis.append(self.engine.add_column({i: Q(1)}, 0, artificial=True))
        self.engine.start(basis)
        self.m = m

    def add_variable_column(self, coeffs: Mapping[int, object], cost) -> int:
        """New variable x >= 0 (column generation).  Returns its LP index."""
        lp = self.lp
        j = lp.add_variable(f"gen{lp.num_vars}")
        col = {}
        for i, a in coeffs.items():
            if a:
                col[i] = Q(a) * self.sign[i]
        flip = 1 if lp.sense == "max" else -1
        k = self.engine.add_column(col, Q(cost) * flip)
        self.col_var.append(j)
        self.shift.append(Q(0))
        self.var_cols.append([(k, 1)])
        if cost:
            if lp.objective is None:
                raise ValueError("generated column has a cost but the LP has no objective")
            lp.objective[j] = to_fraction(cost)
        for i, a in coeffs.items():
            if a:
                lp.constraints[i].coeffs[j] = to_fraction(a)
        return j

    def original_duals(self, y: list) -> list[Fraction]:
        flip = 1 if self.lp.sense == "max" else -1
        return [to_fraction(y[i] * self.sign[i] * flip) for i in range(self.m_orig)]

    def primal(self) -> list[Fraction]:
        s = self.engine.values()
        x = []
        for j in range(self.lp.num_vars):
            v = self.shift[j]
            for col, sg in self.var_cols[j]:
                v = v + sg * s[col]
            x.append(to_fraction(v))
        return x

    def ray(self, enter: int) -> list[Fraction]:
        e = self.engine
        u = e.direction(enter)
        ds = [Q(0)] * len(e.cols)
        ds[enter] = Q(1)
        for i, j in enumerate(e.basis):
            ds[j] -= u[i]
        r = []
        for j in range(self.lp.num_vars):
            v = Q(0)
            for col, sg in self.var_cols[j]:
                v += sg * ds[col]
            r.append(to_fraction(v))
        return r


def solve(lp: RationalLP, *, max_pivots: int | None = None, oracle: ColumnOracle | None = None) -> LPOutcome:
    """Solve ``lp`` exactly.

    ``oracle(v, phase)`` enables column generation: when no existing column
    improves, it is called with the current row multipliers ``v`` (original
    rows, in the sign convention of the LP's sense) and returns
    ``(coeffs, cost)`` pairs describing new variables ``x >= 0``.  The phase
    is 1 while searching for a feasible point (costs are then ignored) and
    2 afterwards.  Generated variables are appended to ``lp`` in place.
    """
    cap = DEFAULT_MAX_PIVOTS if max_pivots is None else max_pivots
    sf = _StandardForm(lp, cap)
    e = sf.engine

    def generate(cost: list, phase: int) -> bool:
        if oracle is None:
            return False
        y = e.duals(cost)
        v = [to_fraction(y[i] * sf.sign[i]) for i in range(sf.m_orig)]
        if phase == 2 and lp.sense == "min":
            v = [-a for a in v]
        before = len(e.cols)
        for coeffs, c in oracle(v, phase):
            sf.add_variable_column(coeffs, c)
        for k in range(before, len(e.cols)):
            cost.append(e.cost[k] if phase == 2 else Q(0))
        return any(e.reduced(k, y, cost) > 0 for k in range(before, len(e.cols)))

    def run(cost: list, phase: int, forbid: bool):
        while True:
            status, enter = e.run(cost, forbid_artificial=forbid)
            if status != "optimal" or not generate(cost, phase):
                return status, enter

    try:
        if any(e.artificial[j] for j in e.basis):
            cost1 = [Q(-1) if a else Q(0) for a in e.artificial]
            run(cost1, 1, False)
            infeas = sum((e.xB[i] for i, j in enumerate(e.basis) if e.artificial[j]), Q(0))
            if infeas > 0:
                y = e.duals(cost1)
                farkas = [to_fraction(y[i] * sf.sign[i]) for i in range(sf.m_orig)]
                return LPOutcome("infeasible", dual=farkas, pivots=e.pivots)
            e.drive_out_artificials()
        if lp.objective is None:
            return LPOutcome("feasible", primal=sf.primal(), pivots=e.pivots)
        cost2 = [Q(0) if e.artificial[k] else c for k, c in enumerate(e.cost)]
        status, enter = run(cost2, 2, True)
        x = sf.primal()
        if status == "unbounded":
            return LPOutcome("unbounded", primal=x, ray=sf.ray(enter),
                             objective=lp.objective_value(x), pivots=e.pivots)
        y = e.duals(cost2)
        return LPOutcome("optimal", primal=x, dual=sf.original_duals(y),
                         objective=lp.objective_value(x), pivots=e.pivots)
    except ResourceCapExceeded as exc:
        return LPOutcome("undecided", pivots=e.pivots, info={"reason": str(exc)})


# ---------------------------------------------------------------------------
# certificate verification
# ---------------------------------------------------------------------------

def _row_activity(lp: RationalLP, x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * x[j] for j, a in con.coeffs.items()), Fraction(0)) for con in lp.constraints]


def _primal_ok(lp: RationalLP, x) -> bool:
    if x is None or len(x) != lp.num_vars:
        raise ValueError("malformed primal vector")
    x = [to_fraction(v) for v in x]
    for j, v in enumerate(x):
        if lp.lower[j] is not None and v < lp.lower[j]:
            return False
        if lp.upper[j] is not None and v > lp.upper[j]:
            return False
    for con, act in zip(lp.constraints, _row_activity(lp, x)):
        if con.relation == EQ and act != con.rhs:
            return False
        if con.relation == LE and act > con.rhs:
            return False
        if con.relation == GE and act < con.rhs:
            return False
    return True


def _signs_ok(lp: RationalLP, v, flip: int) -> bool:
    for con, vi in zip(lp.constraints, v):
        s = vi * flip
        if con.relation == LE and s < 0:
            return False
        if con.relation == GE and s > 0:
            return False
    return True


def _transpose_product(lp: RationalLP, v) -> list[Fraction]:
    d = [Fraction(0)] * lp.num_vars
    for con, vi in zip(lp.constraints, v):
        if vi:
            for j, a in con.coeffs.items():
                d[j] += a * vi
    return d


def _box_extreme(lp: RationalLP, d: Sequence[Fraction], maximize: bool) -> Fraction | None:
    """max (or min) of d.x over the variable box; None if infinite."""
    total = Fraction(0)
    for j, dj in enumerate(d):
        if not dj:
            continue
        lo, up = lp.lower[j], lp.upper[j]
        want_up = (dj > 0) == maximize
        bound = up if want_up else lo
        if bound is None:
            return None
        total += dj * bound
    return total


def verify_certificate(lp: RationalLP, out: LPOutcome) -> bool:
    """Independent exact re-check of an outcome's certificate."""
    if out.status == "undecided":
        return False
    if out.status == "feasible":
        return _primal_ok(lp, out.primal)
    if out.status == "infeasible":
        v = out.dual
        if v is None or len(v) != lp.num_rows:
            raise ValueError("malformed Farkas certificate")
        v = [to_fraction(a) for a in v]
        if not _signs_ok(lp, v, 1):
            return False
        low = _box_extreme(lp, _transpose_product(lp, v), maximize=False)
        rhs = sum((vi * con.rhs for vi, con in zip(v, lp.constraints)), Fraction(0))
        return low is not None and low > rhs
    if out.status == "optimal":
        if lp.objective is None:
            raise ValueError("optimality certificate for a feasibility LP")
        if not _primal_ok(lp, out.primal):
            return False
        v = out.dual
        if v is None or len(v) != lp.num_rows:
            raise ValueError("malformed dual certificate")
        v = [to_fraction(a) for a in v]
        flip = 1 if lp.sense == "max" else -1
        if not _signs_ok(lp, v, flip):
            return False
        at = _transpose_product(lp, v)
        c = [Fraction(0)] * lp.num_vars
        for j, a in (lp.objective or {}).items():
            c[j] = a
        red = [cj - aj for cj, aj in zip(c, at)]
        ext = _box_extreme(lp, red, maximize=(lp.sense == "max"))
        if ext is None:
            return False
        bound = sum((vi * con.rhs for vi, con in zip(v, lp.constraints)), Fraction(0)) + ext
        return lp.objective_value([to_fraction(a) for a in out.primal]) == bound
    if out.status == "unbounded":
        if not _primal_ok(lp, out.primal):
            return False
        r = out.ray
        if r is None or len(r) != lp.num_vars:
            raise ValueError("malformed ray")
        r = [to_fraction(a) for a in r]
        for j, rj in enumerate(r):
            if rj > 0 and lp.upper[j] is not None:
                return False
            if rj < 0 and lp.lower[j] is not None:
                return False
        for con, act in zip(lp.constraints, _row_activity(lp, r)):
            if con.relation == EQ and act != 0:
                return False
            if con.relation == LE and act > 0:
                return False
            if con.relation == GE and act < 0:
                return False
        gain = lp.objective_value(r)
        return gain > 0 if lp.sense == "max" else gain < 0
    raise ValueError(f"unknown status {out.status!r}")
