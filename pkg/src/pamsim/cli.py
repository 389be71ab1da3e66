"""Command-line entry point.

Reports are JSON on stdout (or ``--out``); human-readable tables go to
stderr.  Exit codes: 0 success, 1 resource cap hit (undecided), 2 usage or
configuration error, 3 reproduction mismatch against the golden files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .families import FAMILY_NAMES, named_family
from .graphs import (
    OrthogonalityGraph,
    build_orthogonality_graph,
    chromatic_number,
    chromatic_polynomial,
    chromatic_polynomial_value,
    hadamard_graph,
    hadamard_lower_bound,
    independence_number,
)
from .lp import fraction_str, solve, verify_certificate
from .quantum import Behavior, QuantumState
from .strategies import CapExceeded

EXIT_OK, EXIT_UNDECIDED, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _content_hash(config: dict, files: list[str]) -> str:
    h = hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode())
    for path in files:
        with open(path, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def _load_json(path: str):
    if not os.path.exists(path):
        raise UsageError(f"file not found: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _positive_int(text: str) -> int:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc
    if v < 1 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return int(v)


def _d_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad d_C range {text!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("d_C values must be positive")
    return values


def _table(rows: list[list], header: list[str]) -> None:
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    line = "  ".join(str(h).ljust(w) for h, w in zip(header, widths))
    print(line, file=sys.stderr)
    print("-" * len(line), file=sys.stderr)
    for r in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)), file=sys.stderr)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    from .protocol import cost_curve, run_simulation

    config = {"rounds": args.rounds, "seed": args.seed, "states": None, "measurements": [[0, 0, 1]]}
    files = []
    if args.config:
        files.append(args.config)
        data = _load_json(args.config)
        if not isinstance(data, dict):
            raise UsageError("run config must be a JSON object")
        config.update({k: data[k] for k in ("rounds", "seed", "states", "measurements") if k in data})
    if args.states:
        files.append(args.states)
        config["states"] = _load_json(args.states)
    if args.measurements:
        files.append(args.measurements)
        config["measurements"] = _load_json(args.measurements)
    if args.curve:
        rows = cost_curve(args.curve_points)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
        return EXIT_OK
    try:
        rounds = int(float(config["rounds"]))
        seed = int(config["seed"])
        states = config["states"]
        meas = config["measurements"]
        if states is not None:
            states = [np.asarray(s, dtype=float) for s in states]
        meas = [np.asarray(m, dtype=float) for m in meas]
        if rounds < 1:
            raise ValueError("rounds must be positive")
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad run configuration: {exc}") from exc
    try:
        result = run_simulation(states, meas, rounds, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {
        "command": "simulate",
        "config": config,
        "input_hash": _content_hash(config, files),
        "cost": result.cost.to_json(),
        "correlators": result.correlators.tolist(),
        "correlator_errors": result.correlator_errors.tolist(),
        "behavior": result.behavior.to_json(),
        "version": __version__,
    }
    c = result.cost
    _table(
        [[f"{c.average_bits:.6f}", f"{c.standard_error:.2e}", f"{c.worst_case_bits:.3f}", c.worst_case_bits_rounded, c.rounds]],
        ["average bits", "std err", "worst (trit=log2 3)", "worst (trit=2)", "rounds"],
    )
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def cmd_bounds(args) -> int:
    from .witness import Witness, bound_table, named_witness

    files = []
    scenario = None
    if args.witness:
        files.append(args.witness)
        try:
            w = Witness.from_json(_load_json(args.witness))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.family:
            scenario = named_family(args.family)
    elif args.named:
        try:
            w, scenario = named_witness(args.named)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("give --witness FILE or --named NAME")
    config = {"witness": args.witness or args.named, "dc": args.dc, "family": args.family}
    try:
        table = bound_table(w, args.dc, scenario, cap=args.cap)
    except CapExceeded as exc:
        _emit({"command": "bounds", "config": config, "status": "undecided", "reason": str(exc)}, args.out)
        return EXIT_UNDECIDED
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {"command": "bounds", "config": config, "input_hash": _content_hash(config, files), **table.to_json()}
    if math.isnan(table.quantum):
        report["quantum_value"] = None
    _table([[d, fraction_str(v), f"{table.ratios.get(d, float('nan')):.4f}"] for d, v in sorted(table.bounds.items())],
           ["d_C", "classical bound", "Q/C - 1"])
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# lp
# ---------------------------------------------------------------------------

def _scenario_behavior(args):
    if args.behavior:
        try:
            return Behavior.from_json(_load_json(args.behavior)), None, [args.behavior]
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad behavior file: {exc}") from exc
    if not args.family:
        raise UsageError("give --family NAME or --behavior FILE")
    try:
        sc = named_family(args.family, X=args.X, Y=args.Y)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if sc.exact is not None and sc.exact.states:
        beh = sc.exact.behavior()
    else:
        from .quantum import born_behavior

        beh = born_behavior(sc).as_fractions()
    return beh, sc, []


def _parse_dc(text: str, X: int) -> int:
    if text in ("X", "x"):
        return X
    try:
        d = int(text)
    except ValueError as exc:
        raise UsageError(f"bad --dc value {text!r}") from exc
    if d < 1:
        raise UsageError("--dc must be positive")
    return d


def cmd_lp(args) -> int:
    from . import simulability as S

    config = {k: getattr(args, k) for k in ("mode", "family", "behavior", "dc", "prune", "kmax", "X", "Y", "max_pivots")}
    files: list[str] = []
    cert = None
    if args.mode == "discrimination":
        if not args.family:
            raise UsageError("discrimination mode needs --family")
        try:
            sc = named_family(args.family, X=args.X, Y=args.Y)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        d = _parse_dc(args.dc, len(sc.states))
        problem = S.discrimination_problem(sc, d)
        lp = S.build_discrimination_lp(problem)
        out = solve(lp, max_pivots=args.max_pivots)
        verified = verify_certificate(lp, out) if out.status != "undecided" else False
        report = {"d_C": d, "mode": "discrimination", "status": out.status, "eta": None,
                  "strategy_count": lp.num_vars, "verified": verified, "exact_distances": problem.exact}
        cert = {"lp": lp.to_json(), "outcome": out.to_json()}
    else:
        try:
            if args.mode == "section-limited":
                if args.X is None or args.Y is None or args.kmax is None:
                    raise UsageError("section-limited mode needs --X, --Y and --kmax")
                d = _parse_dc(args.dc, args.X)
                problem = S.real_qubit_section_problem(args.X, args.Y, d, args.kmax, cap=args.cap)
            else:
                beh, sc, files = _scenario_behavior(args)
                d = _parse_dc(args.dc, beh.X)
                problem = S.make_problem(beh, d, args.mode, cap=args.cap)
                if args.prune:
                    problem = S.prune_strategies(problem, S.exclusion_graph(problem.behavior))
                    if args.mode == "robustness":
                        print("pamsim lp: note: with --prune the robustness optimum is a lower bound on eta*",
                              file=sys.stderr)
        except CapExceeded as exc:
            _emit({"command": "lp", "config": config, "status": "undecided", "reason": str(exc)}, args.out)
            return EXIT_UNDECIDED
        verdict = S.solve_problem(problem, max_pivots=args.max_pivots)
        report = verdict.to_json()
        if verdict.outcome is not None:
            cert = {"outcome": verdict.outcome.to_json()}
    report["command"] = "lp"
    report["config"] = config
    report["input_hash"] = _content_hash(config, files)
    if args.certificate and cert is not None:
        with open(args.certificate, "w") as fh:
            json.dump(cert, fh)
        report["certificate_file"] = args.certificate
    _table([[report["mode"], report["d_C"], report["status"], report.get("eta"), report["strategy_count"], report.get("verified")]],
           ["mode", "d_C", "status", "eta", "strategies", "verified"])
    _emit(report, args.out)
    return EXIT_UNDECIDED if report["status"] == "undecided" else EXIT_OK


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------

def cmd_graph(args) -> int:
    report: dict = {"command": "graph", "config": {"family": args.family, "states": args.states,
                                                   "chromatic_poly": args.chromatic_poly, "hadamard": args.hadamard}}
    files = []
    g = None
    if args.family:
        try:
            sc = named_family(args.family, X=args.X, Y=args.Y)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        g = build_orthogonality_graph(sc.states, sc.exact)
    elif args.states:
        files.append(args.states)
        data = _load_json(args.states)
        try:
            states = [QuantumState.from_vector(np.array([complex(*c) if isinstance(c, list) else complex(c) for c in v]))
                      for v in data]
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad states file: {exc}") from exc
        g = build_orthogonality_graph(states)
    if g is not None:
        chi = chromatic_number(g)
        report["graph"] = {"vertices": g.n, "edges": [list(e) for e in g.sorted_edges()], "edge_count": len(g.edges),
                           "chromatic_number": chi}
        if args.chromatic_poly:
            coeffs = chromatic_polynomial(g)
            report["graph"]["chromatic_polynomial"] = list(coeffs)
            report["graph"]["chromatic_polynomial_values"] = {
                str(k): chromatic_polynomial_value(g, k) for k in args.chromatic_poly}
        _table([[g.n, len(g.edges), chi]], ["vertices", "edges", "chi"])
    if args.hadamard is not None:
        try:
            hb = hadamard_lower_bound(args.hadamard)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        report["hadamard"] = hb.to_json()
        if args.hadamard <= 4:
            report["hadamard"]["alpha_bruteforce"] = independence_number(hadamard_graph(args.hadamard))
        _table([[hb.d_Q, hb.k, hb.alpha, fraction_str(hb.bound), f"{float(hb.weak_bound):.4f}"]],
               ["d_Q", "k", "alpha", "bound", "(27/16)^k"])
    if g is None and args.hadamard is None:
        raise UsageError("give --family, --states or --hadamard")
    report["input_hash"] = _content_hash(report["config"], files)
    _emit(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# repro
# ---------------------------------------------------------------------------

def repro_results(quick: bool = False) -> dict:
    """Recompute the reference tables (exact values as strings)."""
    from . import simulability as S
    from .protocol import average_cost_closed_form, average_cost_quadrature, entropy_floor
    from .witness import bound_table, named_witness

    out: dict = {}
    cf = average_cost_closed_form()
    out["average_cost"] = {"closed_form": round(cf.value, 12), "quadrature": round(average_cost_quadrature(), 12),
                           "entropy_floor": round(entropy_floor(), 12)}
    ranges = {"W_6,5,2": range(2, 7), "W_6,10,2": range(2, 7), "W_10,4,2": range(2, 11), "W_9,4,3": range(2, 6)}
    out["witness_bounds"] = {}
    for name, ds in ranges.items():
        w, sc = named_witness(name)
        tb = bound_table(w, list(ds), sc)
        out["witness_bounds"][name] = {"bounds": [fraction_str(v) for v in tb.chain()],
                                       "quantum_value": round(tb.quantum, 9)}
    disc = {}
    sc = named_family("mub3-pair")
    for d in (4, 6):
        lp = S.build_discrimination_lp(S.discrimination_problem(sc, d))
        o = solve(lp)
        disc[str(d)] = {"status": o.status, "verified": verify_certificate(lp, o)}
    out["discrimination_mub3_pair"] = disc
    g = build_orthogonality_graph(named_family("yu-oh-13").states, named_family("yu-oh-13").exact)
    out["graphs"] = {
        "yu_oh_13_chromatic_number": chromatic_number(g),
        "complete_graph_chromatic_numbers": [chromatic_number(OrthogonalityGraph.complete(d)) for d in range(1, 7)],
        "hadamard": [hadamard_lower_bound(4 * k).to_json() for k in (1, 2, 3)],
    }
    if not quick:
        # unpruned: pruning gives only a lower bound on eta* below 1
        beh = named_family("yu-oh-10x4").exact.behavior()
        v = S.solve_problem(S.make_problem(beh, 4, "robustness"))
        out["yu_oh_robustness_dc4"] = {"status": v.status, "eta": fraction_str(v.eta) if v.eta is not None else None,
                                       "verified": v.verified, "strategy_count": v.strategy_count}
    return out


def _diff(golden, current, path="") -> list[str]:
    if isinstance(golden, dict) and isinstance(current, dict):
        diffs = []
        for k in sorted(set(golden) | set(current)):
            if k not in current:
                diffs.append(f"{path}/{k}: missing")
            elif k not in golden:
                continue
            else:
                diffs.extend(_diff(golden[k], current[k], f"{path}/{k}"))
        return diffs
    if isinstance(golden, float) and isinstance(current, (int, float)):
        return [] if abs(golden - current) <= 1e-9 else [f"{path}: {golden} != {current}"]
    if golden != current:
        return [f"{path}: {golden} != {current}"]
    return []


def cmd_repro(args) -> int:
    current = repro_results(quick=args.quick)
    if args.golden:
        golden = _load_json(args.golden)
    else:
        golden = json.loads(resources.files("pamsim").joinpath("golden/repro.json").read_text())
    if args.quick:
        golden = {k: v for k, v in golden.items() if k != "yu_oh_robustness_dc4"}
    if args.update:
        with open(args.update, "w") as fh:
            json.dump(current, fh, indent=2, sort_keys=True)
            fh.write("\n")
    diffs = _diff(golden, current)
    report = {"command": "repro", "quick": args.quick, "results": current, "differences": diffs, "match": not diffs}
    for d in diffs:
        print("MISMATCH", d, file=sys.stderr)
    print("repro:", "all tables match" if not diffs else f"{len(diffs)} differences", file=sys.stderr)
    _emit(report, args.out)
    return EXIT_OK if not diffs else EXIT_MISMATCH


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pamsim", description="Classical simulation costs of prepare-and-measure correlations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo run of the variable-length qubit protocol")
    s.add_argument("--rounds", type=_positive_int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--config", help="run config JSON {rounds, seed, states, measurements}")
    s.add_argument("--states", help="JSON list of Bloch vectors (default: uniform random per round)")
    s.add_argument("--measurements", help="JSON list of measurement Bloch vectors")
    s.add_argument("--curve", action="store_true", help="emit the per-angle cost curves as CSV")
    s.add_argument("--curve-points", type=_positive_int, default=181)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bounds", help="exact classical bounds of a witness")
    b.add_argument("--witness", help="witness JSON file")
    b.add_argument("--named", help="named witness, e.g. W_10,4,2")
    b.add_argument("--family", help="scenario for the quantum value of a --witness file")
    b.add_argument("--dc", type=_d_range, default=[2], help="d_C values: '2..10' or '2,3'")
    b.add_argument("--cap", type=int, default=None)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    lp = sub.add_parser("lp", help="feasibility, robustness, discrimination or section-limited LP")
    lp.add_argument("--mode", choices=("feasibility", "robustness", "discrimination", "section-limited"), required=True)
    lp.add_argument("--family", help=f"one of {', '.join(FAMILY_NAMES)}")
    lp.add_argument("--behavior", help="behavior JSON file")
    lp.add_argument("--dc", required=True, help="alphabet size, or X for the number of preparations")
    lp.add_argument("--prune", action="store_true", help="drop encodings that merge perfectly separated inputs")
    lp.add_argument("--kmax", type=int)
    lp.add_argument("--X", type=int)
    lp.add_argument("--Y", type=int)
    lp.add_argument("--max-pivots", type=int, default=None)
    lp.add_argument("--cap", type=int, default=None)
    lp.add_argument("--certificate", help="write the certificate JSON here")
    lp.add_argument("--out")
    lp.set_defaults(func=cmd_lp)

    g = sub.add_parser("graph", help="orthogonality graph, chromatic data and Hadamard bounds")
    g.add_argument("--family")
    g.add_argument("--states", help="JSON list of state vectors (entries real or [re, im])")
    g.add_argument("--X", type=int)
    g.add_argument("--Y", type=int)
    g.add_argument("--chromatic-poly", type=int, action="append", metavar="K")
    g.add_argument("--hadamard", type=int, metavar="D_Q")
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph)

    r = sub.add_parser("repro", help="recompute the reference tables and diff against golden files")
    r.add_argument("--quick", action="store_true", help="skip the Yu-Oh robustness LP")
    r.add_argument("--golden", help="golden JSON (default: the packaged one)")
    r.add_argument("--update", metavar="FILE", help="also write the current results here")
    r.add_argument("--out")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pamsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"pamsim {args.command}: undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
