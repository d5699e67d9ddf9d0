"""Command-line entry point.

Subcommands: solve (optimize an instance, write the front-1 archive),
evaluate (analytical criteria of a stored solution), replicate (Monte Carlo
validation of a stored solution), report (batch solve over a directory with
optional reference columns). All file outputs are JSON or CSV with a fixed
field order and 6-significant-digit numbers, so identical inputs and seed
produce byte-identical files.

Exit codes: 0 ok, 2 I/O or input validation, 3 schema mismatch, 4 capability.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from .encoding import Solution, SplitError, solution_from_boundaries
from .instance import Instance, InstanceError, TaskGraph, build_task_graph, load_instance
from .moga import GAParams, nsga2_run
from .replication import ReplicationConfig, quality_gaps, replicate, square_plot_data
from .stochastic import DemandModel, Penalties, TooManyTripsError, evaluate_solution

SOLUTION_FORMAT = "scarp-solution/1"
FRONT_FORMAT = "scarp-front/1"
EVAL_FORMAT = "scarp-eval/1"
REPLICATION_FORMAT = "scarp-replication/1"
REPORT_FORMAT = "scarp-report/1"


class SchemaError(ValueError):
    """Input file does not match the expected schema."""


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def round6(value):
    """Clamp floats to 6 significant decimals, recursively."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, dict):
        return {k: round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round6(v) for v in value]
    return value


def dumps(obj) -> str:
    return json.dumps(round6(obj), indent=2) + "\n"


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in round6(list(row))])
    return buf.getvalue()


def solution_to_dict(sol: Solution, graph: TaskGraph, split_capacity: float | None = None) -> dict:
    trips = []
    for trip in sol.trips:
        trips.append(
            {
                "tasks": [
                    {"from": int(graph.tail[a]), "to": int(graph.head[a])} for a in trip.tasks
                ]
            }
        )
    out = {
        "format": SOLUTION_FORMAT,
        "instance": graph.instance.name,
        "capacity": graph.instance.capacity,
        "trips": trips,
        "h": sol.h,
        "m": sol.m,
        "t": sol.t,
    }
    if split_capacity is not None and split_capacity != graph.instance.capacity:
        out["split_capacity"] = split_capacity
    return out


def solution_from_dict(data, graph: TaskGraph) -> Solution:
    if not isinstance(data, dict) or data.get("format") != SOLUTION_FORMAT:
        raise SchemaError(f"not a {SOLUTION_FORMAT} document")
    trips = data.get("trips")
    if not isinstance(trips, list) or not trips:
        raise SchemaError("solution has no trips")
    by_endpoints: dict[tuple[int, int], list[int]] = {}
    for i, e in enumerate(graph.instance.required_edges):
        by_endpoints.setdefault((e.u, e.v), []).append(i)
    seq: list[int] = []
    bounds = [0]
    for trip in trips:
        tasks = trip.get("tasks") if isinstance(trip, dict) else None
        if not isinstance(tasks, list) or not tasks:
            raise SchemaError("trip without tasks")
        for task in tasks:
            try:
                u, v = int(task["from"]), int(task["to"])
            except (KeyError, TypeError, ValueError):
                raise SchemaError(f"malformed task descriptor {task!r}") from None
            if by_endpoints.get((u, v)):
                seq.append(2 * by_endpoints[(u, v)].pop() + 1)
            elif by_endpoints.get((v, u)):
                seq.append(2 * by_endpoints[(v, u)].pop() + 2)
            else:
                raise SchemaError(f"task ({u},{v}) is not an unserviced required edge")
        bounds.append(len(seq))
    if any(ids for ids in by_endpoints.values()):
        raise SchemaError("solution does not service every required edge")
    return solution_from_boundaries(np.array(seq, dtype=np.int32), bounds, graph)


def eval_to_dict(ev) -> dict:
    return {
        "h_bar": ev.h_bar,
        "sigma_h": ev.sigma_h,
        "m_bar": ev.m_bar,
        "sigma_m": ev.sigma_m,
        "t_bar": ev.t_bar,
        "sigma_t": ev.sigma_t,
        "f1": ev.f1,
        "f2": ev.f2,
        "method": ev.method,
    }


def report_to_dict(rep, instance_name: str) -> dict:
    return {
        "format": REPLICATION_FORMAT,
        "instance": instance_name,
        "h_bar": rep.h_bar,
        "sigma_h": rep.sigma_h,
        "m_bar": rep.m_bar,
        "sigma_m": rep.sigma_m,
        "h_hat": rep.h_hat,
        "sigma_h_hat": rep.sigma_h_hat,
        "m_hat": rep.m_hat,
        "sigma_m_hat": rep.sigma_m_hat,
        "gaps": {
            "e_h": rep.gaps["e_h"],
            "e_m": rep.gaps["e_m"],
            "e_sh": rep.gaps["e_sh"],
            "e_sm": rep.gaps["e_sm"],
        },
        "t_bar": rep.t_bar,
        "sigma_t": rep.sigma_t,
        "t_hat": rep.t_hat,
        "sigma_t_hat": rep.sigma_t_hat,
        "n": rep.n,
        "seed": rep.seed,
        "method": rep.method,
        "trip_overflow_freq": list(rep.trip_overflow_freq),
        "h2_violation_rates": list(rep.h2_violation_rates),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _ga_params(args) -> GAParams:
    return GAParams(
        ns=args.pop,
        iterations=args.iters,
        ls_period=args.ls_period,
        seed=args.seed,
    )


def _check_override(args, inst: Instance) -> float | None:
    q = args.capacity_override
    if q is None:
        return None
    if q > inst.capacity:
        raise InstanceError(
            f"capacity override {q} exceeds the instance capacity {inst.capacity}"
        )
    return q


def _solve_archive(inst: Instance, args) -> dict:
    model = DemandModel(k=args.k)
    pen = Penalties(rho=args.rho, mu=args.mu)
    params = _ga_params(args)
    override = _check_override(args, inst)
    result = nsga2_run(inst, model, pen, params, split_capacity=override)
    graph = result.graph
    rows = []
    for ind in result.front:
        ev = evaluate_solution(
            ind.sol, graph, model, pen, method="auto", exact_threshold=params.exact_threshold
        )
        row = eval_to_dict(ev)
        row["h"] = ind.sol.h
        row["m"] = ind.sol.m
        row["t"] = ind.sol.t
        row["solution"] = solution_to_dict(ind.sol, graph, override)
        rows.append(row)
    return {
        "format": FRONT_FORMAT,
        "instance": inst.name,
        "seed": params.seed,
        "params": {
            "pop": params.ns,
            "iters": params.iterations,
            "ls_period": params.ls_period,
            "k": model.k,
            "rho": pen.rho,
            "mu": pen.mu,
            "capacity_override": override,
        },
        "front": rows,
        "leftmost": result.front.index(result.leftmost),
        "rightmost": result.front.index(result.rightmost),
        "squares": square_plot_data(result.front),
    }


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    start = time.perf_counter()
    archive = _solve_archive(inst, args)
    elapsed = time.perf_counter() - start
    if args.format == "json":
        _write_text(args.out, dumps(archive))
    else:
        header = ["index", "h_bar", "m_bar", "sigma_h", "sigma_m", "f1", "f2", "h", "m", "t"]
        rows = [
            [i, r["h_bar"], r["m_bar"], r["sigma_h"], r["sigma_m"], r["f1"], r["f2"], r["h"], r["m"], r["t"]]
            for i, r in enumerate(archive["front"])
        ]
        _write_text(args.out, _csv_text(header, rows))
    left = archive["front"][archive["leftmost"]]
    right = archive["front"][archive["rightmost"]]
    print(
        f"{inst.name}: front size {len(archive['front'])}, "
        f"leftmost (h_bar, m_bar) = ({left['h_bar']:.1f}, {left['m_bar']:.1f}), "
        f"rightmost = ({right['h_bar']:.1f}, {right['m_bar']:.1f}), "
        f"wall time {elapsed:.1f} s",
        file=sys.stderr,
    )
    return 0


def _load_solution(args, inst: Instance) -> tuple[Solution, TaskGraph]:
    graph = build_task_graph(inst)
    try:
        data = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"solution file is not JSON: {exc}") from None
    return solution_from_dict(data, graph), graph


def cmd_evaluate(args) -> int:
    inst = load_instance(args.instance)
    sol, graph = _load_solution(args, inst)
    model = DemandModel(k=args.k)
    pen = Penalties(rho=args.rho, mu=args.mu)
    method = "exact" if args.exact else "truncated"
    ev = evaluate_solution(sol, graph, model, pen, method=method)
    out = {"format": EVAL_FORMAT, "instance": inst.name}
    out.update(eval_to_dict(ev))
    if args.format == "json":
        _write_text(args.out, dumps(out))
    else:
        header = ["h_bar", "m_bar", "sigma_h", "sigma_m", "t_bar", "sigma_t", "f1", "f2"]
        _write_text(args.out, _csv_text(header, [[out[k] for k in header]]))
    return 0


def cmd_replicate(args) -> int:
    inst = load_instance(args.instance)
    sol, graph = _load_solution(args, inst)
    cfg = ReplicationConfig(n=args.n, seed=args.seed, model=DemandModel(k=args.k))
    rep = replicate(sol, graph, cfg)
    out = report_to_dict(rep, inst.name)
    if args.format == "json":
        _write_text(args.out, dumps(out))
    else:
        header = [
            "h_bar", "m_bar", "sigma_h", "sigma_m",
            "h_hat", "m_hat", "sigma_h_hat", "sigma_m_hat",
            "e_h", "e_m", "e_sh", "e_sm",
        ]
        row = [
            out["h_bar"], out["m_bar"], out["sigma_h"], out["sigma_m"],
            out["h_hat"], out["m_hat"], out["sigma_h_hat"], out["sigma_m_hat"],
            out["gaps"]["e_h"], out["gaps"]["e_m"], out["gaps"]["e_sh"], out["gaps"]["e_sm"],
        ]
        _write_text(args.out, _csv_text(header, [row]))
    return 0


def _load_refs(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"references file is not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("references file must map instance names to reference values")
    return data


REPORT_COLUMNS = [
    "instance", "h1", "m1", "h2", "m2", "h_mono",
    "hbar1", "mbar1", "hbar2", "mbar2",
    "e1_h", "e1_m", "e2_h", "e2_m", "e1_mono",
]


def cmd_report(args) -> int:
    root = Path(args.instance)
    if not root.is_dir():
        raise InstanceError(f"not a directory of instances: {root}")
    paths = sorted(root.glob("*.dat"))
    if not paths:
        raise InstanceError(f"no .dat instances under {root}")
    refs_by_name = _load_refs(args.refs)
    rows = []
    for path in paths:
        inst = load_instance(path)
        start = time.perf_counter()
        archive = _solve_archive(inst, args)
        elapsed = time.perf_counter() - start
        left = archive["front"][archive["leftmost"]]
        right = archive["front"][archive["rightmost"]]
        refs = refs_by_name.get(inst.name, refs_by_name.get(path.stem, {}))
        quality = quality_gaps(
            {
                "hbar1": left["h_bar"],
                "mbar1": left["m_bar"],
                "hbar2": right["h_bar"],
                "mbar2": right["m_bar"],
            },
            refs,
        )
        row = {"instance": inst.name}
        for key in ("h1", "m1", "h2", "m2", "h_mono"):
            row[key] = refs.get(key)
        row.update(
            hbar1=left["h_bar"], mbar1=left["m_bar"], hbar2=right["h_bar"], mbar2=right["m_bar"]
        )
        for key in ("e1_h", "e1_m", "e2_h", "e2_m", "e1_mono"):
            row[key] = quality.gaps.get(key)
        rows.append(row)
        print(f"{inst.name}: wall time {elapsed:.1f} s", file=sys.stderr)
    if args.format == "json":
        _write_text(args.out, dumps({"format": REPORT_FORMAT, "rows": rows}))
    else:
        _write_text(
            args.out,
            _csv_text(REPORT_COLUMNS, [[row[k] for k in REPORT_COLUMNS] for row in rows]),
        )
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance file (or directory for report)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=float, default=0.1, help="demand coefficient of variation")
    p.add_argument("--rho", type=float, default=10.0, help="cost deviation penalty")
    p.add_argument("--mu", type=float, default=10.0, help="makespan deviation penalty")


def _add_ga(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pop", type=int, default=60, help="population size (even)")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--ls-period", type=int, default=10, help="local search every N iterations")
    p.add_argument("--capacity-override", type=float, default=None,
                   help="split with a reduced capacity (slack approach)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scarp",
        description="Bi-objective robust optimization of arc routing under stochastic demands",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimize and write the front-1 archive")
    _add_common(p)
    _add_ga(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="analytical criteria of a stored solution")
    _add_common(p)
    p.add_argument("solution", help="solution JSON produced by solve")
    p.add_argument("--exact", action="store_true", help="force exact subset enumeration")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("replicate", help="Monte Carlo validation of a stored solution")
    _add_common(p)
    p.add_argument("solution", help="solution JSON produced by solve")
    p.add_argument("--n", type=int, default=10_000, help="replication count")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("report", help="batch solve a directory, with reference columns")
    _add_common(p)
    _add_ga(p)
    p.add_argument("--refs", default=None, help="JSON file of reference values per instance")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TooManyTripsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (InstanceError, SplitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        target = getattr(exc, "filename", None)
        print(f"error: cannot access {target or exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
