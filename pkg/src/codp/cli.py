"""Command-line front end.

Subcommands: ``check`` and ``solve`` operate on diagram files; ``uav``
reproduces the drone study (front, distribution, sweep). Exit codes: 0
success, 1 diagram syntax error, 2 type/unit error, 64 usage error.
Stochastic commands require an explicit ``--seed``; there is no wall-clock
default, so every published number is reproducible. ``CODP_THREADS`` caps
worker threads; outputs are byte-identical for any setting.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import plots
from .diagram import (elaborate, evaluate, parse_diagram,
                      query_functionality, validate)
from .diagram.elaborate import Registry, desc_to_poset
from .errors import (DiagramSyntaxError, DiagramTypeError,
                     TraceDivergenceError)
from .serialization import element_to_json
from .uav import (DEFAULT_N_SAMPLES, DEFAULT_PAYLOAD_GRID, cost_distribution,
                  deterministic_front, front_to_csv, load_battery_techs,
                  payload_sweep, records_to_csv, to_json, uav_registry)

EXIT_OK = 0
EXIT_SYNTAX = 1
EXIT_TYPE = 2
EXIT_USAGE = 64

_FORMATS = ("csv", "json", "svg")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad usage; we reserve 2 for
    type errors and use 64 (EX_USAGE) instead."""

    def error(self, message: str):  # noqa: D102
        raise _UsageError(message)


def _grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"grid must look like LO:HI:STEP, got {text!r}")
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad grid range {text!r}")
    out = []
    v = lo
    while v <= hi + 1e-9:
        out.append(round(v, 9))
        v += step
    return tuple(out)


def _formats(text: str) -> tuple[str, ...]:
    parts = tuple(p for p in text.split(",") if p)
    for p in parts:
        if p not in _FORMATS:
            raise argparse.ArgumentTypeError(f"unknown format {p!r}")
    return parts


def _threads() -> int:
    raw = os.environ.get("CODP_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError(f"CODP_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise _UsageError("CODP_THREADS must be >= 1")
    return n


def _read_diagram(path_str: str):
    path = Path(path_str)
    if not path.is_file():
        raise _UsageError(f"no such file: {path_str}")
    return parse_diagram(path.read_text(encoding="utf-8"))


def _write(out_dir: str, name: str, content: str) -> Path:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    path.write_text(content, encoding="utf-8")
    print(f"wrote {path}")
    return path


# ---------------------------------------------------------------------------
# Subcommand handlers

def cmd_check(args) -> int:
    ast = _read_diagram(args.path)
    validate(ast)
    registry = Registry()
    for node in ast.nodes:
        for port in node.fun_ports + node.res_ports:
            desc_to_poset(port.desc, registry)
    print(f"ok: {len(ast.nodes)} nodes, {len(ast.edges)} edges, "
          f"{len(ast.loops)} loops, {len(ast.params)} params, "
          f"{len(ast.queries)} queries")
    return EXIT_OK


def cmd_solve(args) -> int:
    ast = _read_diagram(args.path)
    registry = uav_registry()
    elab = elaborate(ast, registry)
    if not ast.queries:
        raise _UsageError(f"{args.path} declares no queries")
    wanted = args.query or ast.queries[0].name
    query = next((q for q in ast.queries if q.name == wanted), None)
    if query is None:
        raise _UsageError(f"no query named {wanted!r} in {args.path}")
    functionality = query_functionality(elab, query)
    dp = evaluate(elab, registry)
    res_refs = elab.ext_res_refs()
    res_posets = [elab.slot_posets[f"res:{n}.{p}"] for n, p, _ in elab.ext_res]
    try:
        front = dp.query(functionality)
        feasible = bool(front)
        minimal = []
        for r in front.sorted_elements():
            values = r if len(res_refs) != 1 else (r,)
            minimal.append({ref: element_to_json(poset, v)
                            for ref, poset, v in
                            zip(res_refs, res_posets, values)})
    except TraceDivergenceError:
        feasible = False
        minimal = []
    doc = {
        "diagram": Path(args.path).name,
        "query": query.name,
        "functionality": {ref: value for ref, value in query.assignments},
        "feasible": feasible,
        "minimal_resources": minimal,
    }
    formats = args.format
    if "json" in formats:
        _write(args.out, f"solve_{query.name}.json", to_json(doc))
    if "csv" in formats:
        lines = [",".join(res_refs)]
        for row in minimal:
            lines.append(",".join(
                repr(float(row[ref])) if isinstance(row[ref], (int, float))
                else str(row[ref]) for ref in res_refs))
        _write(args.out, f"solve_{query.name}.csv", "\n".join(lines) + "\n")
    print(f"{query.name}: " + ("feasible, "
          f"{len(minimal)} minimal resource point(s)" if feasible
          else "infeasible"))
    return EXIT_OK


def cmd_uav_front(args) -> int:
    techs = _pick_techs(args.tech)
    rows = deterministic_front(args.grid, techs=techs)
    if "csv" in args.format:
        _write(args.out, "front.csv", front_to_csv(rows))
    if "json" in args.format:
        _write(args.out, "front.json", to_json(rows))
    if "svg" in args.format:
        _write(args.out, "front.svg", plots.front_svg(rows))
    return EXIT_OK


def cmd_uav_distribution(args) -> int:
    _require_single_tech(args.tech)
    records, summary = cost_distribution(
        args.tech[0], args.payload, args.n, args.seed,
        uncertain=not args.deterministic, threads=_threads())
    if "csv" in args.format:
        _write(args.out, "distribution.csv", records_to_csv(records))
    if "json" in args.format:
        _write(args.out, "distribution_summary.json", to_json(summary))
    if "svg" in args.format:
        costs = [r.min_cost_usd for r in records if r.feasible]
        _write(args.out, "distribution.svg", plots.histogram_svg(costs))
    return EXIT_OK


def cmd_uav_sweep(args) -> int:
    techs = [t.name for t in _pick_techs(args.tech)]
    records, summaries = payload_sweep(
        techs, args.grid, args.n, args.seed,
        uncertain=not args.deterministic, threads=_threads())
    if "csv" in args.format:
        _write(args.out, "sweep.csv", records_to_csv(records))
    if "json" in args.format:
        _write(args.out, "sweep_summary.json", to_json(summaries))
    if "svg" in args.format:
        for tech in sorted(set(techs)):
            cells = [s for s in summaries if s["tech"] == tech]
            _write(args.out, f"sweep_{tech}.svg",
                   plots.quantile_band_svg(cells))
    return EXIT_OK


def _pick_techs(names: Sequence[str] | None):
    all_techs = load_battery_techs()
    if not names:
        return all_techs
    by_name = {t.name: t for t in all_techs}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise _UsageError("unknown battery tech: " + ", ".join(missing))
    return tuple(by_name[n] for n in names)


def _require_single_tech(names: Sequence[str] | None) -> None:
    if not names or len(names) != 1:
        raise _UsageError("distribution needs exactly one --tech")
    _pick_techs(names)


# ---------------------------------------------------------------------------
# Parser assembly

def build_parser() -> _Parser:
    parser = _Parser(prog="codp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and type-check a diagram")
    p_check.add_argument("path")
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="run a fix-functionality query")
    p_solve.add_argument("path")
    p_solve.add_argument("--query", help="query name (default: first declared)")
    p_solve.add_argument("--out", default=".")
    p_solve.add_argument("--format", type=_formats, default=("json",))
    p_solve.set_defaults(func=cmd_solve)

    p_uav = sub.add_parser("uav", help="drone case study")
    uav_sub = p_uav.add_subparsers(dest="uav_command", required=True)

    p_front = uav_sub.add_parser("front", help="deterministic cost front")
    p_front.add_argument("--grid", type=_grid, default=DEFAULT_PAYLOAD_GRID)
    p_front.add_argument("--tech", action="append")
    p_front.add_argument("--out", default=".")
    p_front.add_argument("--format", type=_formats, default=_FORMATS)
    p_front.set_defaults(func=cmd_uav_front)

    p_dist = uav_sub.add_parser("distribution",
                                help="cost distribution at one cell")
    p_dist.add_argument("--tech", action="append", required=True)
    p_dist.add_argument("--payload", type=float, required=True)
    p_dist.add_argument("--n", type=int, default=DEFAULT_N_SAMPLES)
    p_dist.add_argument("--seed", type=int, required=True)
    p_dist.add_argument("--deterministic", action="store_true",
                        help="zero-variance parameters")
    p_dist.add_argument("--out", default=".")
    p_dist.add_argument("--format", type=_formats, default=_FORMATS)
    p_dist.set_defaults(func=cmd_uav_distribution)

    p_sweep = uav_sub.add_parser("sweep", help="payload grid study")
    p_sweep.add_argument("--grid", type=_grid, default=DEFAULT_PAYLOAD_GRID)
    p_sweep.add_argument("--tech", action="append")
    p_sweep.add_argument("--n", type=int, default=DEFAULT_N_SAMPLES)
    p_sweep.add_argument("--seed", type=int, required=True)
    p_sweep.add_argument("--deterministic", action="store_true")
    p_sweep.add_argument("--out", default=".")
    p_sweep.add_argument("--format", type=_formats, default=_FORMATS)
    p_sweep.set_defaults(func=cmd_uav_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DiagramSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except DiagramTypeError as exc:
        print(f"type error: {exc}", file=sys.stderr)
        return EXIT_TYPE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TYPE


if __name__ == "__main__":
    sys.exit(main())
