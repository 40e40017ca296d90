"""Command-line front end.

Subcommands: ``check``, ``tighten``, ``refine``, ``laws``, ``flow``,
``spath``, ``cpath``, ``wcrt``.  Exit status 0 on success / a true check,
1 on a false check or a law outcome that differs from the catalog
expectation, 2 on usage, parse or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import algebra, analyses, kernel, semantics, tropical


class _CliError(Exception):
    pass


def _parse_universe(tokens) -> semantics.Universe:
    names = ("A", "B", "C")
    max_len = 4
    grid = 2
    for token in tokens or ():
        if token.startswith("vars="):
            names = tuple(v for v in token[len("vars="):].split(",") if v)
        elif token.startswith("len="):
            max_len = int(token[len("len="):])
        elif token.startswith("grid="):
            grid = int(token[len("grid="):])
        else:
            raise _CliError(f"bad universe parameter {token!r}; use vars=..., len=..., grid=...")
    return semantics.Universe(names, max_len, grid)


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _cmd_check(args) -> int:
    sched = semantics.load_schedule(args.schedule)
    iface = kernel.parse_interface(args.interface)
    holds = semantics.schedule_satisfies(sched, iface)
    _emit(
        args,
        {"command": "check", "interface": str(iface), "holds": holds},
        [f"check: {str(iface)}", f"holds: {'yes' if holds else 'no'}"],
    )
    return 0 if holds else 1


def _cmd_tighten(args) -> int:
    sched = semantics.load_schedule(args.schedule)
    ty = kernel.parse_type(args.type)
    u = _parse_universe(args.universe)
    if args.grid is not None:
        u = semantics.Universe(u.vars, u.max_len, args.grid)
    bounds = semantics.tighten(sched, ty, u)
    rendered = sorted(kernel.format_bound(b, ty) for b in bounds)
    if not bounds:
        verdict = "not boundable within grid"
    elif len(bounds) == 1:
        verdict = f"worst-case: {rendered[0]}"
    else:
        verdict = "antichain: " + "; ".join(rendered)
    _emit(
        args,
        {
            "command": "tighten",
            "type": kernel.format_type(ty),
            "grid": u.bound_grid,
            "minimal_bounds": rendered,
            "unique": len(bounds) == 1,
        },
        [f"tighten: {kernel.format_type(ty)} (grid {u.bound_grid})", verdict],
    )
    return 0


def _cmd_refine(args) -> int:
    i1 = kernel.parse_interface(args.interface1)
    i2 = kernel.parse_interface(args.interface2)
    u = _parse_universe(args.universe)
    holds = semantics.refines(i1, i2, u)
    witness = None if holds else semantics.refines_witness(i1, i2, u)
    lines = [
        f"refine: {str(i1)}  <=  {str(i2)}",
        f"bounded-universe ({u.describe()}): {'holds' if holds else 'fails'}",
    ]
    payload = {
        "command": "refine",
        "universe": u.describe(),
        "holds": holds,
    }
    if witness is not None:
        lines.append(f"counterexample: {semantics.format_activation(witness)}")
        payload["counterexample"] = semantics.format_activation(witness)
    _emit(args, payload, lines)
    return 0 if holds else 1


def _cmd_laws(args) -> int:
    u = _parse_universe(args.universe)
    ids = algebra.expand_law_ids(args.laws)
    all_ok = True
    lines = []
    results = []
    for law_id in ids:
        report = algebra.law_check(law_id, u)
        all_ok = all_ok and report.ok
        if report.expected_valid:
            status = "pass" if report.valid else "FAIL"
        else:
            status = "refuted (expected)" if not report.valid else "UNEXPECTEDLY VALID"
        lines.append(f"{report.law_id}: {status} ({report.instances} instances)")
        for example in report.counterexamples:
            lines.append(f"  counterexample: {example}")
        results.append(
            {
                "law": report.law_id,
                "valid": report.valid,
                "expected_valid": report.expected_valid,
                "instances": report.instances,
                "counterexamples": list(report.counterexamples),
            }
        )
    lines.append(f"universe: {u.describe()}")
    _emit(args, {"command": "laws", "universe": u.describe(), "results": results}, lines)
    return 0 if all_ok else 1


def _cmd_flow(args) -> int:
    graph = analyses.load_graph(args.graph)
    value = analyses.max_throughput(graph)
    _emit(
        args,
        {"command": "flow", "throughput": kernel.format_extnat(value)},
        [f"throughput: {kernel.format_extnat(value)}"],
    )
    return 0


def _cmd_spath(args) -> int:
    graph = analyses.load_graph(args.graph)
    note = ""
    if args.merge:
        graph = analyses.merge_controls(graph, analyses.parse_merge_spec(args.merge))
        note = f" (merged: {args.merge})"
    src = graph.source if args.merge and args.src not in graph.nodes else args.src
    dst = graph.sink if args.merge and args.dst not in graph.nodes else args.dst
    value = analyses.shortest_path(graph, src, dst)
    _emit(
        args,
        {"command": "spath", "distance": kernel.format_extnat(value)},
        [f"distance: {kernel.format_extnat(value)}{note}"],
    )
    return 0


def _cmd_cpath(args) -> int:
    graph = analyses.load_graph(args.graph)
    value = analyses.critical_path(graph)
    _emit(
        args,
        {"command": "cpath", "critical_path": kernel.format_extnat(value)},
        [f"critical-path: {kernel.format_extnat(value)}"],
    )
    return 0


def _io_payload(iface: algebra.IOInterface) -> dict:
    return {
        "matrix": str(iface.matrix),
        "inputs": [kernel.format_type(c) for c in iface.inputs],
        "outputs": [kernel.format_type(c) for c in iface.outputs],
    }


def _cmd_wcrt(args) -> int:
    module = analyses.load_ckag(args.ckag)
    result = analyses.wcrt_compose(module)
    lines = []
    payload: dict = {"command": "wcrt", "module_name": module.name}
    for name, iface in result.threads:
        lines.append(f"thread {name}: {iface}")
    payload["threads"] = {name: _io_payload(iface) for name, iface in result.threads}
    if result.kron is not None:
        lines.append(f"kronecker: {result.kron}")
        payload["kronecker"] = _io_payload(result.kron)
    if result.parallel is not None:
        lines.append(f"parallel: {result.parallel}")
        payload["parallel"] = _io_payload(result.parallel)
    lines.append(f"module {module.name}: {result.module}")
    payload["module"] = _io_payload(result.module)
    _emit(args, payload, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sched-algebra",
        description="Scheduling interface algebra: checks, laws and graph analyses.",
    )
    parser.add_argument(
        "--format", choices=("plain", "json"), default="plain",
        help="output encoding (default plain)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a schedule file against an interface")
    p.add_argument("schedule", help="schedule file, one activation per line")
    p.add_argument("interface", help="interface text '<bound> : <type>'")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("tighten", help="minimal bounds of a type over a schedule")
    p.add_argument("schedule")
    p.add_argument("type", help="elementary type text")
    p.add_argument("--grid", type=int, default=None, help="delay grid cap")
    p.add_argument("--universe", nargs="+", metavar="K=V", default=None)
    p.set_defaults(func=_cmd_tighten)

    p = sub.add_parser("refine", help="bounded-universe refinement check")
    p.add_argument("interface1")
    p.add_argument("interface2")
    p.add_argument("--universe", nargs="+", metavar="K=V", default=None)
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("laws", help="run law checks against the semantics oracle")
    p.add_argument("laws", nargs="*", help="law ids, prefix.* patterns, or 'all'")
    p.add_argument("--universe", nargs="+", metavar="K=V", default=None)
    p.set_defaults(func=_cmd_laws)

    p = sub.add_parser("flow", help="maximum network throughput")
    p.add_argument("graph")
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("spath", help="shortest path distance")
    p.add_argument("graph")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--merge", default=None, metavar="X=Y[,U=V...]",
                   help="identify control nodes before solving")
    p.set_defaults(func=_cmd_spath)

    p = sub.add_parser("cpath", help="critical path of a task graph")
    p.add_argument("graph")
    p.set_defaults(func=_cmd_cpath)

    p = sub.add_parser("wcrt", help="worst-case reaction time of a CKAG module")
    p.add_argument("ckag")
    p.set_defaults(func=_cmd_wcrt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (kernel.SchedAlgebraError, _CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
