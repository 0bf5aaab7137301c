"""Command-line front end: ``query``, ``partition``, ``check`` and ``explain``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from .algebra import Row
from .distribution import PartitionValue, free_columns, partition, project
from .errors import ResourceLimitError, StateAlgebraError, UsageError
from .factorization import STRATEGIES, SEPARATOR_CAP, build_graph, find_separator, query
from .oracle import MAX_ORACLE_WIDTH, oracle_conditional, oracle_partition
from .rules import DEFAULT_EPSILON, RuleSystem, check_consistency, compile_system, load_model

PROBABILITY_FORMAT = ".12g"


def _fmt(p: float) -> str:
    return format(p, PROBABILITY_FORMAT)


def _parse_evidence(rs: RuleSystem, items: Sequence[str]) -> dict[int, int]:
    evidence: dict[int, int] = {}
    for item in items:
        name, sep, bit = item.partition("=")
        name, bit = name.strip(), bit.strip()
        if not sep or bit not in ("0", "1"):
            raise UsageError(f"evidence must look like NAME=0 or NAME=1, got {item!r}")
        index = rs.index(name)
        if index in evidence and evidence[index] != int(bit):
            raise UsageError(f"conflicting evidence for {name}")
        evidence[index] = int(bit)
    return evidence


def _names(rs: RuleSystem, indices) -> list[str] | None:
    if indices is None:
        return None
    return [rs.variables[i] for i in sorted(indices)]


def _load(args) -> RuleSystem:
    try:
        return load_model(args.model)
    except OSError as exc:
        raise UsageError(f"cannot read model {args.model!r}: {exc.strerror or exc}") from None


def _check_oracle_width(rs: RuleSystem) -> None:
    if rs.width > MAX_ORACLE_WIDTH:
        raise ResourceLimitError(f"--oracle needs N <= {MAX_ORACLE_WIDTH}, model has {rs.width}")


def cmd_query(args) -> tuple[dict, str]:
    rs = _load(args)
    target = rs.index(args.target)
    evidence = _parse_evidence(rs, args.evidence)
    if args.oracle:
        _check_oracle_width(rs)
    d = compile_system(rs, args.epsilon)
    e = Row.from_assignment(rs.width, evidence)
    result = query(d, e, target, args.strategy, seed=args.seed)
    diag = result.diagnostics
    doc = {
        "command": "query",
        "target": args.target,
        "evidence": {rs.variables[i]: b for i, b in sorted(evidence.items())},
        "probability": float(_fmt(result.probability)),
        "mass_true": result.mass_true.as_dict(),
        "mass_false": result.mass_false.as_dict(),
        "strategy": result.strategy,
        "requested_strategy": args.strategy,
        "diagnostics": {
            "blanket": _names(rs, diag.get("blanket")),
            "component_sizes": diag.get("component_sizes"),
            "separator": _names(rs, diag.get("separator")),
            "summation_terms": diag.get("summation_terms"),
        },
    }
    given = ", ".join(f"{k}={v}" for k, v in doc["evidence"].items())
    lines = [
        f"P({args.target}=1{' | ' + given if given else ''}) = {_fmt(result.probability)}",
        f"mass_true   {_mass_text(result.mass_true)}",
        f"mass_false  {_mass_text(result.mass_false)}",
        f"strategy    {result.strategy} (requested {args.strategy})",
        f"blanket     {_list_text(doc['diagnostics']['blanket'])}",
        f"components  {_list_text(diag.get('component_sizes'))}",
        f"separator   {_list_text(doc['diagnostics']['separator'])}",
        f"terms       {diag.get('summation_terms')}",
    ]
    if args.oracle:
        ref = oracle_conditional(rs, evidence, target, args.epsilon)
        diff = abs(ref - result.probability)
        doc["oracle"] = {"probability": float(_fmt(ref)), "abs_difference": diff}
        lines.append(f"oracle      {_fmt(ref)}  |diff| = {diff:.3g}")
    return doc, "\n".join(lines)


def _mass_text(m: PartitionValue) -> str:
    return f"{m.value!r} * 2^{m.scale_exponent}"


def _list_text(items) -> str:
    if items is None:
        return "-"
    if not items:
        return "none"
    return " ".join(str(x) for x in items)


def cmd_partition(args) -> tuple[dict, str]:
    rs = _load(args)
    if args.oracle:
        _check_oracle_width(rs)
    z = partition(compile_system(rs, args.epsilon))
    log_z = z.log()
    doc = {
        "command": "partition",
        "variables": rs.width,
        "partition": z.as_dict(),
        "value": z.to_float(),
        "log_partition": log_z,
        "log2_partition_per_state": log_z / math.log(2) - rs.width,
    }
    lines = [
        f"Z          {_mass_text(z)}",
        f"           = {z.to_float()!r}",
        f"log Z      {log_z!r}",
        f"log2(Z/2^N) {doc['log2_partition_per_state']!r}",
    ]
    if args.oracle:
        ref = oracle_partition(rs, args.epsilon).partition
        rel = abs(ref - z.to_float()) / abs(ref) if ref else abs(z.to_float())
        doc["oracle"] = {"value": ref, "rel_difference": rel}
        lines.append(f"oracle     {ref!r}  rel diff = {rel:.3g}")
    return doc, "\n".join(lines)


def cmd_check(args) -> tuple[dict, str]:
    rs = _load(args)
    ok, c0 = check_consistency(rs)
    det_ok, det_c0 = check_consistency(rs, deterministic_only=True)
    doc = {
        "command": "check",
        "variables": rs.width,
        "rules": len(rs.rules),
        "satisfiable": ok,
        "c0": c0,
        "deterministic_satisfiable": det_ok,
        "deterministic_c0": det_c0,
    }
    lines = [
        f"satisfiable  {'yes' if ok else 'no'}",
        f"c0           {c0} of {1 << rs.width} states",
        f"det rules    {'consistent' if det_ok else 'inconsistent'} (c0 = {det_c0})",
    ]
    return doc, "\n".join(lines)


def cmd_explain(args) -> tuple[dict, str]:
    rs = _load(args)
    evidence = _parse_evidence(rs, args.evidence)
    d = compile_system(rs, args.epsilon)
    graph = build_graph(d)
    e = Row.from_assignment(rs.width, evidence)
    conditioned = build_graph(project(d, e)).relabel(free_columns(e))
    components = conditioned.components()
    blankets = {}
    for i, name in enumerate(rs.variables):
        if i in evidence:
            continue
        comp = next((c for c in components if i in c), frozenset([i]))
        blankets[name] = _names(rs, comp - {i})
    sep = find_separator(conditioned, SEPARATOR_CAP, seed=args.seed) if components else None
    doc = {
        "command": "explain",
        "evidence": {rs.variables[i]: b for i, b in sorted(evidence.items())},
        "edges": [[rs.variables[a], rs.variables[b]] for a, b in sorted(graph.edges)],
        "components": [_names(rs, c) for c in components],
        "blankets": blankets,
        "separator": _names(rs, sep),
        "separator_needed": len(components) == 1,
    }
    lines = ["edges"]
    lines += [f"  {a} -- {b}" for a, b in doc["edges"]] or ["  none"]
    lines.append("components after conditioning")
    lines += [f"  {{{', '.join(c)}}}" for c in doc["components"]] or ["  none"]
    lines.append("blankets")
    lines += [f"  {k}: {_list_text(v)}" for k, v in blankets.items()]
    if len(components) > 1:
        lines.append("separator   not needed (already disconnected)")
    else:
        lines.append(f"separator   {_list_text(doc['separator']) if sep is not None else 'not found'}")
    return doc, "\n".join(lines)


COMMANDS = {
    "query": cmd_query,
    "partition": cmd_partition,
    "check": cmd_check,
    "explain": cmd_explain,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="rule-model file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="deterministic-rule slack")
    common.add_argument("--seed", type=int, default=0, help="tie-break seed for heuristics")
    common.add_argument("--oracle", action="store_true", help="cross-check by enumeration (N <= 24)")
    common.add_argument(
        "--evidence", action="append", default=[], metavar="NAME=0|1", help="observed value (repeatable)"
    )

    parser = argparse.ArgumentParser(prog="state-algebra", description="Exact inference on weighted rule models.")
    sub = parser.add_subparsers(dest="command", required=True)
    q = sub.add_parser("query", parents=[common], help="conditional probability of one variable")
    q.add_argument("--target", required=True)
    q.add_argument("--strategy", choices=STRATEGIES, default="auto")
    sub.add_parser("partition", parents=[common], help="partition function")
    sub.add_parser("check", parents=[common], help="joint satisfiability of the rules")
    sub.add_parser("explain", parents=[common], help="interaction graph and factorization")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, text = COMMANDS[args.command](args)
    except StateAlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)
    if args.command == "check" and not doc["satisfiable"]:
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
