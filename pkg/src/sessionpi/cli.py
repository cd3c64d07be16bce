"""Command-line interface.

Subcommands: ``check`` (run the type checker), ``oracle`` (compare the
checker against the split-based derivability search), ``reduce`` (print a
reduction trace), ``congruence`` (fuzz the checker with random one-step
congruence rewrites), ``table`` (recompute the context-algebra regression
table).

Exit codes: 0 accept/agree, 1 reject/diverge/mismatch, 2 usage or parse
error, 3 inconclusive oracle verdict.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from .checker import CheckError, CheckResult, type_check
from .contexts import (
    Context,
    ContextAlgebraError,
    context_equal,
    context_file_text,
    to_decl_context,
)
from .declarative import Verdict, derivable
from .parser import ParseError, parse_context, parse_process
from .semantics import congruence_steps, reduce_step_labeled
from .syntax import barendregt_rename, pretty
from .table import evaluate_table, expected_rows


@dataclass
class RunReport:
    command: str
    accepted: Optional[bool] = None
    residual: Optional[str] = None
    error: Optional[dict] = None
    trace: Optional[list[dict]] = None
    audits: Optional[list[dict]] = None
    oracle_verdict: Optional[str] = None
    steps: Optional[list[dict]] = None
    rows: Optional[list[dict]] = None
    divergence: Optional[dict] = None
    iterations_run: Optional[int] = None
    timing_ms: float = 0.0
    exit_code: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {"command": self.command, "timing_ms": self.timing_ms}
        for key in (
            "accepted",
            "residual",
            "error",
            "trace",
            "audits",
            "oracle_verdict",
            "steps",
            "rows",
            "divergence",
            "iterations_run",
        ):
            value = getattr(self, key)
            if value is not None:
                payload[key] = value
        payload.update(self.extra)
        return json.dumps(payload, indent=2, ensure_ascii=False)


def _error_dict(err: CheckError) -> dict:
    return {"kind": err.kind.value, "location": err.location, "detail": err.detail}


def _trace_dicts(result: CheckResult) -> list[dict]:
    return [
        {
            "rule": step.rule,
            "input": str(step.input_ctx),
            "subject": str(step.subject),
            "output": str(step.output_ctx),
        }
        for step in result.trace
    ]


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_problem(args) -> tuple[Context, "Process"]:
    process = parse_process(_read(args.process_file))
    ctx = parse_context(_read(args.ctx)) if args.ctx else Context()
    return ctx, process


def cmd_check(args) -> RunReport:
    report = RunReport("check")
    started = time.perf_counter()
    ctx, process = _load_problem(args)
    result = type_check(ctx, process, trace=args.trace, audit=args.audit)
    report.timing_ms = (time.perf_counter() - started) * 1000
    report.accepted = result.accepted
    if result.residual is not None:
        report.residual = context_file_text(result.residual)
    if result.error is not None:
        report.error = _error_dict(result.error)
    if args.trace:
        report.trace = _trace_dicts(result)
    if args.audit and result.audits is not None:
        report.audits = [{"site": a.site, "count": a.count} for a in result.audits]
    report.exit_code = 0 if result.accepted else 1
    return report


def cmd_oracle(args) -> RunReport:
    report = RunReport("oracle")
    started = time.perf_counter()
    ctx, process = _load_problem(args)
    decl = to_decl_context(ctx)  # rejects void entries
    result = type_check(ctx, process)
    oracle = derivable(decl, barendregt_rename(process, avoid=ctx.names()), bound=args.bound)
    report.timing_ms = (time.perf_counter() - started) * 1000
    report.accepted = result.accepted
    if result.error is not None:
        report.error = _error_dict(result.error)
    report.oracle_verdict = oracle.verdict.value
    if oracle.verdict is Verdict.INCONCLUSIVE:
        agreement = "inconclusive"
        report.exit_code = 3
    elif result.accepted == bool(oracle):
        agreement = "agree"
        report.exit_code = 0
    else:
        agreement = "disagree"
        report.exit_code = 1
    report.extra["agreement"] = agreement
    report.extra["oracle_bound"] = args.bound
    return report


def cmd_reduce(args) -> RunReport:
    report = RunReport("reduce")
    started = time.perf_counter()
    process = parse_process(_read(args.process_file))
    current = process
    steps = [{"step": 0, "rule": "-", "term": pretty(current)}]
    for number in range(1, args.steps + 1):
        current = barendregt_rename(current)
        labeled = reduce_step_labeled(current, radius=args.radius)
        if not labeled:
            break
        chan, reduct = min(labeled, key=lambda pair: str(pair[1]))
        steps.append({"step": number, "rule": f"R-Com on {chan}", "term": pretty(reduct)})
        current = reduct
    report.timing_ms = (time.perf_counter() - started) * 1000
    report.steps = steps
    report.exit_code = 0
    return report


def cmd_congruence(args) -> RunReport:
    report = RunReport("congruence")
    started = time.perf_counter()
    ctx, process = _load_problem(args)
    rng = random.Random(args.seed)
    current = process
    baseline = type_check(ctx, current)
    size_cap = 400
    runs = 0
    for iteration in range(args.iterations):
        steps = congruence_steps(barendregt_rename(current, avoid=ctx.names()))
        if len(str(current)) > size_cap:
            trimmed = [
                s for s in steps if not (s.rule == "par-unit" and s.direction == "RL")
                and not (s.rule == "repl-unfold" and s.direction == "LR")
            ]
            steps = trimmed or steps
        if not steps:
            break
        step = rng.choice(steps)
        rewritten = step.result
        result = type_check(ctx, rewritten)
        same_verdict = result.accepted == baseline.accepted
        same_residual = (
            result.residual is None
            and baseline.residual is None
            or result.residual is not None
            and baseline.residual is not None
            and context_equal(result.residual, baseline.residual)
        )
        if not (same_verdict and same_residual):
            report.divergence = {
                "iteration": iteration,
                "rule": step.rule,
                "direction": step.direction,
                "path": list(step.path),
                "before": pretty(current),
                "after": pretty(rewritten),
                "baseline_accepted": baseline.accepted,
                "rewritten_accepted": result.accepted,
            }
            break
        current = rewritten
        runs = iteration + 1
    report.timing_ms = (time.perf_counter() - started) * 1000
    report.iterations_run = runs
    report.accepted = report.divergence is None
    report.exit_code = 0 if report.divergence is None else 1
    return report


def cmd_table(args) -> RunReport:
    report = RunReport("table")
    started = time.perf_counter()
    outcomes = evaluate_table()
    rows = []
    for row, outcome in zip(expected_rows(), outcomes):
        rows.append(
            {
                "row": outcome.index,
                "g1": str(row.g1),
                "g2": str(row.g2),
                "g3": str(row.g3),
                "ok": outcome.ok,
                "mismatches": outcome.mismatches,
            }
        )
    report.timing_ms = (time.perf_counter() - started) * 1000
    report.rows = rows
    matched = sum(1 for r in rows if r["ok"])
    report.extra["matched"] = f"{matched}/{len(rows)}"
    report.exit_code = 0 if matched == len(rows) else 1
    return report


def _print_human(report: RunReport):
    if report.command == "check":
        verdict = "accepted" if report.accepted else "rejected"
        print(f"check: {verdict} ({report.timing_ms:.1f} ms)")
        if report.residual is not None:
            print(f"residual context: {report.residual}")
        if report.error is not None:
            print(f"error: {report.error['kind']} at {report.error['location']}: "
                  f"{report.error['detail']}")
        if report.trace is not None:
            for step in report.trace:
                print(f"  [{step['rule']}] {step['subject']}")
                print(f"      in:  {step['input']}")
                print(f"      out: {step['output']}")
        if report.audits is not None:
            worst = max((a["count"] for a in report.audits), default=0)
            print(f"pattern audit: {len(report.audits)} call sites, max matches {worst}")
    elif report.command == "oracle":
        print(
            f"oracle: checker={'accept' if report.accepted else 'reject'} "
            f"oracle={report.oracle_verdict} -> {report.extra['agreement']} "
            f"({report.timing_ms:.1f} ms)"
        )
        if report.error is not None:
            print(f"checker error: {report.error['kind']}: {report.error['detail']}")
    elif report.command == "reduce":
        for step in report.steps:
            print(f"{step['step']:3d} {step['rule']:<16} {step['term']}")
    elif report.command == "congruence":
        if report.divergence is None:
            print(f"congruence: no divergence in {report.iterations_run} rewrites "
                  f"({report.timing_ms:.1f} ms)")
        else:
            d = report.divergence
            print(f"congruence: DIVERGENCE at iteration {d['iteration']} "
                  f"({d['rule']} {d['direction']} at {d['path']})")
            print(f"  before: {d['before']}")
            print(f"  after:  {d['after']}")
    elif report.command == "table":
        for row in report.rows:
            mark = "ok" if row["ok"] else "MISMATCH"
            print(f"row {row['row']:2d}: {row['g1']} / {row['g2']} / {row['g3']} -> {mark}")
            for miss in row["mismatches"]:
                print(f"    {miss}")
        print(f"table: {report.extra['matched']} rows match")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sessionpi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="type check a process against a context")
    check.add_argument("process_file")
    check.add_argument("--ctx", help="context file", default=None)
    check.add_argument("--trace", action="store_true", help="include the derivation trace")
    check.add_argument("--audit", action="store_true", help="include pattern-match counts")
    check.add_argument("--json", action="store_true")

    oracle = sub.add_parser("oracle", help="compare checker and derivability search")
    oracle.add_argument("process_file")
    oracle.add_argument("--ctx", default=None)
    oracle.add_argument("--bound", type=int, default=200_000, help="search node budget")
    oracle.add_argument("--json", action="store_true")

    reduce = sub.add_parser("reduce", help="print a reduction trace")
    reduce.add_argument("process_file")
    reduce.add_argument("--steps", type=int, default=10)
    reduce.add_argument("--radius", type=int, default=3,
                        help="structural rewrites allowed before each communication")
    reduce.add_argument("--json", action="store_true")

    cong = sub.add_parser("congruence", help="fuzz with random one-step rewrites")
    cong.add_argument("process_file")
    cong.add_argument("--ctx", default=None)
    cong.add_argument("--iterations", type=int, default=100)
    cong.add_argument("--seed", type=int, default=0)
    cong.add_argument("--json", action="store_true")

    table = sub.add_parser("table", help="recompute the context-algebra table")
    table.add_argument("--json", action="store_true")

    return parser


_HANDLERS = {
    "check": cmd_check,
    "oracle": cmd_oracle,
    "reduce": cmd_reduce,
    "congruence": cmd_congruence,
    "table": cmd_table,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = _HANDLERS[args.command](args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except ContextAlgebraError as err:
        print(f"context error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 2
    if getattr(args, "json", False):
        print(report.to_json())
    else:
        _print_human(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
