"""Command-line front end.

Exit codes: 0 ok, 1 validation failure, 2 I/O or parse error, 3 deadlock.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from rbsched.gantt import render_gantt
from rbsched.harness import RunFailed, compare_schemes, export_report, resolve_workers
from rbsched.model import (
    InstanceParseError,
    builtin_paper_instance,
    load_instance,
    paper_factors_instance,
    serialize_instance,
    validate_instance,
)
from rbsched.rng import random_sequence
from rbsched.simulator import (
    DISPATCH_MIN_SETUP,
    DISPATCHES,
    MIN_SETUP_COST,
    RANDOM,
    DeadlockError,
    ScheduleResult,
    SchemeConfig,
    simulate,
)
from rbsched.verify import verify_schedule

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_DEADLOCK = 0, 1, 2, 3

SCHEMES = {"min-setup": MIN_SETUP_COST, "random": RANDOM}
BUILTINS = {"builtin": builtin_paper_instance, "builtin-factors": paper_factors_instance}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _load(path: str):
    try:
        return load_instance(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read instance {path}: {exc.strerror or exc}") from None
    except InstanceParseError as exc:
        raise CliError(EXIT_IO, f"parse error in {path}: {exc}") from None


def _load_valid(path: str):
    inst = _load(path)
    report = validate_instance(inst)
    if report:
        raise CliError(EXIT_INVALID, "invalid instance:\n" + "\n".join(f"  {v}" for v in report))
    return inst


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    report = validate_instance(inst)
    if not report:
        print(f"{args.instance}: ok ({len(inst.buses)} buses, {inst.num_stages} stages)")
        return EXIT_OK
    for v in report:
        print(v)
    return EXIT_INVALID


def _parse_sequence(text: str, num_buses: int) -> list[int]:
    try:
        seq = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(EXIT_IO, f"--sequence must be comma-separated bus ids, got {text!r}") from None
    if sorted(seq) != list(range(1, num_buses + 1)):
        raise CliError(EXIT_INVALID, f"--sequence is not a permutation of 1..{num_buses}")
    return seq


def cmd_run(args) -> int:
    inst = _load_valid(args.instance)
    cfg = SchemeConfig(
        movement=SCHEMES[args.scheme],
        dispatch=args.dispatch,
        allow_early_stop=args.early_stop,
        seed=args.seed,
    )
    seq = (_parse_sequence(args.sequence, len(inst.buses)) if args.sequence
           else random_sequence(args.seed, len(inst.buses)))
    try:
        result = simulate(inst, seq, cfg)
    except DeadlockError as exc:
        raise CliError(EXIT_DEADLOCK, str(exc)) from None
    violations = verify_schedule(inst, result)
    if violations:
        raise CliError(EXIT_DEADLOCK, "infeasible schedule:\n" + "\n".join(violations))
    out = Path(args.out)
    _write(out / "result.json", result.to_json())
    _write(out / "metrics.json", json.dumps(vars(result.metrics), indent=2) + "\n")
    m = result.metrics
    print(f"makespan: {m.makespan}")
    print(f"next-stage total setup: {sum(m.t_sum_stage(inst.next_stage))}")
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = _load_valid(args.instance)
    base = SchemeConfig(dispatch=args.dispatch, allow_early_stop=args.early_stop, seed=args.seed)
    out = Path(args.out)
    try:
        report = compare_schemes(
            inst, base, args.runs, workers=resolve_workers(),
            dump_dir=out / "runs" if args.dump_runs else None,
        )
    except RunFailed as exc:
        raise CliError(EXIT_DEADLOCK, str(exc)) from None
    _write(out / f"report.{args.format}", export_report(report, args.format))
    print(f"{'metric':<14}{'scheme1':>10}{'scheme2':>10}{'range':>9}{'ratio':>9}")
    for name, cmp in report.comparison.items():
        a = report.stats_a.metrics[name].average
        b = report.stats_b.metrics[name].average
        ratio = "n/a" if cmp["ratio"] is None else f"{100 * cmp['ratio']:.1f}%"
        print(f"{name:<14}{a:>10.1f}{b:>10.1f}{cmp['range']:>9.1f}{ratio:>9}")
    return EXIT_OK


def cmd_gantt(args) -> int:
    try:
        doc = json.loads(Path(args.result).read_text(encoding="utf-8"))
        result = ScheduleResult.from_dict(doc)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.result}: {exc.strerror or exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_IO, f"malformed result {args.result}: {exc}") from None
    _write(Path(args.out), render_gantt(result, title=args.title or ""))
    return EXIT_OK


def cmd_instance(args) -> int:
    text = serialize_instance(BUILTINS[args.name]())
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rbsched", description="Flow shop simulator with a routing buffer.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check an instance document")
    v.add_argument("--instance", required=True)
    v.set_defaults(func=cmd_validate)

    def policy_flags(sp):
        sp.add_argument("--dispatch", choices=DISPATCHES, default=DISPATCH_MIN_SETUP)
        sp.add_argument("--early-stop", action="store_true", help="also allow non-maximal linkage chains")

    r = sub.add_parser("run", help="simulate one schedule")
    r.add_argument("--instance", required=True)
    r.add_argument("--scheme", choices=sorted(SCHEMES), default="min-setup")
    r.add_argument("--seed", type=_u64, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--sequence", help="comma-separated release order (default: random from --seed)")
    policy_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="paired runs of both movement schemes")
    c.add_argument("--instance", required=True)
    c.add_argument("--runs", type=_positive, default=20)
    c.add_argument("--seed", type=_u64, default=0)
    c.add_argument("--out", required=True)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--dump-runs", action="store_true", help="write run_<k>_<scheme>.json per run")
    policy_flags(c)
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("gantt", help="render result.json as an SVG Gantt chart")
    g.add_argument("--result", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--title")
    g.set_defaults(func=cmd_gantt)

    i = sub.add_parser("instance", help="write a built-in instance document")
    i.add_argument("name", choices=sorted(BUILTINS))
    i.add_argument("--out")
    i.set_defaults(func=cmd_instance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
