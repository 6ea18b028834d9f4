"""Repeated-run experiments and scheme comparison reports."""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from rbsched.model import Instance
from rbsched.rng import random_sequence
from rbsched.simulator import MIN_SETUP_COST, RANDOM, ScheduleResult, SchemeConfig, simulate
from rbsched.verify import verify_schedule

THREADS_ENV = "RBSCHED_THREADS"


class RunFailed(RuntimeError):
    def __init__(self, seed: int, message: str):
        self.seed = seed
        super().__init__(f"run with seed {seed} failed: {message}")


@dataclass(frozen=True)
class MetricStats:
    optimal: float
    worst: float
    average: float


@dataclass
class BatchStats:
    metrics: dict[str, MetricStats]
    runs: int
    seeds: list[int]
    # raw value of every metric, in run-index order
    per_run: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "seeds": list(self.seeds),
            "metrics": {k: asdict(v) for k, v in self.metrics.items()},
            "per_run": {k: list(v) for k, v in self.per_run.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BatchStats":
        return cls(
            metrics={k: MetricStats(**v) for k, v in d["metrics"].items()},
            runs=d["runs"],
            seeds=list(d["seeds"]),
            per_run={k: list(v) for k, v in d.get("per_run", {}).items()},
        )


def run_metrics(inst: Instance, result: ScheduleResult) -> dict[str, float]:
    """The per-run numbers the batch statistics are built from."""
    m = result.metrics
    next_stage = m.t_sum_stage(inst.next_stage)
    out: dict[str, float] = {}
    for t, value in enumerate(next_stage, start=1):
        out[f"t_sum_next_{t}"] = value
    out["t_sum_next"] = sum(next_stage) / len(next_stage)
    out["wsend_next"] = m.wsend_next
    out["makespan"] = m.makespan
    return out


def summarize(per_run: dict[str, list[float]], seeds: list[int]) -> BatchStats:
    metrics = {
        name: MetricStats(min(values), max(values), statistics.fmean(values))
        for name, values in per_run.items()
    }
    return BatchStats(metrics, len(seeds), list(seeds), per_run)


def run_once(inst: Instance, cfg: SchemeConfig, k: int) -> ScheduleResult:
    """Run ``k`` of a batch: seed ``cfg.seed + k`` drives both order and moves."""
    seed = cfg.seed + k
    run_cfg = replace(cfg, seed=seed)
    try:
        result = simulate(inst, random_sequence(seed, len(inst.buses)), run_cfg)
    except Exception as exc:
        raise RunFailed(seed, str(exc)) from exc
    violations = verify_schedule(inst, result)
    if violations:
        raise RunFailed(seed, f"infeasible schedule: {violations[0]}")
    return result


def _run_star(args):
    return run_once(*args)


def resolve_workers(value: Optional[str] = None) -> int:
    """Worker count from ``RBSCHED_THREADS`` (unset or 1: serial, 0: all cores)."""
    raw = os.environ.get(THREADS_ENV) if value is None else value
    if raw is None or raw.strip() == "":
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def run_results(inst: Instance, cfg: SchemeConfig, runs: int, workers: Optional[int] = None) -> list[ScheduleResult]:
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    workers = resolve_workers() if workers is None else workers
    jobs = [(inst, cfg, k) for k in range(runs)]
    if workers <= 1 or runs == 1:
        return [run_once(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, runs)) as pool:
        # map keeps run-index order, so aggregation is independent of completion order
        return list(pool.map(_run_star, jobs))


def run_batch(
    inst: Instance,
    cfg: SchemeConfig,
    runs: int,
    workers: Optional[int] = None,
    dump_dir: Optional[Path] = None,
    label: Optional[str] = None,
) -> BatchStats:
    results = run_results(inst, cfg, runs, workers)
    if dump_dir is not None:
        dump_runs(results, Path(dump_dir), label or cfg.movement)
    per_run: dict[str, list[float]] = {}
    for result in results:
        for name, value in run_metrics(inst, result).items():
            per_run.setdefault(name, []).append(value)
    return summarize(per_run, [cfg.seed + k for k in range(runs)])


def dump_runs(results: list[ScheduleResult], out: Path, label: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for k, result in enumerate(results):
        (out / f"run_{k}_{label}.json").write_text(result.to_json(), encoding="utf-8")


@dataclass
class ComparisonReport:
    stats_a: BatchStats
    stats_b: BatchStats
    # metric -> {"range": avg_b - avg_a, "ratio": range / avg_b}
    comparison: dict[str, dict[str, Optional[float]]]
    labels: tuple[str, str] = ("scheme1", "scheme2")

    @classmethod
    def from_stats(cls, a: BatchStats, b: BatchStats, labels=("scheme1", "scheme2")) -> "ComparisonReport":
        comparison = {}
        for name, sa in a.metrics.items():
            sb = b.metrics[name]
            rng = sb.average - sa.average
            if rng == 0:
                ratio: Optional[float] = 0.0
            elif sb.average == 0:
                ratio = None
            else:
                ratio = rng / sb.average
            comparison[name] = {"range": rng, "ratio": ratio}
        return cls(a, b, comparison, tuple(labels))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "stats_a": self.stats_a.to_dict(),
            "stats_b": self.stats_b.to_dict(),
            "comparison": self.comparison,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonReport":
        return cls(
            BatchStats.from_dict(d["stats_a"]),
            BatchStats.from_dict(d["stats_b"]),
            {k: dict(v) for k, v in d["comparison"].items()},
            tuple(d.get("labels", ("scheme1", "scheme2"))),
        )


def compare_schemes(
    inst: Instance,
    base_cfg: SchemeConfig,
    runs: int,
    workers: Optional[int] = None,
    dump_dir: Optional[Path] = None,
) -> ComparisonReport:
    """Min-setup-cost movement against random movement on paired runs.

    Both schemes see the same seeds, hence the same release orders, and the
    same dispatch policy; only the movement rule differs.
    """
    a = run_batch(inst, replace(base_cfg, movement=MIN_SETUP_COST), runs, workers, dump_dir, "scheme1")
    b = run_batch(inst, replace(base_cfg, movement=RANDOM), runs, workers, dump_dir, "scheme2")
    return ComparisonReport.from_stats(a, b)


def _fmt(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.1f}"


def export_report(report: ComparisonReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "statistic", "value"])
    for name, cmp in report.comparison.items():
        for label, stats in zip(report.labels, (report.stats_a, report.stats_b)):
            s = stats.metrics[name]
            writer.writerow([name, f"{label}_optimal", _fmt(s.optimal)])
            writer.writerow([name, f"{label}_worst", _fmt(s.worst)])
            writer.writerow([name, f"{label}_average", _fmt(s.average)])
        writer.writerow([name, "range", _fmt(cmp["range"])])
        ratio = cmp["ratio"]
        writer.writerow([name, "ratio", "n/a" if ratio is None else f"{100 * ratio:.1f}%"])
    return buf.getvalue()
