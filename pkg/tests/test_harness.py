import json
import statistics

import pytest

from conftest import T11, T32, small_instance
from rbsched.harness import (
    BatchStats,
    ComparisonReport,
    MetricStats,
    compare_schemes,
    export_report,
    resolve_workers,
    run_batch,
    run_metrics,
    run_results,
)
from rbsched.simulator import RANDOM, SchemeConfig


def _stats(**averages) -> BatchStats:
    return BatchStats({k: MetricStats(v, v, v) for k, v in averages.items()}, runs=1, seeds=[0])


def test_ratio_fixture_setup_time():
    report = ComparisonReport.from_stats(_stats(t_sum_next=41.8), _stats(t_sum_next=58.7))
    assert report.comparison["t_sum_next"]["range"] == pytest.approx(16.9)
    assert f"{100 * report.comparison['t_sum_next']['ratio']:.1f}%" == "28.8%"
    assert "t_sum_next,ratio,28.8%" in export_report(report, "csv").splitlines()


def test_ratio_fixture_next_stage_completion():
    report = ComparisonReport.from_stats(_stats(wsend_next=369.6), _stats(wsend_next=385.0))
    assert report.comparison["wsend_next"]["range"] == pytest.approx(15.4)
    assert f"{100 * report.comparison['wsend_next']['ratio']:.1f}%" == "4.0%"


def test_single_run_batch(builtin):
    stats = run_batch(builtin, SchemeConfig(seed=5), runs=1)
    assert stats.runs == 1 and stats.seeds == [5]
    for s in stats.metrics.values():
        assert s.optimal == s.worst == s.average


def test_batch_is_reproducible(builtin):
    a = run_batch(builtin, SchemeConfig(seed=9), runs=4)
    b = run_batch(builtin, SchemeConfig(seed=9), runs=4)
    assert a == b


def test_seed_changes_results_not_invariants(builtin):
    a = run_batch(builtin, SchemeConfig(seed=0), runs=3)
    b = run_batch(builtin, SchemeConfig(seed=100), runs=3)
    assert a.per_run != b.per_run
    for stats in (a, b):
        for s in stats.metrics.values():
            assert s.optimal <= s.average <= s.worst


def test_stats_match_independent_fold(builtin):
    cfg = SchemeConfig(movement=RANDOM, seed=3)
    stats = run_batch(builtin, cfg, runs=5)
    raw = [run_metrics(builtin, r) for r in run_results(builtin, cfg, 5, workers=1)]
    for name, s in stats.metrics.items():
        values = [r[name] for r in raw]
        assert s.optimal == min(values)
        assert s.worst == max(values)
        assert s.average == sum(values) / len(values)


def test_aggregate_next_stage_setup_is_mean_over_workstations(builtin):
    stats = run_batch(builtin, SchemeConfig(seed=1), runs=3)
    for k in range(3):
        per_ws = [stats.per_run["t_sum_next_1"][k], stats.per_run["t_sum_next_2"][k]]
        assert stats.per_run["t_sum_next"][k] == statistics.fmean(per_ws)


def test_self_comparison_is_zero(builtin):
    stats = run_batch(builtin, SchemeConfig(seed=2), runs=2)
    report = ComparisonReport.from_stats(stats, stats)
    assert all(c == {"range": 0, "ratio": 0.0} for c in report.comparison.values())


def test_zero_baseline_ratio_is_undefined():
    report = ComparisonReport.from_stats(_stats(t_sum_next=3.0), _stats(t_sum_next=0.0))
    assert report.comparison["t_sum_next"]["ratio"] is None
    assert "t_sum_next,ratio,n/a" in export_report(report, "csv")


def test_compare_pairs_release_orders(builtin, tmp_path):
    report = compare_schemes(builtin, SchemeConfig(seed=4), runs=2, dump_dir=tmp_path)
    assert report.stats_a.seeds == report.stats_b.seeds == [4, 5]
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["run_0_scheme1.json", "run_0_scheme2.json", "run_1_scheme1.json", "run_1_scheme2.json"]
    for k in range(2):
        a = json.loads((tmp_path / f"run_{k}_scheme1.json").read_text())
        b = json.loads((tmp_path / f"run_{k}_scheme2.json").read_text())
        assert a["sequence"] == b["sequence"]
        assert a["config"]["movement"] == "min-setup-cost" and b["config"]["movement"] == "random"


def test_json_round_trip(builtin):
    report = compare_schemes(builtin, SchemeConfig(seed=1), runs=3)
    again = ComparisonReport.from_dict(json.loads(export_report(report, "json")))
    assert again == report


def test_csv_layout(builtin):
    report = compare_schemes(builtin, SchemeConfig(), runs=2)
    lines = export_report(report, "csv").splitlines()
    assert lines[0] == "metric,statistic,value"
    # 6 stats + range + ratio per metric; 2 workstations + mean + 2 completion times
    assert len(lines) == 1 + 8 * 5
    row = dict(((m, s), v) for m, s, v in (ln.split(",") for ln in lines[1:]))
    assert row["makespan", "scheme1_average"] == f"{report.stats_a.metrics['makespan'].average:.1f}"


def test_parallel_matches_serial(builtin):
    cfg = SchemeConfig(seed=12)
    assert run_batch(builtin, cfg, 4, workers=2) == run_batch(builtin, cfg, 4, workers=1)


def test_resolve_workers(monkeypatch):
    monkeypatch.delenv("RBSCHED_THREADS", raising=False)
    assert resolve_workers() == 1
    monkeypatch.setenv("RBSCHED_THREADS", "3")
    assert resolve_workers() == 3
    monkeypatch.setenv("RBSCHED_THREADS", "0")
    assert resolve_workers() >= 1
    with pytest.raises(ValueError):
        resolve_workers("-1")


def test_runs_must_be_positive(builtin):
    with pytest.raises(ValueError):
        run_batch(builtin, SchemeConfig(), runs=0)


def test_small_instance_batch():
    inst = small_instance([1, 1], (1, 1, 2), [(T11, (2, 3)), (T32, (1, 4)), (T11, (3, 3))])
    stats = run_batch(inst, SchemeConfig(), runs=6)
    assert stats.metrics["t_sum_next"].worst <= 32
