"""Per-run and summary tables for the two movement schemes on the built-in instance.

    python3 scripts/reproduce_tables.py --runs 20 --seed 0
"""

import argparse

from rbsched.harness import compare_schemes
from rbsched.model import builtin_paper_instance
from rbsched.simulator import SchemeConfig

COLUMNS = ("t_sum_next_1", "t_sum_next_2", "t_sum_next", "wsend_next", "makespan")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--early-stop", action="store_true")
    args = ap.parse_args()

    report = compare_schemes(
        builtin_paper_instance(), SchemeConfig(seed=args.seed, allow_early_stop=args.early_stop), args.runs
    )
    for label, stats in zip(report.labels, (report.stats_a, report.stats_b)):
        print(f"\n{label}")
        print("run  seed " + "".join(f"{c:>14}" for c in COLUMNS))
        for k, seed in enumerate(stats.seeds):
            print(f"{k + 1:>3} {seed:>5} " + "".join(f"{stats.per_run[c][k]:>14.1f}" for c in COLUMNS))
        for stat in ("optimal", "worst", "average"):
            vals = "".join(f"{getattr(stats.metrics[c], stat):>14.1f}" for c in COLUMNS)
            print(f"{stat:>9}  {vals}")

    print("\nmetric          range   ratio")
    for name in COLUMNS:
        cmp = report.comparison[name]
        ratio = "n/a" if cmp["ratio"] is None else f"{100 * cmp['ratio']:.1f}%"
        print(f"{name:<14}{cmp['range']:>7.1f}{ratio:>8}")


if __name__ == "__main__":
    main()
