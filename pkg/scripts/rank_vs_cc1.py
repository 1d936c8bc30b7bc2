"""Worst-split d against the rank lower bound for every canonical ECA."""

import argparse
import json
from pathlib import Path

from cacc import Config, canonical_codes, rank_vs_cc1_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    report = rank_vs_cc1_report(canonical_codes(), args.n_max, Config().updated(workers=args.workers))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"rank_vs_cc1_n{args.n_max}.json").write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    last = {r.rule: r for r in report.rows if r.n == args.n_max}
    print(f"{'rule':>4} {'d':>6} {'rank_lb':>7} ratio")
    for c, r in last.items():
        ratio = "-" if r.ratio is None else f"{r.ratio:.3f}"
        print(f"{c:>4} {r.d:>6} {r.rank_lb:>7} {ratio}")
    print(f"degenerate (d = 1 throughout): {report.degenerate}")
    print(f"ratio trending below 1/2: {report.flagged}")


if __name__ == "__main__":
    main()
