"""Classify all 88 ECA symmetry classes and write JSON, CSV and a text table."""

import argparse
import json
import time
from pathlib import Path

from cacc import Config, classify_all
from cacc.classifier import reports_to_csv, reports_to_text


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    cfg = Config().updated(workers=args.workers)
    t0 = time.perf_counter()
    reports = classify_all(args.n_max, cfg)
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / f"classify_n{args.n_max}"
    stem.with_suffix(".json").write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    stem.with_suffix(".csv").write_text(reports_to_csv(reports))
    stem.with_suffix(".txt").write_text(reports_to_text(reports))
    print(reports_to_text(reports))
    print(f"{len(reports)} classes in {elapsed:.0f}s with {cfg.workers} worker(s)")


if __name__ == "__main__":
    main()
