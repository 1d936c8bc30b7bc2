"""Write the rule 178 matrices for n = 6 and n = 7 (Alice holds n cells) as PBM files."""

import argparse
from pathlib import Path

from cacc import SplitSpec, build_matrix, distinct_counts, export_matrix_image, make_eca


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", help="output directory")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in (6, 7):
        m = build_matrix(make_eca(178), SplitSpec(n, n))
        path = out / f"rule178_n{n}.pbm"
        path.write_bytes(export_matrix_image(m))
        rows, cols, d = distinct_counts(m)
        print(f"{path}: {m.n_rows}x{m.n_cols}, distinct rows {rows}, cols {cols}, d {d}")


if __name__ == "__main__":
    main()
