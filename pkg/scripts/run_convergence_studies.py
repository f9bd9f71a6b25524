#!/usr/bin/env python3
"""Convergence studies behind the error-curve figures.

Runs the tracked-eigenvalue studies on the square (both elements, both
refraction models) and the L-shape, writes one study CSV per case plus a
combined CSV that the plot renderer in frontend/ consumes:

    node frontend/dist/main.js results/studies.csv results/figures.svg
"""

import argparse
import pathlib
import sys

from transeig.experiments import (CSV_HEADER, ExperimentConfig,
                                  convergence_study, reports_to_rows,
                                  rows_to_csv)

CASES = [
    ("square-adini-n16", dict(domain="square", element="adini",
                              n_kind="constant", n_params=(16.0,), mu=1 / 15,
                              shifts=(3.5,), nev=4, track=(1, 2))),
    ("square-mz-n16", dict(domain="square", element="mz",
                           n_kind="constant", n_params=(16.0,), mu=1 / 15,
                           shifts=(3.5, 6.0), nev=5, track=(1, 2, 4))),
    ("square-mz-affine", dict(domain="square", element="mz", n_kind="affine",
                              n_params=(8.0, 1.0, -1.0), mu=1 / 9,
                              shifts=(8.0, 12.6), nev=4, track=(1, 2))),
    ("lshape-mz-n16", dict(domain="lshape", element="mz",
                           n_kind="constant", n_params=(16.0,), mu=1 / 15,
                           shifts=(2.2, 2.5), nev=4, track=(1, 2))),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results", type=pathlib.Path)
    ap.add_argument("--levels", default="8,16,32",
                    type=lambda s: tuple(int(v) for v in s.split(",")))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    combined = [CSV_HEADER]
    for name, kw in CASES:
        config = ExperimentConfig(levels=args.levels, **kw)
        reports = convergence_study(config)
        rows = reports_to_rows(config, reports)
        csv = rows_to_csv(rows)
        path = args.out_dir / f"study_{name}.csv"
        path.write_text(csv)
        combined.extend(csv.strip().split("\n")[1:])
        for rep in reports:
            slope = "n/a" if rep.slope is None else f"{rep.slope:.3f}"
            print(f"{name}: k{rep.index} slope={slope} "
                  f"reference={rep.reference:.7f} ({rep.reference_kind})")
    (args.out_dir / "studies.csv").write_text("\n".join(combined) + "\n")
    print(f"wrote {args.out_dir}/studies.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
