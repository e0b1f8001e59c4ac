"""Write a synthetic two-group CK/H data file for the test suite.

The shape follows the carrier study layout: 134 noncarrier and 75 carrier
rows, columns ``ck`` and ``h``. Values are lognormal and carry no
information about the real measurements.

    python scripts/make_synthetic_dmd.py tests/data/dmd_synthetic.csv
"""
import argparse
import csv

import numpy as np


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("output")
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    groups = [("noncarrier", 134, (3.6, 0.45), (4.4, 0.12)),
              ("carrier", 75, (4.6, 0.75), (4.6, 0.14))]
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "ck", "h"])
        for label, n, (m1, s1), (m2, s2) in groups:
            ck = np.exp(rng.normal(m1, s1, n)).round(0)
            h = np.exp(rng.normal(m2, s2, n)).round(1)
            for a, b in zip(ck, h):
                w.writerow([label, f"{a:g}", f"{b:g}"])


if __name__ == "__main__":
    main()
