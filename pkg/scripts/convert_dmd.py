"""Convert a locally obtained copy of the carrier study table to CSV.

The table is not shipped with the package. Given a whitespace or comma
separated text file with one row per blood sample, this writes the
``group,ck,h`` layout read by ``ajel ci``. Column positions are 0-based
and default to a layout of ``id, ..., carrier flag, ck, h``; adjust them
to match your copy.

    python scripts/convert_dmd.py raw.txt dmd.csv --flag-col 1 --ck-col 4 --h-col 5
"""
import argparse
import csv
import re


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("raw")
    ap.add_argument("output")
    ap.add_argument("--flag-col", type=int, required=True,
                    help="column holding the carrier indicator")
    ap.add_argument("--carrier-value", default="1",
                    help="flag value that marks a carrier (others are noncarriers)")
    ap.add_argument("--ck-col", type=int, required=True)
    ap.add_argument("--h-col", type=int, required=True)
    ap.add_argument("--missing", default="NA,.,-9,-9.9,*",
                    help="comma-separated tokens treated as missing; such rows are dropped")
    args = ap.parse_args(argv)
    missing = set(args.missing.split(","))
    rows = {"noncarrier": [], "carrier": []}
    dropped = 0
    with open(args.raw, encoding="utf-8") as fh:
        for line in fh:
            fields = [f for f in re.split(r"[,\s]+", line.strip()) if f]
            if not fields:
                continue
            try:
                flag = fields[args.flag_col]
                ck, h = fields[args.ck_col], fields[args.h_col]
            except IndexError:
                dropped += 1
                continue
            if ck in missing or h in missing:
                dropped += 1
                continue
            try:
                ck, h = float(ck), float(h)
            except ValueError:  # header or comment line
                dropped += 1
                continue
            group = "carrier" if flag == args.carrier_value else "noncarrier"
            rows[group].append((ck, h))
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "ck", "h"])
        for group in ("noncarrier", "carrier"):
            for ck, h in rows[group]:
                w.writerow([group, f"{ck:g}", f"{h:g}"])
    print(f"noncarrier={len(rows['noncarrier'])} carrier={len(rows['carrier'])} "
          f"dropped={dropped}")


if __name__ == "__main__":
    main()
