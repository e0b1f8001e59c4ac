"""Command-line front end.

Subcommands::

    ajel ci DATA.csv --kernel auc --method both --level 0.90 --level 0.95
    ajel test DATA.csv --kernel auc --theta0 0.5
    ajel simulate table1 --seed 42 [--quick] [--workers 4]

Exit codes: 0 success, 2 usage error (bad flags, kernel/data mismatch),
3 input file could not be parsed, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, inference, sims
from .errors import AJELError, DataFormatError, NumericError, SolverFailure
from .inference import Method
from .ustat import KERNELS, Sample, get_kernel, jackknife_pseudo_values

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


@dataclass
class DataFile:
    """Validated contents of a ``group,v1[,v2...]`` CSV file."""

    columns: list
    groups: list  # labels in order of first appearance
    rows: dict  # label -> list of value tuples
    path: str = ""

    def sample(self, label: str, columns=None) -> Sample:
        idx = self._column_index(columns)
        return Sample([[row[i] for i in idx] for row in self.rows[label]], label)

    def _column_index(self, columns):
        if not columns:
            return list(range(len(self.columns)))
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise DataFormatError(f"unknown column(s) {missing}; file has {self.columns}")
        return [self.columns.index(c) for c in columns]

    def ordered_groups(self, x_group: str | None = None) -> list:
        if x_group is None:
            return list(self.groups)
        if x_group not in self.groups:
            raise DataFormatError(f"--x-group {x_group!r} not among groups {self.groups}")
        return [x_group] + [g for g in self.groups if g != x_group]


def ingest_csv(path) -> DataFile:
    """Read and validate a data file.

    The header must start with ``group``; every later column holds finite
    reals. At most two distinct groups are allowed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from None
    reader = csv.reader(io.StringIO(text))
    header = None
    rows: dict = {}
    groups: list = []
    for line in reader:
        lineno = reader.line_num
        if not line or all(not cell.strip() for cell in line):
            continue
        cells = [cell.strip() for cell in line]
        if header is None:
            if cells[0].lower() != "group" or len(cells) < 2:
                raise DataFormatError(
                    f"{path}:{lineno}: header must be 'group,v1[,v2,...]', got {line}"
                )
            header = cells[1:]
            continue
        if len(cells) != len(header) + 1:
            raise DataFormatError(
                f"{path}:{lineno}: expected {len(header) + 1} fields, got {len(cells)}"
            )
        label = cells[0]
        try:
            values = tuple(float(c) for c in cells[1:])
        except ValueError:
            raise DataFormatError(f"{path}:{lineno}: non-numeric value in {line}") from None
        if not all(math.isfinite(v) for v in values):
            raise DataFormatError(f"{path}:{lineno}: non-finite value in {line}")
        if label not in rows:
            if len(groups) == 2:
                raise DataFormatError(
                    f"{path}:{lineno}: third group {label!r}; at most two are allowed"
                )
            groups.append(label)
            rows[label] = []
        rows[label].append(values)
    if header is None:
        raise DataFormatError(f"{path}: empty file")
    if not groups:
        raise DataFormatError(f"{path}: no data rows")
    return DataFile(header, groups, rows, str(path))


@dataclass
class RunConfig:
    kernel: str = "mean"
    methods: tuple = ("AJEL",)
    levels: tuple = (0.90, 0.95)
    a_n: float | None = None
    theta0: float | None = None
    x_group: str | None = None
    columns: list = field(default_factory=list)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        methods = ("JEL", "AJEL") if args.method == "both" else (args.method.upper(),)
        levels = tuple(args.level) if args.level else (0.90, 0.95)
        cols = [c.strip() for c in args.columns.split(",")] if args.columns else []
        return cls(args.kernel, methods, levels, args.an, getattr(args, "theta0", None),
                   args.x_group, cols)


class UsageError(AJELError):
    pass


def _pseudo_values(config: RunConfig, data: DataFile):
    kernel = get_kernel(config.kernel)
    order = data.ordered_groups(config.x_group)
    if kernel.two_sample:
        if len(order) != 2:
            raise UsageError(f"kernel {kernel.name!r} needs two groups; file has {len(order)}")
        samples = tuple(data.sample(g, config.columns) for g in order)
    else:
        if len(order) != 1:
            raise UsageError(f"kernel {kernel.name!r} needs one group; file has {len(order)}")
        samples = data.sample(order[0], config.columns)
    dims = {s.dim for s in (samples if isinstance(samples, tuple) else (samples,))}
    if kernel.columns is not None and dims != {kernel.columns}:
        raise UsageError(
            f"kernel {kernel.name!r} needs {kernel.columns} value column(s); "
            f"got {dims.pop()} (use --columns to select)"
        )
    sizes = [s.n for s in samples] if isinstance(samples, tuple) else [samples.n]
    return jackknife_pseudo_values(samples, kernel), order, sizes


def _header(command, config, order, sizes, pv):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "kernel": config.kernel,
        "groups": order,
        "sizes": sizes,
        "point_estimate": pv.u_stat,
    }


def cmd_ci(config: RunConfig, data: DataFile) -> dict:
    pv, order, sizes = _pseudo_values(config, data)
    report = _header("ci", config, order, sizes, pv)
    report["intervals"] = []
    for method in config.methods:
        for level in config.levels:
            ci = inference.confidence_interval(pv, level, method, config.a_n)
            report["intervals"].append({
                "method": str(ci.method), "level": level, "lower": ci.lower,
                "upper": ci.upper, "a_n": ci.a_n, "status": ci.status,
            })
    return report


def cmd_test(config: RunConfig, data: DataFile) -> dict:
    if config.theta0 is None:
        raise UsageError("--theta0 is required for 'test'")
    pv, order, sizes = _pseudo_values(config, data)
    report = _header("test", config, order, sizes, pv)
    report["theta0"] = config.theta0
    report["tests"] = []
    for method in config.methods:
        a_n = None
        if Method.parse(method) is Method.AJEL:
            a_n = config.a_n if config.a_n is not None else inference.default_a_n(pv.n)
        res = inference.test_theta(pv, config.theta0, method, a_n)
        report["tests"].append({
            "method": str(res.method), "statistic": res.statistic,
            "p_value": res.p_value, "a_n": a_n, "status": res.status,
        })
    return report


def cmd_simulate(target: str, seed: int = 0, quick: bool = False, workers: int = 1) -> dict:
    """Run a preset (``table1``, ``table2``) or a JSON file of experiment specs."""
    if target in sims.PRESETS:
        specs = sims.preset_specs(target, seed, quick)
    else:
        path = Path(target)
        if not path.exists():
            raise UsageError(f"unknown preset or missing spec file {target!r}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: {exc}") from None
        raw = raw if isinstance(raw, list) else [raw]
        specs = []
        for k, d in enumerate(raw):
            d = dict(d)
            d.setdefault("seed", seed)
            d.setdefault("stream", k)
            if quick:
                d["replications"] = max(1, int(d.get("replications", 1000)) // 10)
            specs.append(sims.ExperimentSpec.from_dict(d))
    results = sims.run_specs(specs, workers)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "target": target,
        "seed": seed,
        "quick": quick,
        "results": [r.to_dict() for r in results],
        "_results": results,
    }


# -- rendering ----------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return "-"
    return f"{x:.7g}" if isinstance(x, float) else str(x)


def render(report: dict, fmt: str) -> str:
    public = {k: v for k, v in report.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(public, indent=2) + "\n"
    cmd = report["command"]
    if cmd == "simulate":
        if fmt == "csv":
            return sims.results_to_csv(report["_results"])
        lines = [f"{'design':<10} {'method':<5} {'level':>5} {'coverage%':>10} "
                 f"{'(se)':>7} {'length':>10} {'failed':>6}"]
        for res in report["_results"]:
            for c in res.cells:
                lines.append(
                    f"{res.spec.design:<10} {c.method:<5} {c.level:>5.2f} "
                    f"{c.coverage_pct:>10.1f} {'(%.2f)' % c.coverage_se_pct:>7} "
                    f"{c.mean_length:>10.4f} {c.failed:>6}"
                )
        return "\n".join(lines) + "\n"
    rows_key = "intervals" if cmd == "ci" else "tests"
    rows = report[rows_key]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: repr(v) if isinstance(v, float) else v for k, v in r.items()}
                         for r in rows)
        return buf.getvalue()
    sizes = " x ".join(f"{g}={n}" for g, n in zip(report["groups"], report["sizes"]))
    lines = [f"kernel {report['kernel']}, {sizes}",
             f"point estimate: {report['point_estimate']:.7f}"]
    if cmd == "ci":
        for r in rows:
            note = "" if r["status"] == "ok" else f"  [{r['status']}]"
            lines.append(f"{r['method']:<5} {100 * r['level']:g}% CI: "
                         f"({r['lower']:.4f}, {r['upper']:.4f}){note}")
    else:
        lines.append(f"theta0 = {report['theta0']:g}")
        for r in rows:
            note = "" if r["status"] == "converged" else f"  [{r['status']}]"
            lines.append(f"{r['method']:<5} -2logR = {_fmt(r['statistic'])}  "
                         f"p = {_fmt(r['p_value'])}{note}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ajel", description="Jackknife empirical likelihood for U-statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("text", "json", "csv"), default="text")
    out.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("data", help="CSV file with header group,v1[,v2,...]")
    common.add_argument("--kernel", default="mean", choices=sorted(KERNELS))
    common.add_argument("--method", default="ajel", choices=("jel", "ajel", "both"))
    common.add_argument("--level", type=float, action="append",
                        help="confidence level (repeatable; default 0.90 and 0.95)")
    common.add_argument("--an", type=float, help="adjustment level a_n (default log(n)/2)")
    common.add_argument("--x-group", help="group label used as the first (X) sample")
    common.add_argument("--columns", help="comma-separated value columns to use")

    sub.add_parser("ci", parents=[common, out], help="confidence intervals")
    p_test = sub.add_parser("test", parents=[common, out], help="test theta = theta0")
    p_test.add_argument("--theta0", type=float, required=True)

    p_sim = sub.add_parser("simulate", parents=[out], help="coverage simulation")
    p_sim.add_argument("target", help="preset name (table1, table2) or JSON spec file")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--quick", action="store_true", help="divide replications by 10")
    p_sim.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            report = cmd_simulate(args.target, args.seed, args.quick, args.workers)
        else:
            config = RunConfig.from_args(args)
            data = ingest_csv(args.data)
            handler = cmd_ci if args.command == "ci" else cmd_test
            report = handler(config, data)
        text = render(report, args.format)
    except DataFormatError as exc:
        print(f"ajel: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericError, SolverFailure) as exc:
        print(f"ajel: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except AJELError as exc:
        print(f"ajel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
