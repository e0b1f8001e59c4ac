"""Monte Carlo coverage experiments.

Each replicate draws its data from an independent stream keyed by
``(seed, stream, replicate)`` through numpy's ``SeedSequence``, so results
do not depend on how replicates are split across worker processes.
"""
from __future__ import annotations

import csv
import io
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .elsolver import default_a_n
from .errors import AJELError, ParameterError
from .inference import Method, chi2_df1_cdf, confidence_interval, statistic
from .ustat import get_kernel, jackknife_pseudo_values

RNG_NAME = "numpy PCG64 seeded by SeedSequence(seed, spawn_key=(stream, replicate))"

PWM_CHI2_THETA = 0.5 + 1.0 / math.pi  # E[X F(X)] for X ~ chi-square(1), 0.81831


def sample_chi2_1(rng: np.random.Generator, size=None):
    """Chi-square(1) draws as squared standard normals."""
    z = rng.standard_normal(size)
    return z * z


def sample_exponential(rate: float, rng: np.random.Generator, size=None):
    """Exponential draws with the given rate by inversion, ``-log(u) / rate``."""
    if not rate > 0:
        raise ParameterError(f"rate must be positive, got {rate}")
    u = 1.0 - rng.random(size)  # uniform on (0, 1]
    return -np.log(u) / rate


@dataclass(frozen=True)
class Distribution:
    """A generator spec: ``chi2_1``, ``exponential(rate)`` or ``normal(mu, sigma)``."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        expected = {"chi2_1": 0, "exponential": 1, "normal": 2}
        if self.kind not in expected:
            raise ParameterError(f"unknown distribution {self.kind!r}")
        if len(self.params) != expected[self.kind]:
            raise ParameterError(f"{self.kind} takes {expected[self.kind]} parameter(s)")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "chi2_1":
            return sample_chi2_1(rng, size)
        if self.kind == "exponential":
            return sample_exponential(self.params[0], rng, size)
        mu, sigma = self.params
        return mu + sigma * rng.standard_normal(size)

    def to_dict(self):
        return {"kind": self.kind, "params": list(self.params)}


@dataclass(frozen=True)
class ExperimentSpec:
    """One row of a coverage table."""

    sizes: tuple
    generators: tuple
    kernel: str
    theta_true: float
    levels: tuple = (0.90, 0.95)
    replications: int = 1000
    methods: tuple = ("JEL", "AJEL")
    a_n: float | None = None
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        gens = tuple(
            g if isinstance(g, Distribution) else Distribution(g["kind"], tuple(g.get("params", ())))
            for g in self.generators
        )
        methods = tuple(str(Method.parse(m)) for m in self.methods)
        levels = tuple(float(lv) for lv in self.levels)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "levels", levels)
        kernel = get_kernel(self.kernel)
        if len(sizes) != len(kernel.arity) or len(gens) != len(sizes):
            raise ParameterError("sizes, generators and kernel arity disagree")
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if not all(0.0 < lv < 1.0 for lv in levels):
            raise ParameterError("levels must lie in (0, 1)")
        if not math.isfinite(self.theta_true):
            raise ParameterError("theta_true must be finite")
        if self.a_n is not None and not self.a_n > 0:
            raise ParameterError("a_n must be positive")

    @property
    def design(self) -> str:
        if len(self.sizes) == 1:
            return f"n={self.sizes[0]}"
        return "(" + ",".join(str(s) for s in self.sizes) + ")"

    def rng(self, replicate: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, replicate))
        return np.random.Generator(np.random.PCG64(ss))

    def draw(self, replicate: int):
        rng = self.rng(replicate)
        samples = [g.draw(rng, n) for g, n in zip(self.generators, self.sizes)]
        return samples[0] if len(samples) == 1 else tuple(samples)

    def to_dict(self):
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        d["generators"] = [g.to_dict() for g in self.generators]
        d["levels"] = list(self.levels)
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ParameterError(f"unknown spec fields: {sorted(unknown)}")
        d = dict(d)
        for key in ("sizes", "generators", "levels", "methods"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class CellResult:
    method: str
    level: float
    covered: int
    valid: int
    failed: int
    coverage_pct: float
    coverage_se_pct: float
    mean_length: float


@dataclass
class SimResult:
    spec: ExperimentSpec
    cells: list
    ordering_violations: int = 0
    rng: str = RNG_NAME
    elapsed: float = field(default=0.0, compare=False)

    def cell(self, method, level) -> CellResult:
        method = str(Method.parse(method))
        for c in self.cells:
            if c.method == method and c.level == level:
                return c
        raise KeyError((method, level))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "design": self.spec.design,
            "rng": self.rng,
            "ordering_violations": self.ordering_violations,
            "elapsed": self.elapsed,
            "cells": [asdict(c) for c in self.cells],
        }

    def csv_rows(self):
        for c in self.cells:
            yield {
                "design": self.spec.design,
                "method": c.method,
                "level": repr(c.level),
                "coverage_pct": repr(c.coverage_pct),
                "coverage_se_pct": repr(c.coverage_se_pct),
                "mean_length": repr(c.mean_length),
                "failed": c.failed,
                "replications": self.spec.replications,
                "seed": self.spec.seed,
            }


CSV_COLUMNS = ["design", "method", "level", "coverage_pct", "coverage_se_pct",
               "mean_length", "failed", "replications", "seed"]


def results_to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerows(res.csv_rows())
    return buf.getvalue()


def _ordering_ok(w_ajel: float, w_jel: float) -> bool:
    return w_ajel <= w_jel + 1e-9 * max(1.0, w_ajel) or math.isinf(w_jel)


def replicate(spec: ExperimentSpec, r: int) -> dict:
    """Run one replicate: intervals per (method, level) plus ordering checks.

    Returns ``{"intervals": {(method, level): (lower, upper) or None},
    "violations": int}``; ``None`` marks a failed interval.
    """
    data = spec.draw(r)
    pv = jackknife_pseudo_values(data, spec.kernel)
    a_n = spec.a_n if spec.a_n is not None else default_a_n(pv.n)
    out = {}
    for method in spec.methods:
        for level in spec.levels:
            try:
                ci = confidence_interval(pv, level, method, a_n)
            except AJELError:
                out[(method, level)] = None
            else:
                out[(method, level)] = (ci.lower, ci.upper)
    violations = 0
    if {"JEL", "AJEL"} <= set(spec.methods):
        w_jel = statistic(pv, spec.theta_true, "JEL").statistic
        w_ajel = statistic(pv, spec.theta_true, "AJEL", a_n).statistic
        violations += not _ordering_ok(w_ajel, w_jel)
        tol = 1e-9 * (1.0 + pv.spread)
        for level in spec.levels:
            j, a = out[("JEL", level)], out[("AJEL", level)]
            if a is None:
                violations += 1
            elif j is not None and not (a[0] <= j[0] + tol and j[1] <= a[1] + tol):
                violations += 1
    return {"intervals": out, "violations": violations}


def _run_chunk(spec: ExperimentSpec, start: int, stop: int) -> list:
    return [replicate(spec, r) for r in range(start, stop)]


def _chunks(total: int, parts: int):
    parts = max(1, min(parts, total))
    bounds = np.linspace(0, total, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _map_replicates(spec: ExperimentSpec, workers: int) -> list:
    chunks = _chunks(spec.replications, workers)
    if workers <= 1 or len(chunks) == 1:
        return _run_chunk(spec, 0, spec.replications)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [spec] * len(chunks), *zip(*chunks))
        return [rec for part in parts for rec in part]


def _aggregate(method: str, level: float, records: list, theta: float) -> CellResult:
    lengths, covered, failed = [], 0, 0
    for rec in records:
        ci = rec["intervals"][(method, level)]
        if ci is None:
            failed += 1
            continue
        covered += ci[0] <= theta <= ci[1]
        lengths.append(ci[1] - ci[0])
    valid = len(lengths)
    if valid == 0:
        nan = math.nan
        return CellResult(method, level, 0, 0, failed, nan, nan, nan)
    p = covered / valid
    return CellResult(
        method, level, covered, valid, failed,
        coverage_pct=100.0 * p,
        coverage_se_pct=100.0 * math.sqrt(p * (1.0 - p) / valid),
        mean_length=math.fsum(lengths) / valid,
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> SimResult:
    """Coverage and mean length of each (method, level) interval."""
    t0 = time.perf_counter()
    records = _map_replicates(spec, workers)
    cells = [
        _aggregate(m, lv, records, spec.theta_true)
        for m in spec.methods for lv in spec.levels
    ]
    return SimResult(
        spec, cells,
        ordering_violations=sum(rec["violations"] for rec in records),
        elapsed=time.perf_counter() - t0,
    )


def ks_distance_chi2_df1(stats) -> float:
    """Kolmogorov-Smirnov distance between a sample and chi-square(1)."""
    x = np.sort(np.asarray(stats, dtype=float))
    r = x.size
    cdf = np.array([chi2_df1_cdf(v) for v in x])
    i = np.arange(1, r + 1)
    return float(max(np.max(i / r - cdf), np.max(cdf - (i - 1) / r)))


def wilks_diagnostic(spec: ExperimentSpec, method="AJEL") -> tuple[float, np.ndarray]:
    """Statistics at ``theta_true`` over all replicates and their KS distance to chi-square(1)."""
    method = Method.parse(method)
    stats = np.empty(spec.replications)
    for r in range(spec.replications):
        pv = jackknife_pseudo_values(spec.draw(r), spec.kernel)
        stats[r] = statistic(pv, spec.theta_true, method, spec.a_n).statistic
    if np.all(stats == 0.0):
        warnings.warn("all statistics are zero (degenerate data); KS distance is 1",
                      RuntimeWarning, stacklevel=2)
    return ks_distance_chi2_df1(stats), stats


# -- presets ------------------------------------------------------------------

def table1_specs(seed: int = 0, replications: int = 1000) -> list:
    """Probability weighted moment of chi-square(1) data, kernel max(x, y)/2."""
    chi2 = Distribution("chi2_1")
    return [
        ExperimentSpec((n,), (chi2,), "pwm", PWM_CHI2_THETA,
                       replications=replications, seed=seed, stream=k)
        for k, n in enumerate((20, 30, 50))
    ]


def table2_specs(seed: int = 0, replications: int = 1000) -> list:
    """AUC P(X < Y) for X ~ Exp(1), Y ~ Exp(rate 1/9), theta = 0.9."""
    gx, gy = Distribution("exponential", (1.0,)), Distribution("exponential", (1.0 / 9.0,))
    return [
        ExperimentSpec(sizes, (gx, gy), "auc", 0.9,
                       replications=replications, seed=seed, stream=k)
        for k, sizes in enumerate(((10, 10), (15, 15), (35, 30)))
    ]


PRESETS = {"table1": table1_specs, "table2": table2_specs}


def preset_specs(name: str, seed: int = 0, quick: bool = False) -> list:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r} (known: {', '.join(PRESETS)})") from None
    return factory(seed, 100 if quick else 1000)


def run_specs(specs, workers: int = 1) -> list:
    return [run_experiment(s, workers) for s in specs]


# -- sanity checks on the generators ------------------------------------------

def mc_pwm_theta(draws: int = 1_000_000, seed: int = 0) -> float:
    """Monte Carlo estimate of E[X F(X)] for X ~ chi-square(1)."""
    x = sample_chi2_1(np.random.default_rng(seed), draws)
    return math.fsum(x * np.array([chi2_df1_cdf(v) for v in x])) / draws


def mc_auc_theta(draws: int = 1_000_000, seed: int = 0) -> float:
    """Monte Carlo estimate of P(Y > X), X ~ Exp(1), Y ~ Exp(1/9)."""
    rng = np.random.default_rng(seed)
    x = sample_exponential(1.0, rng, draws)
    y = sample_exponential(1.0 / 9.0, rng, draws)
    return float(np.mean(y > x))
