"""Confidence intervals and tests calibrated by the chi-square(1) limit."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .elsolver import ELSolution, ajel_statistic, default_a_n, el_solution, jel_statistic
from .errors import ParameterError, SolverFailure
from .ustat import PseudoValueSet

MAX_EXPANSIONS = 200

# Abramowitz & Stegun 26.2.23, |error| < 4.5e-4; refined below.
_AS_C = (2.515517, 0.802853, 0.010328)
_AS_D = (1.432788, 0.189269, 0.001308)
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


class Method(str, enum.Enum):
    JEL = "JEL"
    AJEL = "AJEL"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ParameterError(f"unknown method {value!r}; use JEL or AJEL") from None


def _upper_tail_start(q: float) -> float:
    t = math.sqrt(-2.0 * math.log(q))
    c0, c1, c2 = _AS_C
    d1, d2, d3 = _AS_D
    return t - (c0 + c1 * t + c2 * t * t) / (1.0 + d1 * t + d2 * t * t + d3 * t ** 3)


def norm_ppf(u: float) -> float:
    """Standard normal quantile.

    Rational starting value followed by Halley steps on ``erfc``; the
    result is accurate to a few ulps over ``(1e-300, 1 - 1e-16)``.
    """
    if not 0.0 < u < 1.0:
        raise ParameterError(f"probability must lie in (0, 1), got {u}")
    lower = u < 0.5
    tail = u if lower else 1.0 - u
    x = -_upper_tail_start(tail)
    # refine x as the lower-tail quantile of ``tail``, where erfc is accurate
    for _ in range(3):
        err = 0.5 * math.erfc(-x / _SQRT2) - tail
        t = err * _SQRT2PI * math.exp(0.5 * x * x)
        x -= t / (1.0 + 0.5 * x * t)
    return x if lower else -x


def chi2_df1_cdf(x: float) -> float:
    if x < 0 or math.isnan(x):
        raise ParameterError(f"x must be >= 0, got {x}")
    if math.isinf(x):
        return 1.0
    return math.erf(math.sqrt(0.5 * x))


def chi2_df1_sf(x: float) -> float:
    """Upper tail ``1 - chi2_df1_cdf(x)`` without cancellation."""
    if x < 0 or math.isnan(x):
        raise ParameterError(f"x must be >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    return math.erfc(math.sqrt(0.5 * x))


def chi2_df1_quantile(p: float) -> float:
    """Quantile of chi-square(1): the square of the normal quantile at (1+p)/2."""
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    # s solves erf(s) = p; start from the normal quantile, then Newton on
    # erf (small p) or erfc (p near 1) to avoid forming (1 + p) / 2.
    s = max(norm_ppf(0.5 + 0.5 * p) / _SQRT2, 0.0)
    if s == 0.0:
        s = 0.5 * math.sqrt(math.pi) * p
    for _ in range(3):
        if p < 0.5:
            err = math.erf(s) - p
        else:
            err = (1.0 - p) - math.erfc(s)
        s -= err / (2.0 / math.sqrt(math.pi) * math.exp(-s * s))
    return 2.0 * s * s


def statistic(pv: PseudoValueSet, theta: float, method="AJEL", a_n: float | None = None) -> ELSolution:
    method = Method.parse(method)
    if method is Method.JEL:
        return jel_statistic(pv, theta)
    return ajel_statistic(pv, theta, default_a_n(pv.n) if a_n is None else a_n)


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: Method
    point_estimate: float
    a_n: float | None = None
    status: str = "ok"
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def __contains__(self, theta) -> bool:
        return self.lower <= theta <= self.upper


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    p_value: float
    theta0: float
    method: Method
    status: str = "converged"


def _endpoint(wfun, u: float, side: int, step0: float, edge: float | None,
              q: float, xtol: float) -> tuple[float, dict]:
    """Walk from ``u`` toward ``side`` until ``W >= q``, then solve ``W = q``.

    ``edge`` caps the walk at the hull boundary (JEL only), where ``W`` is
    infinite. The bracket always holds one point with ``W < q`` and one
    with ``W >= q``.
    """
    diag = {"expansions": 0, "evaluations": 0, "hull_edge": False}

    def w(theta):
        diag["evaluations"] += 1
        return wfun(theta)

    inner, t = u, step0
    while True:
        outer = u + side * t
        if edge is not None and side * (outer - edge) >= 0:
            outer = edge
        w_outer = w(outer)
        if w_outer >= q:
            break
        inner = outer
        t *= 2.0
        diag["expansions"] += 1
        if diag["expansions"] > MAX_EXPANSIONS:
            raise SolverFailure("confidence bound search did not bracket the crossing")

    while math.isinf(w_outer):
        if abs(outer - inner) <= xtol:
            diag["hull_edge"] = True
            return outer, diag
        mid = 0.5 * (inner + outer)
        w_mid = w(mid)
        if w_mid >= q:
            outer, w_outer = mid, w_mid
        else:
            inner = mid
    if w_outer == q:
        return outer, diag
    root = brentq(lambda th: w(th) - q, inner, outer, xtol=xtol, maxiter=MAX_EXPANSIONS)
    return root, diag


def ajel_limit(n: int, a_n: float) -> float:
    """Limit of the adjusted statistic as theta goes to either infinity.

    Far from the data every centred value is about ``-theta`` and the
    adjustment point about ``a_n * theta``, so the statistic tends to the
    value for ``[-1] * n + [a_n]``. When this limit is below the quantile
    the confidence set is the whole line.
    """
    return el_solution(np.append(np.full(n, -1.0), a_n)).statistic


def confidence_interval(pv: PseudoValueSet, level: float = 0.95, method="AJEL",
                        a_n: float | None = None) -> ConfidenceInterval:
    """Invert the likelihood-ratio statistic at the chi-square(1) quantile.

    Each endpoint is found by doubling steps outward from the point
    estimate until the statistic reaches the quantile, then Brent's method
    on the bracket. JEL endpoints never leave ``[min V, max V]``.
    """
    method = Method.parse(method)
    q = chi2_df1_quantile(level)
    u = pv.u_stat
    if method is Method.AJEL and a_n is None:
        a_n = default_a_n(pv.n)
    used_a_n = a_n if method is Method.AJEL else None
    spread = pv.spread
    if spread == 0.0:
        return ConfidenceInterval(u, u, level, method, u, used_a_n,
                                  status="degenerate-zero-spread")

    def wfun(theta):
        return statistic(pv, theta, method, used_a_n).statistic

    step0 = max(float(np.std(pv.values)) / math.sqrt(pv.n), 1e-8 * (1.0 + abs(u)))
    xtol = 1e-12 * (1.0 + spread)
    lo_edge = hi_edge = None
    if method is Method.JEL:
        lo_edge, hi_edge = float(pv.values.min()), float(pv.values.max())
    elif ajel_limit(pv.n, used_a_n) < q:
        return ConfidenceInterval(-math.inf, math.inf, level, method, u, used_a_n,
                                  status="unbounded", diagnostics={"quantile": q})
    lower, dlo = _endpoint(wfun, u, -1, step0, lo_edge, q, xtol)
    upper, dhi = _endpoint(wfun, u, +1, step0, hi_edge, q, xtol)
    return ConfidenceInterval(
        lower, upper, level, method, u, used_a_n,
        diagnostics={"lower": dlo, "upper": dhi, "quantile": q},
    )


def test_theta(pv: PseudoValueSet, theta0: float, method="AJEL",
               a_n: float | None = None) -> TestResult:
    """Likelihood-ratio test of ``theta == theta0``."""
    method = Method.parse(method)
    sol = statistic(pv, theta0, method, a_n)
    return TestResult(sol.statistic, chi2_df1_sf(sol.statistic), float(theta0),
                      method, str(sol.status))


test_theta.__test__ = False
