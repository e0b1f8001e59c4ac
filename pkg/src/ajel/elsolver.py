"""Empirical likelihood for a scalar mean constraint.

Given centred values ``g_i``, the empirical likelihood ratio maximises
``sum(log(N p_i))`` over probability vectors with ``sum(p_i g_i) == 0``.
The optimum is ``p_i = 1 / (N (1 + lam g_i))`` where ``lam`` is the root of

    f(lam) = sum(g_i / (1 + lam g_i))

on ``(-1/max(g), -1/min(g))``. ``f`` is strictly decreasing there, so the
root is unique whenever ``min(g) < 0 < max(g)``.

The adjusted form appends one extra point ``-a_n * mean(g)``, which puts
zero strictly inside the hull for every hypothesised value.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericError, ParameterError, SolverFailure
from .ustat import PseudoValueSet

MAX_ITER = 200


class Status(str, enum.Enum):
    CONVERGED = "converged"
    OUTSIDE_HULL = "outside-hull"
    DEGENERATE = "degenerate-zero-spread"

    def __str__(self):
        return self.value


class LambdaRoot(NamedTuple):
    lam: float
    status: Status
    iterations: int


@dataclass(frozen=True)
class ELSolution:
    """Solution of the inner empirical likelihood problem.

    ``statistic`` is ``-2 * log_ratio`` and is ``inf`` when zero lies
    outside the hull of the values. ``weights`` is ``None`` in that case.
    """

    lam: float
    weights: np.ndarray | None
    log_ratio: float
    statistic: float
    status: Status
    iterations: int


def _as_vector(g) -> np.ndarray:
    g = np.asarray(g, dtype=float).reshape(-1)
    if g.size == 0:
        raise ParameterError("need at least one value")
    if not np.all(np.isfinite(g)):
        raise NumericError("centred values must be finite")
    return g


def _solve_unit(g: np.ndarray) -> LambdaRoot:
    """Root finder for ``g`` already scaled to ``max(|g|) == 1``."""
    gmin, gmax = float(g.min()), float(g.max())
    ftol = 1e-10 * g.size
    f0 = math.fsum(g)
    # f(0) within rounding of zero: theta sits at the mean of the values
    if abs(f0) <= 4.0 * np.finfo(float).eps * math.fsum(np.abs(g)):
        return LambdaRoot(0.0, Status.CONVERGED, 0)
    # a: f > 0 side, b: f < 0 side; the pole end of the bracket is open
    if f0 > 0.0:
        pole, a, b = -1.0 / gmin, 0.0, -1.0 / gmin
    else:
        pole, a, b = -1.0 / gmax, -1.0 / gmax, 0.0
    if not math.isfinite(pole):
        raise NumericError("centred values span more than the floating-point range")
    lam, prev_step, stalls = 0.0, math.inf, 0
    for it in range(1, MAX_ITER + 1):
        d = 1.0 + lam * g
        if np.any(d <= 0.0):
            fval = math.copysign(math.inf, -pole)  # rounded onto the pole
            step = math.nan
        else:
            r = g / d
            fval = float(r.sum())
            curv = float(np.dot(r, r))
            step = fval / curv if curv > 0.0 else math.nan
            if abs(fval) <= ftol and abs(step) <= 1e-12 * abs(lam) + 1e-15:
                return LambdaRoot(lam, Status.CONVERGED, it)
        if fval > 0.0:
            a = lam
        elif fval < 0.0:
            b = lam
        else:
            return LambdaRoot(lam, Status.CONVERGED, it)
        if abs(b - a) <= 1e-14 * (1.0 + abs(lam)):
            return LambdaRoot(lam, Status.CONVERGED, it)
        nxt = lam + step
        # Newton creeps when the root sits far out toward a pole: steps
        # stop shrinking. Two such steps in a row force a fallback step.
        stalls = stalls + 1 if abs(step) > 0.5 * abs(prev_step) else 0
        prev_step = step
        if stalls >= 2 or not (min(a, b) < nxt < max(a, b)):
            stalls, prev_step = 0, math.inf
            # geometric mean of the distances to the pole, floored to keep
            # the open end representable
            near, far = sorted((abs(pole - a), abs(pole - b)))
            near = max(near, abs(pole) * 1e-15)
            if far > 4.0 * near:
                dist = math.sqrt(near) * math.sqrt(far)
            else:
                dist = 0.5 * (near + far)
            nxt = pole - math.copysign(dist, pole)
        lam = nxt
    raise SolverFailure(f"lambda iteration did not converge in {MAX_ITER} steps")


def _solve(g: np.ndarray):
    """Classify ``g`` and solve on the unit scale; returns ``(root, scale)``."""
    gmin, gmax = float(g.min()), float(g.max())
    if gmin == 0.0 and gmax == 0.0:
        return LambdaRoot(0.0, Status.DEGENERATE, 0), 1.0
    if not (gmin < 0.0 < gmax):
        return LambdaRoot(math.nan, Status.OUTSIDE_HULL, 0), 1.0
    scale = max(gmax, -gmin)
    return _solve_unit(g / scale), scale


def solve_lambda(g) -> LambdaRoot:
    """Find the Lagrange multiplier for centred values ``g``.

    Safeguarded Newton iteration on ``f(lam)`` inside a bracket that
    shrinks on every evaluation. The sign of ``f(0) = sum(g)`` fixes which
    half of the admissible interval holds the root; when a Newton step
    leaves the bracket or stalls, the fallback bisects the distance to
    that half's pole geometrically, so roots close to a pole are reached
    in a few dozen steps. The iteration runs on ``g / max(|g|)``.

    Returns
    -------
    LambdaRoot
        ``lam`` is ``nan`` when the status is ``OUTSIDE_HULL``.
    """
    root, scale = _solve(_as_vector(g))
    return root._replace(lam=root.lam / scale)


def el_solution(g) -> ELSolution:
    """Weights, multiplier and ``-2 log R`` for centred values ``g``."""
    g = _as_vector(g)
    root, scale = _solve(g)
    n = g.size
    if root.status is Status.OUTSIDE_HULL:
        return ELSolution(math.nan, None, -math.inf, math.inf, root.status, root.iterations)
    if root.status is Status.DEGENERATE:
        return ELSolution(0.0, np.full(n, 1.0 / n), 0.0, 0.0, root.status, 0)
    lg = root.lam * (g / scale)
    w = 1.0 / (1.0 + lg)
    weights = w / w.sum()
    log_ratio = -math.fsum(np.log1p(lg))
    return ELSolution(
        root.lam / scale, weights, min(log_ratio, 0.0), max(-2.0 * log_ratio, 0.0),
        root.status, root.iterations,
    )


def default_a_n(n: int) -> float:
    """Default adjustment level ``log(n) / 2``, floored at 1e-8."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return max(math.log(n) / 2.0, 1e-8)


def centred_values(pv: PseudoValueSet, theta: float, a_n: float | None = None) -> np.ndarray:
    """``V_i - theta``, plus the adjustment point when ``a_n`` is given."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise NumericError(f"theta must be finite, got {theta}")
    g = pv.values - theta
    if a_n is None:
        return g
    a_n = float(a_n)
    if not (a_n > 0.0 and math.isfinite(a_n)):
        raise ParameterError(f"a_n must be positive and finite, got {a_n}")
    return np.append(g, -a_n * (pv.u_stat - theta))


def _at_estimate(pv: PseudoValueSet, extra: int) -> ELSolution:
    # uniform weights meet the constraint exactly when theta equals the
    # mean of the pseudo-values; skip the solver and its rounding noise
    n = pv.n + extra
    return ELSolution(0.0, np.full(n, 1.0 / n), 0.0, 0.0, Status.CONVERGED, 0)


def jel_statistic(pv: PseudoValueSet, theta: float) -> ELSolution:
    if theta == pv.u_stat and pv.spread > 0.0:
        return _at_estimate(pv, 0)
    return el_solution(centred_values(pv, theta))


def ajel_statistic(pv: PseudoValueSet, theta: float, a_n: float | None = None) -> ELSolution:
    """Adjusted statistic; ``a_n`` defaults to ``default_a_n(pv.n)``."""
    if a_n is None:
        a_n = default_a_n(pv.n)
    g = centred_values(pv, theta, a_n)  # validates theta and a_n
    if theta == pv.u_stat and pv.spread > 0.0:
        return _at_estimate(pv, 1)
    return el_solution(g)
