"""Slow, independent reference computations used to freeze expected values.

Nothing here imports the package under test.
"""
import itertools
import math


def u_stat_brute(xs, h, m):
    terms = [h(*c) for c in itertools.combinations(xs, m)]
    return math.fsum(terms) / len(terms)


def u_stat_two_brute(xs, ys, h):
    terms = [h(x, y) for x in xs for y in ys]
    return math.fsum(terms) / len(terms)


def pseudo_values_brute(xs, h, m):
    n = len(xs)
    u = u_stat_brute(xs, h, m)
    return [n * u - (n - 1) * u_stat_brute(xs[:i] + xs[i + 1:], h, m) for i in range(n)]


def pseudo_values_two_brute(xs, ys, h):
    n = len(xs) + len(ys)
    u = u_stat_two_brute(xs, ys, h)
    out = [n * u - (n - 1) * u_stat_two_brute(xs[:i] + xs[i + 1:], ys, h)
           for i in range(len(xs))]
    out += [n * u - (n - 1) * u_stat_two_brute(xs, ys[:j] + ys[j + 1:], h)
            for j in range(len(ys))]
    return out


def el_status(g):
    lo, hi = min(g), max(g)
    if lo == 0 and hi == 0:
        return "degenerate-zero-spread"
    if not (lo < 0 < hi):
        return "outside-hull"
    return "converged"


def el_oracle(g, grid=4001):
    """-2 log EL ratio by a dense grid over the admissible multipliers
    followed by plain bisection on the sign of the estimating function.

    Returns ``(statistic, lam, status)``.
    """
    status = el_status(g)
    if status == "degenerate-zero-spread":
        return 0.0, 0.0, status
    if status == "outside-hull":
        return math.inf, math.nan, status
    lo, hi = -1.0 / max(g), -1.0 / min(g)

    def f(lam):
        return math.fsum(x / (1.0 + lam * x) for x in g)

    # interior grid on a cosine-clustered scale, denser near both poles
    ts = [0.5 - 0.5 * math.cos(math.pi * (k + 0.5) / grid) for k in range(grid)]
    pts = [lo + (hi - lo) * t for t in ts]
    vals = [f(p) for p in pts]
    a, b = lo, hi
    for p, v in zip(pts, vals):
        if v > 0:
            a = p
        else:
            b = p
            break
    for _ in range(300):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if f(mid) > 0:
            a = mid
        else:
            b = mid
    lam = 0.5 * (a + b)
    stat = 2.0 * math.fsum(math.log1p(lam * x) for x in g)
    return stat, lam, status


def chi2_df1_quantile_bisect(p):
    """chi-square(1) quantile by bisection on erf(sqrt(x/2)) = p.

    The upper tail is compared through erfc so p near 1 keeps its digits.
    """
    a, b = 0.0, 200.0
    for _ in range(400):
        mid = 0.5 * (a + b)
        s = math.sqrt(mid / 2)
        below = math.erf(s) < p if p < 0.5 else math.erfc(s) > 1.0 - p
        if below:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)
