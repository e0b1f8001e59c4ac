"""U-statistics and their jackknife pseudo-values.

A one-sample U-statistic of degree ``m`` averages a symmetric kernel over
all ``m``-subsets of the sample; a two-sample statistic averages over every
pairing of an ``m1``-subset of ``X`` with an ``m2``-subset of ``Y``.
Subsets are enumerated in lexicographic index order and accumulated with
``math.fsum`` (exactly rounded compensated summation), so results are
bit-reproducible for a fixed input ordering.

The jackknife pseudo-values are ``V_i = n U_n - (n - 1) U_{n-1}^{(-i)}``.
For two samples ``n = n1 + n2`` and index ``i`` runs over the pooled
sample, ``X`` first.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import NumericError, ParameterError, SizeError

MAX_DEGREE = 4


@dataclass(frozen=True)
class Sample:
    """An ordered set of ``n`` finite observations of dimension ``d``.

    ``values`` is stored as a read-only ``(n, d)`` float array; a 1-D
    input is treated as ``n`` scalar observations.
    """

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ParameterError(f"sample must be 1-D or 2-D, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise SizeError("sample must be nonempty")
        if not np.all(np.isfinite(arr)):
            bad = int(np.argwhere(~np.isfinite(arr))[0, 0])
            raise NumericError(f"sample {self.label!r}: observation {bad} is not finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return self.n

    def drop(self, i: int) -> "Sample":
        return Sample(np.delete(self.values, i, axis=0), self.label)


def as_sample(data, label: str = "") -> Sample:
    return data if isinstance(data, Sample) else Sample(data, label)


@dataclass(frozen=True)
class Kernel:
    """A symmetric kernel defining a U-statistic.

    Parameters
    ----------
    name : str
        Registry name.
    arity : tuple of int
        ``(m,)`` for a one-sample kernel, ``(m1, m2)`` for two samples.
    func : callable
        ``func(*obs)`` with ``sum(arity)`` 1-D observation arrays (the X
        block first for two-sample kernels); returns a float.
    pairwise : callable, optional
        Vectorised form for total degree 2: ``pairwise(A, B)[i, j] ==
        func(A[i], B[j])``. Enables the O(n^2) leave-one-out path.
    columns : int, optional
        Required observation dimension, if any.
    """

    name: str
    arity: tuple
    func: Callable[..., float]
    pairwise: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    columns: int | None = None
    doc: str = field(default="", compare=False)

    def __post_init__(self):
        arity = tuple(int(m) for m in self.arity)
        if len(arity) not in (1, 2) or min(arity) < 1:
            raise ParameterError(f"kernel {self.name!r}: invalid arity {self.arity}")
        if sum(arity) > MAX_DEGREE:
            raise ParameterError(
                f"kernel {self.name!r}: total degree {sum(arity)} exceeds {MAX_DEGREE}"
            )
        object.__setattr__(self, "arity", arity)

    @property
    def two_sample(self) -> bool:
        return len(self.arity) == 2

    def __call__(self, *obs) -> float:
        return self.func(*obs)


# -- kernel registry ---------------------------------------------------------

KERNELS: dict[str, Kernel] = {}


def register_kernel(kernel: Kernel, replace: bool = False) -> Kernel:
    if kernel.name in KERNELS and not replace:
        raise ParameterError(f"kernel {kernel.name!r} already registered")
    KERNELS[kernel.name] = kernel
    return kernel


def get_kernel(kernel: Union[str, Kernel]) -> Kernel:
    if isinstance(kernel, Kernel):
        return kernel
    try:
        return KERNELS[kernel]
    except KeyError:
        known = ", ".join(sorted(KERNELS))
        raise ParameterError(f"unknown kernel {kernel!r} (known: {known})") from None


register_kernel(Kernel(
    "mean", (1,), lambda z: float(z[0]), columns=1,
    doc="h(z) = z; one sample, 1 column. U_n is the sample mean.",
))
register_kernel(Kernel(
    "pwm", (2,), lambda x, y: 0.5 * max(x[0], y[0]),
    pairwise=lambda a, b: 0.5 * np.maximum.outer(a[:, 0], b[:, 0]),
    columns=1,
    doc="h(x, y) = max(x, y) / 2; one sample, 1 column. Estimates E[X F(X)].",
))
register_kernel(Kernel(
    "variance", (2,), lambda x, y: 0.5 * (x[0] - y[0]) ** 2,
    pairwise=lambda a, b: 0.5 * np.subtract.outer(a[:, 0], b[:, 0]) ** 2,
    columns=1,
    doc="h(x, y) = (x - y)^2 / 2; one sample, 1 column. U_n is the unbiased variance.",
))
register_kernel(Kernel(
    "auc", (1, 1), lambda x, y: float(y[0] > x[0]),
    pairwise=lambda a, b: np.greater.outer(b[:, 0], a[:, 0]).T.astype(float),
    columns=1,
    doc="h(x; y) = I(y > x), ties count 0; two samples, 1 column. Estimates P(X < Y).",
))
register_kernel(Kernel(
    "auc-midrank", (1, 1),
    lambda x, y: float(y[0] > x[0]) + 0.5 * float(y[0] == x[0]),
    pairwise=lambda a, b: (
        np.less.outer(a[:, 0], b[:, 0]) + 0.5 * np.equal.outer(a[:, 0], b[:, 0])
    ),
    columns=1,
    doc="h(x; y) = I(y > x) + I(y = x) / 2; two samples, 1 column.",
))
# I(.) is read as the comparison indicator I(x < y) in both columns, so the
# target is P(X1 < Y1) - P(X2 < Y2).
register_kernel(Kernel(
    "auc-diff", (1, 1),
    lambda x, y: float(x[0] < y[0]) - float(x[1] < y[1]),
    pairwise=lambda a, b: (
        np.less.outer(a[:, 0], b[:, 0]).astype(float)
        - np.less.outer(a[:, 1], b[:, 1])
    ),
    columns=2,
    doc=(
        "h(x; y) = I(x1 < y1) - I(x2 < y2); two samples, 2 columns. "
        "Estimates the AUC difference between column 1 and column 2."
    ),
))


# -- evaluation ----------------------------------------------------------------

@dataclass(frozen=True)
class Design:
    """Sample sizes and kernel degrees behind a set of pseudo-values."""

    sizes: tuple
    arity: tuple

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def two_sample(self) -> bool:
        return len(self.sizes) == 2


@dataclass(frozen=True)
class PseudoValueSet:
    """Jackknife pseudo-values ``values`` whose mean is ``u_stat``."""

    values: np.ndarray
    u_stat: float
    design: Design

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "u_stat", float(self.u_stat))
        if vals.size != self.design.n:
            raise SizeError(f"{vals.size} pseudo-values for design of size {self.design.n}")
        if not np.all(np.isfinite(vals)):
            raise NumericError("pseudo-values must be finite")
        scale = max(1.0, float(np.max(np.abs(vals))))
        if abs(math.fsum(vals) / vals.size - self.u_stat) > 1e-10 * scale:
            raise NumericError("pseudo-value mean disagrees with the U-statistic")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "PseudoValueSet":
        """Wrap raw values, e.g. pseudo-values computed elsewhere."""
        vals = np.asarray(values, dtype=float).reshape(-1)
        if vals.size == 0:
            raise SizeError("need at least one value")
        return cls(vals, math.fsum(vals) / vals.size, Design((vals.size,), (1,)))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def spread(self) -> float:
        return float(self.values.max() - self.values.min())


def _check_columns(kernel: Kernel, *samples: Sample):
    if kernel.columns is None:
        return
    for s in samples:
        if s.dim != kernel.columns:
            raise ParameterError(
                f"kernel {kernel.name!r} needs {kernel.columns} column(s); "
                f"sample {s.label!r} has {s.dim}"
            )


def _finite(value: float, where) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NumericError(f"kernel returned {value} on subset {where}")
    return value


def _u_one_full(z: np.ndarray, kernel: Kernel) -> float:
    (m,) = kernel.arity
    terms = (
        _finite(kernel.func(*z[list(idx)]), idx)
        for idx in itertools.combinations(range(len(z)), m)
    )
    return math.fsum(terms) / math.comb(len(z), m)


def _u_two_full(x: np.ndarray, y: np.ndarray, kernel: Kernel) -> float:
    m1, m2 = kernel.arity
    terms = (
        _finite(kernel.func(*x[list(ix)], *y[list(iy)]), (ix, iy))
        for ix in itertools.combinations(range(len(x)), m1)
        for iy in itertools.combinations(range(len(y)), m2)
    )
    return math.fsum(terms) / (math.comb(len(x), m1) * math.comb(len(y), m2))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: Kernel) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):  # reported below
        mat = np.asarray(kernel.pairwise(a, b), dtype=float)
    if not np.all(np.isfinite(mat)):
        i, j = np.argwhere(~np.isfinite(mat))[0]
        raise NumericError(f"kernel returned {mat[i, j]} on subset {(int(i), int(j))}")
    return mat


def eval_u_statistic(sample, kernel) -> float:
    """One-sample U-statistic of ``sample`` under ``kernel``."""
    sample = as_sample(sample)
    kernel = get_kernel(kernel)
    if kernel.two_sample:
        raise ParameterError(f"kernel {kernel.name!r} is two-sample")
    _check_columns(kernel, sample)
    (m,) = kernel.arity
    if sample.n < m:
        raise SizeError(f"sample size {sample.n} < kernel degree {m}")
    z = sample.values
    if m == 2 and kernel.pairwise is not None:
        mat = _kernel_matrix(z, z, kernel)
        return math.fsum(mat[np.triu_indices(len(z), 1)]) / math.comb(len(z), 2)
    return _u_one_full(z, kernel)


def eval_u_statistic_two(sx, sy, kernel) -> float:
    """Two-sample U-statistic of ``(sx, sy)`` under ``kernel``."""
    sx, sy = as_sample(sx, "x"), as_sample(sy, "y")
    kernel = get_kernel(kernel)
    if not kernel.two_sample:
        raise ParameterError(f"kernel {kernel.name!r} is one-sample")
    _check_columns(kernel, sx, sy)
    m1, m2 = kernel.arity
    if sx.n < m1 or sy.n < m2:
        raise SizeError(f"sample sizes ({sx.n}, {sy.n}) below kernel degrees ({m1}, {m2})")
    if kernel.arity == (1, 1) and kernel.pairwise is not None:
        return math.fsum(_kernel_matrix(sx.values, sy.values, kernel).ravel()) / (sx.n * sy.n)
    return _u_two_full(sx.values, sy.values, kernel)


def _pseudo(n: int, u: float, loo: np.ndarray) -> np.ndarray:
    return n * u - (n - 1) * loo


def _jackknife_one(sample: Sample, kernel: Kernel, method: str) -> PseudoValueSet:
    (m,) = kernel.arity
    n = sample.n
    if n < m + 1:
        raise SizeError(
            f"leave-one-out needs n >= m + 1; have n={n}, m={m}"
        )
    z = sample.values
    design = Design((n,), kernel.arity)
    fast = method == "fast" or (method == "auto" and (m == 1 or kernel.pairwise is not None))
    if fast and m == 1:
        vals = np.array([_finite(kernel.func(row), (i,)) for i, row in enumerate(z)])
        return PseudoValueSet(vals, math.fsum(vals) / n, design)
    if fast:
        if m != 2 or kernel.pairwise is None:
            raise ParameterError(f"no fast leave-one-out path for kernel {kernel.name!r}")
        mat = _kernel_matrix(z, z, kernel)
        total = math.fsum(mat[np.triu_indices(n, 1)])
        u = total / math.comb(n, 2)
        off = mat.copy()
        np.fill_diagonal(off, 0.0)
        loo = (total - off.sum(axis=1)) / math.comb(n - 1, 2)
        return PseudoValueSet(_pseudo(n, u, loo), u, design)
    u = _u_one_full(z, kernel)
    loo = np.array([_u_one_full(np.delete(z, i, axis=0), kernel) for i in range(n)])
    return PseudoValueSet(_pseudo(n, u, loo), u, design)


def _jackknife_two(sx: Sample, sy: Sample, kernel: Kernel, method: str) -> PseudoValueSet:
    m1, m2 = kernel.arity
    n1, n2 = sx.n, sy.n
    if n1 < m1 + 1 or n2 < m2 + 1:
        raise SizeError(
            f"leave-one-out needs n1 >= m1 + 1 and n2 >= m2 + 1; "
            f"have (n1, n2) = ({n1}, {n2}), (m1, m2) = ({m1}, {m2})"
        )
    n = n1 + n2
    x, y = sx.values, sy.values
    design = Design((n1, n2), kernel.arity)
    fast = method == "fast" or (method == "auto" and kernel.pairwise is not None)
    if fast:
        if kernel.arity != (1, 1) or kernel.pairwise is None:
            raise ParameterError(f"no fast leave-one-out path for kernel {kernel.name!r}")
        mat = _kernel_matrix(x, y, kernel)
        total = math.fsum(mat.ravel())
        u = total / (n1 * n2)
        loo = np.concatenate([
            (total - mat.sum(axis=1)) / ((n1 - 1) * n2),
            (total - mat.sum(axis=0)) / (n1 * (n2 - 1)),
        ])
        return PseudoValueSet(_pseudo(n, u, loo), u, design)
    u = _u_two_full(x, y, kernel)
    loo = np.array(
        [_u_two_full(np.delete(x, i, axis=0), y, kernel) for i in range(n1)]
        + [_u_two_full(x, np.delete(y, j, axis=0), kernel) for j in range(n2)]
    )
    return PseudoValueSet(_pseudo(n, u, loo), u, design)


def jackknife_pseudo_values(data, kernel, method: str = "auto") -> PseudoValueSet:
    """Jackknife pseudo-values of a one- or two-sample U-statistic.

    Parameters
    ----------
    data : Sample, array_like, or pair of them
        One sample, or ``(x, y)`` for a two-sample kernel.
    kernel : str or Kernel
    method : {"auto", "fast", "full"}
        ``"full"`` recomputes every leave-one-out statistic from scratch.
        ``"fast"`` uses row/column sums of the kernel matrix and is
        available for degree-1 kernels and degree-2 kernels with a
        ``pairwise`` form. ``"auto"`` picks ``"fast"`` when possible.

    Returns
    -------
    PseudoValueSet
    """
    kernel = get_kernel(kernel)
    if method not in ("auto", "fast", "full"):
        raise ParameterError(f"unknown method {method!r}")
    if kernel.two_sample:
        if isinstance(data, Sample) or len(data) != 2:
            raise ParameterError(f"kernel {kernel.name!r} needs two samples")
        sx, sy = as_sample(data[0], "x"), as_sample(data[1], "y")
        _check_columns(kernel, sx, sy)
        return _jackknife_two(sx, sy, kernel, method)
    sample = as_sample(data)
    _check_columns(kernel, sample)
    return _jackknife_one(sample, kernel, method)
