"""Partitions, step functions and non-increasing rearrangements.

Every function in the package is a step function on a finite partition.
Rearranging a step function is a sort of (|value|, width) pairs, so f* and
f** are computed exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

__all__ = [
    "Partition",
    "StepFunction",
    "distribution",
    "rearrange",
    "rearrange_oracle",
    "double_star",
    "double_star_at",
    "cumulative_integral_at",
    "resample",
    "read_csv",
    "write_csv",
]

DEFAULT_CELLS = 2048
DEFAULT_TRUNCATION = 2.0 ** 20


@dataclass(frozen=True, eq=False)
class Partition:
    """Strictly increasing breakpoints; the last one is the truncation."""

    breakpoints: np.ndarray
    style: str = "custom"

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("a partition needs at least two breakpoints")
        if not np.all(np.diff(b) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)

    @property
    def left(self) -> np.ndarray:
        return self.breakpoints[:-1]

    @property
    def right(self) -> np.ndarray:
        return self.breakpoints[1:]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.left + self.right)

    @property
    def cells(self) -> int:
        return self.breakpoints.size - 1

    @property
    def start(self) -> float:
        return float(self.breakpoints[0])

    @property
    def truncation(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def length(self) -> float:
        return self.truncation - self.start

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.breakpoints, other.breakpoints)

    def __hash__(self):
        return hash(self.breakpoints.tobytes())

    @classmethod
    def uniform(cls, cells: int, end: float = 1.0, start: float = 0.0) -> "Partition":
        return cls(np.linspace(start, end, cells + 1), "uniform")

    @classmethod
    def geometric(cls, cells: int = DEFAULT_CELLS, t_min: Optional[float] = None,
                  truncation: float = DEFAULT_TRUNCATION) -> "Partition":
        """Geometric cells from ``t_min`` to ``truncation`` plus a uniform band on [0, t_min].

        The band has cells of width comparable to the first geometric cell so
        that adjacent width ratios stay within [1/4, 4].
        """
        if t_min is None:
            t_min = 2.0 ** -30 * truncation
        if not 0 < t_min < truncation:
            raise ValueError("need 0 < t_min < truncation")
        geo = np.geomspace(t_min, truncation, cells + 1)
        ratio = geo[1] / geo[0]
        band = max(1, int(math.ceil(1.0 / (ratio - 1.0))))
        head = np.linspace(0.0, t_min, band + 1)[:-1]
        return cls(np.concatenate([head, geo]), "geometric-two-sided")

    def refine(self, factor: int) -> "Partition":
        """Split each cell into ``factor`` equal parts."""
        b = self.breakpoints
        frac = np.arange(factor) / factor
        inner = (b[:-1, None] + np.diff(b)[:, None] * frac[None, :]).ravel()
        return Partition(np.append(inner, b[-1]), self.style)

    def locate(self, x) -> np.ndarray:
        """Cell index containing x (right-open cells; the end point maps to the last cell)."""
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, self.cells - 1)


@dataclass(frozen=True, eq=False)
class StepFunction:
    partition: Partition
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.partition.cells,):
            raise ValueError(f"expected {self.partition.cells} values, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, partition: Partition, fn, average: bool = False, points: int = 8):
        """Cell values of ``fn``: midpoint samples, or Gauss cell averages."""
        if not average:
            return cls(partition, fn(partition.midpoints))
        x, w = np.polynomial.legendre.leggauss(points)
        a, b = partition.left[:, None], partition.right[:, None]
        nodes = a + (b - a) * (x[None, :] + 1) / 2
        return cls(partition, (fn(nodes) * w[None, :]).sum(axis=1) / 2)

    @classmethod
    def indicator(cls, partition: Partition, a: float, b: float):
        """Exact cell averages of the indicator of [a, b]."""
        lo = np.clip(partition.left, a, b)
        hi = np.clip(partition.right, a, b)
        return cls(partition, (hi - lo) / partition.widths)

    @property
    def widths(self) -> np.ndarray:
        return self.partition.widths

    def abs(self) -> "StepFunction":
        return StepFunction(self.partition, np.abs(self.values))

    def integral(self, power: float = 1.0) -> float:
        return float(np.sum(np.abs(self.values) ** power * self.widths))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.partition.start) & (x < self.partition.truncation)
        return np.where(inside, self.values[self.partition.locate(x)], 0.0)

    def _same(self, other):
        if self.partition != other.partition:
            raise ValueError("step functions live on different partitions")

    def __add__(self, other):
        if isinstance(other, StepFunction):
            self._same(other)
            return StepFunction(self.partition, self.values + other.values)
        return StepFunction(self.partition, self.values + other)

    def __sub__(self, other):
        if isinstance(other, StepFunction):
            self._same(other)
            return StepFunction(self.partition, self.values - other.values)
        return StepFunction(self.partition, self.values - other)

    def __mul__(self, c):
        return StepFunction(self.partition, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return StepFunction(self.partition, -self.values)


def distribution(f: StepFunction, s: float) -> float:
    """Measure of {|f| > s}."""
    if s < 0:
        raise ValueError("distribution level must be nonnegative")
    mask = np.abs(f.values) > s
    return float(np.sum(f.widths[mask]))


def rearrange(f: StepFunction) -> StepFunction:
    """Non-increasing rearrangement f* laid out on [0, total width]."""
    v = np.abs(f.values)
    order = np.argsort(-v, kind="stable")
    w = f.widths[order]
    bp = np.concatenate([[0.0], np.cumsum(w)])
    # cumulative sums of positive widths are strictly increasing unless a width
    # underflows against the running total; merge such cells
    keep = np.concatenate([[True], np.diff(bp) > 0])
    if not np.all(keep):
        bp = bp[keep]
        vals = v[order][keep[1:]]
    else:
        vals = v[order]
    return StepFunction(Partition(bp, "rearranged"), vals)


def rearrange_oracle(f: StepFunction, t: Iterable[float]) -> np.ndarray:
    """f*(t) straight from the definition sup{s >= 0 : m(|f| > s) > t}.

    The distribution is a right-continuous step function of s that only
    changes at the attained values, so the sup is the largest attained value
    v with m(|f| >= v) > t, or 0.
    """
    v = np.abs(f.values)
    levels = np.unique(v)[::-1]
    # measures summed in a different order than in rearrange: compare with a
    # tolerance so that ties at breakpoints resolve the same way
    tol = 1e-12 * float(np.sum(f.widths))
    # m(|f| >= s) for every attained level s, by masked sums (no sorting)
    measure = (v[None, :] >= levels[:, None]).astype(float) @ f.widths
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    # m(|f| > s') > t for every s' < s  <=>  m(|f| >= s) > t; take the largest such s
    above = measure[None, :] > tt[:, None] + tol
    first = np.argmax(above, axis=1)
    return np.where(above.any(axis=1), levels[first], 0.0)


def cumulative_integral_at(f: StepFunction, t) -> np.ndarray:
    """Exact integral of f over [start, t] (piecewise-linear in t)."""
    p = f.partition
    cum = np.concatenate([[0.0], np.cumsum(f.values * p.widths)])
    return np.interp(t, p.breakpoints, cum, left=0.0, right=cum[-1])


def double_star(fstar: StepFunction) -> StepFunction:
    """f** = (1/t) int_0^t f*, evaluated at cell right endpoints."""
    p = fstar.partition
    if p.start != 0.0:
        raise ValueError("rearranged functions start at 0")
    cum = np.cumsum(fstar.values * p.widths)
    return StepFunction(p, cum / p.right)


def double_star_at(fstar: StepFunction, t) -> np.ndarray:
    """f**(t) at arbitrary t >= 0, with f**(0) = f*(0+)."""
    t = np.asarray(t, dtype=float)
    first = fstar.values[0] if fstar.values.size else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = cumulative_integral_at(fstar, t) / t
    return np.where(t > 0, out, first)


def resample(f: StepFunction, target: Partition) -> StepFunction:
    """Cell-average projection onto ``target``; preserves the integral."""
    if target.truncation < f.partition.truncation or target.start > f.partition.start:
        raise ValueError("target partition must cover the source")
    F = cumulative_integral_at(f, target.breakpoints)
    return StepFunction(target, np.diff(F) / target.widths)


def write_csv(f: StepFunction, path=None, header: Optional[str] = None) -> str:
    """Serialize as CSV with columns t_left, t_right, value (LF endings)."""
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_left", "t_right", "value"])
    for a, b, v in zip(f.partition.left, f.partition.right, f.values):
        w.writerow([repr(float(a)), repr(float(b)), repr(float(v))])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(source) -> StepFunction:
    """Parse a step-function CSV (path or text); cells must be contiguous."""
    if isinstance(source, str) and "\n" not in source and not source.startswith("t_left"):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source
    rows = [r for r in csv.reader(line for line in text.splitlines() if not line.startswith("#"))]
    if not rows or [c.strip() for c in rows[0]] != ["t_left", "t_right", "value"]:
        raise ValueError("step-function CSV needs header t_left,t_right,value")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError("empty step function")
    if not np.allclose(data[1:, 0], data[:-1, 1], rtol=0, atol=0):
        raise ValueError("cells must be contiguous (t_left[i+1] == t_right[i])")
    bp = np.append(data[:, 0], data[-1, 1])
    return StepFunction(Partition(bp), data[:, 2])
