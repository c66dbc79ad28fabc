"""Ergodic maximal function and ergodic Hilbert transform for two flows.

* translation: X = R, T_tau x = x + tau, Lebesgue measure (total mass inf);
* rotation:    X = [0, 1), T_tau x = x + tau mod 1 (total mass 1).

Orientation of the Hilbert transform: it is normalised to agree with
``operators.hilbert`` (kernel 1/(x - y)), so that

    translation: H 1_(a,b)(x) = ln|(x - a) / (x - b)|
    rotation:    H 1_(a,b)(x) = ln|sin pi(x - a) / sin pi(x - b)|

the rotation form being the periodisation sum_n 1/(tau + n) = pi cot(pi tau)
of the same kernel. Distribution and rearrangement only see |H|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .exponent import ExponentFunction
from .family import FamilySpec, GridSpec
from .grid import Partition, StepFunction, double_star_at, rearrange
from .norms import NormSpec, _sweep, lorentz_norm
from .operators import _log_ratio, _blocks, check_rearrangement_bound, RearrangementBoundReport
from .report import BoundednessReport, Protocol

__all__ = [
    "FlowSpec",
    "ArcSet",
    "ergodic_maximal",
    "ergodic_maximal_at",
    "ergodic_hilbert",
    "ergodic_hilbert_at",
    "rotation_hilbert_oracle",
    "psi",
    "phi",
    "psi_inv",
    "phi_inv",
    "evaluation_grid",
    "distribution_check",
    "star_bound_check",
    "ergodic_maximal_star_check",
    "ergodic_boundedness_experiment",
    "LAMBDA_GRID",
]

LAMBDA_GRID = np.geomspace(0.05, 5.0, 64)
STAR_GRID_TOLERANCE = 5e-3


@dataclass(frozen=True)
class FlowSpec:
    kind: str = "rotation"

    def __post_init__(self):
        if self.kind not in ("rotation", "translation"):
            raise ValueError("flow kind is 'rotation' or 'translation'")

    @property
    def total_mass(self) -> float:
        return 1.0 if self.kind == "rotation" else math.inf


@dataclass(frozen=True)
class ArcSet:
    intervals: tuple

    def __post_init__(self):
        iv = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        for a, b in iv:
            if not b > a:
                raise ValueError(f"empty or reversed interval ({a}, {b})")
        for (_, b0), (a1, _) in zip(iv, iv[1:]):
            if a1 < b0:
                raise ValueError("intervals must be disjoint")
        object.__setattr__(self, "intervals", iv)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    @property
    def endpoints(self) -> np.ndarray:
        return np.array([e for iv in self.intervals for e in iv])

    def validate(self, flow: FlowSpec) -> "ArcSet":
        if flow.kind == "rotation":
            if self.intervals[0][0] < 0.0 or self.intervals[-1][1] > 1.0:
                raise ValueError("rotation arcs lie in [0, 1]")
            if not self.measure < 1.0:
                raise ValueError("an arc set on the circle must have measure < 1")
        return self


def _check_rotation_domain(f: StepFunction):
    p = f.partition
    if p.start != 0.0 or p.truncation != 1.0:
        raise ValueError("rotation-flow functions live on a partition of [0, 1]")


# --- maximal -----------------------------------------------------------------

def ergodic_maximal_at(f: StepFunction, flow: FlowSpec, x) -> np.ndarray:
    """sup_{a>0} (1/a) int_0^a |f(T_tau x)| dtau at points ``x``.

    Translation: forward averages over [x, x + a]; between breakpoint
    lengths the average is monotone, so breakpoints and a -> 0+ suffice.
    Rotation: with a = n + s the average is a convex combination of the
    mean and the first-period average over [x, x + s], so the sup is the
    larger of the mean and the sup over s in (0, 1] at breakpoints.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = f.partition
    v = np.abs(f.values)
    cum = np.concatenate([[0.0], np.cumsum(v * p.widths)])
    bp = p.breakpoints
    if flow.kind == "rotation":
        _check_rotation_domain(f)
        mean = cum[-1]
        x = np.mod(x, 1.0)
        bp2 = np.concatenate([bp, bp[1:] + 1.0])
        cum2 = np.concatenate([cum, cum[1:] + mean])
    else:
        bp2, cum2, mean = bp, cum, 0.0
    out = np.empty(x.size)
    for sl in _blocks(x.size, bp2.size):
        xs = x[sl, None]
        a = bp2[None, :] - xs
        if flow.kind == "rotation":
            a = np.where((a > 0) & (a <= 1.0), a, np.nan)
        else:
            a = np.where(a > 0, a, np.nan)
        F0 = np.interp(xs, bp2, cum2, left=0.0, right=cum2[-1])
        with np.errstate(invalid="ignore"):
            mass = np.interp(xs + np.nan_to_num(a, nan=0.0), bp2, cum2, left=0.0, right=cum2[-1]) - F0
            avg = np.where(np.isnan(a), 0.0, mass / np.where(np.isnan(a), 1.0, a))
        here = v[np.clip(np.searchsorted(bp, x[sl], side="right") - 1, 0, p.cells - 1)]
        inside = (x[sl] >= bp[0]) & (x[sl] < bp[-1])
        out[sl] = np.maximum(np.max(avg, axis=1), np.where(inside, here, 0.0))
    return np.maximum(out, mean)


def ergodic_maximal(f: StepFunction, flow: FlowSpec, partition: Optional[Partition] = None) -> StepFunction:
    part = partition if partition is not None else f.partition
    return StepFunction(part, ergodic_maximal_at(f, flow, part.midpoints))


# --- Hilbert -----------------------------------------------------------------

def _rotation_log_ratio(x, a, b):
    """ln|sin pi(x-a) / sin pi(x-b)|, as log1p when the ratio is near 1."""
    with np.errstate(divide="ignore", invalid="ignore"):
        sb = np.sin(np.pi * (x - b))
        # sin A - sin B = 2 cos((A+B)/2) sin((A-B)/2)
        u = 2.0 * np.cos(np.pi * (x - 0.5 * (a + b))) * np.sin(0.5 * np.pi * (b - a)) / sb
        far = u > -1.0
        return np.where(far, np.log1p(np.where(far, u, 0.0)),
                        np.log(np.abs(np.sin(np.pi * (x - a)))) - np.log(np.abs(sb)))


def _hilbert_cells(a, b, v, flow: FlowSpec, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    kern = _rotation_log_ratio if flow.kind == "rotation" else _log_ratio
    out = np.empty(x.size)
    for sl in _blocks(x.size, a.size):
        out[sl] = kern(x[sl, None], a[None, :], b[None, :]) @ v
    return out


def ergodic_hilbert_at(f, flow: FlowSpec, x) -> np.ndarray:
    """Ergodic Hilbert transform of an ArcSet indicator or a step function."""
    if isinstance(f, ArcSet):
        f.validate(flow)
        a, b = np.array([iv[0] for iv in f.intervals]), np.array([iv[1] for iv in f.intervals])
        v = np.ones(a.size)
    else:
        if flow.kind == "rotation":
            _check_rotation_domain(f)
        nz = f.values != 0
        a, b, v = f.partition.left[nz], f.partition.right[nz], f.values[nz]
    return _hilbert_cells(a, b, v, flow, x)


def ergodic_hilbert(E, flow: FlowSpec, partition: Optional[Partition] = None, cells: int = 4096) -> StepFunction:
    """ℍ1_E (or ℍf) sampled at cell midpoints of ``partition``.

    Default partition: [0, 1] for rotation; for translation the hull of E
    widened by its length on both sides.
    """
    if partition is None:
        if isinstance(E, ArcSet):
            lo, hi = E.intervals[0][0], E.intervals[-1][1]
        else:
            lo, hi = E.partition.start, E.partition.truncation
        if flow.kind == "rotation":
            partition = Partition.uniform(cells, 1.0, 0.0)
        else:
            span = hi - lo
            partition = Partition.uniform(cells, hi + span, lo - span)
    return StepFunction(partition, ergodic_hilbert_at(E, flow, partition.midpoints))


def rotation_hilbert_oracle(E: ArcSet, x: float, delta: float = 1e-5, K: int = 2000) -> float:
    """Truncated numeric PV: int_{delta <= |tau| <= K + 1/2} 1_E(x - tau) / tau dtau.

    Integrates exactly over each preimage interval of E by the 1/tau
    antiderivative after adaptive quadrature confirms the pieces; the
    truncation at K + 1/2 keeps the periodic sum symmetric.
    """
    total = 0.0
    lim = K + 0.5
    for a, b in E.intervals:
        # tau in (x - b + n, x - a + n) for integers n with the piece inside the window
        n_lo = math.floor(-lim - (x - a)) - 1
        n_hi = math.ceil(lim - (x - b)) + 1
        n = np.arange(n_lo, n_hi + 1, dtype=float)
        lo = np.clip(x - b + n, -lim, lim)
        hi = np.clip(x - a + n, -lim, lim)
        for l, h in ((lo, np.minimum(hi, -delta)), (np.maximum(lo, delta), hi)):
            m = h > l
            if np.any(m):
                total += float(np.sum(np.log(np.abs(h[m])) - np.log(np.abs(l[m]))))
    return total


def rotation_hilbert_quad(E: ArcSet, x: float, delta: float = 1e-5, K: int = 50) -> float:
    """Same truncated integral by adaptive quadrature (slow; small K only)."""
    total = 0.0
    lim = K + 0.5
    f = lambda tau: 1.0 / tau
    for a, b in E.intervals:
        for n in range(-K - 2, K + 3):
            lo, hi = max(x - b + n, -lim), min(x - a + n, lim)
            for l, h in ((lo, min(hi, -delta)), (max(lo, delta), hi)):
                if h > l:
                    total += integrate.quad(f, l, h, epsabs=1e-13, epsrel=1e-12)[0]
    return total


# --- distribution formulas ----------------------------------------------------

def psi(xi: float, lam):
    """2 xi / sinh(lam): distribution of |H 1_E| on the line, mu(E) = xi."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lambda > 0 required")
    return 2.0 * xi / np.sinh(lam)


def phi(xi: float, lam, total: float = 1.0):
    """(2 mu / pi) arctan(sin(pi xi / mu) / sinh lam) for a space of mass mu."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lambda > 0 required")
    if not 0.0 < xi < total:
        raise ValueError("0 < xi < total required")
    return 2.0 * total / np.pi * np.arctan(np.sin(np.pi * xi / total) / np.sinh(lam))


def psi_inv(xi: float, t):
    """Exact inverse of ``psi``: asinh(2 xi / t)."""
    t = np.asarray(t, dtype=float)
    return np.arcsinh(2.0 * xi / t)


def phi_inv(xi: float, t, total: float = 1.0):
    """Exact inverse of ``phi``; 0 for t >= total."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.arcsinh(np.sin(np.pi * xi / total) / np.tan(np.pi * t / (2.0 * total)))
    return np.where(t >= total, 0.0, val)


# --- checks --------------------------------------------------------------------

def evaluation_grid(E: ArcSet, flow: FlowSpec, points: int = 100_000,
                    reach: Optional[float] = None) -> Partition:
    """Graded partition clustered geometrically at the endpoints of E.

    Rotation: covers [0, 1]. Translation: covers the hull of E widened by
    ``reach`` (default 2 mu(E) / sinh(0.05) * 1.5, beyond which |H 1_E| < 0.05).
    """
    ends = E.endpoints
    if flow.kind == "rotation":
        lo, hi = 0.0, 1.0
        far = 1.0
    else:
        if reach is None:
            reach = 1.5 * 2.0 * E.measure / math.sinh(LAMBDA_GRID[0]) + 1.0
        lo, hi = float(ends.min() - reach), float(ends.max() + reach)
        far = hi - lo
    # half the points graded at the endpoints, half uniform for the far level sets
    per = max(8, points // (4 * ends.size))
    d = np.geomspace(1e-10, far, per)
    pts = np.concatenate([ends[:, None] - d[None, :], ends[:, None] + d[None, :]]).ravel()
    if flow.kind == "rotation":
        pts = np.mod(pts, 1.0)  # neighbourhoods wrap around the circle
    pts = np.concatenate([pts, ends, np.linspace(lo, hi, points // 2)])
    pts = np.unique(pts[(pts >= lo) & (pts <= hi)])
    return Partition(pts, "graded")


@dataclass
class DistributionReport:
    lam: np.ndarray = field(repr=False)
    empirical: np.ndarray = field(repr=False)
    formula: np.ndarray = field(repr=False)
    sup_error: float = 0.0

    def rows(self):
        return [(float(l), float(e), float(f), float(abs(e - f)))
                for l, e, f in zip(self.lam, self.empirical, self.formula)]


def _sampled_abs_hilbert(E: ArcSet, flow: FlowSpec, points: int) -> StepFunction:
    part = evaluation_grid(E, flow, points)
    return StepFunction(part, np.abs(ergodic_hilbert_at(E, flow, part.midpoints)))


def distribution_check(E: ArcSet, flow: FlowSpec, lam=LAMBDA_GRID, points: int = 100_000) -> DistributionReport:
    """Measure of {|H 1_E| > lam} on the graded grid vs psi / phi."""
    E.validate(flow)
    h = _sampled_abs_hilbert(E, flow, points)
    lam = np.asarray(lam, dtype=float)
    order = np.argsort(h.values)
    vals, w = h.values[order], h.widths[order]
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    emp = tail[np.searchsorted(vals, lam, side="right")]
    xi = E.measure
    formula = psi(xi, lam) if flow.kind == "translation" else phi(xi, lam, flow.total_mass)
    return DistributionReport(lam, emp, formula, float(np.max(np.abs(emp - formula))))


@dataclass
class StarBoundReport:
    t: np.ndarray = field(repr=False)
    lhs: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    exact: np.ndarray = field(repr=False)
    holds: bool = True
    max_ratio: float = 0.0
    exact_error: float = 0.0
    holds_without_pi: bool = True

    def rows(self):
        return [(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.t, self.lhs, self.bound, self.exact)]


def star_bound_check(E: ArcSet, flow: FlowSpec, t=None, points: int = 100_000) -> StarBoundReport:
    """(H 1_E)*(t) against (1/pi) asinh(2 xi / t) and against the exact inverse.

    ``holds_without_pi`` tests asinh(2 xi / t), which the exact inverses
    satisfy for both flows (sin x < x, tan x > x). On the line the sampled
    rearrangement sits on the exact curve, so that test allows the grid
    tolerance STAR_GRID_TOLERANCE.
    """
    E.validate(flow)
    xi = E.measure
    if flow.kind == "rotation" and not xi < flow.total_mass:
        raise ValueError("mu(E) < mu(X) required")
    h = _sampled_abs_hilbert(E, flow, points)
    hs = rearrange(h)
    if t is None:
        # stay where the sampled window resolves the level sets (|H| >= 0.05)
        t_hi = flow.total_mass if flow.kind == "rotation" else 2.0 * xi / math.sinh(LAMBDA_GRID[0])
        t = np.geomspace(1e-3 * xi, 0.999 * t_hi, 64)
    t = np.asarray(t, dtype=float)
    lhs = hs(np.minimum(t, np.nextafter(hs.partition.truncation, 0.0)))
    lhs = np.where(t < hs.partition.truncation, lhs, 0.0)
    bound = np.arcsinh(2.0 * xi / t) / np.pi
    exact = psi_inv(xi, t) if flow.kind == "translation" else phi_inv(xi, t, flow.total_mass)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, lhs / bound, 0.0)
    return StarBoundReport(
        t=t, lhs=lhs, bound=bound, exact=exact,
        holds=bool(np.all(lhs <= bound * (1 + 1e-12))),
        max_ratio=float(np.max(ratio)),
        exact_error=float(np.max(np.abs(lhs - exact))),
        holds_without_pi=bool(np.all(lhs <= np.pi * bound + STAR_GRID_TOLERANCE)),
    )


def _maximal_window(f: StepFunction, flow: FlowSpec, refine: int) -> Partition:
    """Evaluation partition for M f: f's cells refined, and on the line a
    geometric run to the left of the support where forward averages live."""
    base = f.partition.refine(refine)
    if flow.kind == "rotation":
        return base
    span = base.length
    # spacing ratio 1 + 1/(4 refine): M f decays like 1/distance there
    n = int(math.ceil(math.log(1e6 * base.cells) / math.log1p(0.25 / refine)))
    d = np.geomspace(span / base.cells, 1e6 * span, n)
    left = base.start - d[::-1]
    return Partition(np.concatenate([left, base.breakpoints]), "graded")


def ergodic_maximal_star_check(f: StepFunction, flow: FlowSpec, refine: int = 64) -> RearrangementBoundReport:
    """(M f)*(t) <= f**(t) with no constant, on a refined evaluation grid."""
    if np.any(f.values < 0):
        raise ValueError("f >= 0 required")
    part = _maximal_window(f, flow, refine)
    Mf = StepFunction(part, ergodic_maximal_at(f, flow, part.midpoints))
    return check_rearrangement_bound(Mf, f, "ergodic-maximal")


def ergodic_boundedness_experiment(spec: NormSpec, flow: FlowSpec = FlowSpec("rotation"),
                                   family: FamilySpec = FamilySpec(),
                                   grid: GridSpec = GridSpec(cells=96, domain_length=1.0),
                                   protocol: Protocol = Protocol(),
                                   operator: str = "maximal") -> BoundednessReport:
    """Ratio sweep ||T f|| / ||f|| in the Lorentz norm for T = ergodic maximal or Hilbert.

    Runs on the rotation flow; on the line the Hilbert transform is the
    operator-module one and its experiment lives there.
    """
    if flow.kind != "rotation":
        raise ValueError("ergodic boundedness sweeps run on the rotation flow")
    if grid.domain_length != 1.0:
        raise ValueError("rotation flow lives on [0, 1]")
    g0 = spec.gamma.limit_at_zero if spec.gamma is not None else 0.0
    crit0 = g0 + 1.0 / spec.p.limit_at_zero

    def apply(f):
        if operator == "maximal":
            return ergodic_maximal(f, flow)
        return StepFunction(f.partition, ergodic_hilbert_at(f, flow, f.partition.midpoints))

    def ratio(f):
        d = lorentz_norm(f, spec)
        if d == 0.0:
            return None
        return lorentz_norm(apply(f), spec) / d

    conds = dict(spec.assumptions())
    conds["gm_0"] = g0 < 1.0 - 1.0 / spec.p.limit_at_zero
    return _sweep(ratio, crit0, None, family, grid, protocol, conditions=conds,
                  label=f"ergodic-{operator}")
