"""One-dimensional classical operators on step functions.

All operators act on functions on an interval Omega (n = 1) and are
evaluated at cell midpoints with exact per-cell antiderivatives:

* maximal / fractional maximal: exact sup over radii (the average is
  monotone, or has one interior critical point, between breakpoint radii);
* Riesz potential: sign(y-x)|y-x|^a / a;
* Hilbert transform (kernel 1/(x-y)): ln|x-y|;
* Poisson extension: arctan((x-y)/y) / pi;
* convolution: box * box = second difference of a ramp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .exponent import ExponentFunction, classify
from .family import FamilySpec, GridSpec
from .grid import Partition, StepFunction, cumulative_integral_at, double_star_at, rearrange
from .hardy import HardySpec, estimate_operator_norm
from .norms import NormSpec, _sweep, lorentz_norm
from .report import BoundednessReport, Protocol, spread

__all__ = [
    "OperatorSpec",
    "RearrangementBoundReport",
    "maximal",
    "maximal_at",
    "fractional_maximal",
    "riesz_potential",
    "hilbert",
    "hilbert_at",
    "hilbert_pv_oracle",
    "convolve",
    "poisson_sup",
    "poisson_extension",
    "apply_operator",
    "check_rearrangement_bound",
    "rearrangement_constant_curve",
    "boundedness_experiment",
    "maximal_chain_verdicts",
]

KINDS = ("maximal", "fractional-maximal", "riesz", "hilbert", "convolution", "poisson-sup")

_CHUNK = 1 << 22  # matrix entries per vectorised block


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    alpha: Optional[float] = None
    kernel: Optional[StepFunction] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind in ("riesz", "fractional-maximal"):
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("riesz / fractional-maximal need 0 < alpha < 1 (n = 1)")
        if self.kind == "convolution" and self.kernel is None:
            raise ValueError("convolution needs a kernel step function")


def _blocks(n_rows: int, n_cols: int):
    step = max(1, _CHUNK // max(1, n_cols))
    for s in range(0, n_rows, step):
        yield slice(s, min(n_rows, s + step))


def _cum(f: StepFunction):
    p = f.partition
    return p.breakpoints, np.concatenate([[0.0], np.cumsum(np.abs(f.values) * p.widths)])


def _ball_mass(bp, cum, x, r):
    """int_{x-r}^{x+r} |f| with f extended by 0 outside its partition."""
    return np.interp(x + r, bp, cum, left=0.0, right=cum[-1]) - np.interp(x - r, bp, cum, left=0.0, right=cum[-1])


def _sorted_radii(bp, x):
    return np.sort(np.abs(bp[None, :] - x[:, None]), axis=1)


def maximal_at(f: StepFunction, x) -> np.ndarray:
    """Centered Hardy-Littlewood maximal function at points ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    bp, cum = _cum(f)
    out = np.empty(x.size)
    for sl in _blocks(x.size, bp.size):
        xs = x[sl]
        r = _sorted_radii(bp, xs)
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = _ball_mass(bp, cum, xs[:, None], r) / (2.0 * r)
        avg = np.where(r > 0, avg, 0.0)
        # r -> 0+ limit: the value of |f| at x (midpoints avoid breakpoints)
        out[sl] = np.maximum(np.max(avg, axis=1), np.abs(f(xs)))
    return out


def maximal(f: StepFunction) -> StepFunction:
    return StepFunction(f.partition, maximal_at(f, f.partition.midpoints))


def fractional_maximal_at(f: StepFunction, alpha: float, x) -> np.ndarray:
    """sup_r |B(x,r)|^{alpha-1} int_B |f|; exact over radii."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("0 < alpha < 1 required")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    bp, cum = _cum(f)
    out = np.empty(x.size)
    for sl in _blocks(x.size, bp.size):
        xs = x[sl]
        r = np.concatenate([np.zeros((xs.size, 1)), _sorted_radii(bp, xs)], axis=1)
        mass = _ball_mass(bp, cum, xs[:, None], r)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(r > 0, mass * (2.0 * r) ** (alpha - 1.0), 0.0)
            # on each radius interval mass = c + d r; interior critical point of
            # (c + d r) r^{alpha-1} at r* = (1-alpha) c / (alpha d)
            dr = np.diff(r, axis=1)
            d = np.where(dr > 0, np.diff(mass, axis=1) / dr, 0.0)
            c = mass[:, :-1] - d * r[:, :-1]
            rstar = np.where((d > 0) & (c > 0), (1.0 - alpha) * c / (alpha * d), -1.0)
            inside = (rstar > r[:, :-1]) & (rstar < r[:, 1:])
            crit = np.where(inside, (c + d * rstar) * (2.0 * rstar) ** (alpha - 1.0), 0.0)
        out[sl] = np.maximum(np.max(val, axis=1), np.max(crit, axis=1))
    return out


def fractional_maximal(f: StepFunction, alpha: float) -> StepFunction:
    return StepFunction(f.partition, fractional_maximal_at(f, alpha, f.partition.midpoints))


def _riesz_cell(x, a, b, alpha):
    """int_a^b |x-y|^{alpha-1} dy, free of cancellation for far cells."""
    w = b - a
    right = x >= b  # cell to the left of x
    left = x <= a
    with np.errstate(divide="ignore", invalid="ignore"):
        dr = np.where(right, x - b, 1.0)
        dl = np.where(left, a - x, 1.0)
        far_r = dr ** alpha * np.expm1(alpha * np.log1p(w / dr)) / alpha
        far_l = dl ** alpha * np.expm1(alpha * np.log1p(w / dl)) / alpha
        inside = (np.abs(x - a) ** alpha + np.abs(b - x) ** alpha) / alpha
    return np.where(right, far_r, np.where(left, far_l, inside))


def riesz_at(f: StepFunction, alpha: float, x) -> np.ndarray:
    """int f(y) |x-y|^{alpha-1} dy, exact per cell."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("0 < alpha < 1 required")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = f.partition
    nz = f.values != 0
    a, b, v = p.left[nz], p.right[nz], f.values[nz]
    out = np.empty(x.size)
    for sl in _blocks(x.size, a.size):
        out[sl] = _riesz_cell(x[sl, None], a[None, :], b[None, :], alpha) @ v
    return out


def riesz_potential(f: StepFunction, alpha: float) -> StepFunction:
    return StepFunction(f.partition, riesz_at(f, alpha, f.partition.midpoints))


def _log_ratio(x, a, b):
    """ln|(x-a)/(x-b)| evaluated as log1p for cells far from x."""
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (b - a) / (x - b)
        far = u > -1.0
        return np.where(far, np.log1p(np.where(far, u, 0.0)),
                        np.log(np.abs(x - a)) - np.log(np.abs(x - b)))


def hilbert_at(f: StepFunction, x) -> np.ndarray:
    """PV int f(y)/(x-y) dy = sum_j v_j ln|(x-a_j)/(x-b_j)|.

    At a breakpoint the two adjacent log singularities cancel exactly when
    the values agree; a jump there gives an infinite value.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = f.partition
    nz = f.values != 0
    a, b, v = p.left[nz], p.right[nz], f.values[nz]
    out = np.empty(x.size)
    for sl in _blocks(x.size, a.size):
        out[sl] = _log_ratio(x[sl, None], a[None, :], b[None, :]) @ v
    return out


def hilbert(f: StepFunction) -> StepFunction:
    return StepFunction(f.partition, hilbert_at(f, f.partition.midpoints))


def hilbert_pv_oracle(f: StepFunction, x: float, delta: float = 1e-6) -> float:
    """Numerical truncated PV: adaptive quadrature of f(y)/(x-y) over |x-y| > delta."""
    total = 0.0
    kern = lambda y: 1.0 / (x - y)
    for a, b, v in zip(f.partition.left, f.partition.right, f.values):
        if v == 0:
            continue
        pieces = [(a, min(b, x - delta)), (max(a, x + delta), b)]
        for lo, hi in pieces:
            if hi > lo:
                val, _ = integrate.quad(kern, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
                total += v * val
    return total


def convolve(k: StepFunction, f: StepFunction, out: Optional[Partition] = None) -> StepFunction:
    """Exact k*f as cell averages on ``out`` (default: uniform over the support)."""
    ka, kb = k.partition.left, k.partition.right
    fa, fb = f.partition.left, f.partition.right
    if out is None:
        n = 2 * max(k.partition.cells, f.partition.cells)
        out = Partition.uniform(n, k.partition.truncation + f.partition.truncation,
                                k.partition.start + f.partition.start)
    # box_i * box_j = R(x-a_i-a_j) - R(x-a_i-b_j) - R(x-b_i-a_j) + R(x-b_i-b_j)
    shifts = np.stack([ka[:, None] + fa[None, :], ka[:, None] + fb[None, :],
                       kb[:, None] + fa[None, :], kb[:, None] + fb[None, :]])
    signs = np.array([1.0, -1.0, -1.0, 1.0])
    w = (k.values[:, None] * f.values[None, :])
    s = shifts.reshape(4, -1)
    ww = (signs[:, None] * w.reshape(1, -1)).ravel()
    s = s.ravel()
    keep = ww != 0
    s, ww = s[keep], ww[keep]
    c, d = out.left, out.right
    # cell integral of each ramp: S(d - s) - S(c - s), S(u) = max(u, 0)^2 / 2;
    # split into shifts left of the cell (quadratic, exact polynomial) and others
    vals = np.zeros(out.cells)
    for sl in _blocks(out.cells, s.size):
        cc, dd = c[sl, None], d[sl, None]
        hi = np.maximum(dd - s[None, :], 0.0)
        lo = np.maximum(cc - s[None, :], 0.0)
        # (hi^2 - lo^2)/2 = (hi - lo)(hi + lo)/2 limits cancellation
        vals[sl] = ((hi - lo) * (hi + lo) / 2.0) @ ww
    return StepFunction(out, vals / out.widths)


def poisson_extension(f: StepFunction, x, y: float) -> np.ndarray:
    """P_y f(x) with P(x, y) = y / (pi (x^2 + y^2))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = f.partition
    nz = f.values != 0
    a, b, v = p.left[nz], p.right[nz], f.values[nz]
    out = np.empty(x.size)
    for sl in _blocks(x.size, a.size):
        xa, xb = x[sl, None] - a[None, :], x[sl, None] - b[None, :]
        # atan(xa/y) - atan(xb/y) as one angle in (0, pi)
        out[sl] = np.arctan2(y * (b - a)[None, :], y * y + xa * xb) @ v
    return out / np.pi


def poisson_sup(f: StepFunction, n_heights: int = 64, ys=None) -> StepFunction:
    """sup over a log grid of heights of |P_y f| at cell midpoints."""
    p = f.partition
    if ys is None:
        ys = np.geomspace(np.min(p.widths), 10.0 * p.length, n_heights)
    x = p.midpoints
    best = np.zeros(x.size)
    for y in ys:
        best = np.maximum(best, np.abs(poisson_extension(f, x, y)))
    return StepFunction(p, best)


def apply_operator(op: OperatorSpec, f: StepFunction) -> StepFunction:
    if op.kind == "maximal":
        return maximal(f)
    if op.kind == "fractional-maximal":
        return fractional_maximal(f, op.alpha)
    if op.kind == "riesz":
        return riesz_potential(f, op.alpha)
    if op.kind == "hilbert":
        return hilbert(f)
    if op.kind == "poisson-sup":
        return poisson_sup(f)
    g = convolve(op.kernel, f)
    return g


# --- rearrangement estimates -------------------------------------------------

@dataclass
class RearrangementBoundReport:
    kind: str
    measured_constant: float
    t: np.ndarray = field(repr=False)
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    holds: bool = True
    refinement_curve: list = field(default_factory=list)


def _eval_points(fstar_lhs: StepFunction) -> np.ndarray:
    """Left cell endpoints of (Tf)*, except the first cell (its midpoint)."""
    t = fstar_lhs.partition.left.copy()
    t[0] = 0.5 * fstar_lhs.partition.right[0]
    return t


def _tail_power_integral(fstar: StepFunction, t: np.ndarray, alpha: float) -> np.ndarray:
    """int_t^ell f*(s) s^{alpha-1} ds (alpha = 0 means the 1/s kernel)."""
    p = fstar.partition
    if alpha == 0.0:
        G = lambda s: np.log(s)
    else:
        G = lambda s: s ** alpha / alpha
    a, b = p.left, p.right
    with np.errstate(divide="ignore"):
        full = fstar.values * np.where(a > 0, G(b) - G(np.where(a > 0, a, 1.0)), np.inf)
    full = np.where(fstar.values == 0, 0.0, full)
    suffix = np.concatenate([np.cumsum(full[::-1])[::-1], [0.0]])
    k = np.searchsorted(p.breakpoints, t, side="right") - 1
    out = np.zeros(t.size)
    ok = (k >= 0) & (k < p.cells)
    kk = k[ok]
    out[ok] = fstar.values[kk] * (G(b[kk]) - G(t[ok])) + suffix[kk + 1]
    return out


def _merge_product(g: StepFunction, h: StepFunction) -> StepFunction:
    bp = np.union1d(g.partition.breakpoints, h.partition.breakpoints)
    part = Partition(bp)
    mid = part.midpoints
    return StepFunction(part, g(mid) * h(mid))


def _tail_integral(f: StepFunction, t: np.ndarray) -> np.ndarray:
    total = float(np.sum(f.values * f.widths))
    return total - cumulative_integral_at(f, t)


def check_rearrangement_bound(Tf: StepFunction, f: StepFunction, kind: str,
                              alpha: Optional[float] = None,
                              kernel: Optional[StepFunction] = None) -> RearrangementBoundReport:
    """Measured constant sup_t (Tf)*(t) / rhs(t) of a rearrangement estimate.

    kind: maximal (rhs f**), riesz, singular, convolution (O'Neil with f* in
    the first term; constant-free) or ergodic-maximal (f**, constant-free).
    """
    lhs_star = rearrange(Tf)
    fs = rearrange(f)
    t = _eval_points(lhs_star)
    lhs = lhs_star.values
    if kind in ("maximal", "ergodic-maximal"):
        rhs = double_star_at(fs, t)
    elif kind == "riesz":
        if alpha is None:
            raise ValueError("riesz needs alpha")
        rhs = t ** (alpha - 1.0) * cumulative_integral_at(fs, t) + _tail_power_integral(fs, t, alpha)
    elif kind == "singular":
        rhs = cumulative_integral_at(fs, t) / t + _tail_power_integral(fs, t, 0.0)
    elif kind == "convolution":
        if kernel is None:
            raise ValueError("convolution needs the kernel")
        ks = rearrange(kernel)
        rhs = double_star_at(ks, t) * cumulative_integral_at(fs, t) + _tail_integral(_merge_product(ks, fs), t)
    else:
        raise ValueError(f"unknown estimate kind {kind!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, lhs / rhs, 0.0)
    violation = bool(np.any((lhs > 0) & (rhs <= 0)))
    measured = math.inf if violation else float(np.max(ratio, initial=0.0))
    if kind in ("convolution", "ergodic-maximal"):
        holds = measured <= 1.0 + 1e-9
    else:
        holds = math.isfinite(measured)
    return RearrangementBoundReport(kind, measured, t, lhs, rhs, holds)


_ESTIMATE_FOR = {"maximal": "maximal", "riesz": "riesz", "hilbert": "singular",
                 "convolution": "convolution"}


def rearrangement_constant_curve(op: OperatorSpec, functions, factors=(1, 2, 4)) -> list:
    """Measured constant (sup over ``functions``) on partitions refined by each factor."""
    kind = _ESTIMATE_FOR[op.kind]
    curve = []
    for m in factors:
        best = 0.0
        for f in functions:
            g = StepFunction(f.partition.refine(m), np.repeat(f.values, m)) if m > 1 else f
            rep = check_rearrangement_bound(apply_operator(op, g), g, kind, op.alpha, op.kernel)
            best = max(best, rep.measured_constant)
        curve.append((m, best))
    return curve


# --- boundedness experiments --------------------------------------------------

def _riesz_target(p: ExponentFunction, alpha: float) -> ExponentFunction:
    return p.map(lambda x: 1.0 / (1.0 / x - alpha))


def operator_conditions(op: OperatorSpec, spec: NormSpec) -> dict:
    p0 = spec.p.limit_at_zero
    g0 = spec.gamma.limit_at_zero if spec.gamma is not None else 0.0
    infinite = spec.p.infinite_domain
    out = dict(spec.assumptions())
    out["gm_0"] = g0 < 1.0 - 1.0 / p0
    if infinite:
        ginf = spec.gamma.limit_inf if spec.gamma is not None else 0.0
        out["gm_inf"] = ginf < 1.0 - 1.0 / spec.p.limit_inf
    if op.kind in ("riesz", "fractional-maximal"):
        a = op.alpha
        out["condgm_0"] = a - 1.0 / p0 < g0 < 1.0 - 1.0 / p0
        out["p_plus<1/alpha"] = classify(spec.p).p_plus < 1.0 / a
    return out


def boundedness_experiment(op: OperatorSpec, spec: NormSpec, family: FamilySpec = FamilySpec(),
                           grid: GridSpec = GridSpec(cells=96, domain_length=1.0),
                           protocol: Protocol = Protocol()) -> BoundednessReport:
    """Ratio sweep ||Tf||_target / ||f||_source on Omega = [0, ell] in weighted Lorentz norms."""
    source = spec.star(False)
    if op.kind in ("riesz", "fractional-maximal"):
        target = NormSpec(_riesz_target(spec.p, op.alpha), spec.q, spec.gamma)
    else:
        target = source
    g0 = spec.gamma.limit_at_zero if spec.gamma is not None else 0.0
    crit0 = g0 + 1.0 / spec.p.limit_at_zero

    def ratio(f):
        d = lorentz_norm(f, source)
        if d == 0.0:
            return None
        return lorentz_norm(apply_operator(op, f), target) / d

    return _sweep(ratio, crit0, None, family, grid, protocol,
                  conditions=operator_conditions(op, spec), label=f"op-{op.kind}")


def maximal_chain_verdicts(spec: NormSpec, family: FamilySpec = FamilySpec(),
                           grid: GridSpec = GridSpec(cells=96, domain_length=1.0),
                           protocol: Protocol = Protocol()):
    """Verdicts of the maximal experiment and of the Hardy operator it reduces to.

    The maximal bound reduces to the lower Hardy operator in L^q with
    alpha = gamma + 1/p - 1/q and nu = 0.
    """
    op_rep = boundedness_experiment(OperatorSpec("maximal"), spec, family, grid, protocol)
    lam = spec.gamma + spec.p.reciprocal() - spec.q.reciprocal() if spec.gamma is not None \
        else spec.p.reciprocal() - spec.q.reciprocal()
    hs = HardySpec(spec.q, spec.q, alpha=lam, direction="lower")
    hardy_rep = estimate_operator_norm(hs, family, GridSpec(domain_length=spec.p.domain_length), protocol)
    return op_rep.verdict, hardy_rep.verdict
