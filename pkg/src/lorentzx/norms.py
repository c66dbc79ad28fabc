"""Variable-exponent Lebesgue and Lorentz modulars and norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import _quadrature as quad
from .exponent import ExponentFunction, classify, conjugate
from .family import FamilySpec, GridSpec, build_family
from .grid import Partition, StepFunction, double_star, rearrange
from .report import BoundednessReport, Protocol, decide

__all__ = [
    "NormSpec",
    "ModularOverflowError",
    "lebesgue_modular",
    "luxemburg_norm",
    "power_luxemburg",
    "lorentz_modular",
    "lorentz_norm",
    "split_modular_check",
    "holder_check",
    "embedding_constant",
    "norm_equivalence_experiment",
]


class ModularOverflowError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NormSpec:
    p: ExponentFunction
    q: ExponentFunction
    gamma: Optional[ExponentFunction] = None
    use_double_star: bool = False

    def lorentz_power(self):
        """Exponent a(t) = gamma(t) + 1/p(t) - 1/q(t) of the weight t^a in front of f*."""
        p, q, g = self.p, self.q, self.gamma
        if g is None:
            return lambda t: 1.0 / p(t) - 1.0 / q(t)
        return lambda t: g(t) + 1.0 / p(t) - 1.0 / q(t)

    def star(self, flag: bool = True) -> "NormSpec":
        return NormSpec(self.p, self.q, self.gamma, flag)

    def assumptions(self) -> dict:
        """Flags for the standing assumptions (p, q in P_1 with p(0), p(inf) > 1)
        and, when a weight is present, gamma(0) < 1/p'(0) (and at infinity)."""
        rp, rq = classify(self.p), classify(self.q)
        infinite = self.p.infinite_domain
        flags = {
            "p_in_P1": rp.in_class_Pa(1.0) and rp.in_log_decay_class,
            "q_in_P1": rq.in_class_Pa(1.0) and rq.in_log_decay_class,
            "p0_gt_1": self.p.limit_at_zero > 1.0,
            "pinf_gt_1": (self.p.limit_inf > 1.0) if infinite else "n/a",
        }
        if self.gamma is not None:
            flags["gamma0_lt_1/p'0"] = self.gamma.limit_at_zero < 1.0 - 1.0 / self.p.limit_at_zero
            flags["gammainf_lt_1/p'inf"] = (
                self.gamma.limit_inf < 1.0 - 1.0 / self.p.limit_inf if infinite else "n/a"
            )
        return flags


def _check_axis(f: StepFunction):
    if f.partition.start < 0:
        raise ValueError("modulars live on [0, ell]; shift or rearrange first")


def _log_terms(values, partition: Partition, a_fn, q_fn):
    return quad.power_log_terms(values, partition.left, partition.right, a_fn, q_fn)


def lebesgue_modular(f: StepFunction, p: ExponentFunction) -> float:
    """int |f(t)|^{p(t)} dt with per-cell log-scale quadrature."""
    _check_axis(f)
    L, _ = _log_terms(f.values, f.partition, None, p)
    val = math.exp(quad.log_modular(L, _)) if L.size else 0.0
    if not math.isfinite(val):
        raise ModularOverflowError("modular is not finite")
    return val


def _solve_log_lambda(L: np.ndarray, q: np.ndarray) -> float:
    """ln of the unique lambda with sum exp(L - q ln lambda) = 1."""
    m0 = quad.log_modular(L, q, 0.0)
    qmin, qmax = float(np.min(q)), float(np.max(q))
    if qmax - qmin < 1e-15 * qmax:
        return m0 / qmax
    lo, hi = (m0 / qmax, m0 / qmin) if m0 >= 0 else (m0 / qmin, m0 / qmax)
    # the bracket is exact; widen it past rounding
    pad = 1e-9 * (1.0 + abs(m0))
    lo, hi = lo - pad, hi + pad
    g = lambda s: quad.log_modular(L, q, s)
    return brentq(g, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=200)


def power_luxemburg(values, partition: Partition, a_fn, q_fn) -> float:
    """Luxemburg norm in L^{q(.)} of the function v_cell * t^{a(t)}."""
    L, q = _log_terms(values, partition, a_fn, q_fn)
    if L.size == 0:
        return 0.0
    if np.any(np.isposinf(L)):
        return math.inf
    return math.exp(_solve_log_lambda(L, q))


def luxemburg_norm(f: StepFunction, p: ExponentFunction) -> float:
    """inf{lam > 0 : int |f/lam|^p <= 1}; 0 for f = 0."""
    _check_axis(f)
    return power_luxemburg(f.values, f.partition, None, p)


def lorentz_modular(f: StepFunction, spec: NormSpec) -> float:
    """int (w(t) t^{1/p - 1/q} f*(t))^{q(t)} dt (unweighted: t^{q/p - 1} f*^q)."""
    fs = rearrange(f)
    L, q = _log_terms(fs.values, fs.partition, spec.lorentz_power(), spec.q)
    if L.size == 0:
        return 0.0
    val = math.exp(quad.log_modular(L, q))
    if not math.isfinite(val):
        raise ModularOverflowError("Lorentz modular is not finite")
    return val


def lorentz_norm(f: StepFunction, spec: NormSpec) -> float:
    """|| w t^{1/p-1/q} h ||_{L^q} with h = f* (or f** when ``use_double_star``)."""
    fs = rearrange(f)
    h = double_star(fs) if spec.use_double_star else fs
    return power_luxemburg(h.values, h.partition, spec.lorentz_power(), spec.q)


@dataclass(frozen=True)
class SplitReport:
    full: float
    split: float
    agree: bool
    ratio: float


def split_modular_check(f: StepFunction, spec: NormSpec) -> SplitReport:
    """Compare the Lorentz modular with its two-term split using frozen
    powers q(0)/p(0) - 1 on (0, 1) and q(inf)/p(inf) - 1 on (1, ell)."""
    fs = rearrange(f)
    p, q = spec.p, spec.q
    c0 = q.limit_at_zero / p.limit_at_zero - 1.0
    cinf = q.limit_inf / p.limit_inf - 1.0

    def a_split(t):
        return np.where(t < 1.0, c0, cinf) / q(t)

    def total(a_fn):
        L, qq = _log_terms(fs.values, fs.partition, a_fn, q)
        if L.size == 0:
            return 0.0
        with np.errstate(over="ignore"):
            return float(np.exp(quad.log_modular(L, qq)))

    full = total(lambda t: 1.0 / p(t) - 1.0 / q(t))
    split = total(a_split)
    agree = math.isfinite(full) == math.isfinite(split)
    if full == 0.0 and split == 0.0:
        ratio = 1.0
    elif math.isfinite(full) and math.isfinite(split) and split > 0:
        ratio = full / split
    else:
        ratio = math.nan
    return SplitReport(full, split, agree, ratio)


@dataclass(frozen=True)
class HolderReport:
    integral: float
    norm_u: float
    norm_v: float
    k: float
    ratio: float
    holds: bool


def holder_check(u: StepFunction, v: StepFunction, p: ExponentFunction) -> HolderReport:
    """|int uv| <= k ||u||_p ||v||_p' with k = 1/p_- + 1/p'_-."""
    if u.partition != v.partition:
        raise ValueError("u and v must share a partition")
    rep = classify(p)
    if rep.p_minus <= 1.0:
        raise ValueError("Holder check needs p_minus > 1")
    pc = conjugate(p, rep.p_minus)
    # p'_- is attained where p is largest
    k = 1.0 / rep.p_minus + (rep.p_plus - 1.0) / rep.p_plus
    integral = float(np.sum(u.values * v.values * u.widths))
    nu, nv = luxemburg_norm(u, p), luxemburg_norm(v, pc)
    denom = nu * nv
    ratio = abs(integral) / denom if denom > 0 else 0.0
    return HolderReport(integral, nu, nv, k, ratio, ratio <= k * (1 + 1e-12))


def embedding_constant(m: float, spec: NormSpec, cells: int = 512) -> float:
    """c_m = || t^{1/q - 1/p} chi_[0, m] ||_{L^{q'}}, the local embedding constant."""
    part = Partition.geometric(cells, m * 2.0 ** -60, m)
    qc = conjugate(spec.q)
    a = lambda t: 1.0 / spec.q(t) - 1.0 / spec.p(t)
    return power_luxemburg(np.ones(part.cells), part, a, qc)


def norm_equivalence_experiment(spec: NormSpec, family: FamilySpec = FamilySpec(),
                                grid: GridSpec = GridSpec(t_min=2.0 ** -160, domain_length=1.0),
                                protocol: Protocol = Protocol(), members=None) -> BoundednessReport:
    """Sup over a family of ||f||^1 / ||f|| (star norm over plain norm).

    ``members`` may replace the generated family by an explicit list of
    ``(id, StepFunction)``; the refinement ladder then resamples them.
    """
    plain, star = spec.star(False), spec.star(True)
    g0 = spec.gamma.limit_at_zero if spec.gamma is not None else 0.0
    ginf = spec.gamma.limit_inf if spec.gamma is not None else 0.0
    crit0 = g0 + 1.0 / spec.p.limit_at_zero
    crit_inf = ginf + 1.0 / spec.p.limit_inf if math.isinf(grid.domain_length) else None

    def ratio(f):
        d = lorentz_norm(f, plain)
        if d == 0.0:
            return None
        n = lorentz_norm(f, star)
        return math.inf if not math.isfinite(n) or not math.isfinite(d) else n / d

    return _sweep(ratio, crit0, crit_inf, family, grid, protocol, members,
                  conditions=spec.assumptions(), label="norm-equivalence")


def _sweep(ratio_fn, crit0, crit_inf, family, grid, protocol, members=None,
           conditions=None, label="", ladder_key="eps0"):
    """Shared ratio sweep: refinement ladder x family, plus family extension."""
    from .grid import resample

    ref_curve, base_ratios = [], []
    for m in protocol.refinement:
        part = grid.partition(m)
        if members is not None:
            fam = [(i, resample(f, part) if f.partition.truncation <= part.truncation else f)
                   for i, f in members]
        else:
            fam = build_family(part, crit0, crit_inf, family)
        rs = []
        for fid, f in fam:
            r = ratio_fn(f)
            if r is not None:
                rs.append((fid, r))
        sup = max((r for _, r in rs), default=0.0)
        ref_curve.append((part.cells, sup))
        if not base_ratios:
            base_ratios = rs
        last_ratios = rs
    # the eps-ladder is read on the deepest grid, where near-critical powers are best resolved
    fam_curve = [(k.split("=")[1], r) for k, r in last_ratios if k.startswith(ladder_key + "=")]
    ext = math.nan
    if members is None:
        part = grid.partition(protocol.refinement[0])
        ext_rs = [ratio_fn(f) for _, f in build_family(part, crit0, crit_inf, family, extension=True)]
        ext_rs = [r for r in ext_rs if r is not None]
        ext = max(ext_rs, default=math.nan)
    sups = [s for _, s in ref_curve]
    base_sup = sups[0]
    verdict = decide(sups, [r for _, r in fam_curve], base_sup, ext, protocol)
    return BoundednessReport(
        ratios=base_ratios,
        sup_ratio=max(r for _, r in base_ratios) if base_ratios else 0.0,
        refinement_curve=ref_curve,
        family_curve=fam_curve,
        verdict=verdict,
        extension_sup=ext,
        conditions=dict(conditions or {}),
        label=label,
    )
