"""Hardy-type operators with variable powers and their norm estimation.

    lower:  t^{alpha(t)+nu(t)-1} int_0^t f(s) s^{-alpha(s)} ds
    upper:  t^{beta(t)+nu(t)}    int_t^ell f(s) s^{-beta(s)-1} ds

Both are evaluated at cell right endpoints from one cumulative pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _quadrature as quad
from .exponent import ExponentFunction, classify, constant
from .family import FamilySpec, GridSpec
from .grid import StepFunction
from .norms import _sweep, luxemburg_norm
from .report import BoundednessReport, Protocol

__all__ = [
    "HardySpec",
    "DivergenceError",
    "hardy_lower",
    "hardy_upper",
    "hardy_conditions",
    "operator_conditions_hold",
    "apply",
    "estimate_operator_norm",
]


class DivergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class HardySpec:
    p: ExponentFunction
    q: ExponentFunction
    alpha: ExponentFunction = constant(0.0)
    beta: ExponentFunction = constant(0.0)
    nu: ExponentFunction = constant(0.0)
    direction: str = "lower"

    def __post_init__(self):
        if self.direction not in ("lower", "upper"):
            raise ValueError("direction is 'lower' or 'upper'")

    @property
    def infinite(self) -> bool:
        return self.p.infinite_domain

    @property
    def exponent_relation(self) -> dict:
        """1/q = 1/p - nu at 0 (and at infinity on infinite domains)."""
        ok0 = math.isclose(1 / self.q.limit_at_zero, 1 / self.p.limit_at_zero - self.nu.limit_at_zero,
                           rel_tol=1e-12, abs_tol=1e-12)
        out = {"cvy7w_0": ok0}
        if self.infinite:
            out["cvy7w_inf"] = math.isclose(1 / self.q.limit_inf, 1 / self.p.limit_inf - self.nu.limit_inf,
                                            rel_tol=1e-12, abs_tol=1e-12)
        else:
            out["cvy7w_inf"] = "n/a"
        return out


def _cumulative_weights(f: StepFunction, power_fn, skip_first: bool = False) -> np.ndarray:
    """Per-cell int |f| s^{power(s)} ds (exact in f, quadrature in s)."""
    p = f.partition
    if p.start < 0:
        raise ValueError("Hardy operators act on functions of t in [0, ell]")
    out = np.zeros(p.cells)
    nz = f.values != 0
    if skip_first:
        nz[0] = False
    if np.any(nz):
        ints = quad.power_cell_integrals(p.left[nz], p.right[nz], power_fn)
        out[nz] = np.abs(f.values[nz]) * ints
    return out


def hardy_lower(f: StepFunction, spec: HardySpec) -> StepFunction:
    a, nu = spec.alpha, spec.nu
    cells = _cumulative_weights(f, lambda s: -a(s))
    if np.any(np.isinf(cells)):
        raise DivergenceError("f(s) s^{-alpha(s)} is not integrable at 0 on this grid")
    cum = np.cumsum(cells)
    t = f.partition.right
    return StepFunction(f.partition, np.exp((a(t) + nu(t) - 1.0) * np.log(t)) * cum)


def hardy_upper(f: StepFunction, spec: HardySpec) -> StepFunction:
    b, nu = spec.beta, spec.nu
    # the first cell is never needed: outputs sit at right endpoints
    cells = _cumulative_weights(f, lambda s: -b(s) - 1.0, skip_first=True)
    # tail sums strictly to the right of each right endpoint
    tail = np.concatenate([np.cumsum(cells[::-1])[::-1][1:], [0.0]])
    t = f.partition.right
    return StepFunction(f.partition, np.exp((b(t) + nu(t)) * np.log(t)) * tail)


def hardy_conditions(spec: HardySpec) -> dict:
    """Strict inequalities for boundedness plus the range/relation flags."""
    p0, pinf = spec.p.limit_at_zero, spec.p.limit_inf
    inf = spec.infinite
    na = "n/a"
    out = {
        "alpha0<1/p'0": spec.alpha.limit_at_zero < 1.0 - 1.0 / p0,
        "alphainf<1/p'inf": (spec.alpha.limit_inf < 1.0 - 1.0 / pinf) if inf else na,
        "beta0>-1/p0": spec.beta.limit_at_zero > -1.0 / p0,
        "betainf>-1/pinf": (spec.beta.limit_inf > -1.0 / pinf) if inf else na,
        "chto_0": 0.0 <= spec.nu.limit_at_zero < 1.0 / p0,
        "chto_inf": (0.0 <= spec.nu.limit_inf < 1.0 / pinf) if inf else na,
    }
    out.update(spec.exponent_relation)
    return out


def operator_conditions_hold(spec: HardySpec) -> bool:
    c = hardy_conditions(spec)
    keys = ["chto_0", "chto_inf", "cvy7w_0", "cvy7w_inf"]
    keys += ["alpha0<1/p'0", "alphainf<1/p'inf"] if spec.direction == "lower" else ["beta0>-1/p0", "betainf>-1/pinf"]
    return all(c[k] is True or c[k] == "n/a" for k in keys)


def apply(f: StepFunction, spec: HardySpec) -> StepFunction:
    return hardy_lower(f, spec) if spec.direction == "lower" else hardy_upper(f, spec)


def estimate_operator_norm(spec: HardySpec, family: FamilySpec = FamilySpec(),
                           grid: Optional[GridSpec] = None,
                           protocol: Protocol = Protocol()) -> BoundednessReport:
    """Ratio sweep ||H f||_{L^q} / ||f||_{L^p} with the stability protocol."""
    if grid is None:
        grid = GridSpec(domain_length=spec.p.domain_length)
    crit0 = 1.0 / spec.p.limit_at_zero
    crit_inf = 1.0 / spec.p.limit_inf if math.isinf(grid.domain_length) else None

    def ratio(f):
        d = luxemburg_norm(f, spec.p)
        if d == 0.0:
            return None
        try:
            g = apply(f, spec)
        except DivergenceError:
            return math.inf
        return luxemburg_norm(g, spec.q) / d

    conds = hardy_conditions(spec)
    rp, rq = classify(spec.p), classify(spec.q)
    conds["p_in_P1"] = rp.in_class_Pa(1.0) and rp.in_log_decay_class
    conds["q_in_P1"] = rq.in_class_Pa(1.0) and rq.in_log_decay_class
    return _sweep(ratio, crit0, crit_inf, family, grid, protocol, conditions=conds,
                  label=f"hardy-{spec.direction}")
