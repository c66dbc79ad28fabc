import math

import numpy as np
import pytest

from lorentzx.exponent import constant, make_test_exponent
from lorentzx.family import FamilySpec, GridSpec
from lorentzx.grid import Partition, StepFunction
from lorentzx.hardy import (HardySpec, estimate_operator_norm, hardy_conditions, hardy_lower, hardy_upper,
                            operator_conditions_hold)

from conftest import random_step

TWO = constant(2.0)


def test_lower_averaging():
    p = Partition(np.array([0.0, 0.5, 1.0, 2.0, 4.0]))
    f = StepFunction(p, np.array([1.0, 1.0, 0.0, 0.0]))
    g = hardy_lower(f, HardySpec(TWO, TWO))
    assert np.allclose(g.values, np.minimum(p.right, 1.0) / p.right, rtol=1e-13)


def test_lower_power():
    p = Partition.geometric(64, 2.0 ** -20, 1.0)
    f = StepFunction(p, p.right ** 0.25)  # values only matter through s^{1/4} s^{-1/4}
    # use exact cell averages of s^{1/4}: int s^{1/4} s^{-1/4} = width, so feed s^{1/4} pointwise
    spec = HardySpec(TWO, TWO, alpha=constant(0.25))
    # closed form for the step input: t^{-3/4} sum_{cells<=t} v_j int s^{-1/4} ds
    cells = f.values * (p.right ** 0.75 - p.left ** 0.75) / 0.75
    ref = p.right ** -0.75 * np.cumsum(cells)
    assert np.allclose(hardy_lower(f, spec).values, ref, rtol=1e-6)


def test_lower_power_smooth_limit():
    """f(s) = s^{1/4} on (0, 1): g(t) = t^{1/4}, recovered as the grid refines."""
    errs = []
    for n in (64, 256, 1024):
        p = Partition.geometric(n, 2.0 ** -30, 1.0)
        # exact cell averages of s^{1/4} s^{-1/4} = 1 give the exact integral t
        vals = (p.right ** 1.25 - p.left ** 1.25) / 1.25 / p.widths
        g = hardy_lower(StepFunction(p, vals), HardySpec(TWO, TWO, alpha=constant(0.25)))
        errs.append(np.max(np.abs(g.values - p.right ** 0.25)))
    assert errs[-1] < errs[0]


def test_upper_log():
    p = Partition(np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0]))
    f = StepFunction(p, np.array([0.0, 0.0, 1.0, 1.0, 0.0]))
    g = hardy_upper(f, HardySpec(TWO, TWO, direction="upper"))
    t = p.right
    ref = np.where(t < 2.0, np.log(2.0 / np.maximum(t, 1.0)), 0.0)
    assert np.allclose(g.values, ref, rtol=1e-12, atol=1e-14)


def test_upper_half_power():
    p = Partition.geometric(128, 2.0 ** -20, 1.0)
    # exact averages of s^{1/2}: the upper integrand becomes s^{-1}
    vals = (p.right ** 1.5 - p.left ** 1.5) / 1.5 / p.widths
    spec = HardySpec(TWO, TWO, beta=constant(0.5), direction="upper")
    g = hardy_upper(StepFunction(p, vals), spec)
    # exact for the step input: int_cell v s^{-3/2} ds = 2 v (a^{-1/2} - b^{-1/2})
    a, b = p.left[1:], p.right[1:]
    cells = 2.0 * vals[1:] * (a ** -0.5 - b ** -0.5)
    tail = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    assert np.allclose(g.values, p.right ** 0.5 * tail, rtol=1e-6, atol=1e-15)
    # and close to the smooth answer t^{1/2} ln(1/t)
    t = p.right[:-1]
    assert np.allclose(g.values[:-1], t ** 0.5 * np.log(1.0 / t), rtol=5e-3)


def test_zero_and_linearity_and_monotonicity():
    rng = np.random.default_rng(1)
    spec_l = HardySpec(TWO, TWO, alpha=make_test_exponent(0.2, 0.1, 0.1, "oscillating"))
    spec_u = HardySpec(TWO, TWO, beta=constant(0.1), direction="upper")
    for spec, op in ((spec_l, hardy_lower), (spec_u, hardy_upper)):
        f = random_step(rng, lo=0.0, hi=3.0)
        assert np.all(op(StepFunction(f.partition, 0 * f.values), spec).values == 0)
        assert np.allclose(op(StepFunction(f.partition, 2.5 * f.values), spec).values,
                           2.5 * op(f, spec).values, rtol=1e-14)
        g = StepFunction(f.partition, f.values + rng.uniform(0, 1, f.partition.cells))
        assert np.all(op(f, spec).values <= op(g, spec).values)


def test_conditions():
    c = hardy_conditions(HardySpec(TWO, TWO))
    assert c["alpha0<1/p'0"] and c["alphainf<1/p'inf"] and c["chto_0"] and c["cvy7w_0"]
    assert not hardy_conditions(HardySpec(TWO, TWO, alpha=constant(0.5)))["alpha0<1/p'0"]
    c = hardy_conditions(HardySpec(TWO, constant(4.0), nu=constant(0.25)))
    assert c["cvy7w_0"] and c["chto_0"]
    fin = hardy_conditions(HardySpec(constant(2.0, 1.0), constant(2.0, 1.0)))
    assert fin["alphainf<1/p'inf"] == "n/a" and fin["betainf>-1/pinf"] == "n/a"


def test_classical_constant_on_finite_and_infinite():
    for length in (1.0, math.inf):
        p = constant(2.0, length)
        rep = estimate_operator_norm(HardySpec(p, p))
        assert rep.verdict == "bounded"
        assert 1.8 <= rep.sup_ratio <= 2.0
        assert rep.sup_ratio == max(r for _, r in rep.ratios)
        # the eps ladder approaches p' = 2 from below
        fam = [r for _, r in rep.family_curve]
        assert all(b > a for a, b in zip(fam, fam[1:])) and fam[-1] < 2.0


def test_reversed_alpha_blows_up():
    spec = HardySpec(TWO, TWO, alpha=make_test_exponent(0.55, 0.0, 0.0, "log-decay"))
    rep = estimate_operator_norm(spec)
    assert rep.verdict == "blow-up"
    assert not operator_conditions_hold(spec)


def test_indicator_family_bounded():
    fam = FamilySpec(eps=(), random=0, dyadic=True, extension_eps=(), extension_random=0)
    rep = estimate_operator_norm(HardySpec(TWO, TWO), fam)
    assert rep.verdict == "bounded"
