import math

import mpmath
import numpy as np
import pytest

from lorentzx.exponent import (ConjugateUndefinedError, DomainError, ExponentFunction, classify,
                               conjugate, constant, evaluate, format_exponent, from_formula,
                               log_holder_violation, make_test_exponent, parse_exponent)


def test_constant_value():
    assert evaluate(constant(2.0), 0.37) == 2.0


def test_log_linear_midpoint():
    p = ExponentFunction(samples=((1.0, 2.0), (math.e, 3.0)), limit_at_zero=2.0, limit_at_infinity=3.0)
    assert evaluate(p, math.sqrt(math.e)) == pytest.approx(2.5, abs=1e-14)


def test_formula_against_high_precision():
    p = from_formula(lambda t: 2.0 + 1.0 / np.log(np.e + 1.0 / t), 2.0, 2.0)
    mpmath.mp.dps = 40
    ref = 2 + 1 / mpmath.log(mpmath.e + 1)
    assert evaluate(p, 1.0) == pytest.approx(float(ref), rel=1e-14)
    # 2 + 1/ln(e + 1) = 2.76146...
    assert float(ref) == pytest.approx(2.76146, abs=1e-5)


def test_domain_error():
    with pytest.raises(DomainError):
        evaluate(constant(2.0), 0.0)
    with pytest.raises(DomainError):
        evaluate(constant(2.0), np.array([1.0, -1.0]))


def test_limits_reached_on_dyadic_sequences():
    p = make_test_exponent(2.0, 3.0, 0.5, "log-decay")
    t0 = np.exp2(-np.arange(10, 60))
    tinf = np.exp2(np.arange(10, 60))
    assert abs(p(t0[-1]) - 2.0) < 0.02
    assert abs(p(tinf[-1]) - 3.0) < 0.02
    # convergence is monotone in the envelope
    assert np.all(np.diff(np.abs(p(t0) - 2.0)) <= 1e-15)


@pytest.mark.parametrize("v, expected", [(2.0, 2.0), (4.0, 4.0 / 3.0)])
def test_conjugate_constants(v, expected):
    assert conjugate(constant(v))(0.5) == pytest.approx(expected, rel=1e-15)


def test_conjugate_limit():
    p = make_test_exponent(1.5, 2.0, 0.2, "log-decay")
    assert conjugate(p).limit_at_zero == pytest.approx(3.0)


def test_conjugate_undefined():
    with pytest.raises(ConjugateUndefinedError):
        conjugate(constant(1.0))


def test_conjugate_involution_and_reciprocals():
    p = make_test_exponent(1.8, 2.6, 0.4, "oscillating")
    pc = conjugate(p)
    pcc = conjugate(pc)
    t = np.exp2(np.linspace(-30, 30, 301))
    assert np.max(np.abs(pcc(t) - p(t))) < 1e-12
    assert np.max(np.abs(1.0 / p(t) + 1.0 / pc(t) - 1.0)) < 1e-12


def test_classify_constant():
    r = classify(constant(2.0))
    assert r.p_minus == r.p_plus == 2.0
    assert r.decay_constant_zero == 0.0 and r.decay_constant_infinity == 0.0
    assert r.in_class_Pa(1.0)


def test_classify_log_decay_constant_bounded():
    p = from_formula(lambda t: 2.0 + 1.0 / np.log(np.e + 1.0 / t), 2.0, 2.0)
    # independent oracle: maximise the product directly
    t = np.exp2(-np.linspace(1, 40, 20000))
    oracle = np.max(np.abs(p(t) - 2.0) * np.log(1.0 / t))
    r = classify(p)
    assert r.decay_constant_zero is not None
    assert r.decay_constant_zero <= 1.1
    assert r.decay_constant_zero >= oracle - 1e-9


def test_classify_loglog_fails():
    p = from_formula(lambda t: 2.0 + 1.0 / np.log(np.log(np.exp(np.e) + 1.0 / t)), 2.0, 2.0)
    k = np.arange(1, 61)
    prod = np.abs(p(np.exp2(-k)) - 2.0) * k * math.log(2)
    assert np.all(np.diff(prod) > 0)  # unbounded along t_k = 2^-k
    assert classify(p).decay_constant_zero is None
    assert classify(make_test_exponent(2.0, 2.0, 0.5, "log-log-violation")).decay_constant_zero is None


def test_classify_invariants():
    for mode in ("log-decay", "oscillating", "log-log-violation"):
        r = classify(make_test_exponent(2.0, 3.0, 0.5, mode))
        assert r.p_minus <= r.p_plus
        for a, flag in zip(r.thresholds, r.in_class):
            assert flag == (a < r.p_minus and r.p_plus < math.inf)


def test_decay_estimates_monotone_under_refinement():
    r = classify(make_test_exponent(2.0, 3.0, 0.5, "log-decay"))
    sups = [s for _, s in r.decay_curve_zero]
    assert all(b >= a for a, b in zip(sups, sups[1:]))
    assert sups[-1] / sups[-2] < 1.05


def test_make_test_exponent_modes():
    assert make_test_exponent(2, 2, 0, "log-decay").mode == "constant"
    r = classify(make_test_exponent(2, 3, 0.5, "log-decay"))
    assert r.decay_constant_zero is not None and r.decay_constant_infinity is not None
    osc = make_test_exponent(2, 2, 0.5, "oscillating")
    r = classify(osc)
    assert r.decay_constant_zero is not None and r.decay_constant_infinity is not None
    # interior local log-condition fails: the sampled modulus exceeds any fixed A
    assert log_holder_violation(osc) > 5.0
    assert log_holder_violation(make_test_exponent(2, 3, 0.5, "log-decay")) < 0.5


def test_serialization_roundtrip():
    p = ExponentFunction(samples=((0.5, 2.2), (2.0, 2.7)), limit_at_zero=2.0, limit_at_infinity=3.0)
    q = parse_exponent(format_exponent(p))
    t = np.exp2(np.linspace(-20, 20, 81))
    assert np.array_equal(p(t), q(t))
    assert parse_exponent("2.5")(0.3) == 2.5
    osc = parse_exponent("limit0=2.0, limitInf=2.0, amplitude=0.3, mode=oscillating")
    assert osc(0.7) == make_test_exponent(2.0, 2.0, 0.3, "oscillating")(0.7)
    with pytest.raises(ValueError):
        parse_exponent("limit0=2, bogus=1")
