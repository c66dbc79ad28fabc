"""Variable exponents on the rearrangement axis [0, ell].

An :class:`ExponentFunction` is either sample based (linear interpolation in
``u = ln t``) or formula based (one of the named test modes, or an arbitrary
callable produced by :func:`conjugate` / :meth:`ExponentFunction.map`).
Beyond the sampled range the value relaxes towards the stored limits at a
logarithmic rate, so the decay conditions at 0 and infinity hold by
construction.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ExponentFunction",
    "ClassReport",
    "constant",
    "from_formula",
    "evaluate",
    "conjugate",
    "classify",
    "make_test_exponent",
    "parse_exponent",
    "format_exponent",
    "log_holder_violation",
]

MODES = ("constant", "samples", "log-decay", "log-log-violation", "oscillating", "formula")

# geometric evaluation grid used by classify: 512 points in (2^-40, 2^40)
DEFAULT_GRID_LOG2 = (-40.0, 40.0)
DEFAULT_GRID_POINTS = 512


class DomainError(ValueError):
    pass


class ConjugateUndefinedError(ValueError):
    pass


def _log_decay_envelope(t):
    # ~ 1/ln(1/t) at 0 and ~ 1/ln t at infinity, bounded by 1/ln(e+1)^2
    return 1.0 / (np.log(np.e + 1.0 / t) * np.log(np.e + t))


def _transition(t):
    return t / (1.0 + t)


def _mode_formula(mode, limit0, limit_inf, amplitude):
    """Return the vectorised formula of a named test exponent."""
    dl = limit_inf - limit0
    if mode == "constant":
        return lambda t: np.full_like(t, limit0, dtype=float)
    if mode == "log-decay":
        return lambda t: limit0 + dl * _transition(t) + amplitude * _log_decay_envelope(t)
    if mode == "log-log-violation":
        def f(t):
            slow = 1.0 / np.log(np.log(np.exp(np.e) + 1.0 / t))
            return limit0 + dl * _transition(t) + amplitude * slow / np.log(np.e + t)
        return f
    if mode == "oscillating":
        def f(t):
            # bounded, discontinuous-in-the-limit oscillation accumulating at t = 1;
            # the envelope keeps both endpoint decay conditions intact
            d = np.abs(t - 1.0) + 1e-300
            osc = np.sin(1.0 / d)
            return limit0 + dl * _transition(t) + amplitude * _log_decay_envelope(t) * osc
        return f
    raise ValueError(f"unknown exponent mode {mode!r}")


@dataclass(frozen=True)
class ExponentFunction:
    """Variable exponent p(t) on (0, domain_length).

    Sample-based exponents interpolate linearly in ``ln t``. Named modes and
    ``formula`` exponents are evaluated from their closed form.
    """

    samples: tuple = ()
    limit_at_zero: float = 2.0
    limit_at_infinity: Optional[float] = None
    domain_length: float = math.inf
    mode: str = "samples"
    amplitude: float = 0.0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown exponent mode {self.mode!r}")
        if not self.domain_length > 0:
            raise ValueError("domain_length must be positive")
        if self.samples:
            ts = [s[0] for s in self.samples]
            if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("sample abscissae must be positive and increasing")

    @property
    def infinite_domain(self) -> bool:
        return math.isinf(self.domain_length)

    @property
    def limit_inf(self) -> float:
        # value used beyond the last sample / at the infinity end
        if self.limit_at_infinity is None:
            return self.limit_at_zero if not self.samples else self.samples[-1][1]
        return self.limit_at_infinity

    def __call__(self, t):
        return evaluate(self, t)

    def map(self, fn: Callable, limit_fn: Optional[Callable] = None) -> "ExponentFunction":
        """Pointwise transform ``fn(p(t))``; limits are mapped by ``limit_fn`` (default ``fn``)."""
        limit_fn = limit_fn or fn
        base = self
        li = None if self.limit_at_infinity is None else float(limit_fn(self.limit_at_infinity))
        return ExponentFunction(
            samples=(),
            limit_at_zero=float(limit_fn(self.limit_at_zero)),
            limit_at_infinity=li,
            domain_length=self.domain_length,
            mode="formula",
            func=lambda t: fn(base._raw(t)),
        )

    def combine(self, other: "ExponentFunction", fn: Callable) -> "ExponentFunction":
        """Pointwise ``fn(self(t), other(t))`` with limits combined the same way."""
        a, b = self, other
        if a.limit_at_infinity is None or b.limit_at_infinity is None:
            li = None
        else:
            li = float(fn(a.limit_at_infinity, b.limit_at_infinity))
        return ExponentFunction(
            samples=(),
            limit_at_zero=float(fn(a.limit_at_zero, b.limit_at_zero)),
            limit_at_infinity=li,
            domain_length=min(a.domain_length, b.domain_length),
            mode="formula",
            func=lambda t: fn(a._raw(t), b._raw(t)),
        )

    def __add__(self, other):
        if isinstance(other, ExponentFunction):
            return self.combine(other, lambda x, y: x + y)
        return self.map(lambda x: x + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ExponentFunction):
            return self.combine(other, lambda x, y: x - y)
        return self.map(lambda x: x - other)

    def __neg__(self):
        return self.map(lambda x: -x)

    def reciprocal(self) -> "ExponentFunction":
        return self.map(lambda x: 1.0 / x)

    def with_limits(self, limit0=None, limit_inf=None, amplitude=None) -> "ExponentFunction":
        """Copy of a named-mode exponent with some parameters replaced."""
        if self.mode not in ("constant", "log-decay", "log-log-violation", "oscillating"):
            raise ValueError("only named-mode exponents can be re-parametrised")
        l0 = self.limit_at_zero if limit0 is None else limit0
        li = self.limit_inf if limit_inf is None else limit_inf
        amp = self.amplitude if amplitude is None else amplitude
        mode = self.mode
        if mode == "constant" and (li != l0 or amp != 0):
            mode = "log-decay"
        return make_test_exponent(l0, li, amp, mode, domain_length=self.domain_length)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(t), dtype=float)
        if self.mode != "samples":
            f = _mode_formula(self.mode, self.limit_at_zero, self.limit_inf, self.amplitude)
            return np.asarray(f(t), dtype=float)
        return _interp_samples(self, t)


def _interp_samples(p: ExponentFunction, t):
    if not p.samples:
        return np.full_like(t, p.limit_at_zero)
    ts = np.array([s[0] for s in p.samples], dtype=float)
    vs = np.array([s[1] for s in p.samples], dtype=float)
    u = np.log(t)
    out = np.interp(u, np.log(ts), vs)
    l0 = p.limit_at_zero
    # below the first sample: |p - p(0)| ~ C / ln(1/t)
    lo = t < ts[0]
    if np.any(lo):
        anchor = min(ts[0], 0.5)
        c0 = (vs[0] - l0) * math.log(1.0 / anchor)
        tl = t[lo]
        blend = np.where(tl < anchor, l0 + c0 / np.log(1.0 / np.minimum(tl, anchor)), vs[0])
        out[lo] = blend
    hi = t > ts[-1]
    if np.any(hi):
        linf = p.limit_inf
        cinf = (vs[-1] - linf) * math.log(math.e + ts[-1])
        out[hi] = linf + cinf / np.log(np.e + t[hi])
    return out


def constant(value: float, domain_length: float = math.inf) -> ExponentFunction:
    li = value if math.isinf(domain_length) else None
    return ExponentFunction((), float(value), li, domain_length, "constant", 0.0)


def from_formula(fn: Callable, limit0: float, limit_inf: Optional[float] = None,
                 domain_length: float = math.inf) -> ExponentFunction:
    return ExponentFunction((), float(limit0), limit_inf, domain_length, "formula", 0.0, fn)


def evaluate(p: ExponentFunction, t):
    """Value of ``p`` at ``t`` (scalar or array); raises DomainError for t <= 0."""
    scalar = np.ndim(t) == 0
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("exponent evaluated at t <= 0")
    out = p._raw(arr)
    return float(out) if scalar else out


def conjugate(p: ExponentFunction, p_minus: Optional[float] = None) -> ExponentFunction:
    """Pointwise conjugate exponent p'(t) = p(t)/(p(t)-1)."""
    if p_minus is None:
        p_minus = classify(p).p_minus
    if p_minus <= 1.0 or p.limit_at_zero <= 1.0 or (p.limit_at_infinity is not None and p.limit_at_infinity <= 1.0):
        raise ConjugateUndefinedError("conjugate exponent needs p_minus > 1")
    if p.mode == "constant":
        v = p.limit_at_zero / (p.limit_at_zero - 1.0)
        return constant(v, p.domain_length)
    return p.map(lambda x: x / (x - 1.0))


@dataclass(frozen=True)
class ClassReport:
    p_minus: float
    p_plus: float
    thresholds: tuple
    in_class: tuple  # booleans aligned with thresholds
    decay_constant_zero: Optional[float]  # None marks divergence
    decay_constant_infinity: Optional[float]
    decay_curve_zero: tuple = ()
    decay_curve_infinity: tuple = ()

    def in_class_Pa(self, a: float) -> bool:
        return a < self.p_minus and self.p_plus < math.inf

    @property
    def in_log_decay_class(self) -> bool:
        ok0 = self.decay_constant_zero is not None
        okinf = self.decay_constant_infinity is not None
        return ok0 and okinf


def _grid(p: ExponentFunction, points: int, log2_range) -> np.ndarray:
    t = np.exp2(np.linspace(log2_range[0], log2_range[1], points))
    if not p.infinite_domain:
        t = t[t < p.domain_length]
    return t


# dyadic depths of the nested decay-constant grids
_DECAY_DEPTHS = (40, 80, 160, 320)


def _decay_sup(p: ExponentFunction, at_zero: bool):
    """Running sup of the decay product on nested dyadic grids.

    Returns the curve of (depth, sup). Divergence is declared when the sup
    increases strictly at every extension and has at least doubled overall:
    a heuristic, not a proof.
    """
    curve = []
    for depth in _DECAY_DEPTHS:
        k = np.arange(8, 8 * depth + 1) / 8.0  # nested: each depth extends the last
        if at_zero:
            t = np.exp2(-k)
            prod = np.abs(p._raw(t) - p.limit_at_zero) * np.log(1.0 / t)
        else:
            t = np.exp2(k)
            prod = np.abs(p._raw(t) - p.limit_inf) * np.log(np.e + t)
        curve.append((depth, float(np.max(prod))))
    sups = [c[1] for c in curve]
    growing = all(b > a * (1 + 1e-9) for a, b in zip(sups, sups[1:]))
    diverges = growing and sups[0] > 0 and sups[-1] >= 2.0 * sups[0]
    return (None if diverges else sups[-1]), tuple(curve)


def classify(p: ExponentFunction, thresholds: Sequence[float] = (0.0, 1.0),
             points: int = DEFAULT_GRID_POINTS, log2_range=DEFAULT_GRID_LOG2) -> ClassReport:
    """Bounds p_-, p_+ and measured log-decay constants of ``p``."""
    t = _grid(p, points, log2_range)
    v = p._raw(t)
    pm, pp = float(np.min(v)), float(np.max(v))
    # the limits belong to the closure of the range
    pm = min(pm, p.limit_at_zero)
    pp = max(pp, p.limit_at_zero)
    if p.infinite_domain:
        pm, pp = min(pm, p.limit_inf), max(pp, p.limit_inf)
    c0, curve0 = _decay_sup(p, at_zero=True)
    if p.infinite_domain:
        cinf, curveinf = _decay_sup(p, at_zero=False)
    else:
        cinf, curveinf = 0.0, ()
    th = tuple(float(a) for a in thresholds)
    flags = tuple(a < pm and pp < math.inf for a in th)
    return ClassReport(pm, pp, th, flags, c0, cinf, curve0, curveinf)


def make_test_exponent(limit_zero: float, limit_infinity: float, amplitude: float,
                       mode: str, domain_length: float = math.inf) -> ExponentFunction:
    """Admissible or deliberately inadmissible test exponent.

    ``log-decay`` satisfies both endpoint conditions with a constant
    proportional to ``amplitude``; ``log-log-violation`` fails at 0;
    ``oscillating`` satisfies both endpoint conditions but has no interior
    log-Holder regularity (it oscillates without limit near t = 1).
    """
    if mode not in ("constant", "log-decay", "log-log-violation", "oscillating"):
        raise ValueError(f"unknown test-exponent mode {mode!r}")
    if mode == "log-decay" and amplitude == 0 and limit_zero == limit_infinity:
        mode = "constant"
    li = float(limit_infinity) if math.isinf(domain_length) else None
    if mode == "constant":
        return ExponentFunction((), float(limit_zero), li, domain_length, "constant", 0.0)
    p = ExponentFunction((), float(limit_zero), li, domain_length, mode, float(amplitude))
    if li is None and limit_infinity != limit_zero:
        # finite domains still use limit_infinity to shape the transition
        p = ExponentFunction((), float(limit_zero), None, domain_length, "formula", 0.0,
                             _mode_formula(mode, limit_zero, limit_infinity, amplitude))
    return p


def log_holder_violation(p: ExponentFunction, center: float = 1.0, pairs: int = 200) -> float:
    """Largest sampled |p(t)-p(s)| * ln(1/|t-s|) over close pairs near ``center``.

    Unbounded growth of this quantity under shrinking separation means the
    local log-condition fails at ``center``.
    """
    k = np.linspace(2.0, 40.0, pairs)
    d = np.exp2(-k)
    best = 0.0
    for off in np.linspace(0.0, 1.0, 16, endpoint=False):
        s = center + d * (1.0 + off)
        t = s + d * 0.37
        val = np.abs(p._raw(t) - p._raw(s)) * np.log(1.0 / np.abs(t - s))
        best = max(best, float(np.max(val)))
    return best


# --- serialisation: limit0=..., limitInf=..., samples=[(t,v),...], mode=... ---

_FIELD = re.compile(r"\s*(\w+)\s*=\s*(\[.*?\]|[^,]+)\s*(?:,|$)")


def format_exponent(p: ExponentFunction) -> str:
    """Structured text block for an exponent (formula exponents are sampled)."""
    parts = [f"limit0={p.limit_at_zero!r}"]
    if p.limit_at_infinity is not None:
        parts.append(f"limitInf={p.limit_at_infinity!r}")
    if not p.infinite_domain:
        parts.append(f"length={p.domain_length!r}")
    samples = p.samples
    mode = p.mode
    if mode == "formula":
        hi = 40.0 if p.infinite_domain else math.log2(p.domain_length)
        t = np.exp2(np.linspace(-40.0, hi, 161))
        if not p.infinite_domain:
            t = t[t < p.domain_length]
        samples = tuple(zip(t.tolist(), p._raw(t).tolist()))
        mode = "samples"
    parts.append("samples=[" + ",".join(f"({a!r},{b!r})" for a, b in samples) + "]")
    if p.amplitude:
        parts.append(f"amplitude={p.amplitude!r}")
    parts.append(f"mode={mode}")
    return ", ".join(parts)


def parse_exponent(text: str) -> ExponentFunction:
    """Inverse of :func:`format_exponent`; a bare number means a constant."""
    text = text.strip()
    try:
        return constant(float(text))
    except ValueError:
        pass
    fields = {}
    pos = 0
    while pos < len(text):
        m = _FIELD.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"malformed exponent block near {text[pos:pos + 20]!r}")
        fields[m.group(1)] = m.group(2).strip()
        pos = m.end()
    unknown = set(fields) - {"limit0", "limitInf", "samples", "mode", "amplitude", "length"}
    if unknown:
        raise ValueError(f"unknown exponent fields {sorted(unknown)}")
    if "limit0" not in fields:
        raise ValueError("exponent block needs limit0")
    l0 = float(fields["limit0"])
    li = float(fields["limitInf"]) if "limitInf" in fields else None
    length = float(fields.get("length", "inf"))
    mode = fields.get("mode", "samples")
    amp = float(fields.get("amplitude", "0"))
    samples = ()
    if fields.get("samples", "[]") not in ("[]", ""):
        pairs = re.findall(r"\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)", fields["samples"])
        samples = tuple((float(a), float(b)) for a, b in pairs)
    if mode in ("log-decay", "log-log-violation", "oscillating", "constant"):
        return make_test_exponent(l0, l0 if li is None else li, amp, mode, domain_length=length)
    if mode != "samples":
        raise ValueError(f"mode {mode!r} cannot be parsed")
    if li is None and math.isinf(length):
        li = samples[-1][1] if samples else l0
    return ExponentFunction(samples, l0, li, length, "samples", 0.0)


def with_domain(p: ExponentFunction, domain_length: float) -> ExponentFunction:
    """Same exponent restricted to a domain of the given length."""
    li = p.limit_at_infinity if math.isinf(domain_length) else None
    if math.isinf(domain_length) and li is None:
        li = p.limit_inf
    return replace(p, domain_length=domain_length, limit_at_infinity=li)
