"""Cell quadrature for integrands of the form |v t^a(t)|^q(t).

Cells away from 0 use an 8-point Gauss-Legendre rule in ln t. A cell that
starts at 0 uses Gauss-Jacobi with the power t^c, c = a(b) q(b) frozen at the
right endpoint b, which integrates the endpoint singularity exactly; when
c <= -1 the integral diverges and the log-weight is +inf.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import logsumexp, roots_jacobi

NODES = 8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(NODES)


@lru_cache(maxsize=256)
def _jacobi(c: float):
    x, w = roots_jacobi(NODES, 0.0, c)
    return x, w


def log_nodes(left: np.ndarray, right: np.ndarray):
    """Gauss nodes and weights in u = ln t for cells with left > 0."""
    la, lb = np.log(left)[:, None], np.log(right)[:, None]
    u = la + (lb - la) * (_GL_X[None, :] + 1.0) / 2.0
    t = np.exp(u)
    w = (lb - la) / 2.0 * _GL_W[None, :] * t
    return t, w


def zero_cell_terms(b: float, c: float, g):
    """Nodes and log-weights for int_0^b t^c g(t) dt, c > -1.

    Returns (t, log_w) with int = sum exp(log_w) * g(t).
    """
    x, w = _jacobi(round(float(c), 15))
    t = b * (1.0 + x) / 2.0
    log_w = np.log(w) + (c + 1.0) * np.log(b / 2.0)
    return t, log_w


def power_log_terms(values, left, right, a_fn, q_fn):
    """Per-node log-terms of int |v t^a|^q dt over the cells.

    Returns ``(logterm, q)`` flattened such that the modular of ``v / lam`` is
    ``sum exp(logterm - q ln lam)``. Cells with v = 0 contribute nothing.
    ``a_fn`` may be None (a = 0).
    """
    values = np.abs(np.asarray(values, dtype=float))
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    logs, qs = [], []
    nz = values > 0
    zero = nz & (left <= 0.0)
    inner = nz & (left > 0.0)
    if np.any(inner):
        t, w = log_nodes(left[inner], right[inner])
        q = q_fn(t)
        la = a_fn(t) * np.log(t) if a_fn is not None else 0.0
        lv = np.log(values[inner])[:, None]
        keep = w > 0  # cells narrower than the spacing of floats near t carry no mass
        with np.errstate(divide="ignore"):
            lw = np.log(np.where(keep, w, 1.0))
        logs.append((lw + q * (lv + la))[keep])
        qs.append(q[keep])
    for i in np.flatnonzero(zero):
        b = float(right[i])
        qb = float(q_fn(np.array([b]))[0])
        ab = float(a_fn(np.array([b]))[0]) if a_fn is not None else 0.0
        c = ab * qb
        lv = np.log(values[i])
        if c <= -1.0:
            logs.append(np.array([np.inf]))
            qs.append(np.array([qb]))
            continue
        t, lw = zero_cell_terms(b, c, None)
        q = q_fn(t)
        a = a_fn(t) if a_fn is not None else np.zeros_like(t)
        # t^{a q} = t^c * t^{a q - c}
        logs.append(lw + q * lv + (a * q - c) * np.log(t))
        qs.append(q)
    if not logs:
        return np.empty(0), np.empty(0)
    return np.concatenate(logs), np.concatenate(qs)


def log_modular(logterm, q, log_lam: float = 0.0) -> float:
    if logterm.size == 0:
        return -np.inf
    return float(logsumexp(logterm - q * log_lam))


def power_cell_integrals(left, right, a_fn):
    """int_cell t^{a(t)} dt per cell (a_fn=None means a = 0)."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    out = np.empty(left.size)
    inner = left > 0
    if np.any(inner):
        t, w = log_nodes(left[inner], right[inner])
        a = a_fn(t) if a_fn is not None else 0.0
        out[inner] = np.sum(w * np.exp(a * np.log(t)), axis=1)
    for i in np.flatnonzero(~inner):
        b = float(right[i])
        if left[i] < 0:
            raise ValueError("power integrands need nonnegative cells")
        c = float(a_fn(np.array([b]))[0]) if a_fn is not None else 0.0
        if c <= -1.0:
            out[i] = np.inf
            continue
        t, lw = zero_cell_terms(b, c, None)
        a = a_fn(t) if a_fn is not None else np.zeros_like(t)
        out[i] = float(np.sum(np.exp(lw + (a - c) * np.log(t))))
    return out
