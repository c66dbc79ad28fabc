"""Seeded test families and the grid ladder used by every ratio sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Partition, StepFunction, resample

__all__ = ["SplitMix64", "GridSpec", "FamilySpec", "power_cell_averages", "build_family"]

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit splitmix generator; chosen so that seeded families are reproducible
    from the integer recurrence alone, independent of numpy's bit generators."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


@dataclass(frozen=True)
class GridSpec:
    """Base grid plus the refinement ladder.

    Level ``m`` uses ``m`` times the cells and ``m`` times the dyadic depth at
    each open end: t_min -> t_min**m (relative to 1) and, on infinite domains,
    T -> T**m. Per-cell log spacing is kept while the resolved range grows.
    """

    cells: int = 256
    t_min: float = 2.0 ** -80
    truncation: float = 2.0 ** 40
    domain_length: float = math.inf

    @property
    def end(self) -> float:
        return self.truncation if math.isinf(self.domain_length) else self.domain_length

    def partition(self, m: int = 1) -> Partition:
        end = self.end
        if math.isinf(self.domain_length):
            end = self.truncation ** m if self.truncation > 1 else self.truncation
            t_min = self.t_min ** m if self.t_min < 1 else self.t_min
        else:
            # depth measured relative to the domain length
            t_min = end * (self.t_min / end) ** m
        return Partition.geometric(self.cells * m, t_min, end)


@dataclass(frozen=True)
class FamilySpec:
    eps: tuple = (0.1, 0.03, 0.01, 0.003)
    random: int = 8
    seed: int = 20240601
    dyadic: bool = True
    extension_eps: tuple = (0.001,)
    extension_random: int = 8


def power_cell_averages(partition: Partition, c: float, lo: float, hi: float) -> np.ndarray:
    """Cell averages of s**c on [lo, hi] (zero elsewhere).

    On a cell starting at 0 the power is capped at its value at the cell's
    right end: the average there would be inflated by 1/(c+1) for
    near-critical c and is infinite for c <= -1.
    """
    a = np.clip(partition.left, lo, hi)
    b = np.clip(partition.right, lo, hi)
    w = partition.widths
    out = np.zeros(partition.cells)
    m = b > a
    a, b = a[m], b[m]
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(c + 1.0) < 1e-14:
            integ = np.where(a > 0, np.log(b / np.where(a > 0, a, 1.0)), np.inf)
        else:
            k = c + 1.0
            # b^k (1 - (a/b)^k) / k computed stably
            integ = np.where(a > 0, -(b ** k) * np.expm1(k * np.log(a / b)) / k, np.inf)
    fallback = ~np.isfinite(integ)
    integ = np.where(fallback, b ** c * (b - a), integ)
    out[m] = integ / w[m]
    return out


def _random_step(rng: SplitMix64, lo: float, hi: float, pieces: int = 12) -> StepFunction:
    u = np.sort(rng.uniforms(pieces - 1))
    bp = np.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * u)
    bp = np.unique(np.concatenate([[0.0, lo], bp, [hi]]))
    vals = rng.uniforms(bp.size - 1)
    return StepFunction(Partition(bp), vals)


def build_family(partition: Partition, crit0: float, crit_inf: float | None,
                 spec: FamilySpec, extension: bool = False):
    """Family members ``(id, StepFunction)`` on ``partition``.

    ``crit0`` is the critical power at 0: the eps-ladder uses
    s**(-crit0 + eps) on (0, 1). ``crit_inf`` (infinite domains) gives
    s**(-crit_inf - eps) on (1, T).
    """
    end = partition.truncation
    first = partition.breakpoints[1]
    unit = min(1.0, end)
    members = []
    eps_list = spec.extension_eps if extension else spec.eps
    for e in eps_list:
        members.append((f"eps0={e}", StepFunction(partition, power_cell_averages(partition, -crit0 + e, 0.0, unit))))
        if crit_inf is not None and end > 1.0:
            members.append((f"epsinf={e}", StepFunction(partition, power_cell_averages(partition, -crit_inf - e, 1.0, end))))
    n_rand = spec.extension_random if extension else spec.random
    rng = SplitMix64(spec.seed + (7919 if extension else 0))
    for i in range(n_rand):
        f = _random_step(rng, max(first, end * 2.0 ** -60), end)
        members.append((f"random{i}", resample(f, partition)))
    if spec.dyadic and not extension:
        kmax = int(math.floor(-math.log2(max(first, 1e-300) / end)))
        for k in range(1, kmax, max(1, kmax // 12)):
            hi = end * 2.0 ** (-k + 1)
            members.append((f"dyadic{k}", StepFunction.indicator(partition, hi / 2.0, hi)))
    return members
