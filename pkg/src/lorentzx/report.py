"""Boundedness reports and the stability / blow-up protocol.

A ratio sweep is called *bounded* when its supremum moves by less than the
flatness margin across the refinement ladder and under family extension. It
is called *blow-up* when the ratios along the epsilon ladder or along the
refinement ladder grow monotonically by at least the blow-up factor. Both
rules are heuristics at desk scale, not proofs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

__all__ = ["Protocol", "BoundednessReport", "monotone_growth", "spread", "decide"]


@dataclass(frozen=True)
class Protocol:
    flatness: float = 0.10
    blowup_factor: float = 10.0
    refinement: tuple = (1, 2, 4)


@dataclass
class BoundednessReport:
    ratios: list
    sup_ratio: float
    refinement_curve: list
    family_curve: list
    verdict: str
    extension_sup: float = math.nan
    conditions: dict = field(default_factory=dict)
    label: str = ""

    def rows(self):
        """(kind, key, value) rows for CSV output, in a fixed order."""
        out = [("ratio", k, v) for k, v in self.ratios]
        out += [("refinement", k, v) for k, v in self.refinement_curve]
        out += [("family", k, v) for k, v in self.family_curve]
        out.append(("extension_sup", "", self.extension_sup))
        return out

    def to_csv(self, header: str = "") -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "key", "value"])
        for kind, key, val in self.rows():
            w.writerow([kind, key, repr(float(val))])
        for k in sorted(self.conditions):
            w.writerow(["condition", k, self.conditions[k]])
        w.writerow(["summary", "sup_ratio", repr(float(self.sup_ratio))])
        w.writerow(["summary", "verdict", self.verdict])
        return buf.getvalue()


def monotone_growth(values, factor: float) -> bool:
    """Non-decreasing sequence whose last/first ratio reaches ``factor``."""
    vals = [float(v) for v in values]
    if len(vals) < 2:
        return False
    if any(math.isinf(v) for v in vals):
        return True
    if vals[0] <= 0:
        return False
    nondecr = all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
    return nondecr and vals[-1] / vals[0] >= factor


def spread(values) -> float:
    vals = [float(v) for v in values]
    lo, hi = min(vals), max(vals)
    if math.isinf(hi):
        return math.inf
    if lo <= 0:
        return 0.0 if hi <= 0 else math.inf
    return hi / lo - 1.0


def decide(refinement_sups, family_ratios, base_sup, extension_sup, protocol: Protocol) -> str:
    if any(math.isinf(v) or math.isnan(v) for v in list(refinement_sups) + [base_sup]):
        return "blow-up"
    if monotone_growth(family_ratios, protocol.blowup_factor):
        return "blow-up"
    if monotone_growth(refinement_sups, protocol.blowup_factor):
        return "blow-up"
    flat = spread(refinement_sups) < protocol.flatness
    ext_ok = math.isnan(extension_sup) or spread([base_sup, max(base_sup, extension_sup)]) < protocol.flatness
    if flat and ext_ok:
        return "bounded"
    return "inconclusive"
