"""
Hardy's inequality on a log grid
================================

The averaging operator (1/t) int_0^t f is bounded on L^2(0, inf) with norm 2.
The ratio sweep below climbs towards 2 along f_eps(s) = s^(-1/2 + eps);
pushing the power weight past 1/p' turns the same sweep into a blow-up.
"""

from lorentzx import constant, make_test_exponent
from lorentzx.hardy import HardySpec, estimate_operator_norm

two = constant(2.0)

rep = estimate_operator_norm(HardySpec(two, two))
print("verdict", rep.verdict, "sup ratio", round(rep.sup_ratio, 4))
for eps, r in rep.family_curve:
    print(f"  eps={eps:6s} ratio {r:.4f}")          # 1.6 ... 1.9 < 2

# under grid refinement the sup stays put
print("refinement", [(cells, round(r, 4)) for cells, r in rep.refinement_curve])

# weight t^alpha with alpha(0) = 0.55 > 1/p'(0) = 0.5
bad = HardySpec(two, two, alpha=make_test_exponent(0.55, 0.0, 0.0, "log-decay"))
rep = estimate_operator_norm(bad)
print("alpha(0)=0.55:", rep.verdict, [f"{r:.3g}" for _, r in rep.family_curve])
