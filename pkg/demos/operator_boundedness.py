"""
Classical operators on weighted Lorentz spaces
==============================================

Maximal function, Riesz potential and Hilbert transform of step functions
are evaluated in closed form. The boundedness experiment sweeps
||T f|| / ||f|| over a test family on [0, 1] with an oscillating exponent,
which has no log-Holder regularity in the interior.
"""

import numpy as np

from lorentzx import constant, make_test_exponent
from lorentzx import operators as op
from lorentzx.exponent import log_holder_violation
from lorentzx.grid import Partition, StepFunction
from lorentzx.norms import NormSpec

box = StepFunction(Partition(np.array([0.0, 1.0])), np.array([1.0]))
print("M chi_[0,1](3)     =", op.maximal_at(box, [3.0])[0])          # 1/6: best ball is [0, 6]
print("H chi_[0,1](2)     =", op.hilbert_at(box, [2.0])[0], "= ln 2")
print("I_1/2 chi_[0,1](2) =", op.riesz_at(box, 0.5, [2.0])[0])

p = make_test_exponent(2.0, 2.0, 0.3, "oscillating", 1.0)
q = make_test_exponent(2.5, 2.5, 0.2, "oscillating", 1.0)
print("log-Holder quotient of p near t=1:", round(log_holder_violation(p), 2), "(grows without bound)")

spec = NormSpec(p, q, constant(0.0, 1.0))
for kind in (op.OperatorSpec("maximal"), op.OperatorSpec("hilbert"), op.OperatorSpec("riesz", 0.25)):
    rep = op.boundedness_experiment(kind, spec)
    print(f"{kind.kind:8s} {rep.verdict:12s} sup {rep.sup_ratio:.3f}")

# gamma(0) across 1/p'(0) = 0.5
for g in (0.3, 0.45, 0.5, 0.6):
    rep = op.boundedness_experiment(op.OperatorSpec("maximal"), NormSpec(p, q, constant(g, 1.0)))
    print(f"gamma={g}: {rep.verdict}")
