"""
Rearrangements and variable-exponent norms
==========================================

A step function, its decreasing rearrangement f*, the averaged f**, and
Luxemburg / Lorentz norms with an exponent that moves near zero.
"""

import numpy as np

from lorentzx import constant, make_test_exponent
from lorentzx.grid import Partition, StepFunction, double_star, rearrange
from lorentzx.norms import NormSpec, lorentz_norm, luxemburg_norm

# three cells of uneven width
f = StepFunction(Partition(np.array([0.0, 0.2, 0.5, 1.0])), np.array([1.0, -3.0, 2.0]))

fs = rearrange(f)
print("f* breakpoints", fs.partition.breakpoints)  # [0, 0.3, 0.8, 1.0]
print("f* values     ", fs.values)                 # [3, 2, 1]
print("f** values    ", double_star(fs).values)    # running means of f*

# equimeasurable: same integral of |f|
print("int |f| =", np.sum(np.abs(f.values) * f.widths), " int f* =", np.sum(fs.values * fs.widths))

# constant p reproduces (int |f|^p)^(1/p)
two = constant(2.0)
print("L^2 norm", luxemburg_norm(f, two), "closed form", np.sqrt(np.sum(f.values ** 2 * f.widths)))

# an exponent that drifts from 1.5 at 0 towards 3 at infinity
p = make_test_exponent(1.5, 3.0, 0.2, "log-decay")
print("p(1e-6), p(1), p(1e6):", p(1e-6), p(1.0), p(1e6))
print("||f||_p(.)          ", luxemburg_norm(f, p))
print("||f||_p(.),2        ", lorentz_norm(f, NormSpec(p, two)))
print("||f||_p(.),2 with f**", lorentz_norm(f, NormSpec(p, two).star()))
