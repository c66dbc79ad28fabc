import numpy as np
import pytest

from lorentzx.grid import Partition, StepFunction


def random_step(rng, cells=64, lo=0.0, hi=1.0, signed=False, positive=False):
    """Step function with uneven widths on [lo, hi]."""
    cuts = np.sort(rng.uniform(lo, hi, cells - 1))
    bp = np.unique(np.concatenate([[lo], cuts, [hi]]))
    vals = rng.uniform(-1.0 if signed else 0.0, 1.0, bp.size - 1)
    if positive:
        vals = vals + 0.05
    return StepFunction(Partition(bp), vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
