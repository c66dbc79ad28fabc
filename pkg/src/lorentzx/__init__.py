"""Variable-exponent Lorentz spaces on the line, with Hardy-type, classical
and ergodic operators, and a numerical boundedness protocol."""

__version__ = "0.1.0"

from .exponent import ExponentFunction, classify, constant, make_test_exponent, parse_exponent, format_exponent
from .grid import Partition, StepFunction, rearrange, double_star, read_csv, write_csv
from .norms import NormSpec, luxemburg_norm, lorentz_norm, lorentz_modular
from .hardy import HardySpec, estimate_operator_norm
from .report import BoundednessReport, Protocol
from .family import FamilySpec, GridSpec

__all__ = [
    "__version__",
    "ExponentFunction", "classify", "constant", "make_test_exponent", "parse_exponent", "format_exponent",
    "Partition", "StepFunction", "rearrange", "double_star", "read_csv", "write_csv",
    "NormSpec", "luxemburg_norm", "lorentz_norm", "lorentz_modular",
    "HardySpec", "estimate_operator_norm",
    "BoundednessReport", "Protocol", "FamilySpec", "GridSpec",
]
