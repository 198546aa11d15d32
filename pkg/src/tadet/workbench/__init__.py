"""Instance generators and testing harness."""
from .compose import SEPARATOR, compose
from .lcm import (
    Instruction, Lcm, LcmConfigSet, encode_lcm, lcm_bounded_reach, parse_lcm, reversal_encoding,
    single_faults,
)
from .sampling import DiffReport, TimeProfile, differential_test, has_fraction_collision, sample_words

__all__ = [
    "SEPARATOR", "compose", "Instruction", "Lcm", "LcmConfigSet", "encode_lcm",
    "lcm_bounded_reach", "parse_lcm", "reversal_encoding", "single_faults", "DiffReport",
    "TimeProfile", "differential_test", "has_fraction_collision", "sample_words",
]
