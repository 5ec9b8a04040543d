"""A desk-scale algorithmic-information laboratory: a frozen prefix-free
reference machine with fuel-bounded execution, the left-total interval
transform, exact complexity and probability estimators, semimeasure
transducer compilation, and binary-predicate completion."""

__version__ = "0.1.0"

from .dyadic import Dyadic, ceil_neg_log2, floor_neg_log2
from .machine import ExecOutcome, MachineConfig, ProgramRecord, Status, run

__all__ = [
    "Dyadic",
    "ExecOutcome",
    "MachineConfig",
    "ProgramRecord",
    "Status",
    "run",
    "ceil_neg_log2",
    "floor_neg_log2",
]
