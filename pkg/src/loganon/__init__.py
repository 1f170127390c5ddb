"""Multi-level, multi-log anonymization.

Parser modules turn log lines into records of typed fields; a policy picks
an anonymization algorithm per field; the engine applies it.
"""

from .errors import AnonError
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .modules import load_module
from .pipeline import RunReport, run_pipeline
from .policy import build_plan, compile_plan, parse_policy, validate_policy
from .record import FieldKind, FieldValue, Record

__version__ = "0.1.0"

__all__ = [
    "AnonError", "KERNEL_IMPLEMENTATION", "load_module", "RunReport", "run_pipeline",
    "build_plan", "compile_plan", "parse_policy", "validate_policy",
    "FieldKind", "FieldValue", "Record",
]
