from .plan import (ExecutionPlan, FieldAnonymizer, build_plan, compile_plan,
                   requires_random_access)
from .policy import (Diagnostic, DiagnosticCode, FieldRule, UserPolicy, ValidatedRule,
                     parse_policy, validate_policy)
from .schema import (FRAMEWORK_SCHEMA, AlgorithmSpec, FieldSpec, ModuleSchema, OptionSpec,
                     applicable_algorithms)

__all__ = [
    "ExecutionPlan", "FieldAnonymizer", "build_plan", "compile_plan", "requires_random_access",
    "Diagnostic", "DiagnosticCode", "FieldRule", "UserPolicy", "ValidatedRule",
    "parse_policy", "validate_policy",
    "FRAMEWORK_SCHEMA", "AlgorithmSpec", "FieldSpec", "ModuleSchema", "OptionSpec",
    "applicable_algorithms",
]
