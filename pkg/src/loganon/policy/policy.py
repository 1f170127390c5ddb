"""User policy documents: parsing and validation against both schemas.

A policy is XML::

    <policy>
      <option name="seed" value="7"/>
      <field name="src_ip" algorithm="truncation">
        <option name="keep_bits" value="16"/>
      </field>
    </policy>
"""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Any

from ..errors import PolicyParseError, PolicyValidationError
from .schema import FRAMEWORK_SCHEMA, AlgorithmSpec, FieldSpec, ModuleSchema

GLOBAL_OPTIONS = {"seed"}


class DiagnosticCode(str, enum.Enum):
    UNKNOWN_ALGORITHM = "unknown-algorithm"
    UNKNOWN_FIELD = "unknown-field"
    DISALLOWED_PAIRING = "disallowed-pairing"
    INVALID_OPTION = "invalid-option"
    DUPLICATE_RULE = "duplicate-rule"


@dataclass(frozen=True)
class Diagnostic:
    code: DiagnosticCode
    field: str | None
    message: str

    def __str__(self):
        where = f"field {self.field!r}: " if self.field else ""
        return f"[{self.code.value}] {where}{self.message}"


@dataclass(frozen=True)
class FieldRule:
    field: str
    algorithm: str
    options: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class UserPolicy:
    rules: tuple[FieldRule, ...] = ()
    options: dict[str, str] = field(default_factory=dict)

    @property
    def seed(self) -> int | None:
        raw = self.options.get("seed")
        return None if raw is None else int(raw, 0)

    def rule_for(self, name: str) -> FieldRule | None:
        for r in self.rules:
            if r.field == name:
                return r
        return None


def _option_pairs(el, context):
    out = {}
    for opt in el:
        if opt.tag != "option":
            raise PolicyParseError(f"unexpected <{opt.tag}> in {context}")
        name, value = opt.get("name"), opt.get("value")
        if name is None or value is None:
            raise PolicyParseError(f"<option> in {context} needs 'name' and 'value'")
        if name in out:
            raise PolicyParseError(f"option {name!r} given twice in {context}")
        out[name] = value
    return out


def parse_policy(document: str | bytes) -> UserPolicy:
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise PolicyParseError(f"malformed policy: {exc.msg if hasattr(exc, 'msg') else exc}",
                               line, col) from None
    if root.tag != "policy":
        raise PolicyParseError(f"expected <policy> root element, got <{root.tag}>")
    rules: list[FieldRule] = []
    global_opts: dict[str, str] = {}
    seen: set[str] = set()
    dupes: list[Diagnostic] = []
    for el in root:
        if el.tag == "option":
            global_opts.update(_option_pairs([el], "policy"))
            continue
        if el.tag != "field":
            raise PolicyParseError(f"unexpected element <{el.tag}> in policy")
        name, algo = el.get("name"), el.get("algorithm")
        if not name or not algo:
            raise PolicyParseError("<field> needs 'name' and 'algorithm' attributes")
        if name in seen:
            dupes.append(Diagnostic(DiagnosticCode.DUPLICATE_RULE, name,
                                    "more than one rule for this field"))
            continue
        seen.add(name)
        rules.append(FieldRule(name, algo, _option_pairs(el, f"field {name!r}")))
    if dupes:
        raise PolicyValidationError(dupes)
    return UserPolicy(tuple(rules), global_opts)


@dataclass(frozen=True)
class ValidatedRule:
    rule: FieldRule
    field: FieldSpec
    algorithm: AlgorithmSpec
    options: dict[str, Any]


def _check_rule(rule: FieldRule, framework, module: ModuleSchema):
    algo = framework.get(rule.algorithm)
    if algo is None:
        return None, [Diagnostic(DiagnosticCode.UNKNOWN_ALGORITHM, rule.field,
                                 f"no algorithm named {rule.algorithm!r}")]
    if rule.field not in module:
        return None, [Diagnostic(DiagnosticCode.UNKNOWN_FIELD, rule.field,
                                 f"module {module.name!r} has no such field")]
    spec = module[rule.field]
    if spec.kind not in algo.kinds or rule.algorithm not in spec.algorithms:
        return None, [Diagnostic(
            DiagnosticCode.DISALLOWED_PAIRING, rule.field,
            f"{rule.algorithm!r} is not permitted on this {spec.kind.value} field "
            f"(permitted: {', '.join(spec.algorithms) or 'none'})")]
    problems = []
    typed: dict[str, Any] = {}
    for name, raw in rule.options.items():
        opt = algo.options.get(name)
        if opt is None:
            problems.append(f"unknown option {name!r} for {rule.algorithm!r}")
            continue
        try:
            typed[name] = opt.convert(raw, spec.kind)
        except ValueError as exc:
            problems.append(str(exc))
    if not problems and algo.check is not None:
        problems = algo.check(spec.kind, typed)
    if problems:
        return None, [Diagnostic(DiagnosticCode.INVALID_OPTION, rule.field, p) for p in problems]
    for name, opt in algo.options.items():
        if name not in typed and opt.default is not None:
            typed[name] = opt.default
    return ValidatedRule(rule, spec, algo, typed), []


def validate_policy(policy: UserPolicy, module: ModuleSchema,
                    framework: dict[str, AlgorithmSpec] = FRAMEWORK_SCHEMA) -> list[ValidatedRule]:
    """Check every rule against the catalog and the module; collect all problems."""
    diagnostics: list[Diagnostic] = []
    for name, raw in policy.options.items():
        if name not in GLOBAL_OPTIONS:
            diagnostics.append(Diagnostic(DiagnosticCode.INVALID_OPTION, None,
                                          f"unknown policy option {name!r}"))
        elif name == "seed":
            try:
                int(raw, 0)
            except ValueError:
                diagnostics.append(Diagnostic(DiagnosticCode.INVALID_OPTION, None,
                                              f"seed must be an integer, got {raw!r}"))
    validated = []
    for rule in policy.rules:
        ok, diags = _check_rule(rule, framework, module)
        diagnostics.extend(diags)
        if ok is not None:
            validated.append(ok)
    if diagnostics:
        raise PolicyValidationError(diagnostics)
    return validated
