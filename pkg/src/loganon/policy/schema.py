"""The two schemas a policy is checked against.

:data:`FRAMEWORK_SCHEMA` is the built-in algorithm catalog: which field
kinds each algorithm accepts and which options it takes.  A
:class:`ModuleSchema` is supplied by each parser module and says which
algorithms are permitted on which of its fields.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Any, Callable

from ..engine.primitives import TimeUnitMask
from ..errors import ModuleLoadError, PolicyError
from ..record import DEFAULT_ROLES, FieldKind, has_blackmarker_constant

K = FieldKind
BINARY_INT_KINDS = frozenset({K.IPV4, K.MAC, K.PORT, K.UINT8, K.UINT16, K.UINT32})


@dataclass(frozen=True)
class OptionSpec:
    name: str
    type: str  # "int", "str" or "choice"
    default: Any = None
    minimum: int | None = None
    maximum: int | str | None = None  # "width" means the field kind's bit width
    choices: tuple[str, ...] = ()
    secret: bool = False

    def convert(self, raw: str, kind: FieldKind) -> Any:
        """Typed value of a raw option string; raises ValueError on bad input."""
        if self.type == "int":
            try:
                value = int(raw, 0)
            except ValueError:
                raise ValueError(f"option {self.name!r} must be an integer, got {raw!r}") from None
            if self.minimum is not None and value < self.minimum:
                raise ValueError(f"option {self.name!r}={value} below minimum {self.minimum}")
            maximum = kind.bit_width if self.maximum == "width" else self.maximum
            if maximum is not None and value > maximum:
                raise ValueError(f"option {self.name!r}={value} above maximum {maximum}")
            return value
        if self.type == "choice":
            if raw not in self.choices:
                raise ValueError(f"option {self.name!r} must be one of {list(self.choices)}")
            return raw
        return raw


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    kinds: frozenset
    options: dict[str, OptionSpec] = field(default_factory=dict)
    # cross-option checks: (kind, typed options) -> list of problems
    check: Callable[[FieldKind, dict], list[str]] | None = None
    requires_random_access: bool = False
    description: str = ""


def _opts(*specs: OptionSpec) -> dict[str, OptionSpec]:
    return {s.name: s for s in specs}


def _check_truncation(kind, opts):
    if kind is K.TEXT:
        if ("index" in opts) == ("delimiter" in opts):
            return ["text truncation needs exactly one of 'index' or 'delimiter'"]
        if "keep_bits" in opts:
            return ["'keep_bits' applies to binary fields only"]
        if opts.get("delimiter") == "":
            return ["'delimiter' must be nonempty"]
        return []
    problems = []
    if "keep_bits" not in opts:
        problems.append("missing required option 'keep_bits'")
    if "index" in opts or "delimiter" in opts:
        problems.append("'index'/'delimiter' apply to text fields only")
    return problems


def _need_secret(opt, env_opt):
    def check(kind, opts):
        if not opts.get(opt) and not opts.get(env_opt):
            return [f"one of {opt!r} or {env_opt!r} is required"]
        return []
    return check


def _check_shift(kind, opts):
    missing = [n for n in ("lower", "upper") if n not in opts]
    if missing:
        return [f"missing required option {n!r}" for n in missing]
    if opts["lower"] > opts["upper"]:
        return [f"lower bound {opts['lower']} exceeds upper bound {opts['upper']}"]
    return []


def _check_units(kind, opts):
    if "units" not in opts:
        return ["missing required option 'units'"]
    try:
        TimeUnitMask.parse(opts["units"])
    except PolicyError as exc:
        return [str(exc)]
    return []


SECONDARY = OptionSpec("secondary", "str")

FRAMEWORK_SCHEMA: dict[str, AlgorithmSpec] = {a.name: a for a in [
    AlgorithmSpec("black-marker", frozenset(FieldKind) - {K.TIMESTAMP},
                  description="replace every value with one constant"),
    AlgorithmSpec("truncation", BINARY_INT_KINDS | {K.TEXT},
                  _opts(OptionSpec("keep_bits", "int", minimum=0, maximum="width"),
                        OptionSpec("index", "int", minimum=0),
                        OptionSpec("delimiter", "str")),
                  check=_check_truncation,
                  description="keep leading bits or a string prefix"),
    AlgorithmSpec("random-permutation", BINARY_INT_KINDS,
                  _opts(OptionSpec("fixed", "str")),
                  description="random one-to-one table mapping"),
    AlgorithmSpec("prefix-preserving", frozenset({K.IPV4}),
                  _opts(OptionSpec("passphrase", "str", secret=True),
                        OptionSpec("passphrase-env", "str")),
                  check=_need_secret("passphrase", "passphrase-env"),
                  description="keyed permutation preserving common prefixes"),
    AlgorithmSpec("hash", BINARY_INT_KINDS | {K.TEXT, K.BYTES},
                  description="SHA-256, truncated to the field width"),
    AlgorithmSpec("hmac", BINARY_INT_KINDS | {K.TEXT, K.BYTES},
                  _opts(OptionSpec("key", "str", secret=True), OptionSpec("key-env", "str")),
                  check=_need_secret("key", "key-env"),
                  description="HMAC-SHA256, truncated to the field width"),
    AlgorithmSpec("bilateral-classification", frozenset({K.PORT}),
                  description="privileged ports to 0, ephemeral to 65535"),
    AlgorithmSpec("time-unit-annihilation", frozenset({K.TIMESTAMP}),
                  _opts(OptionSpec("units", "str"), SECONDARY),
                  check=_check_units,
                  description="reset selected calendar units"),
    AlgorithmSpec("random-shift", frozenset({K.TIMESTAMP}),
                  _opts(OptionSpec("lower", "int"), OptionSpec("upper", "int"), SECONDARY),
                  check=_check_shift,
                  description="shift all timestamps by one random offset"),
    AlgorithmSpec("enumeration", frozenset({K.TIMESTAMP}),
                  _opts(OptionSpec("window", "int", default=1000, minimum=1),
                        OptionSpec("start", "int", minimum=0), SECONDARY),
                  description="order-preserving synthetic timestamps"),
    AlgorithmSpec("hostname-black-marker", frozenset({K.TEXT}),
                  _opts(OptionSpec("scope", "choice", default="host", choices=("host", "full")),
                        OptionSpec("host", "str", default="host"),
                        OptionSpec("network", "str", default="network.net")),
                  description="replace the host part or the whole hostname"),
]}


def applicable_algorithms(kind: FieldKind, role: str,
                          framework: dict[str, AlgorithmSpec] = FRAMEWORK_SCHEMA) -> list[str]:
    """Algorithms the catalog allows on a field of this kind and role."""
    out = []
    for name, spec in framework.items():
        if kind not in spec.kinds:
            continue
        if name == "black-marker" and not has_blackmarker_constant(kind, role):
            continue
        out.append(name)
    return out


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: FieldKind
    role: str
    algorithms: tuple[str, ...]


class ModuleSchema:
    """Field name -> (kind, role, permitted algorithms)."""

    def __init__(self, name: str, fields, framework: dict[str, AlgorithmSpec] = FRAMEWORK_SCHEMA):
        self.name = name
        self.fields: dict[str, FieldSpec] = {}
        for spec in fields:
            if spec.name in self.fields:
                raise ModuleLoadError(f"module schema {name!r}: duplicate field {spec.name!r}")
            allowed = set(applicable_algorithms(spec.kind, spec.role, framework))
            bad = [a for a in spec.algorithms if a not in allowed]
            if bad:
                raise ModuleLoadError(
                    f"module schema {name!r}: field {spec.name!r} ({spec.kind.value}) "
                    f"permits algorithms the framework does not allow for it: {bad}")
            self.fields[spec.name] = spec

    def __contains__(self, name: str) -> bool:
        return name in self.fields

    def __getitem__(self, name: str) -> FieldSpec:
        return self.fields[name]

    def __iter__(self):
        return iter(self.fields.values())

    def __len__(self) -> int:
        return len(self.fields)

    @classmethod
    def from_xml(cls, document: str, framework: dict[str, AlgorithmSpec] = FRAMEWORK_SCHEMA):
        try:
            root = ET.fromstring(document)
        except ET.ParseError as exc:
            raise ModuleLoadError(f"module schema is not well-formed XML: {exc}") from None
        if root.tag != "module-schema":
            raise ModuleLoadError(f"expected <module-schema> root, got <{root.tag}>")
        specs = []
        for el in root:
            if el.tag != "field":
                raise ModuleLoadError(f"unexpected element <{el.tag}> in module schema")
            name, type_ = el.get("name"), el.get("type")
            if not name or not type_:
                raise ModuleLoadError("module schema <field> needs 'name' and 'type'")
            try:
                kind = FieldKind(type_)
            except ValueError:
                raise ModuleLoadError(f"field {name!r}: unknown type {type_!r}") from None
            role = el.get("role") or DEFAULT_ROLES.get(kind, kind.value)
            algos = []
            for a in el:
                if a.tag != "algorithm" or not (a.text or "").strip():
                    raise ModuleLoadError(f"field {name!r}: expected <algorithm>name</algorithm>")
                algos.append(a.text.strip())
            specs.append(FieldSpec(name, kind, role, tuple(algos)))
        return cls(root.get("name", ""), specs, framework)

    def to_xml(self) -> str:
        root = ET.Element("module-schema", name=self.name)
        for spec in self.fields.values():
            el = ET.SubElement(root, "field", name=spec.name, type=spec.kind.value, role=spec.role)
            for a in spec.algorithms:
                ET.SubElement(el, "algorithm").text = a
        ET.indent(root)
        return ET.tostring(root, encoding="unicode") + "\n"
