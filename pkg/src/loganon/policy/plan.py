"""Compile validated rules into per-field anonymizers with run-scoped state."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Callable

from ..engine import (EnumWindow, PermutationTable, PrefixPreservingAnonymizer, TimeUnitMask,
                      annihilate_time_units, anonymize_hostname, bilateral_classify_port,
                      black_marker, choose_shift, derive_pp_key, hash_value, hmac_value,
                      shift_time, truncate_binary, truncate_string)
from ..engine.primitives import HASH_ALGORITHM
from ..engine.timeshift import ShiftState, adjust_secondary_timestamp
from ..errors import PlanError, PolicyError
from ..record import FieldKind, FieldValue, Record, coerce
from .policy import UserPolicy, ValidatedRule, validate_policy
from .schema import FRAMEWORK_SCHEMA, ModuleSchema


@dataclass
class FieldAnonymizer:
    """One field's bound primitive plus the state it closes over."""

    field: str
    algorithm: str
    apply: Callable[[FieldValue], FieldValue]
    options: dict = field(default_factory=dict)
    secondary: str | None = None
    requires_random_access: bool = False
    state: object = None

    def describe(self) -> str:
        shown = {k: ("***" if _is_secret(self.algorithm, k) else v)
                 for k, v in sorted(self.options.items())}
        opts = ", ".join(f"{k}={v}" for k, v in shown.items())
        return f"{self.field}: {self.algorithm}" + (f" ({opts})" if opts else "")


def _is_secret(algorithm: str, option: str) -> bool:
    spec = FRAMEWORK_SCHEMA.get(algorithm)
    opt = spec.options.get(option) if spec else None
    return bool(opt and opt.secret)


def _rule_rng(seed: int | None, field_name: str, algorithm: str) -> random.Random:
    if seed is None:
        return random.SystemRandom()
    return random.Random(f"{seed}:{field_name}:{algorithm}")


def _secret(opts: dict, name: str, env_name: str, what: str) -> str:
    # an environment variable named by the policy overrides the inline value
    env_var = opts.get(env_name)
    if env_var:
        value = os.environ.get(env_var)
        if value:
            return value
    value = opts.get(name)
    if not value:
        source = f"environment variable {env_var!r}" if env_var else f"option {name!r}"
        raise PolicyError(f"{what} not available: {source} is unset or empty")
    return value


def _parse_fixed(spec: str, kind: FieldKind):
    pairs = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        src, sep, dst = item.partition("->")
        try:
            a = coerce(kind, src.strip())
            b = coerce(kind, dst.strip()) if sep else a
        except ValueError as exc:
            raise PolicyError(f"bad fixed permutation entry {item!r}: {exc}") from None
        pairs.append((a, b))
    return pairs


def _build(v: ValidatedRule, rng: random.Random) -> FieldAnonymizer:
    name, algo, kind, opts = v.field.name, v.rule.algorithm, v.field.kind, v.options
    role = v.field.role
    state = None

    if algo == "black-marker":
        const = black_marker(FieldValue(kind, _zero(kind)), role)
        fn = lambda fv: const  # noqa: E731
    elif algo == "truncation":
        if kind is FieldKind.TEXT:
            index, delim = opts.get("index"), opts.get("delimiter")
            fn = lambda fv: FieldValue(kind, truncate_string(fv.value, index=index, delimiter=delim))  # noqa: E731
        else:
            keep = opts["keep_bits"]
            fn = lambda fv: truncate_binary(fv, keep)  # noqa: E731
    elif algo == "random-permutation":
        state = PermutationTable(kind, rng)
        if opts.get("fixed"):
            state.prefill(_parse_fixed(opts["fixed"], kind))
        fn = state.permute
    elif algo == "prefix-preserving":
        key = derive_pp_key(_secret(opts, "passphrase", "passphrase-env", "passphrase"))
        state = PrefixPreservingAnonymizer(key)
        fn = state
    elif algo == "hash":
        fn = hash_value
    elif algo == "hmac":
        secret = _secret(opts, "key", "key-env", "HMAC key").encode("utf-8")
        fn = lambda fv: hmac_value(fv, secret)  # noqa: E731
    elif algo == "bilateral-classification":
        fn = lambda fv: FieldValue(kind, bilateral_classify_port(fv.value))  # noqa: E731
    elif algo == "time-unit-annihilation":
        mask = TimeUnitMask.parse(opts["units"])
        fn = lambda fv: FieldValue(kind, annihilate_time_units(fv.value, mask))  # noqa: E731
    elif algo == "random-shift":
        state = choose_shift(opts["lower"], opts["upper"], rng)
        fn = lambda fv: FieldValue(kind, shift_time(state, fv.value))  # noqa: E731
    elif algo == "enumeration":
        state = EnumWindow(opts["window"], opts.get("start"), field=name,
                           secondary=opts.get("secondary"), rng=rng)
        fn = None  # applied when the window releases the record
    elif algo == "hostname-black-marker":
        scope, host, net = opts["scope"], opts["host"], opts["network"]
        fn = lambda fv: FieldValue(kind, anonymize_hostname(fv.value, scope, host, net))  # noqa: E731
    else:
        raise PlanError(f"no implementation bound for algorithm {algo!r}")

    shown = dict(opts)
    if algo in ("hash", "hmac"):
        shown["digest"] = HASH_ALGORITHM
    return FieldAnonymizer(name, algo, fn, shown, opts.get("secondary"),
                           v.algorithm.requires_random_access, state)


def _zero(kind: FieldKind):
    if kind is FieldKind.MAC:
        return bytes(6)
    if kind is FieldKind.TEXT:
        return ""
    if kind is FieldKind.BYTES:
        return b""
    return 0


class ExecutionPlan:
    """Applies the compiled anonymizers to records.

    Fields without a rule pass through untouched.  With an enumeration
    rule, records are held in its window and :meth:`process` may return
    zero or several records; :meth:`finish` drains what is left.
    """

    def __init__(self, anonymizers: list[FieldAnonymizer], seed: int | None = None):
        self.anonymizers = anonymizers
        self.seed = seed
        self.by_field = {a.field: a for a in anonymizers}
        self._direct = [a for a in anonymizers if a.apply is not None]
        enum = [a for a in anonymizers if a.algorithm == "enumeration"]
        self.enumeration: EnumWindow | None = enum[0].state if enum else None

    @property
    def passthrough(self) -> bool:
        return not self.anonymizers

    def requires_random_access(self) -> bool:
        return any(a.requires_random_access for a in self.anonymizers)

    @property
    def shift(self) -> ShiftState | None:
        for a in self.anonymizers:
            if isinstance(a.state, ShiftState):
                return a.state
        return None

    def anonymize(self, record: Record) -> Record:
        """Apply every directly applicable rule; enumeration is not included."""
        if record.is_raw or not self._direct:
            return record
        updates = {}
        for a in self._direct:
            old = record.get(a.field)
            if old is None:
                continue
            new = a.apply(old)
            updates[a.field] = new
            if a.secondary is not None:
                sec = record.get(a.secondary)
                if sec is not None:
                    updates[a.secondary] = FieldValue(
                        sec.kind, adjust_secondary_timestamp(new.value - old.value, sec.value))
        return record.replace(updates)

    def process(self, record: Record) -> list[Record]:
        record = self.anonymize(record)
        if self.enumeration is None:
            return [record]
        return self.enumeration.push(record)

    def finish(self) -> list[Record]:
        return self.enumeration.flush() if self.enumeration is not None else []

    def summary(self) -> list[str]:
        return [a.describe() for a in self.anonymizers]


def compile_plan(validated: list[ValidatedRule], module: ModuleSchema,
                 seed: int | None = None) -> ExecutionPlan:
    ruled = {v.field.name for v in validated}
    enums = [v for v in validated if v.rule.algorithm == "enumeration"]
    if len(enums) > 1:
        raise PlanError("at most one field may use enumeration: "
                        + ", ".join(v.field.name for v in enums))
    for v in validated:
        sec = v.options.get("secondary")
        if sec is None:
            continue
        if sec == v.field.name:
            raise PlanError(f"field {v.field.name!r} names itself as its secondary timestamp")
        if sec not in module or module[sec].kind is not FieldKind.TIMESTAMP:
            raise PlanError(f"field {v.field.name!r}: secondary {sec!r} is not a timestamp "
                            f"field of module {module.name!r}")
        if sec in ruled:
            raise PlanError(f"secondary field {sec!r} also has its own rule")
    anonymizers = [_build(v, _rule_rng(seed, v.field.name, v.rule.algorithm))
                   for v in validated]
    return ExecutionPlan(anonymizers, seed)


def build_plan(policy: UserPolicy, module: ModuleSchema, seed: int | None = None) -> ExecutionPlan:
    """Validate then compile; an explicit ``seed`` wins over the policy's."""
    validated = validate_policy(policy, module)
    return compile_plan(validated, module, seed if seed is not None else policy.seed)


def requires_random_access(plan: ExecutionPlan) -> bool:
    return plan.requires_random_access()
