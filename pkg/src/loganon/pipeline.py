"""The record loop: request, anonymize, write back, repeat."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import CapabilityError
from .modules.base import LogModule
from .policy.plan import ExecutionPlan


@dataclass
class RunReport:
    records_in: int = 0
    records_out: int = 0
    parse_errors: int = 0
    bytes_in: int = 0
    elapsed: float = 0.0
    rules: list[str] = field(default_factory=list)
    kernel: str = ""

    @property
    def throughput_mb_s(self) -> float:
        return self.bytes_in / 1e6 / self.elapsed if self.elapsed > 0 else 0.0

    def lines(self) -> list[str]:
        out = [
            f"records in: {self.records_in}",
            f"records out: {self.records_out}",
            f"unparsed lines passed through: {self.parse_errors}",
            f"elapsed: {self.elapsed:.3f} s ({self.throughput_mb_s:.1f} MB/s, "
            f"{self.throughput_mb_s * 60 / 1000:.2f} GB/min, kernels: {self.kernel})",
        ]
        out += [f"rule {r}" for r in self.rules] or ["rules: none (identity)"]
        return out


def check_capabilities(module: LogModule, plan: ExecutionPlan) -> None:
    if plan.requires_random_access() and not module.capabilities.supports_random_access:
        raise CapabilityError(
            f"the policy needs random access but module {module.name!r} is reading a stream")


def run_pipeline(module: LogModule, plan: ExecutionPlan) -> RunReport:
    """Anonymize every record of ``module``'s input into its output.

    The module must already have its data sets.  Output is opened lazily,
    so a capability failure here leaves nothing written.
    """
    from . import kernels

    check_capabilities(module, plan)
    report = RunReport(rules=plan.summary(), kernel=kernels.IMPLEMENTATION)
    start = time.perf_counter()
    get, put, process = module.get_record, module.put_record, plan.process
    n_in = n_out = 0
    try:
        while not module.at_end():
            record = get()
            n_in += 1
            for out in process(record):
                put(out)
                n_out += 1
        for out in plan.finish():
            put(out)
            n_out += 1
    finally:
        report.records_in, report.records_out = n_in, n_out
        report.parse_errors = getattr(module, "parse_errors", 0)
        report.bytes_in = getattr(module, "bytes_read", 0)
    module.close()
    report.elapsed = time.perf_counter() - start
    return report
