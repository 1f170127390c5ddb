"""Parser modules, registered by name."""

from ..errors import ModuleLoadError
from .base import Capabilities, LineModule, LogModule, RecordCursor
from .delimited import ColumnSpec, DelimitedModule
from .netfilter import NetfilterModule

REGISTRY = {
    "netfilter": NetfilterModule,
    "delimited": DelimitedModule,
}


def load_module(name: str, **options) -> LogModule:
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ModuleLoadError(
            f"unknown module {name!r} (available: {', '.join(sorted(REGISTRY))})") from None
    try:
        return cls(**options)
    except TypeError as exc:
        raise ModuleLoadError(f"bad options for module {name!r}: {exc}") from None


__all__ = ["Capabilities", "LineModule", "LogModule", "RecordCursor", "ColumnSpec",
           "DelimitedModule", "NetfilterModule", "REGISTRY", "load_module"]
