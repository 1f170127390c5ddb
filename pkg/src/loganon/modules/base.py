"""Module API: the contract between parser modules and the core.

The core only ever calls the seven methods below.  :class:`LineModule`
implements the I/O side for newline-delimited text formats; concrete
modules supply :meth:`LineModule.parse_line` and
:meth:`LineModule.serialize_record`.
"""

from __future__ import annotations

import abc
import io
import logging
import os
import sys
from dataclasses import dataclass
from typing import TextIO

from ..errors import ContractError, DataSetError, RecordError, RunError
from ..policy.schema import ModuleSchema
from ..record import Record

log = logging.getLogger(__name__)

STREAM = "-"


@dataclass(frozen=True)
class Capabilities:
    supports_streams: bool
    supports_random_access: bool


@dataclass
class RecordCursor:
    counter: int = 0
    at_end: bool = False


class LogModule(abc.ABC):
    name: str = ""

    @abc.abstractmethod
    def get_module_schema(self) -> ModuleSchema: ...

    @abc.abstractmethod
    def set_data_sets(self, input, output) -> None: ...

    @abc.abstractmethod
    def get_record(self) -> Record: ...

    @abc.abstractmethod
    def put_record(self, record: Record) -> int: ...

    @abc.abstractmethod
    def counter_value(self) -> int: ...

    @abc.abstractmethod
    def reset_counter(self) -> bool: ...

    @abc.abstractmethod
    def at_end(self) -> bool: ...

    @property
    @abc.abstractmethod
    def capabilities(self) -> Capabilities: ...

    def close(self) -> None:
        pass


def _split_eol(line: str) -> tuple[str, str]:
    if line.endswith("\r\n"):
        return line[:-2], "\r\n"
    if line.endswith("\n"):
        return line[:-1], "\n"
    return line, ""


def _text_stream(binary) -> TextIO:
    return io.TextIOWrapper(binary, encoding="utf-8", errors="surrogateescape", newline="")


class LineModule(LogModule):
    """Newline-delimited text I/O with a one-line lookahead for :meth:`at_end`.

    Locators are paths or ``"-"`` for stdin/stdout; already-open text
    streams are accepted too.  Lines that fail to parse raise in strict
    mode and are passed through verbatim, with a warning, in lenient mode.
    """

    def __init__(self, strict: bool = True):
        self.strict = strict
        self.cursor = RecordCursor()
        self.parse_errors = 0
        self.records_written = 0
        self.bytes_read = 0
        self._in: TextIO | None = None
        self._out: TextIO | None = None
        self._out_locator = None
        self._random_access = False
        self._pending: str | None = None
        self._own_in = self._own_out = False

    # subclasses --------------------------------------------------------

    @abc.abstractmethod
    def parse_line(self, line: str) -> Record:
        """Parse one line (terminator stripped); raise RecordError on failure."""

    @abc.abstractmethod
    def serialize_record(self, record: Record) -> str:
        """Inverse of :meth:`parse_line`."""

    # API ---------------------------------------------------------------

    @property
    def capabilities(self) -> Capabilities:
        return Capabilities(supports_streams=True, supports_random_access=self._random_access)

    def set_data_sets(self, input, output) -> None:
        if isinstance(input, str):
            if input == STREAM:
                self._in, self._own_in = _text_stream(sys.stdin.buffer), False
                self._random_access = False
            else:
                if not os.path.isfile(input) or not os.access(input, os.R_OK):
                    raise DataSetError(f"input {input!r} is not a readable file")
                if isinstance(output, str) and output != STREAM and os.path.exists(output) \
                        and os.path.samefile(input, output):
                    raise DataSetError("input and output refer to the same file")
                self._in = open(input, encoding="utf-8", errors="surrogateescape", newline="")
                self._own_in, self._random_access = True, True
        else:
            self._in, self._own_in = input, False
            self._random_access = bool(getattr(input, "seekable", lambda: False)())
        if isinstance(output, str) and output != STREAM:
            if isinstance(input, str) and os.path.abspath(input) == os.path.abspath(output):
                raise DataSetError("input and output refer to the same file")
            parent = os.path.dirname(os.path.abspath(output)) or "."
            if os.path.isdir(output) or not os.access(parent, os.W_OK) or \
                    (os.path.exists(output) and not os.access(output, os.W_OK)):
                raise DataSetError(f"output {output!r} is not writable")
        self._out_locator = output
        self.cursor = RecordCursor()
        self._fill()

    def _fill(self) -> None:
        line = self._in.readline()
        self._pending = line if line else None
        self.cursor.at_end = self._pending is None

    def at_end(self) -> bool:
        self._require_input()
        return self.cursor.at_end

    def counter_value(self) -> int:
        return self.cursor.counter

    def reset_counter(self) -> bool:
        self._require_input()
        if not self._random_access:
            return False
        self._in.seek(0)
        self.cursor = RecordCursor()
        self._fill()
        return True

    def get_record(self) -> Record:
        self._require_input()
        if self.cursor.at_end:
            raise ContractError("get_record called after the last record")
        raw = self._pending
        self.bytes_read += len(raw)
        lineno = self.cursor.counter
        self.cursor.counter += 1
        self._fill()
        body, eol = _split_eol(raw)
        try:
            record = self.parse_line(body)
        except RecordError as exc:
            if self.strict:
                raise RecordError(str(exc), raw=body, lineno=lineno) from None
            self.parse_errors += 1
            log.warning("record %d passed through unanonymized: %s", lineno, exc)
            record = Record(raw_remainder=body)
        record.eol = eol
        return record

    def put_record(self, record: Record) -> int:
        if record.is_raw:
            text = record.raw_remainder
        else:
            schema = self.get_module_schema()
            unknown = [n for n in record.names() if n not in schema]
            if unknown:
                raise RecordError(f"fields not in the {self.name} schema: {unknown}")
            text = self.serialize_record(record)
        out = self._output()
        try:
            out.write(text + record.eol)
        except OSError as exc:
            raise RunError(f"write failed after {self.records_written} records "
                           f"(output is partial): {exc}") from exc
        self.records_written += 1
        return 0

    def _output(self) -> TextIO:
        # opened on first write so a run rejected up front leaves no file behind
        if self._out is None:
            loc = self._out_locator
            if loc is None:
                raise ContractError("set_data_sets has not been called")
            if isinstance(loc, str):
                if loc == STREAM:
                    self._out, self._own_out = _text_stream(sys.stdout.buffer), False
                else:
                    self._out = open(loc, "w", encoding="utf-8", errors="surrogateescape",
                                     newline="")
                    self._own_out = True
            else:
                self._out, self._own_out = loc, False
        return self._out

    def _require_input(self) -> None:
        if self._in is None:
            raise ContractError("set_data_sets has not been called")

    def close(self) -> None:
        if self._out_locator is not None:
            out = self._output()
            out.flush()
            if self._own_out:
                out.close()
            elif isinstance(out, io.TextIOWrapper) and self._out_locator == STREAM:
                out.detach()
        if self._in is not None:
            if self._own_in:
                self._in.close()
            elif isinstance(self._in, io.TextIOWrapper) and self._in.buffer is sys.stdin.buffer:
                self._in.detach()
        self._in = self._out = None
        self._out_locator = None
