"""Column-delimited text (CSV and friends) with a user-supplied column spec."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from ..errors import ModuleLoadError, RecordError
from ..policy.schema import FieldSpec, ModuleSchema, applicable_algorithms
from ..record import DEFAULT_ROLES, FieldKind, FieldValue, Record, coerce, render
from .base import LineModule

QUOTE = '"'


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: FieldKind
    position: int
    delimiter: str = ","
    role: str | None = None


def load_columns(spec: str, delimiter: str = ",") -> list[ColumnSpec]:
    """Columns from a JSON document path or an inline ``name:kind,...`` list.

    The JSON form is ``{"delimiter": ",", "columns": [{"name": ..,
    "kind": .., "role": ..}, ...]}`` with ``role`` optional.
    """
    if os.path.isfile(spec):
        try:
            with open(spec, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ModuleLoadError(f"cannot read column spec {spec!r}: {exc}") from None
        delimiter = doc.get("delimiter", delimiter)
        entries = [(c.get("name"), c.get("kind"), c.get("role")) for c in doc.get("columns", [])]
    else:
        entries = []
        for item in filter(None, (s.strip() for s in spec.split(","))):
            name, _, kind = item.partition(":")
            entries.append((name.strip(), kind.strip(), None))
    if len(delimiter) != 1 or delimiter in (QUOTE, "\n", "\r"):
        raise ModuleLoadError(f"delimiter must be a single ordinary character, got {delimiter!r}")
    cols = []
    for pos, (name, kind, role) in enumerate(entries):
        if not name or not kind:
            raise ModuleLoadError(f"column {pos} needs a name and a kind")
        try:
            fk = FieldKind(kind)
        except ValueError:
            raise ModuleLoadError(f"column {name!r}: unknown kind {kind!r}") from None
        cols.append(ColumnSpec(name, fk, pos, delimiter, role))
    names = [c.name for c in cols]
    if len(set(names)) != len(names):
        raise ModuleLoadError(f"duplicate column names in {names}")
    return cols


def split_cells(line: str, delimiter: str) -> list[str]:
    """Split into raw cells, keeping quotes; delimiters inside quotes don't count."""
    cells, start, quoted = [], 0, False
    for i, ch in enumerate(line):
        if ch == QUOTE:
            quoted = not quoted
        elif ch == delimiter and not quoted:
            cells.append(line[start:i])
            start = i + 1
    if quoted:
        raise RecordError("unterminated quoted cell")
    cells.append(line[start:])
    return cells


def unquote(cell: str) -> str:
    if len(cell) >= 2 and cell[0] == QUOTE and cell[-1] == QUOTE:
        return cell[1:-1].replace(QUOTE * 2, QUOTE)
    if QUOTE in cell:
        raise RecordError(f"stray quote in cell {cell!r}")
    return cell


def quote(text: str, delimiter: str) -> str:
    if delimiter in text or QUOTE in text or "\n" in text or "\r" in text:
        return QUOTE + text.replace(QUOTE, QUOTE * 2) + QUOTE
    return text


def parse_delimited_line(columns: list[ColumnSpec], line: str) -> Record:
    delimiter = columns[0].delimiter if columns else ","
    raw = split_cells(line, delimiter) if columns else ([] if line == "" else [line])
    if len(raw) != len(columns):
        raise RecordError(f"expected {len(columns)} columns, got {len(raw)}")
    fields, layout = [], []
    for col, cell in zip(columns, raw):
        try:
            fv = coerce(col.kind, unquote(cell))
        except (ValueError, TypeError) as exc:
            raise RecordError(f"column {col.name!r}: {exc}") from None
        fields.append((col.name, fv))
        layout.append((cell, fv))
    return Record(fields, layout=layout)


def serialize_delimited(columns: list[ColumnSpec], record: Record) -> str:
    delimiter = columns[0].delimiter if columns else ","
    layout = record.layout or [None] * len(columns)
    out = []
    for col, orig in zip(columns, layout):
        value: FieldValue | None = record.get(col.name)
        if value is None:
            raise RecordError(f"record lacks column {col.name!r}")
        if orig is not None and orig[1] == value:
            out.append(orig[0])
        else:
            out.append(quote(render(value), delimiter))
    return delimiter.join(out)


def schema_for(columns: list[ColumnSpec], name: str = "delimited") -> ModuleSchema:
    """Each column gets every algorithm the catalog allows for its kind."""
    specs = []
    for col in columns:
        role = col.role or DEFAULT_ROLES.get(col.kind, col.kind.value)
        specs.append(FieldSpec(col.name, col.kind, role,
                               tuple(applicable_algorithms(col.kind, role))))
    return ModuleSchema(name, specs)


class DelimitedModule(LineModule):
    name = "delimited"

    def __init__(self, columns: list[ColumnSpec] | str | None = None, strict: bool = True,
                 delimiter: str = ","):
        super().__init__(strict)
        if columns is None:
            raise ModuleLoadError("the delimited module needs a column spec (--columns)")
        if isinstance(columns, str):
            columns = load_columns(columns, delimiter)
        self.columns = list(columns)
        positions = [c.position for c in self.columns]
        if positions != list(range(len(positions))):
            raise ModuleLoadError("column positions must be contiguous from 0")
        self._schema = schema_for(self.columns)

    def get_module_schema(self) -> ModuleSchema:
        return self._schema

    def parse_line(self, line: str) -> Record:
        return parse_delimited_line(self.columns, line)

    def serialize_record(self, record: Record) -> str:
        return serialize_delimited(self.columns, record)
