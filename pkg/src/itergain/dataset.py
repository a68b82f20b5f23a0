"""Tabular datasets with typed columns and per-cell missingness.

Columns are homogeneous vectors of integers, reals, or category labels.
Missing cells are tracked with a boolean mask; numeric statistics skip
them, and ``missing_count`` counts them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IngestError, KindMismatch, ParamError
from .outcomes import Kind


@dataclass
class Column:
    name: str
    kind: Kind
    values: np.ndarray
    missing: np.ndarray

    def present(self) -> np.ndarray:
        """Values with missing cells dropped."""
        return self.values[~self.missing]

    def n_missing(self) -> int:
        return int(self.missing.sum())

    def to_list(self) -> list:
        """Cells as Python scalars, None where missing."""
        out = []
        for v, miss in zip(self.values, self.missing):
            if miss:
                out.append(None)
            elif self.kind is Kind.INTEGER:
                out.append(int(v))
            elif self.kind is Kind.REAL:
                out.append(float(v))
            else:
                out.append(str(v))
        return out


@dataclass
class Dataset:
    columns: dict[str, Column] = field(default_factory=dict)
    n_rows: int = 0

    def column(self, name: str) -> Column:
        try:
            return self.columns[name]
        except KeyError:
            raise ParamError(
                f"no column named {name!r}; have {sorted(self.columns)}"
            ) from None

    def column_names(self) -> list[str]:
        return list(self.columns)

    @staticmethod
    def from_columns(
        data: Mapping[str, Sequence], kinds: Mapping[str, Kind] | None = None
    ) -> "Dataset":
        """Build a dataset from name -> cell list; None marks a missing cell."""
        columns: dict[str, Column] = {}
        n_rows: int | None = None
        for name, cells in data.items():
            cells = list(cells)
            if n_rows is None:
                n_rows = len(cells)
            elif len(cells) != n_rows:
                raise IngestError(
                    f"column {name!r} has {len(cells)} cells, expected {n_rows}"
                )
            kind = kinds.get(name) if kinds else None
            columns[name] = _build_column(name, cells, kind)
        return Dataset(columns, n_rows or 0)

    def head_summary(self) -> list[dict]:
        """Per-column metadata for display and API payloads."""
        return [
            {"name": c.name, "kind": c.kind.value, "missing": c.n_missing()}
            for c in self.columns.values()
        ]


def _build_column(name: str, cells: list, kind: Kind | None) -> Column:
    if kind is None:
        kind = _infer_kind(cells)
    missing = np.array([c is None for c in cells], dtype=bool)
    if kind is Kind.INTEGER:
        values = np.array(
            [0 if c is None else _as_int(name, c) for c in cells], dtype=np.int64
        )
    elif kind is Kind.REAL:
        values = np.array(
            [math.nan if c is None else _as_real(name, c) for c in cells],
            dtype=np.float64,
        )
    else:
        values = np.array(
            ["" if c is None else str(c) for c in cells], dtype=object
        )
    return Column(name, kind, values, missing)


def _as_int(name: str, c) -> int:
    if isinstance(c, bool) or not isinstance(c, int):
        raise KindMismatch(f"column {name!r}: {c!r} is not an integer")
    return c


def _as_real(name: str, c) -> float:
    if isinstance(c, bool) or not isinstance(c, (int, float)):
        raise KindMismatch(f"column {name!r}: {c!r} is not a real number")
    if not math.isfinite(c):
        raise KindMismatch(
            f"column {name!r}: {c!r} is not finite; use None for missing cells"
        )
    return float(c)


def _infer_kind(cells: list) -> Kind:
    present = [c for c in cells if c is not None]
    if not present:
        return Kind.REAL
    if all(isinstance(c, int) and not isinstance(c, bool) for c in present):
        return Kind.INTEGER
    if all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in present
    ):
        return Kind.REAL
    if all(isinstance(c, str) for c in present):
        return Kind.CATEGORY
    raise KindMismatch("column mixes numeric and non-numeric cells")


_KIND_ALIASES = {
    "int": Kind.INTEGER,
    "integer": Kind.INTEGER,
    "real": Kind.REAL,
    "float": Kind.REAL,
    "category": Kind.CATEGORY,
    "label": Kind.CATEGORY,
    "str": Kind.CATEGORY,
}


def _parse_hint(name: str, hint) -> Kind:
    if isinstance(hint, Kind):
        return hint
    try:
        return _KIND_ALIASES[str(hint).lower()]
    except KeyError:
        raise IngestError(f"unknown kind hint {hint!r} for column {name!r}") from None


def _parse_int_cell(text: str) -> int | None:
    try:
        return int(text)
    except ValueError:
        return None


def _parse_real_cell(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_csv(
    path: str | Path, schema_hints: Mapping[str, object] | None = None
) -> Dataset:
    """Read an RFC-4180-style CSV with a header row into a typed Dataset.

    Empty cells are missing. Column kinds are inferred (integer, then
    real, then category) unless hinted. A cell that cannot be parsed
    under a hinted numeric kind is an IngestError naming the data row.
    """
    path = Path(path)
    try:
        text_rows = _read_rows(path)
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc

    if not text_rows:
        raise IngestError(f"{path}: no header row")
    header = [h.strip() for h in text_rows[0]]
    if any(not h for h in header):
        raise IngestError(f"{path}: blank column name in header")
    if len(set(header)) != len(header):
        raise IngestError(f"{path}: duplicate column names in header")

    body = text_rows[1:]
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise IngestError(
                f"{path}: row {i} has {len(row)} fields, expected {len(header)}"
            )

    hints: dict[str, Kind] = {}
    if schema_hints:
        for name, hint in schema_hints.items():
            if name not in header:
                raise IngestError(f"schema hint for unknown column {name!r}")
            hints[name] = _parse_hint(name, hint)

    columns: dict[str, Column] = {}
    for ci, name in enumerate(header):
        raw_cells = [row[ci] for row in body]
        columns[name] = _ingest_column(path, name, raw_cells, hints.get(name))
    return Dataset(columns, len(body))


def _read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [row for row in csv.reader(fh)]


def _ingest_column(path: Path, name: str, raw: list[str], kind: Kind | None) -> Column:
    cells: list = []
    if kind is None:
        kind = _infer_csv_kind(raw)
    for i, cell in enumerate(raw, start=1):
        cell = cell.strip()
        if cell == "":
            cells.append(None)
            continue
        if kind is Kind.INTEGER:
            value = _parse_int_cell(cell)
        elif kind is Kind.REAL:
            value = _parse_real_cell(cell)
        else:
            value = cell
        if value is None:
            raise IngestError(
                f"{path}: row {i}, column {name!r}: {cell!r} is not {kind.value}"
            )
        cells.append(value)
    return _build_column(name, cells, kind)


def _infer_csv_kind(raw: Iterable[str]) -> Kind:
    present = [c.strip() for c in raw if c.strip() != ""]
    if not present:
        return Kind.REAL
    if all(_parse_int_cell(c) is not None for c in present):
        return Kind.INTEGER
    if all(_parse_real_cell(c) is not None for c in present):
        return Kind.REAL
    return Kind.CATEGORY
