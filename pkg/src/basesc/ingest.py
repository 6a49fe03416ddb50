"""Trait CSV loading, schema configs, min-max normalization, dataset files.

Schema config format (INI, read with :mod:`configparser`)::

    [csv]
    delimiter = ,
    has_header = true
    id_column = Sr. No.

    [categorical]
    EPV = Poor, Moderate, Good, Very Good
    LS = Slight:0, Moderate:1, Severe:2

Each categorical entry lists labels in rank order (rank = position) or with
explicit ``label:rank`` pairs. ``delimiter = tab`` selects a tab. Columns
named in ``[categorical]`` must only contain listed labels; any other column
holding non-numeric text is encoded by order of first appearance.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ColumnSpec, Dataset, EmptyFile, MissingColumnMapping, ParseError


@dataclass(frozen=True)
class CsvSchemaConfig:
    categorical_maps: dict = field(default_factory=dict)  # column -> {label: rank}
    delimiter: str = ","
    has_header: bool = True
    id_column: str | None = None

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        maps = {}
        for col, mapping in self.categorical_maps.items():
            if not isinstance(mapping, dict):
                mapping = {label: i for i, label in enumerate(mapping)}
            ranks = list(mapping.values())
            if not mapping:
                raise ValueError(f"column {col!r}: empty category mapping")
            if any(int(r) != r or r < 0 for r in ranks) or len(set(ranks)) != len(ranks):
                raise ValueError(f"column {col!r}: ranks must be distinct nonnegative integers")
            maps[col] = {str(k): int(v) for k, v in mapping.items()}
        object.__setattr__(self, "categorical_maps", maps)


def _parse_categories(text: str) -> dict:
    mapping = {}
    items = [t.strip() for t in text.split(",") if t.strip()]
    explicit = all(":" in t for t in items)
    for i, item in enumerate(items):
        if explicit:
            label, rank = item.rsplit(":", 1)
            mapping[label.strip()] = int(rank)
        else:
            mapping[item] = i
    return mapping


def parse_schema(text: str) -> CsvSchemaConfig:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"malformed schema config: {exc}") from None
    delimiter = ","
    has_header = True
    id_column = None
    if cp.has_section("csv"):
        sec = cp["csv"]
        raw = sec.get("delimiter", ",")
        delimiter = {"tab": "\t", "\\t": "\t", "comma": ",", "semicolon": ";", "": ","}.get(raw.strip().lower(), raw.strip() or ",")
        has_header = sec.getboolean("has_header", True)
        id_column = sec.get("id_column") or None
    maps = {}
    if cp.has_section("categorical"):
        for col, val in cp["categorical"].items():
            try:
                maps[col] = _parse_categories(val)
            except ValueError as exc:
                raise ParseError(f"schema column {col!r}: {exc}") from None
    try:
        return CsvSchemaConfig(maps, delimiter, has_header, id_column)
    except ValueError as exc:
        raise ParseError(f"invalid schema config: {exc}") from None


def load_schema(path) -> CsvSchemaConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"schema file not found: {path}")
    return parse_schema(path.read_text(encoding="utf-8"))


def format_schema(cfg: CsvSchemaConfig) -> str:
    delim = {"\t": "tab", ",": ","}.get(cfg.delimiter, cfg.delimiter)
    lines = ["[csv]", f"delimiter = {delim}", f"has_header = {'true' if cfg.has_header else 'false'}"]
    if cfg.id_column:
        lines.append(f"id_column = {cfg.id_column}")
    lines += ["", "[categorical]"]
    for col, mapping in cfg.categorical_maps.items():
        pairs = sorted(mapping.items(), key=lambda kv: kv[1])
        if [r for _, r in pairs] == list(range(len(pairs))):
            body = ", ".join(label for label, _ in pairs)
        else:
            body = ", ".join(f"{label}:{r}" for label, r in pairs)
        lines.append(f"{col} = {body}")
    return "\n".join(lines) + "\n"


def save_schema(cfg: CsvSchemaConfig, path) -> None:
    Path(path).write_text(format_schema(cfg), encoding="utf-8")


def _read_rows(path: Path, delimiter: str) -> list[list[str]]:
    text = path.read_text(encoding="utf-8-sig")
    rows = [[c.strip() for c in row] for row in csv.reader(io.StringIO(text), delimiter=delimiter)]
    return [r for r in rows if any(r) and not r[0].startswith("#")]


def _try_float(s: str):
    try:
        v = float(s)
    except ValueError:
        return None
    return v


def load_csv(path, schema: CsvSchemaConfig | None = None) -> Dataset:
    """Read a trait table; categorical labels become their ranks."""
    schema = schema or CsvSchemaConfig()
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    rows = _read_rows(path, schema.delimiter)
    if not rows:
        raise EmptyFile(f"{path}: no data")
    if schema.has_header:
        header, rows = rows[0], rows[1:]
    else:
        header = [f"x{j + 1}" for j in range(len(rows[0]))]
    if not rows:
        raise EmptyFile(f"{path}: header but no data rows")
    width = len(header)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}: row {r + 1} has {len(row)} cells, expected {width}")
    for col in schema.categorical_maps:
        if col not in header:
            raise MissingColumnMapping(f"{path}: categorical column {col!r} not present in header")

    id_idx = None
    if schema.id_column is not None:
        if schema.id_column not in header:
            raise ParseError(f"{path}: id column {schema.id_column!r} not in header")
        id_idx = header.index(schema.id_column)
    row_ids = [row[id_idx] for row in rows] if id_idx is not None else [str(i + 1) for i in range(len(rows))]

    columns = []
    data = []
    for j, name in enumerate(header):
        if j == id_idx:
            continue
        cells = [row[j] for row in rows]
        if name in schema.categorical_maps:
            mapping = schema.categorical_maps[name]
            out = []
            for r, cell in enumerate(cells):
                if cell not in mapping:
                    raise MissingColumnMapping(
                        f"{path}: row {r + 1}, column {name!r}: category {cell!r} has no rank")
                out.append(float(mapping[cell]))
            order = tuple(label for label, _ in sorted(mapping.items(), key=lambda kv: kv[1]))
            columns.append(ColumnSpec(name, "categorical", order))
            data.append(out)
            continue
        parsed = [_try_float(c) for c in cells]
        if all(v is not None for v in parsed):
            bad = [r for r, v in enumerate(parsed) if not math.isfinite(v)]
            if bad:
                raise ParseError(f"{path}: row {bad[0] + 1}, column {name!r}: non-finite value")
            columns.append(ColumnSpec(name))
            data.append(parsed)
            continue
        numeric_share = sum(v is not None for v in parsed) / len(parsed)
        if numeric_share >= 0.5:
            r = next(r for r, v in enumerate(parsed) if v is None)
            raise ParseError(f"{path}: row {r + 1}, column {name!r}: cannot parse {cells[r]!r} as a number")
        order = list(dict.fromkeys(cells))
        columns.append(ColumnSpec(name, "categorical", tuple(order)))
        rank = {label: i for i, label in enumerate(order)}
        data.append([float(rank[c]) for c in cells])
    if not columns:
        raise EmptyFile(f"{path}: no trait columns")
    values = np.array(data, dtype=np.float64).T
    return Dataset(values, tuple(row_ids), tuple(columns), normalized=False)


def normalize(d: Dataset) -> Dataset:
    """Per-column min-max scaling to [0, 1]; constant columns become zeros."""
    X = d.values
    if not np.isfinite(X).all():
        raise ValueError("cannot normalize non-finite values")
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    const = span == 0.0
    out = (X - lo) / np.where(const, 1.0, span)
    out[:, const] = 0.0
    notes = list(d.warnings)
    for j in np.flatnonzero(const):
        notes.append(f"column {d.columns[j].name!r} is constant; normalized to zeros")
    return Dataset(out, d.row_ids, d.columns, normalized=True, warnings=tuple(notes))


# ---------------------------------------------------------- dataset files

_META = "# basesc-dataset "


def dataset_to_csv(d: Dataset) -> str:
    meta = {
        "normalized": d.normalized,
        "columns": [{"name": c.name, "kind": c.kind, "category_order": list(c.category_order)}
                    for c in d.columns],
    }
    buf = io.StringIO()
    buf.write(_META + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_id"] + [c.name for c in d.columns])
    for rid, row in zip(d.row_ids, d.values):
        w.writerow([rid] + [repr(float(v)) for v in row])
    return buf.getvalue()


def save_dataset(d: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv(d), encoding="utf-8")


def dataset_from_csv(text: str) -> Dataset:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_META):
        raise ParseError("missing dataset metadata line")
    meta = json.loads(lines[0][len(_META):])
    rows = list(csv.reader(lines[1:]))
    header, body = rows[0], rows[1:]
    cols = tuple(ColumnSpec(c["name"], c["kind"], tuple(c["category_order"])) for c in meta["columns"])
    if [c.name for c in cols] != header[1:]:
        raise ParseError("header does not match metadata")
    values = np.array([[float(v) for v in r[1:]] for r in body], dtype=np.float64).reshape(len(body), len(cols))
    return Dataset(values, tuple(r[0] for r in body), cols, normalized=bool(meta["normalized"]))


def read_dataset(path) -> Dataset:
    return dataset_from_csv(Path(path).read_text(encoding="utf-8"))
