"""Schema definition, microdata/marginal ingestion, splitting, and marginal extraction.

All tabular data is held as dense integer category codes. A code is the
position of a label in its variable's declared label list, so every
downstream computation works on codes and never on label strings.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SchemaError, SynthesisError

VALID_KINDS = ("ordinal", "categorical")


@dataclass(frozen=True)
class VariableSpec:
    """One variable: a name, its ordered category labels, and its kind.

    The position of a label in ``labels`` defines its numeric code
    0..m-1. For categorical variables this ordering is artificial but
    fixed; for ordinal variables it is meaningful.
    """

    name: str
    labels: tuple[str, ...]
    kind: str = "categorical"

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not self.labels:
            raise SchemaError(f"variable {self.name!r}: empty label list")
        if len(set(self.labels)) != len(self.labels):
            raise SchemaError(f"variable {self.name!r}: duplicate labels")
        if self.kind not in VALID_KINDS:
            raise SchemaError(f"variable {self.name!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "_code", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def n_categories(self) -> int:
        return len(self.labels)

    def code_of(self, label: str) -> int:
        try:
            return self._code[label]
        except KeyError:
            raise SynthesisError(
                f"variable {self.name!r}: unknown label {label!r}"
            ) from None


@dataclass(frozen=True)
class Schema:
    """Ordered collection of variables; order fixes the column layout."""

    variables: tuple[VariableSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(self.variables) < 1:
            raise SchemaError("schema needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate variable names in schema")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @property
    def d(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.n_categories for v in self.variables)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SynthesisError(f"unknown variable {name!r}") from None


@dataclass(frozen=True, eq=False)
class MicroTable:
    """Row-major table of category codes, shape (N, d)."""

    schema: Schema
    codes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.codes, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[1] != self.schema.d:
            raise SynthesisError(
                f"codes must have shape (N, {self.schema.d}), got {arr.shape}"
            )
        if arr.size:
            if arr.min() < 0:
                raise SynthesisError("negative category code")
            for i, m in enumerate(self.schema.dims):
                hi = arr[:, i].max()
                if hi >= m:
                    raise SynthesisError(
                        f"variable {self.schema.names[i]!r}: code {hi} out of range "
                        f"(m={m})"
                    )
        arr.flags.writeable = False
        object.__setattr__(self, "codes", arr)

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    def column(self, i: int) -> np.ndarray:
        return self.codes[:, i]


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Per-variable category counts; every code appears exactly once."""

    schema: Schema
    counts: tuple[np.ndarray, ...]

    def __post_init__(self):
        fixed = []
        for var, cnt in zip(self.schema.variables, self.counts, strict=True):
            arr = np.array(cnt, dtype=np.int64, copy=True)
            if arr.shape != (var.n_categories,):
                raise SynthesisError(
                    f"variable {var.name!r}: expected {var.n_categories} counts, "
                    f"got shape {arr.shape}"
                )
            if (arr < 0).any():
                raise SynthesisError(f"variable {var.name!r}: negative count")
            if arr.sum() <= 0:
                raise SynthesisError(f"variable {var.name!r}: all-zero marginal")
            arr.flags.writeable = False
            fixed.append(arr)
        object.__setattr__(self, "counts", tuple(fixed))

    def total(self, i: int) -> int:
        return int(self.counts[i].sum())


def load_schema(path) -> Schema:
    """Read a schema JSON file: {name: {"kind": ..., "labels": [...]}}.

    Variable order and label order follow the file.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict) or not raw:
        raise SchemaError(f"{path}: schema file must be a non-empty JSON object")
    variables = []
    for name, spec in raw.items():
        if not isinstance(spec, dict) or "labels" not in spec:
            raise SchemaError(f"{path}: variable {name!r} needs a 'labels' list")
        variables.append(
            VariableSpec(
                name=name,
                labels=tuple(spec["labels"]),
                kind=spec.get("kind", "categorical"),
            )
        )
    return Schema(tuple(variables))


def write_schema(schema: Schema, path) -> None:
    raw = {
        v.name: {"kind": v.kind, "labels": list(v.labels)} for v in schema.variables
    }
    Path(path).write_text(json.dumps(raw, indent=2) + "\n", encoding="utf-8")


def infer_schema(path, ordinal_if_numeric: bool = True) -> Schema:
    """Derive a schema from a microdata CSV.

    Labels are ordered lexicographically, except that a column whose
    labels are all numeric is treated as ordinal and ordered numerically.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SynthesisError(f"{path}: empty file") from None
        seen: list[set] = [set() for _ in header]
        for row in reader:
            for i, tok in enumerate(row):
                seen[i].add(tok)
    variables = []
    for name, values in zip(header, seen):
        if not values:
            raise SynthesisError(f"{path}: column {name!r} has no data to infer from")
        numeric = ordinal_if_numeric and all(_is_number(v) for v in values)
        if numeric:
            labels = tuple(sorted(values, key=float))
            kind = "ordinal"
        else:
            labels = tuple(sorted(values))
            kind = "categorical"
        variables.append(VariableSpec(name=name, labels=labels, kind=kind))
    return Schema(tuple(variables))


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def load_micro_csv(path, schema: Schema) -> MicroTable:
    """Read a microdata CSV (header + one record per person) into codes.

    The header must name a superset of the schema variables; extra
    columns are ignored. Unknown labels report variable, row number,
    and the offending token.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SynthesisError(f"{path}: empty file, header row required") from None
        col_of = {}
        for var in schema.variables:
            if var.name not in header:
                raise SynthesisError(f"{path}: missing column {var.name!r}")
            col_of[var.name] = header.index(var.name)
        rows = []
        for rownum, row in enumerate(reader, start=1):
            rec = []
            for var in schema.variables:
                tok = row[col_of[var.name]]
                try:
                    rec.append(var.code_of(tok))
                except SynthesisError:
                    raise SynthesisError(
                        f"{path}: variable {var.name!r}, row {rownum}: "
                        f"unknown label {tok!r}"
                    ) from None
            rows.append(rec)
    codes = np.array(rows, dtype=np.int64).reshape(len(rows), schema.d)
    return MicroTable(schema, codes)


def write_micro_csv(table: MicroTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.schema.names)
        labels = [v.labels for v in table.schema.variables]
        for row in table.codes:
            writer.writerow([labels[i][c] for i, c in enumerate(row)])


def load_marginals_csv(path, schema: Schema) -> MarginalTable:
    """Read a marginals CSV with columns variable,label,count.

    Categories omitted from the file get count 0. Counts must be
    nonnegative integers and every variable must keep a positive total.
    """
    counts = [np.zeros(v.n_categories, dtype=np.int64) for v in schema.variables]
    filled = [np.zeros(v.n_categories, dtype=bool) for v in schema.variables]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SynthesisError(f"{path}: empty marginals file")
        if [h.strip() for h in header[:3]] != ["variable", "label", "count"]:
            raise SynthesisError(
                f"{path}: expected header 'variable,label,count', got {header!r}"
            )
        for rownum, row in enumerate(reader, start=1):
            if not row:
                continue
            name, label, raw_count = row[0], row[1], row[2]
            i = schema.index_of(name)
            code = schema.variables[i].code_of(label)
            try:
                value = int(raw_count)
            except ValueError:
                raise SynthesisError(
                    f"{path}: row {rownum}: count {raw_count!r} is not an integer"
                ) from None
            if value < 0:
                raise SynthesisError(
                    f"{path}: row {rownum}: negative count for "
                    f"{name}={label!r}"
                )
            if filled[i][code]:
                raise SynthesisError(
                    f"{path}: row {rownum}: duplicate entry for {name}={label!r}"
                )
            counts[i][code] = value
            filled[i][code] = True
    return MarginalTable(schema, tuple(counts))


def write_marginals_csv(marginals: MarginalTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable", "label", "count"])
        for var, cnt in zip(marginals.schema.variables, marginals.counts):
            for label, value in zip(var.labels, cnt):
                writer.writerow([var.name, label, int(value)])


def split(table: MicroTable, fraction: float, seed: int) -> tuple[MicroTable, MicroTable]:
    """Random disjoint partition; first part holds floor(fraction*N) rows.

    Rows keep their original relative order within each part.
    Deterministic for a fixed seed.
    """
    n = table.n_rows
    if n < 2:
        raise SynthesisError(f"cannot split a table with {n} rows")
    if not 0.0 < fraction < 1.0:
        raise SynthesisError(f"fraction must lie in (0,1), got {fraction}")
    k = int(np.floor(fraction * n))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    first = np.sort(perm[:k])
    second = np.sort(perm[k:])
    return (
        MicroTable(table.schema, table.codes[first]),
        MicroTable(table.schema, table.codes[second]),
    )


def marginals_of(table: MicroTable) -> MarginalTable:
    """Per-variable category counts over the table's rows."""
    if table.n_rows == 0:
        raise SynthesisError("cannot take marginals of an empty table")
    counts = tuple(
        np.bincount(table.column(i), minlength=m)
        for i, m in enumerate(table.schema.dims)
    )
    return MarginalTable(table.schema, counts)


def concat(first: MicroTable, second: MicroTable) -> MicroTable:
    if first.schema != second.schema:
        raise SynthesisError("cannot concatenate tables with different schemas")
    return MicroTable(first.schema, np.vstack([first.codes, second.codes]))
