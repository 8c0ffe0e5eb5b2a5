"""Accuracy, diversity, and feasibility metrics for synthetic microdata.

SRMSE compares relative combination frequencies between a reference and a
synthetic table over variable subsets; zeros and precision/recall work on
distinct combinations after projecting out excluded variables (high-card
ordinal variables by default, which otherwise flood the zero counts).
"""

from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import MicroTable, Schema
from .errors import SynthesisError


@dataclass(frozen=True, eq=False)
class FrequencyMap:
    """Relative frequency of each observed combination over a variable subset."""

    freqs: dict

    def __post_init__(self):
        if self.freqs:
            total = math.fsum(self.freqs.values())
            if any(v < 0 for v in self.freqs.values()):
                raise SynthesisError("frequencies must be nonnegative")
            if abs(total - 1.0) > 1e-9:
                raise SynthesisError(f"frequencies must sum to 1, got {total}")

    def get(self, combo) -> float:
        return self.freqs.get(tuple(combo), 0.0)


def frequency_map(table: MicroTable, subset) -> FrequencyMap:
    subset = tuple(subset)
    if table.n_rows == 0 or not subset:
        raise SynthesisError("need a nonempty table and subset")
    rows = table.codes[:, subset]
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    n = table.n_rows
    return FrequencyMap(
        {tuple(int(v) for v in row): c / n for row, c in zip(uniq, counts)}
    )


def _subset_freqs(table: MicroTable, subset: tuple[int, ...]):
    """Flattened combination codes and frequencies over the subset columns."""
    dims = tuple(table.schema.dims[i] for i in subset)
    flat = np.ravel_multi_index(tuple(table.column(i) for i in subset), dims)
    vals, counts = np.unique(flat, return_counts=True)
    return vals, counts / table.n_rows


def srmse(ref: MicroTable, syn: MicroTable, subset) -> float:
    """sqrt(M * sum((pi - pihat)^2)) over the subset's full category product.

    M is the product of the subset's schema cardinalities; combinations
    observed in neither table contribute zero and are never enumerated.
    """
    if ref.schema != syn.schema:
        raise SynthesisError("reference and synthetic tables use different schemas")
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise SynthesisError("subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise SynthesisError("subset lists a variable twice")
    d = ref.schema.d
    if any(not 0 <= i < d for i in subset):
        raise SynthesisError("subset index out of range")
    if ref.n_rows == 0 or syn.n_rows == 0:
        raise SynthesisError("cannot compare an empty table")
    rv, rf = _subset_freqs(ref, subset)
    sv, sf = _subset_freqs(syn, subset)
    all_vals = np.union1d(rv, sv)
    p = np.zeros(all_vals.size)
    q = np.zeros(all_vals.size)
    p[np.searchsorted(all_vals, rv)] = rf
    q[np.searchsorted(all_vals, sv)] = sf
    m_product = math.prod(ref.schema.dims[i] for i in subset)
    return math.sqrt(m_product * float(((p - q) ** 2).sum()))


def srmse_projected(ref: MicroTable, syn: MicroTable, n: int) -> float:
    """Arithmetic mean of srmse over all size-n variable subsets."""
    d = ref.schema.d
    if not 1 <= n <= d:
        raise SynthesisError(f"projection size {n} outside 1..{d}")
    values = [
        srmse(ref, syn, subset) for subset in itertools.combinations(range(d), n)
    ]
    return float(np.mean(values))


def default_exclusion(schema: Schema) -> tuple[str, ...]:
    """Ordinal variables with more than 20 categories (age-like columns)."""
    return tuple(
        v.name for v in schema.variables if v.kind == "ordinal" and v.n_categories > 20
    )


def _kept_indices(schema: Schema, exclude) -> tuple[int, ...]:
    exclude = tuple(exclude) if exclude is not None else ()
    for name in exclude:
        if name not in schema.names:
            raise SynthesisError(f"unknown excluded variable '{name}'")
    kept = tuple(i for i, v in enumerate(schema.variables) if v.name not in exclude)
    if not kept:
        raise SynthesisError("empty projection: every variable is excluded")
    return kept


def distinct_combos(table: MicroTable, exclude=None) -> set:
    """Distinct code tuples after dropping the excluded variables."""
    kept = _kept_indices(table.schema, exclude)
    if table.n_rows == 0:
        return set()
    uniq = np.unique(table.codes[:, kept], axis=0)
    return {tuple(int(v) for v in row) for row in uniq}


def sampled_zeros(
    train: MicroTable, ref: MicroTable, syn: MicroTable, exclude=None
) -> int:
    """Synthetic combinations present in the reference but absent from training."""
    if not (train.schema == ref.schema == syn.schema):
        raise SynthesisError("tables use different schemas")
    syn_c = distinct_combos(syn, exclude)
    ref_c = distinct_combos(ref, exclude)
    train_c = distinct_combos(train, exclude)
    return len(syn_c & ref_c - train_c)


def structural_zeros(syn: MicroTable, population: MicroTable, exclude=None) -> int:
    """Synthetic combinations that exist nowhere in the designated population."""
    if syn.schema != population.schema:
        raise SynthesisError("tables use different schemas")
    return len(distinct_combos(syn, exclude) - distinct_combos(population, exclude))


def precision_recall_f1(
    syn: MicroTable, population: MicroTable, exclude=None
) -> tuple[float, float, float]:
    """Distinct-combination precision/recall against the population, plus F1."""
    if syn.schema != population.schema:
        raise SynthesisError("tables use different schemas")
    syn_c = distinct_combos(syn, exclude)
    pop_c = distinct_combos(population, exclude)
    if not pop_c:
        raise SynthesisError("population table is empty")
    if not syn_c:
        warnings.warn("empty synthetic table: precision undefined, reporting 0")
        return 0.0, 0.0, 0.0
    hit = len(syn_c & pop_c)
    precision = hit / len(syn_c)
    recall = hit / len(pop_c)
    f1 = 2 * precision * recall / (precision + recall) if hit else 0.0
    return precision, recall, f1


@dataclass(frozen=True, eq=False)
class MarginalSeries:
    """Aligned per-category frequencies of one variable across three tables."""

    variable: str
    labels: tuple[str, ...]
    reference: tuple[float, ...]
    training: tuple[float, ...]
    synthetic: tuple[float, ...]


def marginal_report(
    ref: MicroTable, train: MicroTable, syn: MicroTable
) -> tuple[MarginalSeries, ...]:
    """Per-variable relative frequencies of reference, training, synthetic."""
    if not (ref.schema == train.schema == syn.schema):
        raise SynthesisError("tables use different schemas")
    schema = ref.schema

    def freqs(table: MicroTable, i: int) -> tuple[float, ...]:
        if table.n_rows == 0:
            return tuple(0.0 for _ in range(schema.dims[i]))
        counts = np.bincount(table.column(i), minlength=schema.dims[i])
        return tuple(float(c) / table.n_rows for c in counts)

    return tuple(
        MarginalSeries(
            variable=v.name,
            labels=v.labels,
            reference=freqs(ref, i),
            training=freqs(train, i),
            synthetic=freqs(syn, i),
        )
        for i, v in enumerate(schema.variables)
    )


def write_marginal_csv(series: tuple[MarginalSeries, ...], path) -> None:
    """Tidy long-format export: variable,category,series,frequency."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["variable", "category", "series", "frequency"])
        for s in series:
            for name, values in (
                ("reference", s.reference),
                ("training", s.training),
                ("synthetic", s.synthetic),
            ):
                for label, freq in zip(s.labels, values):
                    writer.writerow([s.variable, label, name, repr(freq)])


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Bundle of all metrics for one synthesis run."""

    srmse_by_n: dict
    sampled_zeros: int
    structural_zeros: int
    precision: float
    recall: float
    f1: float
    marginal_series: tuple[MarginalSeries, ...]
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.precision > 0 and self.recall > 0:
            expected = 2 * self.precision * self.recall / (self.precision + self.recall)
            if abs(self.f1 - expected) > 1e-12:
                raise SynthesisError("f1 is not the harmonic mean of precision/recall")
        elif self.f1 != 0.0:
            raise SynthesisError("f1 must be 0 when precision or recall is 0")
        object.__setattr__(self, "warnings", tuple(self.warnings))


def evaluate(
    ref: MicroTable,
    train: MicroTable,
    syn: MicroTable,
    population: MicroTable,
    exclude=None,
    max_projection: int = 5,
    extra_warnings=(),
) -> EvaluationReport:
    """Compute the full report for one synthetic table.

    Zeros and precision/recall use the exclusion list (default: ordinal
    variables with more than 20 categories); SRMSE projections run over
    n = 1..min(max_projection, d) with no exclusion.
    """
    if exclude is None:
        exclude = default_exclusion(ref.schema)
    srmse_by_n = {
        n: srmse_projected(ref, syn, n)
        for n in range(1, min(max_projection, ref.schema.d) + 1)
    }
    precision, recall, f1 = precision_recall_f1(syn, population, exclude)
    return EvaluationReport(
        srmse_by_n=srmse_by_n,
        sampled_zeros=sampled_zeros(train, ref, syn, exclude),
        structural_zeros=structural_zeros(syn, population, exclude),
        precision=precision,
        recall=recall,
        f1=f1,
        marginal_series=marginal_report(ref, train, syn),
        warnings=tuple(extra_warnings),
    )


def report_to_json(report: EvaluationReport) -> dict:
    return {
        "srmse_by_n": {str(n): v for n, v in sorted(report.srmse_by_n.items())},
        "sampled_zeros": report.sampled_zeros,
        "structural_zeros": report.structural_zeros,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "marginal_series": [
            {
                "variable": s.variable,
                "labels": list(s.labels),
                "reference": list(s.reference),
                "training": list(s.training),
                "synthetic": list(s.synthetic),
            }
            for s in report.marginal_series
        ],
        "warnings": list(report.warnings),
    }
