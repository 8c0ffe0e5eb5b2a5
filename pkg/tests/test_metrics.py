"""SRMSE, zeros, precision/recall, and the report bundle."""

import csv
import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copulasynth import (
    EvaluationReport,
    FrequencyMap,
    MicroTable,
    SynthesisError,
    default_exclusion,
    evaluate,
    frequency_map,
    marginal_report,
    precision_recall_f1,
    report_to_json,
    sampled_zeros,
    srmse,
    srmse_projected,
    structural_zeros,
    write_marginal_csv,
)
from conftest import make_schema, random_table, small_tables, table_pairs


def table_from_rows(dims, rows):
    return MicroTable(make_schema(dims), np.array(rows, dtype=np.int64))


def srmse_oracle(ref, syn, subset):
    """Full enumeration over the subset's category product."""
    dims = [ref.schema.dims[i] for i in subset]
    ref_counts = Counter(map(tuple, ref.codes[:, subset].tolist()))
    syn_counts = Counter(map(tuple, syn.codes[:, subset].tolist()))
    total = 0.0
    for combo in itertools.product(*(range(m) for m in dims)):
        p = ref_counts.get(combo, 0) / ref.n_rows
        q = syn_counts.get(combo, 0) / syn.n_rows
        total += (p - q) ** 2
    return math.sqrt(math.prod(dims) * total)


def test_srmse_hand_cases():
    ref = table_from_rows([2], [[0]] * 5 + [[1]] * 5)
    syn = table_from_rows([2], [[0]] * 6 + [[1]] * 4)
    assert srmse(ref, syn, [0]) == pytest.approx(0.2, abs=1e-12)
    disjoint_ref = table_from_rows([2], [[0]] * 4)
    disjoint_syn = table_from_rows([2], [[1]] * 4)
    assert srmse(disjoint_ref, disjoint_syn, [0]) == 2.0
    assert srmse(ref, ref, [0]) == 0.0


def test_srmse_validation():
    ref = random_table([2, 2], 10, seed=0)
    syn = random_table([2, 2], 10, seed=1)
    with pytest.raises(SynthesisError):
        srmse(ref, syn, [])
    with pytest.raises(SynthesisError):
        srmse(ref, syn, [0, 0])
    with pytest.raises(SynthesisError):
        srmse(ref, syn, [7])
    other = random_table([2, 3], 10, seed=2)
    with pytest.raises(SynthesisError):
        srmse(ref, other, [0])
    with pytest.raises(SynthesisError):
        srmse_projected(ref, syn, 0)
    with pytest.raises(SynthesisError):
        srmse_projected(ref, syn, 3)


def test_srmse_matches_bruteforce_oracle():
    rng = np.random.default_rng(123)
    for _ in range(20):
        d = int(rng.integers(1, 6))
        dims = [int(rng.integers(2, 5)) for _ in range(d)]
        schema = make_schema(dims)
        n_ref = int(rng.integers(5, 200))
        n_syn = int(rng.integers(5, 200))
        ref = MicroTable(
            schema, np.column_stack([rng.integers(0, m, n_ref) for m in dims])
        )
        syn = MicroTable(
            schema, np.column_stack([rng.integers(0, m, n_syn) for m in dims])
        )
        size = int(rng.integers(1, d + 1))
        subset = sorted(rng.choice(d, size=size, replace=False).tolist())
        assert srmse(ref, syn, subset) == pytest.approx(
            srmse_oracle(ref, syn, subset), abs=1e-12
        )


@settings(max_examples=40, deadline=None)
@given(table_pairs())
def test_srmse_symmetric_and_nonnegative(pair):
    ref, syn = pair
    subset = list(range(ref.schema.d))
    a = srmse(ref, syn, subset)
    b = srmse(syn, ref, subset)
    assert a == pytest.approx(b, abs=1e-12)
    assert a >= 0.0


@settings(max_examples=40, deadline=None)
@given(table_pairs(), st.integers(0, 10**6))
def test_srmse_invariant_under_shared_recoding(pair, seed):
    ref, syn = pair
    rng = np.random.default_rng(seed)
    schema = ref.schema
    perms = [rng.permutation(m) for m in schema.dims]
    recode = lambda t: MicroTable(
        schema,
        np.column_stack([perms[i][t.column(i)] for i in range(schema.d)]),
    )
    subset = list(range(schema.d))
    before = srmse(ref, syn, subset)
    after = srmse(recode(ref), recode(syn), subset)
    assert before == pytest.approx(after, abs=1e-12)


def test_srmse_projected_aggregates_by_mean():
    ref = random_table([2, 2, 2], 40, seed=3)
    syn = random_table([2, 2, 2], 40, seed=4)
    pairwise = [srmse(ref, syn, s) for s in itertools.combinations(range(3), 2)]
    assert srmse_projected(ref, syn, 2) == pytest.approx(np.mean(pairwise), abs=1e-12)
    # single subset of full size: projection equals the plain metric
    two = random_table([2, 3], 30, seed=5)
    two_syn = random_table([2, 3], 30, seed=6)
    assert srmse_projected(two, two_syn, 2) == srmse(two, two_syn, [0, 1])


def test_frequency_map_validation():
    fm = frequency_map(table_from_rows([2], [[0], [0], [1], [1]]), [0])
    assert fm.get((0,)) == 0.5
    assert fm.get((1,)) == 0.5
    assert fm.get((9,)) == 0.0
    with pytest.raises(SynthesisError):
        FrequencyMap({(0,): 0.4, (1,): 0.4})
    with pytest.raises(SynthesisError):
        FrequencyMap({(0,): -0.5, (1,): 1.5})


def test_default_exclusion_targets_wide_ordinals():
    from copulasynth import Schema, VariableSpec

    schema = Schema(
        (
            VariableSpec("age", tuple(str(i) for i in range(85)), "ordinal"),
            VariableSpec("sex", ("F", "M"), "categorical"),
            VariableSpec("wide_cat", tuple(str(i) for i in range(30)), "categorical"),
        )
    )
    assert default_exclusion(schema) == ("age",)


def test_sampled_zeros_set_arithmetic():
    dims = [3, 3]
    train = table_from_rows(dims, [[0, 0]])
    ref = table_from_rows(dims, [[0, 0], [1, 1]])
    syn = table_from_rows(dims, [[1, 1], [2, 2]])
    assert sampled_zeros(train, ref, syn) == 1  # only (1,1) counts
    assert sampled_zeros(train, ref, train) == 0
    with pytest.raises(SynthesisError, match="empty projection"):
        sampled_zeros(train, ref, syn, exclude=("v0", "v1"))


def test_structural_zeros_set_arithmetic():
    dims = [4, 4]
    pop = table_from_rows(dims, [[0, 0], [1, 1], [2, 2]])
    syn = table_from_rows(dims, [[1, 1], [2, 2], [3, 3]])
    assert structural_zeros(syn, pop) == 1
    assert structural_zeros(pop, pop) == 0


def test_precision_recall_f1_hand_case():
    dims = [4, 4]
    pop = table_from_rows(dims, [[0, 0], [1, 1], [2, 2]])
    syn = table_from_rows(dims, [[1, 1], [2, 2], [3, 3]])
    p, r, f1 = precision_recall_f1(syn, pop)
    assert p == 2 / 3 and r == 2 / 3
    assert f1 == pytest.approx(2 / 3, abs=1e-15)
    assert precision_recall_f1(pop, pop) == (1.0, 1.0, 1.0)


def test_precision_zero_when_disjoint():
    dims = [2, 2]
    pop = table_from_rows(dims, [[0, 0]])
    syn = table_from_rows(dims, [[1, 1]])
    assert precision_recall_f1(syn, pop) == (0.0, 0.0, 0.0)


def test_zeros_match_bruteforce_sets():
    rng = np.random.default_rng(77)
    for _ in range(25):
        d = int(rng.integers(2, 5))
        dims = [int(rng.integers(2, 4)) for _ in range(d)]
        tables = [random_table(dims, int(rng.integers(4, 60)), seed=int(rng.integers(1e6)))
                  for _ in range(3)]
        train, ref, syn = tables
        as_set = lambda t: set(map(tuple, t.codes.tolist()))
        assert sampled_zeros(train, ref, syn) == len(
            as_set(syn) & as_set(ref) - as_set(train)
        )
        assert structural_zeros(syn, ref) == len(as_set(syn) - as_set(ref))
        p, r, f1 = precision_recall_f1(syn, ref)
        hit = len(as_set(syn) & as_set(ref))
        assert p == hit / len(as_set(syn))
        assert r == hit / len(as_set(ref))


def test_exclusion_projects_before_counting():
    dims = [2, 2]
    train = table_from_rows(dims, [[0, 0]])
    ref = table_from_rows(dims, [[0, 1]])
    syn = table_from_rows(dims, [[0, 1]])
    # with the second variable excluded, everything collapses onto v0=0
    assert sampled_zeros(train, ref, syn) == 1
    assert sampled_zeros(train, ref, syn, exclude=("v1",)) == 0
    with pytest.raises(SynthesisError, match="unknown"):
        sampled_zeros(train, ref, syn, exclude=("ghost",))


def test_marginal_report_hand_counts():
    dims = [2]
    ref = table_from_rows(dims, [[0], [0], [1]])
    train = table_from_rows(dims, [[1], [1], [1]])
    syn = table_from_rows(dims, [[0], [1], [1]])
    series = marginal_report(ref, train, syn)
    assert len(series) == 1
    s = series[0]
    assert s.reference == (2 / 3, 1 / 3)
    assert s.training == (0.0, 1.0)
    assert s.synthetic == (1 / 3, 2 / 3)
    identical = marginal_report(ref, train, ref)
    assert identical[0].reference == identical[0].synthetic


@settings(max_examples=30, deadline=None)
@given(small_tables())
def test_marginal_report_series_sum_to_one(table):
    series = marginal_report(table, table, table)
    for s in series:
        assert math.fsum(s.reference) == pytest.approx(1.0, abs=1e-9)


def test_marginal_csv_format(tmp_path):
    ref = table_from_rows([2], [[0], [1]])
    series = marginal_report(ref, ref, ref)
    path = tmp_path / "m.csv"
    write_marginal_csv(series, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["variable", "category", "series", "frequency"]
    assert ["v0", "0", "reference", repr(0.5)] in rows


def test_report_f1_invariant():
    series = ()
    with pytest.raises(SynthesisError):
        EvaluationReport(
            srmse_by_n={1: 0.0},
            sampled_zeros=0,
            structural_zeros=0,
            precision=0.5,
            recall=0.5,
            f1=0.9,
            marginal_series=series,
        )
    with pytest.raises(SynthesisError):
        EvaluationReport(
            srmse_by_n={1: 0.0},
            sampled_zeros=0,
            structural_zeros=0,
            precision=0.0,
            recall=0.5,
            f1=0.3,
            marginal_series=series,
        )


def test_evaluate_and_json_field_names():
    ref = random_table([2, 3], 50, seed=1)
    syn = random_table([2, 3], 50, seed=2)
    report = evaluate(ref, ref, syn, ref, exclude=())
    doc = report_to_json(report)
    assert set(doc) == {
        "srmse_by_n",
        "sampled_zeros",
        "structural_zeros",
        "precision",
        "recall",
        "f1",
        "marginal_series",
        "warnings",
    }
    assert set(doc["srmse_by_n"]) == {"1", "2"}
    assert doc["marginal_series"][0]["variable"] == "v0"
    # syn == ref combos minus train combos is empty when train == ref
    assert doc["sampled_zeros"] == 0
