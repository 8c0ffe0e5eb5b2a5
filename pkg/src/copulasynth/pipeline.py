"""Config-driven experiment runner.

Wires the full synthesis flow for each generator kind: normalize the
source sample, learn the dependence model, generate, inject target
marginals where the method supports it, then evaluate and persist.
Every random draw derives from the single config seed, so outputs are
byte-identical across runs.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import warnings as _warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .baselines import sample_independent
from .bayesnet import fit_parameters, learn_structure
from .bayesnet import sample as bn_sample
from .copula import (
    EmpiricalMarginal,
    fit_ecdf,
    jitter_cells,
    normalize,
    pseudo_inverse_many,
)
from .dataset import (
    MarginalTable,
    MicroTable,
    Schema,
    VariableSpec,
    concat,
    load_marginals_csv,
    load_micro_csv,
    load_schema,
    marginals_of,
    write_micro_csv,
)
from .errors import SynthesisError
from .ipf import allocate, build_seed
from .ipf import fit as ipf_fit
from .metrics import (
    EvaluationReport,
    default_exclusion,
    evaluate,
    report_to_json,
    srmse_projected,
    write_marginal_csv,
)

GENERATORS = ("independent", "ipf", "bn", "bn_copula", "external_copula")

_CONFIG_FIELDS = {
    "source_data",
    "schema",
    "target_marginals",
    "method",
    "output_size",
    "seed",
    "max_parents",
    "alpha",
    "tol",
    "max_iter",
    "exclude_variables",
    "output_dir",
    "reference_data",
    "population_data",
    "external_command",
    "baseline_target_marginals",
}


@dataclass(frozen=True)
class SynthesisConfig:
    """Everything one experiment needs; see load_config for the JSON form."""

    source_data: str
    schema: str
    method: str
    output_size: int
    seed: int
    target_marginals: str = "from-source"
    max_parents: int = 3
    alpha: float = 0.1
    tol: float = 1e-8
    max_iter: int = 1000
    exclude_variables: tuple[str, ...] | None = None
    output_dir: str | None = None
    reference_data: str | None = None
    population_data: str | None = None
    external_command: tuple[str, ...] | None = None
    baseline_target_marginals: bool = False

    def __post_init__(self):
        if self.method not in GENERATORS:
            raise SynthesisError(
                f"unknown method {self.method!r}; choose one of {', '.join(GENERATORS)}"
            )
        if self.output_size <= 0:
            raise SynthesisError("output_size must be positive")
        if self.method == "external_copula" and not self.external_command:
            raise SynthesisError("external_copula requires external_command")
        if self.exclude_variables is not None:
            object.__setattr__(
                self, "exclude_variables", tuple(self.exclude_variables)
            )
        if self.external_command is not None:
            cmd = self.external_command
            if isinstance(cmd, str):
                cmd = tuple(shlex.split(cmd))
            object.__setattr__(self, "external_command", tuple(cmd))


def load_config(path) -> SynthesisConfig:
    """Read a config JSON whose keys mirror SynthesisConfig verbatim."""
    with open(path) as handle:
        doc = json.load(handle)
    if not isinstance(doc, dict):
        raise SynthesisError("config must be a JSON object")
    unknown = sorted(set(doc) - _CONFIG_FIELDS)
    if unknown:
        raise SynthesisError(f"unknown config field(s): {', '.join(unknown)}")
    missing = sorted(
        {"source_data", "schema", "method", "output_size", "seed"} - set(doc)
    )
    if missing:
        raise SynthesisError(f"missing config field(s): {', '.join(missing)}")
    return SynthesisConfig(**doc)


def _streams(seed: int):
    """Fixed seed layout: structure search, generation, jitter."""
    children = np.random.SeedSequence(seed).spawn(3)
    structure_seed = int(children[0].generate_state(1)[0])
    return structure_seed, children[1], children[2]


def rank_recode(source: MicroTable) -> tuple[MicroTable, list[EmpiricalMarginal]]:
    """Recode each column onto its observed support 0..k-1.

    The recoding is strictly monotone per column, so dependence structure
    is untouched; the derived schema drops categories the sample never
    shows, which is exactly the support the fitted ECDF knows about.
    """
    d = source.schema.d
    marginals = [fit_ecdf(source.column(i)) for i in range(d)]
    ranks = np.empty_like(source.codes)
    derived = []
    for i, em in enumerate(marginals):
        ranks[:, i] = np.searchsorted(em.values, source.column(i))
        var = source.schema.variables[i]
        derived.append(
            VariableSpec(
                name=var.name,
                labels=tuple(var.labels[c] for c in em.values),
                kind=var.kind,
            )
        )
    return MicroTable(Schema(tuple(derived)), ranks), marginals


def _run_external(command, normalized, n: int, seed: int) -> np.ndarray:
    header = ",".join(normalized.schema.names)
    body = "\n".join(
        ",".join(repr(float(v)) for v in row) for row in normalized.values
    )
    payload = header + "\n" + body + "\n"
    cmd = list(command) + ["--n", str(n), "--seed", str(seed)]
    try:
        proc = subprocess.run(
            cmd, input=payload, capture_output=True, text=True, check=False
        )
    except OSError as exc:
        raise SynthesisError(f"external generator failed to start: {exc}") from exc
    if proc.returncode != 0:
        detail = proc.stderr.strip().splitlines()
        raise SynthesisError(
            "external generator exited with code "
            f"{proc.returncode}: {detail[0] if detail else 'no stderr'}"
        )
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    if lines:
        try:
            float(lines[0].split(",")[0])
        except ValueError:
            lines = lines[1:]  # optional header
    if len(lines) != n:
        raise SynthesisError(
            f"external generator emitted {len(lines)} rows, expected {n}"
        )
    try:
        values = np.array(
            [[float(tok) for tok in ln.split(",")] for ln in lines], dtype=np.float64
        )
    except ValueError as exc:
        raise SynthesisError(f"external generator output not numeric: {exc}") from exc
    if values.ndim != 2 or values.shape[1] != normalized.schema.d:
        raise SynthesisError(
            f"external generator output has shape {values.shape}, "
            f"expected ({n}, {normalized.schema.d})"
        )
    if (values <= 0).any() or (values > 1).any():
        raise SynthesisError("external generator output must lie in (0,1]")
    return values


def generate_table(
    source: MicroTable, targets: MarginalTable, config: SynthesisConfig, seed: int
) -> tuple[MicroTable, tuple[str, ...]]:
    """Generate one synthetic table; returns it with any generation warnings."""
    if source.schema != targets.schema:
        raise SynthesisError("source and target marginals use different schemas")
    n = config.output_size
    d = source.schema.d
    structure_seed, gen_key, jitter_key = _streams(seed)
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        if config.method == "independent":
            marg = targets if config.baseline_target_marginals else marginals_of(source)
            syn = sample_independent(marg, n, np.random.default_rng(gen_key))
        elif config.method == "ipf":
            fitted = ipf_fit(
                build_seed(source), targets, tol=config.tol, max_iter=config.max_iter
            )
            syn = allocate(fitted, n, np.random.default_rng(gen_key))
        elif config.method == "bn":
            dag = learn_structure(
                source, max_parents=config.max_parents, seed=structure_seed
            )
            bn = fit_parameters(source, dag, alpha=config.alpha)
            syn = bn_sample(bn, n, np.random.default_rng(gen_key))
        elif config.method == "bn_copula":
            recoded, source_marginals = rank_recode(source)
            dag = learn_structure(
                recoded, max_parents=config.max_parents, seed=structure_seed
            )
            bn = fit_parameters(recoded, dag, alpha=config.alpha)
            cells = bn_sample(bn, n, np.random.default_rng(gen_key))
            jitter_rng = np.random.default_rng(jitter_key)
            codes = np.empty((n, d), dtype=np.int64)
            for i in range(d):
                u = jitter_cells(source_marginals[i], cells.column(i) + 1, jitter_rng)
                target_marginal = EmpiricalMarginal.from_counts(targets.counts[i])
                codes[:, i] = pseudo_inverse_many(target_marginal, u)
            syn = MicroTable(source.schema, codes)
        else:  # external_copula
            normalized, _ = normalize(source)
            ext_seed = int(gen_key.generate_state(1)[0])
            u = _run_external(config.external_command, normalized, n, ext_seed)
            codes = np.empty((n, d), dtype=np.int64)
            for i in range(d):
                target_marginal = EmpiricalMarginal.from_counts(targets.counts[i])
                codes[:, i] = pseudo_inverse_many(target_marginal, u[:, i])
            syn = MicroTable(source.schema, codes)
    return syn, tuple(str(w.message) for w in caught)


def _load_inputs(config: SynthesisConfig):
    schema = load_schema(config.schema)
    source = load_micro_csv(config.source_data, schema)
    if config.target_marginals == "from-source":
        targets = marginals_of(source)
    else:
        targets = load_marginals_csv(config.target_marginals, schema)
    reference = (
        load_micro_csv(config.reference_data, schema)
        if config.reference_data
        else source
    )
    if config.population_data:
        population = load_micro_csv(config.population_data, schema)
    elif reference is source:
        population = source
    else:
        population = concat(source, reference)
    return schema, source, targets, reference, population


def synthesize(config: SynthesisConfig) -> MicroTable:
    """Load inputs and generate the synthetic table, nothing else."""
    _, source, targets, _, _ = _load_inputs(config)
    syn, _ = generate_table(source, targets, config, config.seed)
    return syn


def run_experiment(config: SynthesisConfig) -> EvaluationReport:
    """Generate, evaluate, and (when output_dir is set) persist one run."""
    schema, source, targets, reference, population = _load_inputs(config)
    syn, warns = generate_table(source, targets, config, config.seed)
    exclude = config.exclude_variables
    if exclude is None:
        exclude = default_exclusion(schema)
    report = evaluate(
        reference, source, syn, population, exclude=exclude, extra_warnings=warns
    )
    if config.output_dir:
        os.makedirs(config.output_dir, exist_ok=True)
        write_micro_csv(syn, os.path.join(config.output_dir, "synthetic.csv"))
        with open(os.path.join(config.output_dir, "report.json"), "w") as handle:
            json.dump(report_to_json(report), handle, indent=2, sort_keys=True)
            handle.write("\n")
        write_marginal_csv(
            report.marginal_series, os.path.join(config.output_dir, "marginals.csv")
        )
    return report


@dataclass(frozen=True, eq=False)
class PermutationStudy:
    """Projected SRMSE across random relabelings of categorical variables."""

    values: dict
    mean: dict
    std: dict

    @property
    def n_permutations(self) -> int:
        return len(next(iter(self.values.values())))


def run_permutation_study(
    config: SynthesisConfig, n_permutations: int
) -> PermutationStudy:
    """Re-run synthesis under random category-label orders.

    Each permutation relabels every categorical variable (ordinal orders
    are meaningful and stay fixed), re-runs the generator in the permuted
    coding, maps the synthetic rows back, and scores projected SRMSE
    against the unpermuted reference. Reports mean and population std per
    projection size.
    """
    if config.method != "bn_copula":
        raise SynthesisError("permutation study requires method=bn_copula")
    if n_permutations < 1:
        raise SynthesisError("need at least one permutation")
    schema, source, targets, reference, _ = _load_inputs(config)
    categorical = {
        i for i, v in enumerate(schema.variables) if v.kind == "categorical"
    }
    if not categorical:
        raise SynthesisError("no categorical variables to permute")
    base = np.random.SeedSequence(config.seed)
    perm_key, run_key = base.spawn(2)
    perm_rng = np.random.default_rng(perm_key)
    run_seeds = run_key.generate_state(n_permutations)
    sizes = range(1, min(5, schema.d) + 1)
    values: dict[int, list[float]] = {n: [] for n in sizes}
    for r in range(n_permutations):
        perms = []
        recoded = source.codes.copy()
        new_vars = []
        new_counts = []
        for i, var in enumerate(schema.variables):
            m = var.n_categories
            p = perm_rng.permutation(m) if i in categorical else np.arange(m)
            inverse = np.empty(m, dtype=np.int64)
            inverse[p] = np.arange(m)
            perms.append(p)
            recoded[:, i] = inverse[source.column(i)]
            new_vars.append(
                VariableSpec(var.name, tuple(var.labels[j] for j in p), var.kind)
            )
            new_counts.append(targets.counts[i][p])
        perm_schema = Schema(tuple(new_vars))
        perm_source = MicroTable(perm_schema, recoded)
        perm_targets = MarginalTable(perm_schema, tuple(new_counts))
        syn_perm, _ = generate_table(
            perm_source, perm_targets, config, int(run_seeds[r])
        )
        back = np.empty_like(syn_perm.codes)
        for i in range(schema.d):
            back[:, i] = perms[i][syn_perm.column(i)]
        syn = MicroTable(schema, back)
        for n in sizes:
            values[n].append(srmse_projected(reference, syn, n))
    mean = {n: float(np.mean(values[n])) for n in sizes}
    std = {n: float(np.std(values[n])) for n in sizes}
    return PermutationStudy(
        values={n: tuple(values[n]) for n in sizes}, mean=mean, std=std
    )


def make_transfer_benchmark(
    seed: int = 0,
    d: int = 9,
    n_source: int = 6000,
    n_target: int = 6000,
    marginal_skew: float = 0.5,
) -> tuple[MicroTable, MicroTable]:
    """Two samples sharing a copula but with skew-shifted marginals.

    Rows draw latent uniforms from a Gaussian copula with correlation
    0.6^|j-k|, then discretize: the source at uniform quantile cuts, the
    target at those cuts raised to a skew-dependent power (even-index
    variables skew one way, odd-index the other). Even-index variables
    are categorical, odd-index ordinal; cardinalities cycle 2,3,4.
    """
    if d < 2:
        raise SynthesisError("benchmark needs d >= 2")
    if not 0.0 <= marginal_skew <= 1.0:
        raise SynthesisError("marginal_skew must lie in [0,1]")
    if n_source < 1 or n_target < 1:
        raise SynthesisError("sample sizes must be positive")
    dims = [2 + (i % 3) for i in range(d)]
    variables = tuple(
        VariableSpec(
            name=f"v{i}",
            labels=tuple(str(j) for j in range(dims[i])),
            kind="categorical" if i % 2 == 0 else "ordinal",
        )
        for i in range(d)
    )
    schema = Schema(variables)
    corr = 0.6 ** np.abs(np.subtract.outer(np.arange(d), np.arange(d)))
    chol = np.linalg.cholesky(corr)
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    def draw(n: int, powered: bool) -> MicroTable:
        uniforms = ndtr(rng.standard_normal((n, d)) @ chol.T)
        codes = np.empty((n, d), dtype=np.int64)
        for i in range(d):
            cuts = np.arange(1, dims[i]) / dims[i]
            if powered:
                gamma = 1.0 + marginal_skew if i % 2 == 0 else 1.0 / (1.0 + marginal_skew)
                cuts = cuts**gamma
            codes[:, i] = np.searchsorted(cuts, uniforms[:, i], side="left")
        return MicroTable(schema, codes)

    return draw(n_source, powered=False), draw(n_target, powered=True)
