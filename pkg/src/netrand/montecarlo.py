"""Replication harness: seeded pipelines, moment aggregation, closed-form checks.

Each replicate derives its streams from a splittable counter construction,
``SeedSequence(base_seed, spawn_key=(cell_index, replicate))``, so results are
reproducible and independent of replicate execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from . import graph as graphmod
from .graph import ErParams, GoeParams, Graph, SbmParams
from .design import ADAPTIVE, RANDOM, DesignConfig, run_design, run_design_many
from .outcome import OutcomeParams, simulate_outcomes

_Z95 = 1.959963984540054  # normal-approximation 95% interval half-width multiplier

ER = "er"
SBM = "sbm"
GOE = "goe"
REAL = "real"


def random_design_expected_i2(n: int, p: float) -> float:
    """Exact finite-n expected squared imbalance of the random policy on ER(n, p).

    Expectation over both the graph draw and the fair pairwise coin:
    n^2 p(1-p) + n(1-2p)(1-p).
    """
    if n < 2 or n % 2:
        raise ParameterError("n must be even and at least 2")
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie in (0, 1)")
    return n * n * p * (1.0 - p) + n * (1.0 - 2.0 * p) * (1.0 - p)


def adaptive_fourth_moment_bound(p: float, b: float) -> float:
    """Asymptotic upper bound on E[I^4]/n^4 for the adaptive policy on ER(n, p).

    At b = 1/2 the reduction term vanishes and the bound equals p^2 (1-p)^2.
    """
    if not 0.0 < p < 1.0:
        raise ParameterError("p must lie in (0, 1)")
    if not 0.5 <= b <= 1.0:
        raise ParameterError("b must lie in [1/2, 1]")
    q = p * (1.0 - p)
    t = 2.0 * b - 1.0
    return q * q - 0.125 * t * (2.0 - math.sqrt(2.0) * t) ** 1.5 * q**2.5


def goe_fourth_moment_bound(b: float) -> float:
    """Asymptotic upper bound on E[I^4]/(n^4 sigma^4) for the adaptive policy on GOE.

    Independent of sigma, which enters only through the normalization.
    At b = 1/2 the reduction term vanishes and the bound equals 1.
    """
    if not 0.5 <= b <= 1.0:
        raise ParameterError("b must lie in [1/2, 1]")
    t = 2.0 * b - 1.0
    c = math.sqrt(2.0 / math.pi)
    return 1.0 - 0.25 * t * c * (4.0 - c * t) ** 1.5


def sparse_edge_probability(n: int, c: float) -> float:
    """Density-regime edge probability log(n)/(c*n)."""
    p = math.log(n) / (c * n)
    if not 0.0 < p < 1.0:
        raise ParameterError(f"log(n)/(c*n) = {p} outside (0, 1) for n={n}, c={c}")
    return p


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: a model, a list of sizes, policies, and replication counts."""

    model: str
    n_values: tuple[int, ...]
    policies: tuple[str, ...] = (ADAPTIVE, RANDOM)
    b: float = 0.95
    p: float | None = None
    p_in: float | None = None
    p_out: float | None = None
    sigma2: float | None = None
    sparse_log_density: float | None = None
    outcome: OutcomeParams | None = None
    reps: int = 100
    seed: int = 0
    edges_path: str | None = None
    sample_source: Graph | None = None
    allow_odd: bool = False

    def __post_init__(self):
        if self.model not in (ER, SBM, GOE, REAL):
            raise ParameterError(f"unknown model {self.model!r}")
        if not self.n_values:
            raise ParameterError("at least one n value required")
        for n in self.n_values:
            if n < 2:
                raise ParameterError("all n values must be at least 2")
            if n % 2 and not self.allow_odd:
                raise ParameterError(f"n={n} is odd; pass allow_odd=True to permit it")
        if self.reps < 1:
            raise ParameterError("reps must be at least 1")
        if not self.policies:
            raise ParameterError("at least one policy required")
        for pol in self.policies:
            if pol not in (ADAPTIVE, RANDOM):
                raise ParameterError(f"unknown policy {pol!r}")
        if self.model == ER:
            if (self.p is None) == (self.sparse_log_density is None):
                raise ParameterError("er model needs exactly one of p or sparse_log_density")
        elif self.model == SBM:
            if self.p_in is None or self.p_out is None:
                raise ParameterError("sbm model needs p_in and p_out")
        elif self.model == GOE:
            if (self.sigma2 is None) == (self.sparse_log_density is None):
                raise ParameterError(
                    "goe model needs exactly one of sigma2 or sparse_log_density"
                )
        elif self.model == REAL:
            if self.edges_path is None and self.sample_source is None:
                raise ParameterError("real model needs an edge list or a source graph")


@dataclass(frozen=True)
class ResultRow:
    """Per-replicate record; mirrors the CSV schema emitted by the CLI."""

    model: str
    n: int
    policy: str
    b: float
    p: float | None
    p_in: float | None
    p_out: float | None
    sigma2: float | None
    replicate: int
    i: float
    i2: object
    i4: float
    two_i_over_n: float
    w: float | None
    seed: int
    density: float | None = None


@dataclass(frozen=True)
class MomentSummary:
    """Replicate moments for one (model, n, policy) cell.

    The confidence interval is the normal-approximation 95% interval for the
    mean of 2I/n; the IQR bounds are the 25th/75th percentiles of 2I/n.
    """

    model: str
    n: int
    policy: str
    reps: int
    mean_i: float
    mean_i2: float
    mean_i4: float
    mean_two_i_over_n: float
    sd_two_i_over_n: float
    ci_lo: float
    ci_hi: float
    iqr_lo: float
    iqr_hi: float
    w_mean: float | None = None
    w_sd: float | None = None


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ResultRow, ...]
    summaries: tuple[MomentSummary, ...]


def replicate_streams(base_seed: int, cell: int, rep: int) -> list[np.random.SeedSequence]:
    """Derive the (graph, design, outcome-a, outcome-b) streams of one replicate."""
    root = np.random.SeedSequence(base_seed, spawn_key=(cell, rep))
    return root.spawn(4)


def _cell_params(spec: ExperimentSpec, n: int):
    if spec.model == ER:
        p = spec.p if spec.p is not None else sparse_edge_probability(n, spec.sparse_log_density)
        return {"p": p}
    if spec.model == SBM:
        return {"p_in": spec.p_in, "p_out": spec.p_out}
    if spec.model == GOE:
        if spec.sigma2 is not None:
            return {"sigma2": spec.sigma2}
        p = sparse_edge_probability(n, spec.sparse_log_density)
        return {"sigma2": p * (1.0 - p)}
    return {}


def _make_graph(spec: ExperimentSpec, n: int, params: dict, source: Graph | None, seed):
    if spec.model == ER:
        return graphmod.gen_er(ErParams(n, params["p"]), seed)
    if spec.model == SBM:
        return graphmod.gen_sbm(SbmParams(n, params["p_in"], params["p_out"]), seed)
    if spec.model == GOE:
        return graphmod.gen_goe(GoeParams(n, params["sigma2"]), seed)
    return graphmod.induced_subgraph_sample(source, n, seed)


def summarize(rows) -> tuple[MomentSummary, ...]:
    """Aggregate rows into per-cell moment summaries (order-independent)."""
    cells: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        cells.setdefault((row.model, row.n, row.policy), []).append(row)
    out = []
    for (model, n, policy), group in sorted(cells.items()):
        group = sorted(group, key=lambda r: r.replicate)
        metric = np.array([r.two_i_over_n for r in group], dtype=np.float64)
        reps = len(group)
        mean = float(metric.mean())
        sd = float(metric.std(ddof=1)) if reps > 1 else 0.0
        half = _Z95 * sd / math.sqrt(reps) if reps > 1 else 0.0
        q1, q3 = (np.percentile(metric, [25.0, 75.0]) if reps else (mean, mean))
        ws = [r.w for r in group if r.w is not None]
        w_mean = float(np.mean(ws)) if ws else None
        w_sd = float(np.std(ws, ddof=1)) if len(ws) > 1 else (0.0 if ws else None)
        out.append(
            MomentSummary(
                model=model,
                n=n,
                policy=policy,
                reps=reps,
                mean_i=float(np.mean([r.i for r in group])),
                mean_i2=float(np.mean([r.i2 for r in group])),
                mean_i4=float(np.mean([r.i4 for r in group])),
                mean_two_i_over_n=mean,
                sd_two_i_over_n=sd,
                ci_lo=mean - half,
                ci_hi=mean + half,
                iqr_lo=float(q1),
                iqr_hi=float(q3),
                w_mean=w_mean,
                w_sd=w_sd,
            )
        )
    return tuple(out)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run the sweep: fresh graph (or fresh subgraph sample) per replicate.

    Fully deterministic given the base seed; replicate streams are derived by
    spawn keys, so execution order cannot change any number.
    """
    source = spec.sample_source
    if spec.model == REAL and source is None:
        source = graphmod.from_edge_list(spec.edges_path)
    rows: list[ResultRow] = []
    for cell, n in enumerate(spec.n_values):
        params = _cell_params(spec, n)
        for rep in range(spec.reps):
            graph_ss, design_ss, out_a_ss, out_b_ss = replicate_streams(spec.seed, cell, rep)
            g = _make_graph(spec, n, params, source, graph_ss)
            dens = graphmod.density(g) if spec.model == REAL else None
            outcome_streams = {ADAPTIVE: out_a_ss, RANDOM: out_b_ss}
            for policy in spec.policies:
                cfg = DesignConfig(policy=policy, b=spec.b, seed=design_ss)
                result = run_design(g, cfg)
                i2 = result.final_i2
                i = math.sqrt(i2)
                w = None
                if spec.outcome is not None:
                    out_rng = np.random.default_rng(outcome_streams[policy])
                    w = simulate_outcomes(g, result.tau, spec.outcome, out_rng).w
                rows.append(
                    ResultRow(
                        model=spec.model,
                        n=n,
                        policy=policy,
                        b=spec.b,
                        p=params.get("p"),
                        p_in=params.get("p_in"),
                        p_out=params.get("p_out"),
                        sigma2=params.get("sigma2"),
                        replicate=rep,
                        i=i,
                        i2=i2,
                        i4=float(i2) ** 2,
                        two_i_over_n=2.0 * i / n,
                        w=w,
                        seed=spec.seed,
                        density=dens,
                    )
                )
    return ExperimentResult(rows=tuple(rows), summaries=summarize(rows))


@dataclass(frozen=True)
class ReductionReport:
    """Both policies replicated on one fixed graph, with the relative reduction."""

    adaptive_mean_i: float
    random_mean_i: float
    reduction: float
    reps: int
    adaptive_se: float
    random_se: float
    zero_denominator: bool = False


def reduction_report(g: Graph, b: float, reps: int, seed) -> ReductionReport:
    """Mean final imbalance under both policies on the same graph.

    Replicates use independent draws from streams spawned off ``seed``.  If
    the random-policy mean is zero the reduction is reported as 0 and
    flagged.
    """
    if reps < 1:
        raise ParameterError("reps must be at least 1")
    a_ss, r_ss = np.random.SeedSequence(seed).spawn(2)
    i_adaptive = np.sqrt(
        run_design_many(g, DesignConfig(ADAPTIVE, b=b), reps, rng=np.random.default_rng(a_ss)).astype(np.float64)
    )
    i_random = np.sqrt(
        run_design_many(g, DesignConfig(RANDOM, b=b), reps, rng=np.random.default_rng(r_ss)).astype(np.float64)
    )
    a_mean = float(i_adaptive.mean())
    r_mean = float(i_random.mean())
    a_se = float(i_adaptive.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    r_se = float(i_random.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    if r_mean == 0.0:
        return ReductionReport(a_mean, r_mean, 0.0, reps, a_se, r_se, zero_denominator=True)
    return ReductionReport(a_mean, r_mean, 1.0 - a_mean / r_mean, reps, a_se, r_se)
