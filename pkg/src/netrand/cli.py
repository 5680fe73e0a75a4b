"""Command-line entry points emitting CSV for plotting and tables.

Every command is a pure function of its flags and input files: identical
invocations produce byte-identical output.  Exit codes: 0 success, 1 I/O or
input-data failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .errors import EdgeListParseError, ParameterError, SizeLimitError
from . import graph as graphmod
from .graph import ErParams, Graph
from .design import ADAPTIVE, RANDOM, DesignConfig, run_design, run_design_many
from .montecarlo import ExperimentSpec, MomentSummary, ResultRow, run_experiment
from .outcome import OutcomeParams
from . import oracle as oraclemod

RESULT_COLUMNS = [
    "model", "n", "policy", "b", "p", "p_in", "p_out", "sigma2",
    "replicate", "I", "I2", "I4", "two_I_over_n", "W", "seed", "density",
]
SUMMARY_COLUMNS = [
    "model", "n", "policy", "mean_two_I_over_n", "ci_lo", "ci_hi",
    "iqr_lo", "iqr_hi", "reps", "mean_I", "mean_I2", "mean_I4", "w_mean", "w_sd",
]
REAL_COLUMNS = ["n", "replicate", "policy", "b", "density", "I", "I2", "two_I_over_n", "seed"]
REAL_SUMMARY_COLUMNS = [
    "n", "reps", "b", "adaptive_mean_I", "random_mean_I", "reduction",
    "zero_denominator", "mean_density",
]
ASSIGN_COLUMNS = ["index", "node_id", "treatment", "I"]


def _fmt(value) -> str:
    """Numeric cell formatting: full-precision repr so integers stay exact."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _summary_path(out: str) -> str:
    p = Path(out)
    if p.suffix == ".csv":
        return str(p.with_suffix("")) + ".summary.csv"
    return out + ".summary.csv"


def _result_cells(r: ResultRow) -> list:
    return [
        r.model, r.n, r.policy, r.b, r.p, r.p_in, r.p_out, r.sigma2,
        r.replicate, r.i, r.i2, r.i4, r.two_i_over_n, r.w, r.seed, r.density,
    ]


def _summary_cells(s: MomentSummary) -> list:
    return [
        s.model, s.n, s.policy, s.mean_two_i_over_n, s.ci_lo, s.ci_hi,
        s.iqr_lo, s.iqr_hi, s.reps, s.mean_i, s.mean_i2, s.mean_i4, s.w_mean, s.w_sd,
    ]


def _parse_n_values(entries) -> tuple[int, ...]:
    values: list[int] = []
    for entry in entries:
        if ":" in entry:
            parts = entry.split(":")
            if len(parts) != 3:
                raise ParameterError(f"range must be start:stop:step, got {entry!r}")
            start, stop, step_ = (int(x) for x in parts)
            if step_ <= 0 or stop < start:
                raise ParameterError(f"bad range {entry!r}")
            values.extend(range(start, stop + 1, step_))
        else:
            values.append(int(entry))
    return tuple(values)


def cmd_simulate(args) -> int:
    policies = {
        "adaptive": (ADAPTIVE,),
        "random": (RANDOM,),
        "both": (ADAPTIVE, RANDOM),
    }[args.policy]
    outcome = None
    outcome_flags = [args.mu0, args.mu1, args.sigma_z, args.sigma_eps]
    if any(v is not None for v in outcome_flags):
        if any(v is None for v in outcome_flags):
            raise ParameterError("outcome simulation needs all of --mu0 --mu1 --sigma-z --sigma-eps")
        outcome = OutcomeParams(args.mu0, args.mu1, args.sigma_z, args.sigma_eps)
    spec = ExperimentSpec(
        model=args.model,
        n_values=_parse_n_values(args.n),
        policies=policies,
        b=args.b,
        p=args.p,
        p_in=args.p_in,
        p_out=args.p_out,
        sigma2=args.sigma2,
        sparse_log_density=args.sparse_log_density,
        outcome=outcome,
        reps=args.reps,
        seed=args.seed,
    )
    result = run_experiment(spec)
    _write_csv(args.out, RESULT_COLUMNS, (_result_cells(r) for r in result.rows))
    _write_csv(
        args.summary_out or _summary_path(args.out),
        SUMMARY_COLUMNS,
        (_summary_cells(s) for s in result.summaries),
    )
    return 0


def cmd_real(args) -> int:
    """Fresh induced sample and arrival order per replicate, both policies."""
    parent = graphmod.from_edge_list(args.edges)
    sizes = _parse_n_values(args.n_sweep) if args.n_sweep else (args.sample,)
    for k in sizes:
        if k > parent.n:
            raise ParameterError(f"sample size {k} exceeds graph size {parent.n}")
    spec = ExperimentSpec(
        model="real",
        n_values=sizes,
        policies=(ADAPTIVE, RANDOM),
        b=args.b,
        reps=args.reps,
        seed=args.seed,
        sample_source=parent,
    )
    result = run_experiment(spec)
    rows = [
        [r.n, r.replicate, r.policy, r.b, r.density, r.i, r.i2, r.two_i_over_n, r.seed]
        for r in result.rows
    ]
    summary_rows = []
    for k in sizes:
        cell = [r for r in result.rows if r.n == k]
        a_mean = float(np.mean([r.i for r in cell if r.policy == ADAPTIVE]))
        r_mean = float(np.mean([r.i for r in cell if r.policy == RANDOM]))
        zero = r_mean == 0.0
        reduction = 0.0 if zero else 1.0 - a_mean / r_mean
        mean_density = float(np.mean([r.density for r in cell]))
        summary_rows.append([k, args.reps, args.b, a_mean, r_mean, reduction, int(zero), mean_density])
    _write_csv(args.out, REAL_COLUMNS, rows)
    _write_csv(args.summary_out or _summary_path(args.out), REAL_SUMMARY_COLUMNS, summary_rows)
    return 0


def cmd_assign(args) -> int:
    g = graphmod.from_edge_list(args.edges)
    order_ss, design_ss = np.random.SeedSequence(args.seed).spawn(2)
    if args.order == "random":
        perm = np.random.default_rng(order_ss).permutation(g.n)
        labels = tuple((g.labels or tuple(map(str, range(g.n))))[i] for i in perm.tolist())
        g = Graph(np.ascontiguousarray(g.matrix[np.ix_(perm, perm)]), g.kind, labels=labels)
    res = run_design(g, DesignConfig(policy=ADAPTIVE, b=args.b, seed=design_ss))
    labels = g.labels or tuple(map(str, range(g.n)))
    i_by_pair = res.i_trajectory
    rows = []
    for idx in range(g.n):
        pair = idx // 2
        running_i = float(i_by_pair[min(pair, len(i_by_pair) - 1)])
        treatment = 0 if res.tau[idx] > 0 else 1
        rows.append([idx, labels[idx], treatment, running_i])
    if args.out:
        _write_csv(args.out, ASSIGN_COLUMNS, rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(ASSIGN_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return 0


def cmd_oracle(args) -> int:
    if args.n % 2 or args.n < 2 or args.n > 20:
        raise ParameterError("oracle needs even n with 2 <= n <= 20")
    g = graphmod.gen_er(ErParams(args.n, args.p), args.seed)
    cfg = DesignConfig(policy=ADAPTIVE, b=args.b)
    brute = oraclemod.brute_force_min(g)
    print(f"brute_force_min_i2: {brute.min_i2} (argmin_count={brute.argmin_count})")
    exact = None
    if args.n <= 16:
        exact = oraclemod.exact_policy_expectation(g, cfg)
        print(f"exact_expected_i2: {exact.expected_i2!r} (ties={exact.has_ties})")
    else:
        print("exact_expected_i2: skipped (n > 16)")
    mc_rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(1,)))
    finals = run_design_many(g, cfg, args.mc_reps, rng=mc_rng).astype(np.float64)
    mc_mean = float(finals.mean())
    mc_se = float(finals.std(ddof=1) / math.sqrt(args.mc_reps))
    print(f"mc_mean_i2: {mc_mean!r} (se={mc_se!r}, reps={args.mc_reps})")
    ok = True
    lower_ok = bool((finals >= float(brute.min_i2) - 1e-9).all())
    print(f"check_min_lower_bound: {'PASS' if lower_ok else 'FAIL'}")
    ok &= lower_ok
    if exact is not None:
        within = abs(mc_mean - exact.expected_i2) <= 3.0 * mc_se
        print(f"check_mc_vs_exact: {'PASS' if within else 'FAIL'} "
              f"(|diff|={abs(mc_mean - exact.expected_i2)!r}, 3se={3.0 * mc_se!r})")
        ok &= within
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netrand",
        description="Sequential adaptive randomization for network experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulated-network sweeps to CSV")
    sim.add_argument("--model", choices=["er", "sbm", "goe"], required=True)
    sim.add_argument("--n", action="append", required=True,
                     help="size; repeatable, or inclusive range start:stop:step")
    sim.add_argument("--p", type=float)
    sim.add_argument("--p-in", dest="p_in", type=float)
    sim.add_argument("--p-out", dest="p_out", type=float)
    sim.add_argument("--sigma2", type=float)
    sim.add_argument("--sparse-log-density", dest="sparse_log_density", type=float,
                     help="c: use edge probability log(n)/(c*n) at each n")
    sim.add_argument("--b", type=float, default=0.95)
    sim.add_argument("--policy", choices=["adaptive", "random", "both"], default="both")
    sim.add_argument("--reps", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--mu0", type=float)
    sim.add_argument("--mu1", type=float)
    sim.add_argument("--sigma-z", dest="sigma_z", type=float)
    sim.add_argument("--sigma-eps", dest="sigma_eps", type=float)
    sim.add_argument("--out", required=True)
    sim.add_argument("--summary-out", dest="summary_out")
    sim.set_defaults(func=cmd_simulate)

    real = sub.add_parser("real", help="edge-list ingestion, sampling, both policies")
    real.add_argument("--edges", required=True)
    real.add_argument("--sample", type=int, default=10000)
    real.add_argument("--b", type=float, default=0.85)
    real.add_argument("--reps", type=int, default=10)
    real.add_argument("--seed", type=int, default=0)
    real.add_argument("--n-sweep", dest="n_sweep", action="append",
                      help="sample sizes; repeatable, or inclusive range start:stop:step")
    real.add_argument("--out", required=True)
    real.add_argument("--summary-out", dest="summary_out")
    real.set_defaults(func=cmd_real)

    assign = sub.add_parser("assign", help="assign treatments to a concrete cohort")
    assign.add_argument("--edges", required=True)
    assign.add_argument("--order", choices=["file", "random"], default="file")
    assign.add_argument("--b", type=float, default=0.85)
    assign.add_argument("--seed", type=int, default=0)
    assign.add_argument("--out")
    assign.set_defaults(func=cmd_assign)

    orc = sub.add_parser("oracle", help="brute-force consistency report on a small instance")
    orc.add_argument("--model", choices=["er"], default="er")
    orc.add_argument("--n", type=int, required=True)
    orc.add_argument("--p", type=float, required=True)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--b", type=float, default=0.95)
    orc.add_argument("--mc-reps", dest="mc_reps", type=int, default=100000)
    orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, SizeLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EdgeListParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
