"""Command-line front end.

Subcommands: estimate-mu, factorize-check, train, bounds, experiment.
All results are printed as JSON on stdout; the experiment subcommand writes
records.csv, summary.json and gnuplot-ready plot_*.csv files into --out and
exits nonzero iff any harness invariant check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .bounds import (
    BoundInputs,
    aln_epsilon,
    c_of_XB,
    generalization_bound,
    mean_op_deviation_bound,
    noisy_generalization_bound,
    rademacher_bound,
)
from .estimators import mean_op, noise_corrected_mean_op, pu_mean_op
from .losses import get_loss
from .risks import Model, empirical_risk, factored_risk, general_factored_risk, zero_one_error
from .samples import NoiseSpec, Sample, double_sample, inject_noise, load_csv, split
from .solvers import Regularizer, SolverConfig, mosgd_noisy, prox_train, sgd_baseline


def _parse_noise(text: str) -> NoiseSpec:
    """Parse 'p+,p-' into a NoiseSpec."""
    try:
        p_plus, p_minus = (float(v) for v in text.split(","))
    except ValueError:
        raise SystemExit(f"bad --noise value {text!r}; expected 'p+,p-'")
    return NoiseSpec(p_plus=p_plus, p_minus=p_minus)


def _label_col(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_estimate_mu(args) -> int:
    s = load_csv(args.data, label_column=_label_col(args.label_col),
                 standardize_features=args.standardize)
    if args.noise is not None:
        mu = noise_corrected_mean_op(s, _parse_noise(args.noise))
    elif args.pu is not None:
        positives = s.subset(s.labels > 0)
        mu = pu_mean_op(positives, args.pu)
    else:
        mu = mean_op(s)
    _emit_json({"mu": mu.vector.tolist(), "norm": mu.norm, "provenance": mu.provenance})
    return 0


def _cmd_factorize_check(args) -> int:
    loss = get_loss(args.loss)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        m = int(rng.integers(2, 64))
        d = int(rng.integers(1, 16))
        X = rng.normal(size=(m, d))
        X /= max(1.0, np.linalg.norm(X, axis=1).max())
        s = Sample(X, rng.choice([-1.0, 1.0], size=m))
        theta = rng.normal(size=d)
        theta *= rng.uniform(0, 10) / max(np.linalg.norm(theta), 1e-12)
        model = Model(theta)
        plain = empirical_risk(s, loss, model)
        if loss.odd_slope is not None:
            split_sum = factored_risk(double_sample(s), mean_op(s), loss, model)
        else:
            even_term, odd_term = general_factored_risk(s, loss, model)
            split_sum = even_term + odd_term
        worst = max(worst, abs(plain - split_sum) / (1.0 + abs(plain)))
    _emit_json({"loss": loss.name, "trials": args.trials, "max_relative_residual": worst})
    return 0


def _cmd_train(args) -> int:
    s = load_csv(args.data, label_column=_label_col(args.label_col),
                 standardize_features=args.standardize)
    train, test = split(s, args.test_fraction, seed=args.seed)
    noise = _parse_noise(args.noise)
    train_noisy = inject_noise(train, noise, seed=args.seed + 1)
    loss = get_loss(args.loss)
    T = args.epochs * 2 * train_noisy.m
    cfg = SolverConfig(lam=args.lam, T=T, seed=args.seed, update_mode=args.update_mode)
    if args.algo == "mosgd":
        model = mosgd_noisy(train_noisy, loss, noise, cfg)
    elif args.algo == "sgd":
        model = sgd_baseline(train_noisy, loss, cfg)
    else:
        mu_hat = noise_corrected_mean_op(train_noisy, noise)
        model = prox_train(
            double_sample(train_noisy), mu_hat, loss,
            Regularizer(args.penalty, args.lam), eta=args.eta, T=T, seed=args.seed,
        )
    _emit_json({
        "algo": args.algo,
        "loss": loss.name,
        "lambda": args.lam,
        "T": T,
        "seed": args.seed,
        "theta": model.theta.tolist(),
        "train_error": zero_one_error(train, model),
        "test_error": zero_one_error(test, model),
    })
    return 0


def _cmd_bounds(args) -> int:
    inputs = {}
    if args.which == "rademacher":
        inputs = {"B": args.B, "X": args.X, "m": args.m}
        value = rademacher_bound(args.B, args.X, args.m)
    elif args.which == "deviation":
        inputs = {"X": args.X, "d": args.d, "m": args.m, "delta": args.delta}
        value = mean_op_deviation_bound(args.X, args.d, args.m, args.delta)
    elif args.which in ("generalization", "noisy"):
        loss = get_loss(args.loss)
        if loss.odd_slope is None or loss.lipschitz is None:
            raise SystemExit(f"loss {loss.name!r} needs an odd slope and a Lipschitz constant")
        b = BoundInputs(
            X=args.X, B=args.B, L=loss.lipschitz, a=loss.odd_slope,
            m=args.m, d=args.d, delta=args.delta, c_XB=c_of_XB(loss, args.X, args.B),
        )
        inputs = {"X": b.X, "B": b.B, "L": b.L, "a": b.a, "m": b.m, "d": b.d,
                  "delta": b.delta, "c_XB": b.c_XB}
        if args.which == "noisy":
            noise = _parse_noise(args.noise)
            inputs["p_plus"], inputs["p_minus"] = noise.p_plus, noise.p_minus
            value = noisy_generalization_bound(b, noise, proof_constant=args.proof_constant)
        else:
            value = generalization_bound(b, proof_constant=args.proof_constant)
    else:
        noise = _parse_noise(args.noise)
        inputs = {"a": args.a, "B": args.B, "p_plus": noise.p_plus,
                  "p_minus": noise.p_minus, "mu_norm": args.mu_norm}
        value = aln_epsilon(args.a, args.B, noise, args.mu_norm)
    _emit_json({"which": args.which, "value": value, "inputs": inputs})
    return 0


def _load_named_datasets(paths, label_col, seed):
    if paths:
        return {Path(p).stem: load_csv(p, label_column=label_col) for p in paths}
    return experiments.uci_surrogates(seed)


def _write_plot_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _cmd_experiment(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.which == "figure2":
        phi_grid = [float(v) for v in args.phi_grid.split(",")]
        p_grid = [float(v) for v in args.p_grid.split(",")]
        records, checks = experiments.run_figure2(phi_grid, p_grid, lam=args.lam)
        rows = [
            (r.metrics["phi"], r.noise.p_plus, r.metrics["d_noisy"],
             r.metrics["d_clean"], r.metrics.get("d_models", float("nan")))
            for r in records
        ]
        _write_plot_csv(out / "plot_toy_gaps.csv",
                        ["phi", "p", "d_noisy", "d_clean", "d_models"], rows)
        summary = dict(checks)
    elif args.which == "figure3":
        datasets = _load_named_datasets(args.data, _label_col(args.label_col), args.seed)
        p_grid = [float(v) for v in args.p_grid.split(",")]
        records, checks = experiments.run_figure3(
            datasets, p_grid, lam=args.lam, trials=args.trials, master_seed=args.seed
        )
        rows = [
            (r.dataset, r.noise.p_plus, r.metrics["p_mu_norm"], r.metrics["d_clean"],
             r.metrics["r01_noisy_model"], r.metrics["mu_norm_noisy"])
            for r in records
        ]
        _write_plot_csv(out / "plot_pmu_vs_gap.csv",
                        ["dataset", "p", "p_mu_norm", "d_clean", "r01", "mu_norm_noisy"], rows)
        summary = dict(checks)
    else:
        datasets = _load_named_datasets(args.data, _label_col(args.label_col), args.seed)
        noise_grid = []
        for pair in args.noise_grid.split(";"):
            pm, pp = (float(v) for v in pair.split(","))
            noise_grid.append((pm, pp))
        records, summary, checks = [], {}, {}
        for name, s in sorted(datasets.items()):
            recs, summ, chks = experiments.run_table2(
                name, s, noise_grid=noise_grid, trials=args.trials,
                master_seed=args.seed, update_mode=args.update_mode,
            )
            records.extend(recs)
            summary[name] = summ
            for key, val in chks.items():
                checks[f"{name}:{key}"] = val
        rows = []
        for name, summ in summary.items():
            for cell, vals in summ.items():
                rows.append((name, cell, vals["sgd"], vals["mosgd"], vals["diff"]))
        _write_plot_csv(out / "plot_test_error.csv",
                        ["dataset", "cell(p-,p+)", "sgd", "mosgd", "diff"], rows)
        summary = {"cells": summary, **checks}

    experiments.emit(records, "csv", out / "records.csv")
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, default=float)
    failed = [k for k, v in summary.items() if isinstance(v, bool) and not v]
    if failed:
        print(f"invariant checks failed: {failed}", file=sys.stderr)
        return 1
    print(f"wrote {out / 'records.csv'} and {out / 'summary.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanop",
        description="Factored risks, mean-operator estimates and solvers for weak supervision.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-mu", help="print a mean-operator estimate as JSON")
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="-1")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--noise", help="known flip rates 'p+,p-' for the corrected estimate")
    p.add_argument("--pu", type=float, help="class prior pi+ for the positive-only estimate")
    p.set_defaults(func=_cmd_estimate_mu)

    p = sub.add_parser("factorize-check", help="max risk-factorization residual over random cases")
    p.add_argument("--loss", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_factorize_check)

    p = sub.add_parser("train", help="train one model and report 0/1 errors as JSON")
    p.add_argument("--algo", choices=("mosgd", "sgd", "prox"), required=True)
    p.add_argument("--loss", default="logistic")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6)
    p.add_argument("--epochs", type=int, default=4)
    p.add_argument("--noise", default="0,0", help="'p+,p-' rates injected into training labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data", required=True)
    p.add_argument("--label-col", default="-1")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--update-mode", choices=("half_mu", "risk_consistent"), default="half_mu")
    p.add_argument("--penalty", choices=("l2", "l1"), default="l2", help="prox only")
    p.add_argument("--eta", type=float, default=0.1, help="prox step size")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("bounds", help="evaluate one bound and echo its inputs as JSON")
    p.add_argument("--which", choices=("rademacher", "deviation", "generalization", "noisy", "aln"),
                   required=True)
    p.add_argument("--X", type=float, default=1.0)
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--loss", default="logistic")
    p.add_argument("--noise", default="0,0")
    p.add_argument("--a", type=float, default=-0.5)
    p.add_argument("--mu-norm", type=float, default=1.0)
    p.add_argument("--proof-constant", action="store_true",
                   help="use the larger companion constant in the complexity term")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("experiment", help="run a desk-scale study and write CSV/JSON outputs")
    p.add_argument("which", choices=("figure2", "figure3", "table2"))
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data", nargs="*", help="CSV datasets; omitted -> synthetic surrogates")
    p.add_argument("--label-col", default="-1")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--phi-grid", default="0.0001,0.001,0.01,0.1,0.3,1.0")
    p.add_argument("--p-grid", default="0,0.1,0.2,0.3,0.4")
    p.add_argument("--noise-grid", default="0,0;0.2,0.4",
                   help="semicolon-separated 'p-,p+' cells")
    p.add_argument("--update-mode", choices=("half_mu", "risk_consistent"), default="half_mu")
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
