"""Command-line interface.

Subcommands:

* ``gen``         — write a truth/train CSV pair plus metadata for a benchmark problem
* ``fit``         — fit a model to a training CSV (``wabc`` or ``aao``)
* ``eval``        — GD/IGD of a fitted model against a validation CSV
* ``bench``       — gen + fit + eval over a (problem, n, sigma) grid with
                    rank-sum significance between methods
* ``bias-scan``   — toy-model posterior-bias scaling report
* ``accept-scan`` — toy-model acceptance-rate scaling report

Every command derives all of its randomness from one ``--seed`` through
labeled hashing, so re-running with the same flags reproduces every output
byte for byte; the only exceptions are wall-clock fields (``wall_seconds``
in fit reports, the ``seconds`` column of benchmark rows) and the hashes of
files containing them.

Exit codes: 0 success (including flagged early terminations), 1 usage
error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .aao import AaoConfig, aao_fit
from .bezier import load_model, model_to_json, save_model
from .metrics import METRICS_CSV_FIELDS, gd, igd, ranksum_test, surface_sample_for_metrics
from .problems import (
    NoiseSpec,
    ProblemSpec,
    add_noise,
    default_front_size,
    parse_problem,
    read_cloud_csv,
    read_dataset_meta,
    sample_front,
    write_cloud_csv,
    write_dataset_meta,
)
from .seeds import derive_rng
from .theory import (
    acceptance_scan,
    bias_scan,
    default_bias_delta_grid,
    toy_model,
)
from .wabc import AbcConfig, init_hyperparams, report_to_json, wabc_fit

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

DEFAULT_SLOPE_BANDS = {
    ("bias", "gaussian"): (1.7, 2.5),
    ("bias", "uniform"): (1.5, 2.7),
    ("accept", "gaussian"): (1.7, 2.3),
    ("accept", "uniform"): (1.7, 2.3),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Small shared helpers
# ---------------------------------------------------------------------------


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(outdir: Path, command: str, args: argparse.Namespace, files) -> None:
    flags = {
        key: (str(value) if isinstance(value, Path) else value)
        for key, value in sorted(vars(args).items())
        if key != "func"
    }
    payload = {
        "package": "bezierabc",
        "version": __version__,
        "command": command,
        "flags": flags,
        "files": {name: _sha256(outdir / name) for name in sorted(files)},
    }
    _write_json(outdir / "manifest.json", payload)


def _load_cloud(path) -> np.ndarray:
    try:
        return read_cloud_csv(path)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc


def _load_model(path):
    try:
        return load_model(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from exc


def _problem_spec(args) -> ProblemSpec:
    try:
        return parse_problem(args.problem, med_dim=getattr(args, "med_m", None),
                             grid_res=getattr(args, "grid_res", 300))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, fields, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[f]) for f in fields) + "\n")


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _generate_dataset(spec: ProblemSpec, count: int, sigma: float, seed: int, label: str):
    """Truth and train clouds for one dataset; the label scopes the seeds."""
    front_rng = derive_rng(seed, label, spec.label, count, sigma, "front")
    noise_rng = derive_rng(seed, label, spec.label, count, sigma, "noise")
    truth = sample_front(spec, count, front_rng)
    train = add_noise(truth, NoiseSpec(sigma=sigma), noise_rng)
    return truth, train


def cmd_gen(args) -> int:
    spec = _problem_spec(args)
    count = args.n
    if count is None:
        count = default_front_size(spec)
        if count is None:
            raise UsageError(f"no default sample size for {spec.label}; pass --n")
        if spec.name == "viennet2":
            # the grid front holds fewer points than the reference dataset;
            # clamp the default (an explicit --n that is too large still errors)
            from .problems import viennet2_nondominated_grid

            count = min(count, viennet2_nondominated_grid(spec.grid_res).shape[0])
    if count < 1:
        raise UsageError(f"--n must be >= 1, got {count}")
    if args.sigma < 0:
        raise UsageError(f"--sigma must be >= 0, got {args.sigma}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        truth, train = _generate_dataset(spec, count, args.sigma, args.seed, "gen")
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    write_cloud_csv(outdir / "truth.csv", truth)
    write_cloud_csv(outdir / "train.csv", train)
    write_dataset_meta(outdir / "meta.json", spec, count, args.sigma, args.seed)
    _write_manifest(outdir, "gen", args, ["truth.csv", "train.csv", "meta.json"])
    print(f"wrote {outdir}/truth.csv, train.csv, meta.json ({spec.label}, n={count})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def _fit_wabc(train, args, seed_labels):
    cfg = AbcConfig(
        n_abc=args.n_abc,
        n_updates=args.n_updates,
        n_delta=args.n_delta,
        max_proposals_per_round=args.max_proposals,
        eig_stop=args.eig_stop,
        delta_shrink=args.delta_shrink,
        seed=args.seed,
        delta=args.delta,
    )
    init_hp = init_hyperparams(train, args.degree, init_var=args.init_var)
    rng = derive_rng(args.seed, *seed_labels)
    started = time.perf_counter()
    report = wabc_fit(train, args.degree, init_hp=init_hp, config=cfg, rng=rng)
    seconds = time.perf_counter() - started
    payload = report_to_json(report)
    payload["method"] = "wabc"
    return report.model, payload, seconds, report.termination


def _fit_aao(train, args):
    cfg = AaoConfig(
        max_outer_iters=args.max_outer_iters,
        t_newton_iters=args.t_newton_iters,
        t_tol=args.t_tol,
        loss_tol=args.loss_tol,
        seed=args.seed,
    )
    started = time.perf_counter()
    result = aao_fit(train, args.degree, config=cfg)
    seconds = time.perf_counter() - started
    payload = {
        "method": "aao",
        "seed": args.seed,
        "converged": result.converged,
        "rank_deficient": result.rank_deficient,
        "projection_failures": result.projection_failures,
        "cp_losses": list(result.cp_losses),
        "proj_losses": list(result.proj_losses),
        "wall_seconds": seconds,
    }
    return result.model, payload, seconds, "converged" if result.converged else "max-iters"


def cmd_fit(args) -> int:
    train = _load_cloud(args.train)
    if train.shape[1] < 2:
        raise DataError(f"{args.train}: need at least 2 objectives")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.method == "wabc":
        model, payload, seconds, termination = _fit_wabc(train, args, ("fit", "wabc", args.degree))
    else:
        model, payload, seconds, termination = _fit_aao(train, args)
    save_model(outdir / "model.json", model)
    _write_json(outdir / "report.json", payload)
    _write_manifest(outdir, "fit", args, ["model.json", "report.json"])
    print(f"{args.method} fit finished ({termination}) in {seconds:.1f}s -> {outdir}/model.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _metrics_row(model, truth, count, seed, labels, extra):
    rng = derive_rng(seed, *labels, "surface", count)
    surface = surface_sample_for_metrics(model, count=count, rng=rng)
    row = {field: "" for field in METRICS_CSV_FIELDS}
    row.update(extra)
    row["seed"] = seed
    row["gd"] = gd(surface, truth)
    row["igd"] = igd(surface, truth)
    return row


def cmd_eval(args) -> int:
    model = _load_model(args.model)
    truth = _load_cloud(args.truth)
    if truth.shape[1] != model.dim:
        raise DataError(
            f"model dimension {model.dim} != validation dimension {truth.shape[1]}"
        )
    extra = {"method": args.method or "", "trial": args.trial if args.trial is not None else ""}
    if args.meta:
        try:
            meta = read_dataset_meta(args.meta)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"{args.meta}: {exc}") from exc
        extra.update(
            {"problem": meta.get("problem", ""), "M": meta.get("M", ""),
             "n": meta.get("count", ""), "sigma": meta.get("sigma", "")}
        )
    else:
        extra.update({"M": model.dim, "n": truth.shape[0]})
    if args.report:
        try:
            with open(args.report, "r", encoding="utf-8") as fh:
                extra["seconds"] = json.load(fh).get("wall_seconds", "")
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"{args.report}: {exc}") from exc
    row = _metrics_row(model, truth, args.count, args.seed, ("eval",), extra)
    header = ",".join(METRICS_CSV_FIELDS)
    line = ",".join(_fmt(row[f]) for f in METRICS_CSV_FIELDS)
    print(header)
    print(line)
    if args.out:
        out = Path(args.out)
        fresh = not out.exists() or out.stat().st_size == 0
        with open(out, "a", encoding="utf-8", newline="\n") as fh:
            if fresh:
                fh.write(header + "\n")
            fh.write(line + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _bench_trial(task: dict) -> list[dict]:
    """One (problem, n, sigma, trial) pipeline; returns metric rows."""
    spec = ProblemSpec(task["name"], task["dim"], grid_res=task["grid_res"])
    seed = task["seed"]
    labels = ("bench", spec.label, task["n"], task["sigma"], task["trial"])
    truth, train = _generate_dataset(spec, task["n"], task["sigma"], seed, "/".join(map(str, labels)))
    rows = []
    for method in task["methods"]:
        started = time.perf_counter()
        if method == "wabc":
            cfg = AbcConfig(
                n_abc=task["n_abc"],
                n_updates=task["n_updates"],
                n_delta=task["n_delta"],
                max_proposals_per_round=task["max_proposals"],
                eig_stop=task["eig_stop"],
                delta_shrink=task["delta_shrink"],
                seed=seed,
            )
            report = wabc_fit(
                train,
                task["degree"],
                init_hp=init_hyperparams(train, task["degree"], init_var=task["init_var"]),
                config=cfg,
                rng=derive_rng(seed, *labels, "fit", method),
            )
            model = report.model
        else:
            model = aao_fit(train, task["degree"]).model
        seconds = time.perf_counter() - started
        extra = {
            "problem": spec.label,
            "M": spec.dim,
            "n": task["n"],
            "sigma": task["sigma"],
            "method": method,
            "trial": task["trial"],
            "seconds": seconds,
        }
        rows.append(
            _metrics_row(model, truth, task["eval_count"], seed, (*labels, method), extra)
        )
    return rows


def _aggregate_rows(rows, methods, trials):
    cells = {}
    for row in rows:
        cells.setdefault((row["problem"], row["n"], row["sigma"], row["method"]), []).append(row)
    aggregate = []
    for (problem, n, sigma, method), group in sorted(cells.items()):
        entry = {
            "problem": problem, "n": n, "sigma": sigma, "method": method,
            "trials": len(group),
        }
        for metric in ("gd", "igd", "seconds"):
            values = np.array([g[metric] for g in group], dtype=float)
            entry[f"{metric}_mean"] = float(values.mean())
            entry[f"{metric}_std"] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        aggregate.append(entry)

    pvalues = []
    if len(methods) >= 2:
        grid = sorted({(r["problem"], r["n"], r["sigma"]) for r in rows})
        for problem, n, sigma in grid:
            for i in range(len(methods)):
                for j in range(i + 1, len(methods)):
                    a_name, b_name = methods[i], methods[j]
                    for metric in ("gd", "igd"):
                        a = [r[metric] for r in rows
                             if (r["problem"], r["n"], r["sigma"], r["method"])
                             == (problem, n, sigma, a_name)]
                        b = [r[metric] for r in rows
                             if (r["problem"], r["n"], r["sigma"], r["method"])
                             == (problem, n, sigma, b_name)]
                        entry = {
                            "problem": problem, "n": n, "sigma": sigma,
                            "metric": metric, "method_a": a_name, "method_b": b_name,
                            "z": "", "p_value": "", "better_method": "", "significant_05": "",
                        }
                        if min(len(a), len(b)) >= 5:
                            z, p = ranksum_test(a, b)
                            better = a_name if float(np.mean(a)) <= float(np.mean(b)) else b_name
                            entry.update(
                                {"z": z, "p_value": p, "better_method": better,
                                 "significant_05": p < 0.05}
                            )
                        pvalues.append(entry)
    return aggregate, pvalues


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for method in methods:
        if method not in ("wabc", "aao"):
            raise UsageError(f"unknown method {method!r}")
    try:
        specs = [parse_problem(p.strip(), grid_res=args.grid_res)
                 for p in args.problems.split(",") if p.strip()]
        n_values = [int(v) for v in str(args.n).split(",")]
        sigmas = [float(v) for v in str(args.sigma).split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    tasks = [
        {
            "name": spec.name, "dim": spec.dim, "grid_res": spec.grid_res,
            "n": n, "sigma": sigma, "trial": trial, "seed": args.seed,
            "methods": methods, "degree": args.degree,
            "n_abc": args.n_abc, "n_updates": args.n_updates, "n_delta": args.n_delta,
            "max_proposals": args.max_proposals, "eig_stop": args.eig_stop,
            "delta_shrink": args.delta_shrink, "init_var": args.init_var,
            "eval_count": args.eval_count,
        }
        for spec in specs
        for n in n_values
        for sigma in sigmas
        for trial in range(args.trials)
    ]

    rows: list[dict] = []
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for result in pool.map(_bench_trial, tasks):
                    rows.extend(result)
        else:
            for task in tasks:
                rows.extend(_bench_trial(task))
    finally:
        # canonical ordering regardless of scheduling; partial results kept
        rows.sort(key=lambda r: (r["problem"], r["n"], r["sigma"], r["method"], r["trial"]))
        _write_csv(outdir / "results.csv", METRICS_CSV_FIELDS, rows)

    aggregate, pvalues = _aggregate_rows(rows, methods, args.trials)
    _write_csv(
        outdir / "aggregate.csv",
        ("problem", "n", "sigma", "method", "trials",
         "gd_mean", "gd_std", "igd_mean", "igd_std", "seconds_mean", "seconds_std"),
        aggregate,
    )
    _write_csv(
        outdir / "pvalues.csv",
        ("problem", "n", "sigma", "metric", "method_a", "method_b",
         "z", "p_value", "better_method", "significant_05"),
        pvalues,
    )
    _write_manifest(outdir, "bench", args, ["results.csv", "aggregate.csv", "pvalues.csv"])
    print(f"bench complete: {len(rows)} rows -> {outdir}/results.csv")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bias-scan / accept-scan
# ---------------------------------------------------------------------------


def _delta_grid_from_args(args) -> np.ndarray:
    if args.delta_min <= 0 or args.delta_max <= args.delta_min:
        raise UsageError("need 0 < --delta-min < --delta-max")
    if args.delta_points < 2:
        raise UsageError("--delta-points must be >= 2")
    return np.logspace(np.log10(args.delta_min), np.log10(args.delta_max), args.delta_points)


def _band_from_args(args, command: str):
    if args.band is not None:
        return tuple(args.band)
    return DEFAULT_SLOPE_BANDS[(command, args.model)]


def cmd_bias_scan(args) -> int:
    model = toy_model(args.model)
    grid = _delta_grid_from_args(args)
    band = _band_from_args(args, "bias")
    rng = derive_rng(args.seed, "bias-scan", args.model, args.n, args.n_abc, args.trials)
    report = bias_scan(
        model,
        n=args.n,
        n_abc=args.n_abc,
        delta_grid=grid,
        trials=args.trials,
        rng=rng,
        max_proposals_per_trial=args.max_proposals,
    )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    point_rows, loglog_rows = [], []
    for trial in range(args.trials):
        for j, delta in enumerate(report.delta_grid):
            bias = report.biases[trial, j]
            if np.isnan(bias):
                continue
            point_rows.append({"delta": float(delta), "bias": float(bias), "trial": trial})
            loglog_rows.append(
                {"log10_delta": float(np.log10(delta)), "log10_bias": float(np.log10(bias))}
            )
    _write_csv(outdir / "points.csv", ("delta", "bias", "trial"), point_rows)
    _write_csv(outdir / "loglog.csv", ("log10_delta", "log10_bias"), loglog_rows)
    passed = band[0] <= report.slope_middle_mean <= band[1]
    summary = {
        "model": args.model,
        "n": args.n,
        "n_abc": args.n_abc,
        "trials": args.trials,
        "delta_grid": [float(v) for v in report.delta_grid],
        "missing_cells": int(report.missing.sum()),
        "slope_all": {
            "mean": report.slope_all_mean,
            "std": report.slope_all_std,
            "per_trial": [float(v) for v in report.slopes_all],
        },
        "slope_middle": {
            "mean": report.slope_middle_mean,
            "std": report.slope_middle_std,
            "per_trial": [float(v) for v in report.slopes_middle],
        },
        "band": [float(band[0]), float(band[1])],
        "passed": bool(passed),
    }
    _write_json(outdir / "summary.json", summary)
    _write_manifest(outdir, "bias-scan", args, ["points.csv", "loglog.csv", "summary.json"])
    print(
        f"bias-scan {args.model}: middle slope "
        f"{report.slope_middle_mean:.3f} +/- {report.slope_middle_std:.3f} "
        f"(band {band[0]}..{band[1]}: {'pass' if passed else 'FAIL'})"
    )
    return EXIT_OK


def cmd_accept_scan(args) -> int:
    model = toy_model(args.model)
    grid = _delta_grid_from_args(args)
    band = _band_from_args(args, "accept")
    rng = derive_rng(args.seed, "accept-scan", args.model, args.n, args.proposals)
    report = acceptance_scan(model, args.n, grid, args.proposals, rng)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [
        {"delta": float(d), "rate": float(r)}
        for d, r in zip(report.delta_grid, report.rates)
    ]
    _write_csv(outdir / "points.csv", ("delta", "rate"), rows)
    loglog_rows = [
        {"log10_delta": float(np.log10(d)), "log10_rate": float(np.log10(r))}
        for d, r in zip(report.delta_grid, report.rates)
        if r > 0
    ]
    _write_csv(outdir / "loglog.csv", ("log10_delta", "log10_rate"), loglog_rows)
    passed = band[0] <= report.slope <= band[1]
    summary = {
        "model": args.model,
        "n": args.n,
        "proposals_per_cell": args.proposals,
        "delta_grid": [float(v) for v in report.delta_grid],
        "rates": [float(v) for v in report.rates],
        "counts": [int(v) for v in report.counts],
        "flagged_cells": int(report.flagged.sum()),
        "slope": report.slope,
        "predicted_slope": args.n,  # n * M with M = 1
        "band": [float(band[0]), float(band[1])],
        "passed": bool(passed),
    }
    _write_json(outdir / "summary.json", summary)
    _write_manifest(outdir, "accept-scan", args, ["points.csv", "loglog.csv", "summary.json"])
    print(
        f"accept-scan {args.model} n={args.n}: slope {report.slope:.3f} "
        f"(band {band[0]}..{band[1]}: {'pass' if passed else 'FAIL'})"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------


def _add_wabc_flags(sub):
    sub.add_argument("--n-abc", type=int, default=100, help="accepted samples per round")
    sub.add_argument("--n-updates", type=int, default=50, help="outer rounds")
    sub.add_argument("--n-delta", type=int, default=100, help="draws per threshold estimate")
    sub.add_argument("--max-proposals", type=int, default=100_000,
                     help="proposal budget per round")
    sub.add_argument("--eig-stop", type=float, default=1e-5,
                     help="stop when all covariance eigenvalues fall below this")
    sub.add_argument("--delta-shrink", type=float, default=0.9)
    sub.add_argument("--init-var", type=float, default=0.1,
                     help="initial per-degree covariance scale")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bezierabc", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=str, default=None,
                        help="JSON/TOML file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a truth/train dataset", parents=[])
    p.add_argument("--problem", required=True, help="schaffer | viennet2 | 3-med | 5-med | med")
    p.add_argument("--n", type=int, default=None, help="points on the front")
    p.add_argument("--sigma", type=float, default=0.0, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--med-m", type=int, default=None, help="objective count for --problem med")
    p.add_argument("--grid-res", type=int, default=300, help="viennet2 grid resolution")
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fit", help="fit a model to a training CSV")
    p.add_argument("train", help="training CSV (header f1,...,fM)")
    p.add_argument("--method", choices=("wabc", "aao"), required=True)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=None,
                   help="initial threshold (default: estimated from the initial prior)")
    _add_wabc_flags(p)
    p.add_argument("--max-outer-iters", type=int, default=100)
    p.add_argument("--t-newton-iters", type=int, default=20)
    p.add_argument("--t-tol", type=float, default=1e-8)
    p.add_argument("--loss-tol", type=float, default=1e-10)
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="GD/IGD of a model against a validation CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--count", type=int, default=1000, help="surface samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--meta", default=None, help="dataset meta.json to fill row fields")
    p.add_argument("--report", default=None, help="fit report.json for the seconds column")
    p.add_argument("--method", default=None)
    p.add_argument("--trial", type=int, default=None)
    p.add_argument("--out", default=None, help="append the row to this CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="benchmark methods over a (problem, n, sigma) grid")
    p.add_argument("--problems", required=True, help="comma list, e.g. 3-med,schaffer")
    p.add_argument("--n", required=True, help="comma list of training sizes")
    p.add_argument("--sigma", required=True, help="comma list of noise levels")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--methods", default="wabc,aao")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel trials")
    p.add_argument("--eval-count", type=int, default=1000)
    p.add_argument("--grid-res", type=int, default=300)
    _add_wabc_flags(p)
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bias-scan", help="posterior-bias scaling on a toy model")
    p.add_argument("--model", choices=("gaussian", "uniform"), default="gaussian")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--n-abc", type=int, default=1000)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--delta-min", type=float, default=float(default_bias_delta_grid()[0]))
    p.add_argument("--delta-max", type=float, default=float(default_bias_delta_grid()[-1]))
    p.add_argument("--delta-points", type=int, default=len(default_bias_delta_grid()))
    p.add_argument("--max-proposals", type=int, default=5_000_000,
                   help="shared proposal budget per trial")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--band", type=float, nargs=2, default=None,
                   help="pass band for the middle-points slope")
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_bias_scan)

    p = sub.add_parser("accept-scan", help="acceptance-rate scaling on a toy model")
    p.add_argument("--model", choices=("gaussian", "uniform"), default="gaussian")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--proposals", type=int, default=100_000, help="proposals per cell")
    p.add_argument("--delta-min", type=float, default=10.0**-1.5)
    p.add_argument("--delta-max", type=float, default=1.0)
    p.add_argument("--delta-points", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--band", type=float, nargs=2, default=None)
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_accept_scan)

    return parser


def _load_config(path: str) -> dict:
    try:
        if path.endswith(".toml"):
            import tomllib

            with open(path, "rb") as fh:
                return tomllib.load(fh)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except (json.JSONDecodeError, ValueError) as exc:
        raise DataError(f"malformed config {path}: {exc}") from exc


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        if "--config" in argv:
            at = argv.index("--config")
            if at + 1 >= len(argv):
                raise UsageError("--config needs a file path")
            config = _load_config(argv[at + 1])
            overrides = {key.replace("-", "_"): value for key, value in config.items()}
            # subparsers re-apply their own defaults, so push overrides into
            # every subcommand that knows the key
            subparsers = parser._subparsers._group_actions[0].choices.values()
            matched = set()
            for sp in subparsers:
                dests = {action.dest for action in sp._actions}
                hits = {k: v for k, v in overrides.items() if k in dests}
                matched |= set(hits)
                sp.set_defaults(**hits)
            unknown = set(overrides) - matched
            if unknown:
                raise UsageError(f"unknown config keys: {sorted(unknown)}")
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 -- CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
