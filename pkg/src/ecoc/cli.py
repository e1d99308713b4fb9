"""Command-line front end.

Subcommands: code, pmf, tail, bounds, bahadur, simulate, analyze, figures.
Every numeric value printed is the untouched result of the corresponding
library call; human tables round to 6 significant digits while csv/json keep
full double precision.  Exit status: 0 on success, 1 on domain or data
errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bounds as bounds_mod
from . import code_matrix as cm
from . import experiment_io as xio
from . import prob_engine as pe
from . import simulator as sim
from .errors import EcocError

FORMATS = ("table", "csv", "json")


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _scalar_output(name: str, value: float, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({name: value}) + "\n"
    if fmt == "csv":
        return f"{name}\n{value!r}\n"
    return f"{_fmt(value)}\n"


def _dict_output(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        cols = list(payload)
        vals = ["" if payload[c] is None else repr(payload[c]) if isinstance(payload[c], float) else str(payload[c]) for c in cols]
        return ",".join(cols) + "\n" + ",".join(vals) + "\n"
    width = max(len(c) for c in payload)
    return "".join(f"{c:<{width}}  {_fmt(v)}\n" for c, v in payload.items())


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--model",
        required=True,
        choices=("independent", "iid", "pair", "exchangeable"),
        help="dependence structure of the classifier errors",
    )
    p.add_argument("--rates", help="comma-separated per-classifier error rates")
    p.add_argument("--n", type=int, help="number of classifiers")
    p.add_argument("--ebar", type=float, help="common error rate")
    p.add_argument("--f", type=float, help="joint error probability of the last two classifiers")
    p.add_argument("--c", type=float, help="uniform correlation coefficient")


def _require(args, names: list[str]) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise ValueError(f"--model {args.model} requires {', '.join(missing)}")


def _build_model(args) -> pe.DependenceModel:
    if args.model == "independent":
        _require(args, ["rates"])
        rates = tuple(float(v) for v in args.rates.split(","))
        return pe.Independent(pe.ErrorProfile(rates))
    if args.model == "iid":
        _require(args, ["n", "ebar"])
        return pe.Independent(pe.ErrorProfile.iid(args.n, args.ebar))
    if args.model == "pair":
        _require(args, ["f"])
        if args.rates is not None:
            profile = pe.ErrorProfile(tuple(float(v) for v in args.rates.split(",")))
        else:
            _require(args, ["n", "ebar"])
            profile = pe.ErrorProfile.iid(args.n, args.ebar)
        return pe.PairModel(profile, args.f)
    _require(args, ["n", "ebar", "c"])
    return pe.ExchangeableModel(args.n, args.ebar, args.c)


def _model_pmf(model: pe.DependenceModel, k: int) -> float:
    if isinstance(model, pe.Independent):
        return pe.poisson_binomial_pmf(model.profile, k)
    if isinstance(model, pe.PairModel):
        return pe.pair_correlated_pmf(model, k)
    return pe.exchangeable_pmf(model.n, k, model.e_bar, model.c)


def _model_tail(model: pe.DependenceModel, m: int) -> float:
    if isinstance(model, pe.Independent):
        return pe.tail_independent(model.profile, m)
    if isinstance(model, pe.PairModel):
        return sum(pe.pair_correlated_pmf(model, k) for k in range(m, model.n + 1))
    return pe.exchangeable_tail(model.n, m, model.e_bar, model.c)


# ---------------------------------------------------------------------------
# subcommands


def cmd_code(args) -> int:
    code = cm.build_code_matrix(args.classes, orientation=args.orientation)
    if args.emit:
        _emit(cm.to_text(code), args.out)
        return 0
    payload = {
        "classes": code.num_classes,
        "n": code.n,
        "d": code.d,
        "m": code.m,
        "r": code.r,
        "orientation": args.orientation,
    }
    _emit(_dict_output(payload, args.format), args.out)
    return 0


def cmd_pmf(args) -> int:
    model = _build_model(args)
    if args.k is not None:
        _emit(_scalar_output("pmf", _model_pmf(model, args.k), args.format), args.out)
        return 0
    rows = [{"k": k, "pmf": _model_pmf(model, k)} for k in range(model.n + 1)]
    if args.format == "json":
        _emit(json.dumps({"pmf": rows}, indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(xio.format_rows_csv(rows), args.out)
    else:
        _emit("".join(f"{r['k']:>3}  {_fmt(r['pmf'])}\n" for r in rows), args.out)
    return 0


def cmd_tail(args) -> int:
    model = _build_model(args)
    _emit(_scalar_output("tail", _model_tail(model, args.m), args.format), args.out)
    return 0


def cmd_bounds(args) -> int:
    inputs = bounds_mod.BoundInputs(
        n=args.n, m=args.m, e_bar=args.ebar, c=args.c, mu=args.mu
    )
    report = bounds_mod.evaluate_bounds(inputs, kz_policy=args.kz_policy)
    payload = {
        "n": args.n,
        "m": args.m,
        "e_bar": args.ebar,
        "c": args.c,
        "gs": report.gs,
        "feller": report.feller,
        "chernoff_mu": report.chernoff_mu,
        "chernoff": report.chernoff_lambda,
        "kz": report.kz,
        "lambda": report.lam,
        "omega": report.omega,
    }
    if report.kz_reason:
        payload["kz_reason"] = report.kz_reason
    _emit(_dict_output(payload, args.format), args.out)
    return 0


def cmd_bahadur(args) -> int:
    c_min, c_max = pe.bahadur_range(args.n, args.ebar)
    v_min, v_max = pe.valid_correlation_range(args.n, args.ebar)
    payload = {
        "c_min": c_min,
        "c_max": c_max,
        "valid_c_min": v_min,
        "valid_c_max": v_max,
    }
    _emit(_dict_output(payload, args.format), args.out)
    return 0


def cmd_simulate(args) -> int:
    model = _build_model(args)
    cfg = sim.SimConfig(
        trials=args.trials, seed=args.seed, mode=args.mode, workers=args.workers
    )
    if args.mode == sim.MODE_THRESHOLD:
        if args.m is None:
            raise ValueError("threshold mode requires --m")
        result = sim.mc_threshold_error(model, args.m, cfg)
    else:
        classes = args.classes if args.classes is not None else model.n
        code = cm.build_code_matrix(classes, orientation=args.orientation)
        result = sim.mc_decode_error(model, code, cfg, true_class=args.true_class)
    payload = {
        "error_rate": result.error_rate,
        "std_err": result.std_err,
        "trials": result.trials,
        "mode": result.mode,
        "seed": args.seed,
    }
    _emit(_dict_output(payload, args.format), args.out)
    return 0


def _analyze_inputs(args) -> tuple[list[xio.FoldSummary], cm.CodeMatrix]:
    sources = [
        bool(args.predictions),
        args.summary is not None,
        args.fixture is not None,
    ]
    if sum(sources) != 1:
        raise ValueError("provide exactly one of --predictions, --summary, --fixture")
    if args.fixture is not None:
        dataset = args.fixture.rsplit("_", 1)[0]
        classes = xio.DATASETS[dataset].classes
        code = cm.build_code_matrix(classes, orientation=args.orientation)
        return xio.load_fixture(args.fixture), code
    if args.classes is None:
        raise ValueError("--classes is required with --predictions/--summary")
    code = cm.build_code_matrix(args.classes, orientation=args.orientation)
    if args.summary is not None:
        return xio.load_summaries(args.summary), code
    folds = [xio.load_predictions(p) for p in args.predictions]
    return [xio.analyze_fold(f, code) for f in folds], code


def cmd_analyze(args) -> int:
    summaries, code = _analyze_inputs(args)
    if not summaries:
        raise ValueError("no folds to analyze")
    reports = [
        xio.bound_report(s, code, n=args.n, kz_policy=args.kz_policy)
        for s in summaries
    ]
    agg = xio.aggregate(summaries, reports)
    if args.format == "json":
        _emit(xio.format_report_json(summaries, reports, agg), args.out)
    elif args.format == "csv":
        _emit(xio.format_report_csv(summaries, reports, agg), args.out)
    else:
        lines = []
        header = ("fold", "e_bar", "corr", "experimental", "gs", "chernoff", "kz")
        lines.append("  ".join(f"{h:>12}" for h in header))
        for row in xio.report_rows(summaries, reports):
            lines.append(
                "  ".join(
                    f"{_fmt(v):>12}"
                    for v in (
                        row["fold"],
                        row["mean_bit_error"],
                        row["mean_correlation"],
                        row["experimental"],
                        row["gs"],
                        row["chernoff"],
                        row["kz"],
                    )
                )
            )
        for label, pick in (("mean", "mean"), ("std", "std")):
            lines.append(
                "  ".join(
                    f"{_fmt(v):>12}"
                    for v in (
                        label,
                        None,
                        None,
                        getattr(agg.experimental, pick),
                        getattr(agg.gs, pick),
                        getattr(agg.chernoff, pick),
                        getattr(agg.kz, pick) if agg.kz else None,
                    )
                )
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_figures(args) -> int:
    out_dir = Path(args.out)
    if args.figure == "fig1":
        ns = tuple(int(v) for v in args.ns.split(","))
        rows = xio.figure_one_curves(ns=ns, r=args.r, step=args.step)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "fig1_curves.csv"
        path.write_text(xio.format_rows_csv(rows), encoding="utf-8")
        sys.stderr.write(f"wrote {path}\n")
        return 0
    # scatter
    if args.fixture is not None:
        name = args.fixture
        dataset = name.rsplit("_", 1)[0]
        summaries = xio.load_fixture(name)
        classes = xio.DATASETS[dataset].classes
    elif args.summary is not None:
        if args.classes is None:
            raise ValueError("--classes is required with --summary")
        name = Path(args.summary).stem
        summaries = xio.load_summaries(args.summary)
        classes = args.classes
    else:
        raise ValueError("scatter requires --fixture or --summary")
    if not summaries:
        raise ValueError("no folds in input; nothing to plot")
    code = cm.build_code_matrix(classes, orientation=args.orientation)
    n = args.n if args.n is not None else code.n
    curves, folds = xio.scatter_figure_data(summaries, n, code.m)
    out_dir.mkdir(parents=True, exist_ok=True)
    for suffix, rows in (("curves", curves), ("folds", folds)):
        path = out_dir / f"{name}_{suffix}.csv"
        path.write_text(xio.format_rows_csv(rows), encoding="utf-8")
        sys.stderr.write(f"wrote {path}\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecoc",
        description="Exact error probabilities, bounds, and experiment tools "
        "for output-coded ensemble classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_seed = int(os.environ.get("ECOC_SEED", sim.DEFAULT_SEED))

    def common(p):
        p.add_argument("--format", choices=FORMATS, default="table")
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("code", help="build a code matrix")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument(
        "--orientation",
        choices=(cm.KEEP_BOTTOM_RIGHT, cm.KEEP_TOP_LEFT),
        default=cm.DEFAULT_ORIENTATION,
    )
    p.add_argument("--emit", action="store_true", help="print the serialized matrix")
    common(p)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("pmf", help="exact error-count probability")
    _add_model_flags(p)
    p.add_argument("--k", type=int, help="error count; omit for the full distribution")
    common(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("tail", help="exact probability of at least m errors")
    _add_model_flags(p)
    p.add_argument("--m", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("bounds", help="evaluate the analytic bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ebar", type=float, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--kz-policy", choices=("gated", "always"), default="gated")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bahadur", help="admissible correlation range")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ebar", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_bahadur)

    p = sub.add_parser("simulate", help="Monte Carlo error estimate")
    _add_model_flags(p)
    p.add_argument(
        "--mode", choices=(sim.MODE_THRESHOLD, sim.MODE_FULL_DECODE),
        default=sim.MODE_THRESHOLD,
    )
    p.add_argument("--m", type=int, help="error threshold (threshold mode)")
    p.add_argument("--classes", type=int, help="code size (full-decode mode)")
    p.add_argument("--true-class", type=int, help="pin the true class (full-decode)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--orientation",
        choices=(cm.KEEP_BOTTOM_RIGHT, cm.KEEP_TOP_LEFT),
        default=cm.DEFAULT_ORIENTATION,
    )
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="fold metrics, bounds, and aggregation")
    p.add_argument("--predictions", nargs="*", default=[],
                   help="raw per-fold prediction CSVs")
    p.add_argument("--summary", help="fold-summary CSV")
    p.add_argument("--fixture", help="bundled fixture name, e.g. letters_dt")
    p.add_argument("--classes", type=int, help="number of classes (raw/summary)")
    p.add_argument("--n", type=int, help="override codeword length in bound formulas")
    p.add_argument("--kz-policy", choices=("gated", "always"), default="gated")
    p.add_argument(
        "--orientation",
        choices=(cm.KEEP_BOTTOM_RIGHT, cm.KEEP_TOP_LEFT),
        default=cm.DEFAULT_ORIENTATION,
    )
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("figures", help="emit plot-data CSVs")
    p.add_argument("--figure", choices=("fig1", "scatter"), required=True)
    p.add_argument("--ns", default="10,20,50", help="fig1 ensemble sizes")
    p.add_argument("--r", type=float, default=0.25, help="fig1 correction ratio")
    p.add_argument("--step", type=float, default=0.001, help="fig1 grid step")
    p.add_argument("--fixture", help="bundled fixture name (scatter)")
    p.add_argument("--summary", help="fold-summary CSV (scatter)")
    p.add_argument("--classes", type=int)
    p.add_argument("--n", type=int, help="override codeword length")
    p.add_argument(
        "--orientation",
        choices=(cm.KEEP_BOTTOM_RIGHT, cm.KEEP_TOP_LEFT),
        default=cm.DEFAULT_ORIENTATION,
    )
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EcocError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
