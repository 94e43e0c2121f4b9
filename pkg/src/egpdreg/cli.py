"""Command-line front end: prepare, fit, predict, simulate, diagnose.

A run can be driven entirely by flags, by a declarative JSON config file
(one object per command), or both; explicit flags override config values.
Every command writes the effective settings next to its outputs as
``config_used.json`` so a run can be reproduced from its own artifacts.
Setting ``EGPDREG_OUTDIR`` redirects output when no explicit --out is
given.

Exit codes: 0 success, 1 usage or configuration problem, 2 data problem,
3 numerical failure.
"""

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

from . import pipeline
from .diagnostics import (
    criterion_report,
    pit_residuals,
    reports_frame,
    seasonal_split,
    tail_pp,
)
from .errors import (
    ConfigError,
    DataError,
    EgpdError,
    FitError,
    IngestError,
    NumericalError,
)
from .fitter import FitControl, fit, model_grid_spec, predict_params
from .serialize import load_model, save_model

OUTDIR_ENV = "EGPDREG_OUTDIR"

ALL_FAMILIES = ("egpd1", "egpd3", "egpd4", "gamma")


def _write_config_used(outdir: Path, command: str, settings: dict) -> None:
    payload = {command: {k: v for k, v in settings.items() if v is not None}}
    with open(outdir / "config_used.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _resolve_outdir(args) -> Path:
    out = args.out
    if getattr(args, "_out_from_flags", False) is False:
        env = os.environ.get(OUTDIR_ENV)
        if env:
            out = env
    if out is None:
        raise ConfigError("an output directory is required (--out or EGPDREG_OUTDIR)")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _require_file(path, what) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} not found: {p}")
    return p


# -- prepare ----------------------------------------------------------------


def cmd_prepare(args) -> int:
    outdir = _resolve_outdir(args)
    colmap = pipeline.ColumnMap(
        station=args.col_station,
        lon=args.col_lon,
        lat=args.col_lat,
        timestamp=args.col_timestamp,
        precip=args.col_precip,
        delimiter=args.delimiter,
        timestamp_format=args.timestamp_format,
    )
    inputs = [_require_file(p, "input file") for p in args.input]
    records, report = pipeline.ingest(inputs, colmap, args.bad_row_tolerance)
    hourly = pipeline.aggregate_hourly(records, args.records_per_hour)
    table = pipeline.prepare(hourly, censor=args.censor, stride=args.stride)
    train, validation = pipeline.split_stations(table, args.train_fraction, args.seed)

    pipeline.write_canonical_csv(train, outdir / "train.csv")
    pipeline.write_canonical_csv(validation, outdir / "validation.csv")
    pipeline.write_cache(table, outdir / "prepared.npz")
    stages = {
        "ingest": report.as_dict(),
        "hourly_complete": int(len(hourly)),
        "retained_after_censor_and_stride": int(len(table)),
        "train_rows": int(len(train)),
        "validation_rows": int(len(validation)),
        "train_stations": int(train["station_id"].nunique()),
        "validation_stations": int(validation["station_id"].nunique()),
    }
    with open(outdir / "prepare_report.json", "w", encoding="utf-8") as fh:
        json.dump(stages, fh, indent=1, sort_keys=True)
        fh.write("\n")
    _write_config_used(
        outdir,
        "prepare",
        {
            "input": [str(p) for p in inputs],
            "out": str(outdir),
            "censor": args.censor,
            "stride": args.stride,
            "train_fraction": args.train_fraction,
            "seed": args.seed,
            "records_per_hour": args.records_per_hour,
            "bad_row_tolerance": args.bad_row_tolerance,
            "delimiter": args.delimiter,
            "timestamp_format": args.timestamp_format,
            "col_station": args.col_station,
            "col_lon": args.col_lon,
            "col_lat": args.col_lat,
            "col_timestamp": args.col_timestamp,
            "col_precip": args.col_precip,
        },
    )
    print(f"prepared {len(table)} rows ({len(train)} train / {len(validation)} validation)")
    return 0


# -- fit ----------------------------------------------------------------------


def _parse_lambda(text):
    if text == "select":
        return "select"
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"--lambda must be a number or 'select', got {text!r}") from None
    if value < 0:
        raise ConfigError("--lambda must be nonnegative")
    return value


def cmd_fit(args) -> int:
    outdir = _resolve_outdir(args)
    train = pipeline.read_canonical_csv(_require_file(args.train, "training data"))
    validation = None
    if args.validation:
        validation = pipeline.read_canonical_csv(_require_file(args.validation, "validation data"))

    families = [f.strip() for f in args.families.split(",") if f.strip()]
    variations = [v.strip() for v in args.variations.split(",") if v.strip()]
    for fam in families:
        if fam not in ALL_FAMILIES:
            raise ConfigError(f"unknown family {fam!r}; choose from {ALL_FAMILIES}")
    specs = []
    for fam in families:
        for var in variations:
            if var == "M.st3nomu" and fam != "egpd4":
                continue
            specs.append(
                model_grid_spec(
                    fam,
                    var,
                    k_time=args.k_time,
                    k_space=args.k_space,
                    period=args.period,
                    lam=_parse_lambda(args.lam),
                    response=args.response,
                )
            )
    if not specs:
        raise ConfigError("no models requested")

    control = FitControl(n_cyc=args.n_cyc, step=args.step, tol=args.tol)
    reports = []
    statuses = []
    failures = 0
    for spec in specs:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                fitted = fit(train, spec, control)
            save_model(fitted, outdir / f"{spec.name}.json")
            reports.append(criterion_report(fitted, validation))
            statuses.append("ok" if fitted.converged else "max-cycles")
            print(f"fitted {spec.name}: GD={fitted.global_deviance:.2f} edf={fitted.edf_total:.1f}")
        except EgpdError as exc:
            failures += 1
            reports.append(None)
            statuses.append(f"failed: {exc}")
            print(f"fit of {spec.name} failed: {exc}", file=sys.stderr)

    frame_rows = []
    for spec, rep, status in zip(specs, reports, statuses):
        if rep is None:
            frame_rows.append({"model": spec.name, "status": status})
        else:
            row = reports_frame([rep]).iloc[0].to_dict()
            row["status"] = status
            frame_rows.append(row)
    pd.DataFrame(frame_rows).to_csv(outdir / "criteria.csv", index=False)
    _write_config_used(
        outdir,
        "fit",
        {
            "train": str(args.train),
            "validation": str(args.validation) if args.validation else None,
            "families": args.families,
            "variations": args.variations,
            "out": str(outdir),
            "k_time": args.k_time,
            "k_space": args.k_space,
            "period": args.period,
            "lam": args.lam,
            "n_cyc": args.n_cyc,
            "step": args.step,
            "tol": args.tol,
            "response": args.response,
        },
    )
    if failures == len(specs):
        raise FitError("all requested fits failed")
    return 0


# -- predict / simulate -------------------------------------------------------


def cmd_predict(args) -> int:
    model = load_model(_require_file(args.model, "model file"))
    newdata = pipeline.read_canonical_csv(_require_file(args.newdata, "newdata file"))
    params = predict_params(model, newdata)
    params.to_csv(args.out, index=False)
    print(f"wrote {len(params)} parameter rows to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    model = load_model(_require_file(args.model, "model file"))
    newdata = pipeline.read_canonical_csv(_require_file(args.newdata, "newdata file"))
    if args.n_per_row < 0:
        raise ConfigError("--n-per-row must be >= 0")
    family = model.spec.family_obj
    params = predict_params(model, newdata)
    pdict = {c: params[c].to_numpy() for c in params.columns}
    rng = np.random.default_rng(args.seed)
    rows = []
    for draw in range(args.n_per_row):
        p = rng.random(len(newdata))
        values = family.quantile(p, pdict)
        rows.append(
            pd.DataFrame({"row": np.arange(len(newdata)), "draw": draw, "value": values})
        )
    out = (
        pd.concat(rows, ignore_index=True).sort_values(["row", "draw"], kind="stable")
        if rows
        else pd.DataFrame(columns=["row", "draw", "value"])
    )
    out.to_csv(args.out, index=False)
    print(f"wrote {len(out)} simulated values to {args.out}")
    return 0


# -- diagnose -------------------------------------------------------------------


def cmd_diagnose(args) -> int:
    outdir = _resolve_outdir(args)
    data = pipeline.read_canonical_csv(_require_file(args.data, "data file"))
    for model_path in args.model:
        model = load_model(_require_file(model_path, "model file"))
        pp = pit_residuals(model, data)
        pp.frame().to_csv(outdir / f"pp_{model.name}.csv", index=False)
        for p0 in args.tail or []:
            tail = tail_pp(model, data, p0)
            tail.frame().to_csv(outdir / f"pp_{model.name}_tail{p0:g}.csv", index=False)
        if args.by_season:
            for season, chunk in seasonal_split(data).items():
                if len(chunk) == 0:
                    continue
                spp = pit_residuals(model, chunk)
                spp.season = season
                spp.frame().to_csv(outdir / f"pp_{model.name}_{season}.csv", index=False)
    _write_config_used(
        outdir,
        "diagnose",
        {
            "model": list(args.model),
            "data": str(args.data),
            "out": str(outdir),
            "tail": list(args.tail or []),
            "by_season": bool(args.by_season),
        },
    )
    return 0


# -- argument plumbing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egpdreg",
        description="Extended-Pareto distributional regression for rainfall",
    )
    parser.add_argument("--config", help="JSON config file ({command: {flag: value}})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="ingest raw station files into canonical tables")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--out")
    p.add_argument("--censor", type=float, default=pipeline.DEFAULT_CENSOR_MM)
    p.add_argument("--stride", type=int, default=pipeline.DEFAULT_STRIDE_HOURS)
    p.add_argument("--train-fraction", type=float, default=pipeline.DEFAULT_TRAIN_FRACTION)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--records-per-hour", type=int, default=10)
    p.add_argument("--bad-row-tolerance", type=float, default=0.001)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--timestamp-format", default=None)
    p.add_argument("--col-station", default="station_id")
    p.add_argument("--col-lon", default="lon")
    p.add_argument("--col-lat", default="lat")
    p.add_argument("--col-timestamp", default="timestamp")
    p.add_argument("--col-precip", default="precip_mm")
    p.set_defaults(func=cmd_prepare)

    f = sub.add_parser("fit", help="fit a grid of model variations")
    f.add_argument("--train", required=True)
    f.add_argument("--validation", default=None)
    f.add_argument("--families", default="egpd1")
    f.add_argument("--variations", default="M.0")
    f.add_argument("--out")
    f.add_argument("--k-time", type=int, default=50)
    f.add_argument("--k-space", type=int, default=30)
    f.add_argument("--period", type=float, default=366.0)
    f.add_argument("--lambda", dest="lam", default="select")
    f.add_argument("--n-cyc", type=int, default=200)
    f.add_argument("--step", type=float, default=0.01)
    f.add_argument("--tol", type=float, default=1e-4)
    f.add_argument("--response", default="precip_mm")
    f.set_defaults(func=cmd_fit)

    q = sub.add_parser("predict", help="evaluate fitted parameters at new rows")
    q.add_argument("--model", required=True)
    q.add_argument("--newdata", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_predict)

    s = sub.add_parser("simulate", help="draw from the fitted distribution at new rows")
    s.add_argument("--model", required=True)
    s.add_argument("--newdata", required=True)
    s.add_argument("--n-per-row", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("diagnose", help="emit P-P diagnostic tables")
    d.add_argument("--model", nargs="+", required=True)
    d.add_argument("--data", required=True)
    d.add_argument("--out")
    d.add_argument("--tail", type=float, action="append")
    d.add_argument("--by-season", action="store_true")
    d.set_defaults(func=cmd_diagnose)
    return parser


def _apply_config(parser, argv):
    """Two-phase parse: config file sets defaults, flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    explicit_out = any(a == "--out" or a.startswith("--out=") for a in rest)
    if known.config:
        path = _require_file(known.config, "config file")
        with open(path, encoding="utf-8") as fh:
            try:
                config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        command = next((a for a in rest if not a.startswith("-")), None)
        section = config.get(command, {}) if command else {}
        if not isinstance(section, dict):
            raise ConfigError(f"config section for {command!r} must be an object")
        sub_actions = next(
            a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
        )
        if command in sub_actions.choices:
            subparser = sub_actions.choices[command]
            valid = {a.dest for a in subparser._actions}
            unknown = set(section) - valid
            if unknown:
                raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
            subparser.set_defaults(**section)
            for action in subparser._actions:
                if action.dest in section:
                    action.required = False
    args = parser.parse_args(argv)
    args._out_from_flags = explicit_out
    return args


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:  # argparse usage errors / --help
        code = exc.code or 0
        return 0 if code == 0 else 1
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, ConfigError) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IngestError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, FitError, OverflowError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
