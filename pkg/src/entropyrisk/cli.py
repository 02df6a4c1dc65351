"""Command line entry point: ``entropyrisk <subcommand> [options]``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .entropy import HistogramSpec, differential_entropy, normal_entropy
from .errors import ConfigError, EntropyRiskError
from .ingest import ReturnSeries, align, describe, load_prices, log_returns, write_prices_wide
from .market_model import fit_market_model, risk_decomposition
from .mutinfo import (AdaptiveOptions, global_correlation, mutual_information_adaptive,
                      mutual_information_grid)
from .portfolio import diversification_curve
from .report import OUTPUT_ENV, RunConfig, round_sig, run_full_report
from .synth import KINDS, GeneratorConfig, generate, to_prices

# config-file section/key -> RunConfig field
_CONFIG_KEYS = {
    ("run", "input"): "input",
    ("run", "benchmark"): "benchmark",
    ("run", "format"): "format",
    ("run", "output"): "output",
    ("run", "seed"): "seed",
    ("run", "workers"): "workers",
    ("run", "risk_free"): "risk_free",
    ("run", "dump_paths"): "dump_paths",
    ("histogram", "scheme"): "hist_scheme",
    ("histogram", "bins"): "hist_bins",
    ("histogram", "grid_bins"): "grid_bins",
    ("adaptive", "alpha"): "adaptive_alpha",
    ("adaptive", "min_count"): "adaptive_min_count",
    ("adaptive", "max_depth"): "adaptive_max_depth",
    ("diagnostics", "ljung_box_lags"): "lb_lags",
    ("diagnostics", "arch_lags"): "arch_lags",
    ("diversification", "enabled"): "diversify",
    ("diversification", "max_k"): "div_max_k",
    ("diversification", "replications"): "div_replications",
}
_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    raw = raw.strip().strip('"').strip("'")
    kind = str(_FIELD_TYPES[name])
    if raw.lower() in ("", "none", "null") and "None" in kind:
        return None
    try:
        if kind.startswith("bool"):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def read_config(path) -> dict:
    """Parse a sectioned key = value file into RunConfig keyword arguments.

    Sections: ``[run]``, ``[histogram]``, ``[adaptive]``, ``[diagnostics]``,
    ``[diversification]``. Quoted values are unquoted, so simple TOML files
    written in this shape also parse.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = _CONFIG_KEYS.get((section, key))
            if name is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            out[name] = _coerce(name, raw)
    return out


def _load_returns(path, fmt: str, as_returns: bool) -> dict[str, ReturnSeries]:
    if as_returns:
        return _load_raw_returns(path)
    return {p.ticker: log_returns(p) for p in load_prices(path, fmt)}


def _load_raw_returns(path) -> dict[str, ReturnSeries]:
    """Wide CSV whose cells already hold returns (may be negative)."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = [h.strip() for h in rows[0]]
    out = {}
    for j, t in enumerate(header[1:], start=1):
        dates, vals = [], []
        for r in rows[1:]:
            if r[j].strip():
                dates.append(r[0].strip())
                vals.append(float(r[j]))
        out[t] = ReturnSeries(t, tuple(dates), np.array(vals))
    return out


def _pick(returns: dict, cols: str | None, count: int) -> list[ReturnSeries]:
    names = cols.split(",") if cols else sorted(returns)[:count]
    if len(names) != count:
        raise ConfigError(f"expected {count} column names, got {len(names)}")
    missing = [n for n in names if n not in returns]
    if missing:
        raise ConfigError(f"columns not in input: {', '.join(missing)}")
    return align([returns[n] for n in names])


def _emit(obj) -> None:
    print(json.dumps(round_sig(obj), indent=2))


def _cmd_analyze(args) -> int:
    values = read_config(args.config) if args.config else {}
    for flag, name in (("input", "input"), ("benchmark", "benchmark"), ("format", "format"),
                       ("seed", "seed"), ("bins", "hist_bins"), ("grid_bins", "grid_bins"),
                       ("alpha", "adaptive_alpha"), ("output", "output"),
                       ("workers", "workers"), ("replications", "div_replications")):
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    if args.no_diversify:
        values["diversify"] = False
    if args.dump_paths:
        values["dump_paths"] = True
    for req in ("input", "benchmark"):
        if req not in values:
            raise ConfigError(f"missing required setting: {req}")
    cfg = RunConfig(**values)
    report = run_full_report(cfg)
    print(f"wrote report for {len(report['tickers'])} tickers to {cfg.output} "
          f"({report['n_failed']} failed)")
    return 0


def _cmd_entropy(args) -> int:
    returns = _load_returns(args.input, args.format, args.returns)
    names = args.cols.split(",") if args.cols else sorted(returns)
    spec = HistogramSpec(args.scheme, args.bins)
    out = {}
    for name in names:
        if name not in returns:
            raise ConfigError(f"column {name!r} not in input")
        r = returns[name]
        s = describe(r)
        est = differential_entropy(r, spec)
        out[name] = {"n": len(r), "entropy": est.value, "estimator": est.estimator,
                     "bins": est.bins_used, "normal_entropy": normal_entropy(s.std_dev),
                     "ln_sigma": math.log(s.std_dev), "std_dev": s.std_dev,
                     "skewness": s.skewness, "excess_kurtosis": s.excess_kurtosis}
    _emit(out)
    return 0


def _cmd_mi(args) -> int:
    returns = _load_returns(args.input, args.format, args.returns)
    x, y = _pick(returns, args.cols, 2)
    opts = AdaptiveOptions(alpha=args.alpha if args.alpha is not None else 0.05,
                           min_count=args.min_count, max_depth=args.max_depth)
    est, tree = mutual_information_adaptive(x, y, opts)
    grid = mutual_information_grid(x, y, args.bins)
    if args.tree:
        Path(args.tree).write_text(json.dumps(tree.to_dict()), encoding="utf-8")
    _emit({"x": x.ticker, "y": y.ticker, "n": len(x),
           "I": est.value, "lambda": global_correlation(est), "cells": est.cells,
           "I_grid": grid.value, "lambda_grid": global_correlation(grid), "grid_cells": grid.cells})
    return 0


def _cmd_market_model(args) -> int:
    returns = _load_returns(args.input, args.format, args.returns)
    stock, market = _pick(returns, args.cols, 2)
    fit = fit_market_model(stock, market, args.risk_free)
    _emit({"stock": stock.ticker, "market": market.ticker, "n": fit.n,
           **fit.summary(), **risk_decomposition(fit)})
    return 0


def _cmd_diagnostics(args) -> int:
    returns = _load_returns(args.input, args.format, args.returns)
    stock, market = _pick(returns, args.cols, 2)
    fit = fit_market_model(stock, market)
    tests = dg.residual_battery(fit.residuals, args.lb_lags, args.arch_lags)
    w = dg.recursive_residuals(stock, market)
    paths = [dg.cusum(w), dg.cusum_sq(w)]
    _emit({"stock": stock.ticker, "market": market.ticker,
           "tests": [t.to_dict() for t in tests],
           "stability": {p.name: p.crossed for p in paths}})
    return 0


def _cmd_diversify(args) -> int:
    returns = _load_returns(args.input, args.format, args.returns)
    if args.exclude:
        for t in args.exclude.split(","):
            returns.pop(t, None)
    universe = align(list(returns.values()))
    curve = diversification_curve(universe, args.max_k, args.replications,
                                  args.seed or 0, HistogramSpec(args.scheme, args.bins))
    if args.output:
        curve.to_csv(args.output)
    else:
        print("k,avg_std,avg_entropy")
        for k, s, h in zip(curve.k, curve.avg_std, curve.avg_entropy):
            print(f"{k},{s:.12g},{h:.12g}")
    return 0


def _parse_param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"--param expects key=value, got {text!r}")
    key = key.strip()
    if key == "market_ticker":
        return key, value.strip()
    if key == "standardize":
        return key, value.strip().lower() in ("1", "true", "yes")
    parts = [v for v in value.split(",") if v.strip()]
    try:
        nums = [float(v) for v in parts]
    except ValueError:
        raise ConfigError(f"non-numeric value for {key}: {value!r}") from None
    if key in ("n_assets",):
        return key, int(nums[0])
    if key == "break_point" and nums[0] >= 1:
        return key, int(nums[0])
    return key, nums[0] if len(nums) == 1 else nums


def _cmd_synth(args) -> int:
    params = dict(_parse_param(p) for p in args.param or [])
    cfg = GeneratorConfig(args.kind, args.n, args.seed or 0, params)
    series = generate(cfg)
    prices = [to_prices(r) for r in series]
    write_prices_wide(args.output or sys.stdout, prices)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="sectioned key=value config file (analyze)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--bins", type=int, help="histogram bins (grid bins for `mi`)")
    common.add_argument("--alpha", type=float, help="significance level of the adaptive MI splits")
    common.add_argument("--output", help=f"output directory or file (default: ${OUTPUT_ENV})")
    common.add_argument("-v", "--verbose", action="store_true")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", required=True, help="price CSV (wide or long layout)")
    data.add_argument("--format", default="auto", choices=["auto", "wide", "long"])
    data.add_argument("--returns", action="store_true",
                      help="input cells are already returns (wide layout)")

    p = argparse.ArgumentParser(
        prog="entropyrisk",
        description="Entropy, mutual information and Market Model risk analysis of return series.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    a = sub.add_parser("analyze", parents=[common], help="full per-ticker report bundle")
    a.add_argument("--input")
    a.add_argument("--benchmark", help="benchmark ticker (market proxy)")
    a.add_argument("--format", choices=["auto", "wide", "long"])
    a.add_argument("--grid-bins", type=int, help="per-axis cells of the shared MI grid")
    a.add_argument("--workers", type=int)
    a.add_argument("--replications", type=int, help="diversification replications per k")
    a.add_argument("--no-diversify", action="store_true")
    a.add_argument("--dump-paths", action="store_true", help="write CUSUM paths per ticker")
    a.set_defaults(func=_cmd_analyze)

    e = sub.add_parser("entropy", parents=[common, data], help="entropy per column")
    e.add_argument("--cols", help="comma-separated tickers (default: all)")
    e.add_argument("--scheme", default="equidistant", choices=["equidistant", "equiprobable"])
    e.set_defaults(func=_cmd_entropy)

    m = sub.add_parser("mi", parents=[common, data], help="mutual information of two columns")
    m.add_argument("--cols", help="X,Y")
    m.add_argument("--min-count", type=int, default=16)
    m.add_argument("--max-depth", type=int, default=20)
    m.add_argument("--tree", help="write the adaptive partition tree as JSON")
    m.set_defaults(func=_cmd_mi)

    mm = sub.add_parser("market-model", parents=[common, data], help="OLS Market Model fit")
    mm.add_argument("--cols", help="STOCK,MARKET")
    mm.add_argument("--risk-free", type=float, default=0.0)
    mm.set_defaults(func=_cmd_market_model)

    d = sub.add_parser("diagnostics", parents=[common, data], help="residual tests")
    d.add_argument("--cols", help="STOCK,MARKET")
    d.add_argument("--lb-lags", type=int)
    d.add_argument("--arch-lags", type=int, default=5)
    d.set_defaults(func=_cmd_diagnostics)

    dv = sub.add_parser("diversify", parents=[common, data], help="diversification curve")
    dv.add_argument("--max-k", type=int)
    dv.add_argument("--replications", type=int, default=200)
    dv.add_argument("--exclude", help="comma-separated tickers to leave out (e.g. the index)")
    dv.add_argument("--scheme", default="equidistant", choices=["equidistant", "equiprobable"])
    dv.set_defaults(func=_cmd_diversify)

    s = sub.add_parser("synth", parents=[common], help="write a synthetic price CSV")
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--n", type=int, required=True, help="number of returns")
    s.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="generator parameter; lists as comma-separated values")
    s.set_defaults(func=_cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EntropyRiskError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
