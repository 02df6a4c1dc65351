"""Batch pipeline: per-ticker dependence reports and plot-ready CSV files.

Output files written into the run's output directory:

``report.json``
    ``{"config": {...}, "benchmark": str, "n_failed": int, "tickers": [...]}``
    where every ticker entry is a DependenceReport dict (``status: "ok"``)
    or ``{"ticker", "status": "failed", "error"}``.
``fig1.csv``
    ``ticker,ln_sigma,h_empirical,h_normal``
``fig2.csv``
    ``ticker,systematic_risk,mi_adaptive,specific_risk,h_conditional``
``diagnostics.csv``
    ``ticker,test,statistic,p_value,dof,reject_at_5pct`` with one row per
    residual test plus the CUSUM / CUSUM_Q rows (statistic = max
    boundary excess, p_value empty).
``diversification.csv``
    ``k,avg_std,avg_entropy`` (optional)

Floats are written with 12 significant digits.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .entropy import HistogramSpec, differential_entropy, normal_entropy
from .errors import ConfigError, ConsistencyError, EntropyRiskError
from .ingest import ReturnSeries, SummaryStats, align, describe, load_prices, log_returns
from .market_model import fit_market_model, risk_decomposition
from .mutinfo import (AdaptiveOptions, entropy_decomposition, global_correlation,
                      mutual_information_adaptive, normal_mutual_information)
from .portfolio import diversification_curve

logger = logging.getLogger(__name__)

OUTPUT_ENV = "ENTROPYRISK_OUTPUT"


@dataclass
class RunConfig:
    input: str
    benchmark: str
    format: str = "auto"
    hist_scheme: str = "equidistant"
    hist_bins: int | None = None
    grid_bins: int | None = None
    adaptive_alpha: float = 0.05
    adaptive_min_count: int = 16
    adaptive_max_depth: int = 20
    lb_lags: int | None = None
    arch_lags: int = 5
    risk_free: float = 0.0
    diversify: bool = True
    div_max_k: int | None = None
    div_replications: int = 200
    output: str = field(default_factory=lambda: os.environ.get(OUTPUT_ENV, "entropyrisk-out"))
    seed: int = 0
    workers: int = 1
    dump_paths: bool = False

    @property
    def histogram(self) -> HistogramSpec:
        return HistogramSpec(self.hist_scheme, self.hist_bins)

    @property
    def adaptive(self) -> AdaptiveOptions:
        return AdaptiveOptions(self.adaptive_alpha, self.adaptive_min_count,
                               self.adaptive_max_depth)


@dataclass
class DependenceReport:
    ticker: str
    summary: SummaryStats
    h_empirical: float
    h_normal: float
    ln_sigma: float
    h_grid: float
    mi_adaptive: float
    mi_grid: float
    h_conditional: float
    lambda_: float
    lambda_normal: float
    fit: dict
    diagnostics: list
    stability: dict
    grid_bins: int
    n: int
    paths: tuple = ()

    def check(self) -> None:
        if abs(self.lambda_normal - abs(self.fit["r"])) > 1e-9:
            raise ConsistencyError(f"{self.ticker}: lambda_normal != |r|")
        if abs(self.h_grid - self.mi_grid - self.h_conditional) >= 1e-12 * max(1.0, abs(self.h_grid)):
            raise ConsistencyError(f"{self.ticker}: entropy decomposition residual too large")

    def to_dict(self) -> dict:
        return {
            "ticker": self.ticker,
            "status": "ok",
            "n": self.n,
            "summary": asdict(self.summary),
            "h_empirical": self.h_empirical,
            "h_normal": self.h_normal,
            "ln_sigma": self.ln_sigma,
            "h_grid": self.h_grid,
            "mi_adaptive": self.mi_adaptive,
            "mi_grid": self.mi_grid,
            "h_conditional": self.h_conditional,
            "grid_bins": self.grid_bins,
            "lambda": self.lambda_,
            "lambda_normal": self.lambda_normal,
            "fit": self.fit,
            "diagnostics": [t.to_dict() for t in self.diagnostics],
            "stability": self.stability,
        }


def analyze_ticker(stock: ReturnSeries, benchmark: ReturnSeries, cfg: RunConfig) -> DependenceReport:
    """Every per-stock quantity of the comparison, on date-aligned inputs."""
    summary = describe(stock)
    h_emp = differential_entropy(stock, cfg.histogram).value
    fit = fit_market_model(stock, benchmark, cfg.risk_free)
    risk = risk_decomposition(fit)
    dec = entropy_decomposition(stock, benchmark, cfg.grid_bins)
    mi_ad, _ = mutual_information_adaptive(stock, benchmark, cfg.adaptive)
    lam_n = global_correlation(normal_mutual_information(fit.r)) if abs(fit.r) < 1 else 1.0

    tests = dg.residual_battery(fit.residuals, cfg.lb_lags, cfg.arch_lags)
    w = dg.recursive_residuals(stock, benchmark)
    paths = (dg.cusum(w), dg.cusum_sq(w))
    stability = {p.name: p.crossed for p in paths}

    rep = DependenceReport(
        ticker=stock.ticker,
        summary=summary,
        h_empirical=h_emp,
        h_normal=normal_entropy(summary.std_dev),
        ln_sigma=math.log(summary.std_dev),
        h_grid=dec["h_x"],
        mi_adaptive=mi_ad.value,
        mi_grid=dec["mi"],
        h_conditional=dec["h_cond"],
        lambda_=global_correlation(mi_ad),
        lambda_normal=lam_n,
        fit={"beta": fit.beta, "alpha": fit.alpha, "r": fit.r, "r_squared": fit.r_squared,
             "systematic": risk["systematic"], "specific": risk["specific"],
             "total": risk["total"], "systematic_share": risk["systematic_share"]},
        diagnostics=tests,
        stability=stability,
        grid_bins=dec["bins"],
        n=len(stock),
        paths=paths,
    )
    rep.check()
    return rep


def round_sig(obj, digits: int = 12):
    """Recursively round floats to ``digits`` significant digits; NaN/inf become None."""
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return float(f"{v:.{digits}g}")
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_sig(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_sig(v, digits) for v in obj]
    return obj


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _path_excess(p: dg.StabilityPath) -> float:
    return float(np.max(np.maximum(p.path - p.upper_bound, p.lower_bound - p.path)))


def prepare(cfg: RunConfig) -> tuple[ReturnSeries, list[ReturnSeries]]:
    """Load and align returns; raises ConfigError when the benchmark is absent."""
    prices = load_prices(cfg.input, cfg.format)
    tickers = [p.ticker for p in prices]
    if cfg.benchmark not in tickers:
        raise ConfigError(f"benchmark {cfg.benchmark!r} not in input ({', '.join(tickers)})")
    returns = {p.ticker: log_returns(p) for p in prices}
    bench = returns.pop(cfg.benchmark)
    return bench, [returns[t] for t in sorted(returns)]


def run_full_report(cfg: RunConfig) -> dict:
    """Run the whole pipeline and write the report bundle into ``cfg.output``.

    Returns the report dict (before rounding). A ticker whose estimation
    fails is recorded as failed and the batch carries on.
    """
    bench, stocks = prepare(cfg)

    def one(stock):
        b, s = align([bench, stock])
        try:
            return analyze_ticker(s, b, cfg)
        except (EntropyRiskError, ValueError, np.linalg.LinAlgError) as exc:
            logger.warning("%s: estimation failed: %s", stock.ticker, exc)
            return {"ticker": stock.ticker, "status": "failed", "error": str(exc)}

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(one, stocks))
    else:
        results = [one(s) for s in stocks]
    ok = [r for r in results if isinstance(r, DependenceReport)]
    failed = len(results) - len(ok)

    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    cfg_dict = {k: v for k, v in asdict(cfg).items() if k not in ("output", "workers")}
    report = {
        "config": cfg_dict,
        "benchmark": cfg.benchmark,
        "n_failed": failed,
        "tickers": [r.to_dict() if isinstance(r, DependenceReport) else r for r in results],
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(round_sig(report), fh, indent=2, allow_nan=False)
        fh.write("\n")

    _write_csv(out / "fig1.csv", ["ticker", "ln_sigma", "h_empirical", "h_normal"],
               [(r.ticker, r.ln_sigma, r.h_empirical, r.h_normal) for r in ok])
    _write_csv(out / "fig2.csv",
               ["ticker", "systematic_risk", "mi_adaptive", "specific_risk", "h_conditional"],
               [(r.ticker, r.fit["systematic"], r.mi_adaptive, r.fit["specific"], r.h_conditional)
                for r in ok])
    diag_rows = []
    for r in ok:
        for t in r.diagnostics:
            diag_rows.append((r.ticker, t.name, t.statistic, t.p_value,
                              " ".join(map(str, t.dof_or_params)), t.reject_at_5pct))
        for p in r.paths:
            diag_rows.append((r.ticker, p.name, _path_excess(p), None, "", p.crossed))
    _write_csv(out / "diagnostics.csv",
               ["ticker", "test", "statistic", "p_value", "dof", "reject_at_5pct"], diag_rows)

    if cfg.dump_paths:
        for r in ok:
            cs, cq = r.paths
            _write_csv(out / f"stability_{r.ticker}.csv",
                       ["t", "cusum", "cusum_lower", "cusum_upper",
                        "cusum_sq", "cusum_sq_lower", "cusum_sq_upper"],
                       zip(cs.t_index, cs.path, cs.lower_bound, cs.upper_bound,
                           cq.path, cq.lower_bound, cq.upper_bound))

    if cfg.diversify and len(stocks) >= 1:
        universe = align(stocks)
        curve = diversification_curve(universe, cfg.div_max_k, cfg.div_replications,
                                      cfg.seed, cfg.histogram)
        curve.to_csv(out / "diversification.csv")

    if failed:
        logger.warning("%d ticker(s) failed", failed)
    return report
