"""Seeded synthetic return generators used as test and demo fixtures.

Every generator draws from one documented uniform stream so outputs can be
reproduced outside numpy:

* the bit generator is PCG64 (128-bit LCG state, XSL-RR 64-bit output),
  seeded through ``numpy.random.SeedSequence([seed, stream])`` where
  ``stream`` is the 0-based index of the output series;
* a uniform variate is ``((raw >> 11) + 0.5) * 2**-53``, which lies strictly
  inside (0, 1);
* a normal variate is ``ndtri(u)`` (inverse standard normal CDF);
* a Student-t(nu) variate is ``z / sqrt(chi2_ppf(u2, nu) / nu)`` where the
  ``n`` normals ``z`` are drawn first and the ``n`` uniforms ``u2`` after.

Multi-column generators consume their stream column by column in the order
documented on each helper.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import signal, special, stats

from .errors import ConfigError
from .ingest import PriceSeries, ReturnSeries

KINDS = (
    "gaussian",
    "bivariate_gaussian",
    "student_t",
    "one_factor_universe",
    "ar1",
    "arch1",
    "beta_break",
)

_START = _dt.date(2000, 1, 3)


class UniformStream:
    """Portable uniform/normal stream on top of PCG64."""

    def __init__(self, seed: int, stream: int = 0):
        ss = np.random.SeedSequence([int(seed), int(stream)])
        self._bits = np.random.PCG64(ss)

    def uniform(self, size: int) -> np.ndarray:
        raw = self._bits.random_raw(size)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normal(self, size: int) -> np.ndarray:
        return special.ndtri(self.uniform(size))

    def student_t(self, size: int, nu: float) -> np.ndarray:
        z = self.normal(size)
        chi = stats.chi2.ppf(self.uniform(size), nu)
        return z / np.sqrt(chi / nu)


@dataclass
class GeneratorConfig:
    kind: str
    n: int
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown generator kind {self.kind!r}")
        if int(self.n) < 2:
            raise ConfigError("n must be at least 2")
        p = self.params
        if "rho" in p and not abs(p["rho"]) < 1:
            raise ConfigError("|rho| must be < 1")
        if "nu" in p and not p["nu"] > 2:
            raise ConfigError("nu must be > 2")
        if "phi" in p and not abs(p["phi"]) < 1:
            raise ConfigError("|phi| must be < 1")
        if "alpha1" in p and not 0 <= p["alpha1"] < 1:
            raise ConfigError("alpha1 must lie in [0, 1)")
        for key in ("sigma", "sigma_x", "sigma_y", "sigma_m", "sigma_eps",
                    "sigma_eps_after", "alpha0", "scale"):
            if key in p and not np.all(np.asarray(p[key], dtype=float) > 0):
                raise ConfigError(f"{key} must be > 0")
        if self.kind == "beta_break":
            bp = p.get("break_point", 0.5)
            if not 0 < bp < (1 if isinstance(bp, float) else self.n):
                raise ConfigError("break_point must fall inside the sample")


def synthetic_dates(n: int) -> tuple[str, ...]:
    """Consecutive ISO dates starting 2000-01-03; labels only."""
    return tuple((_START + _dt.timedelta(days=i)).isoformat() for i in range(n))


def _series(names, columns, n) -> list[ReturnSeries]:
    dates = synthetic_dates(n)
    return [ReturnSeries(name, dates, col) for name, col in zip(names, columns)]


def _bivariate(cfg, p):
    s = UniformStream(cfg.seed, 0)
    rho = float(p.get("rho", 0.0))
    z1 = s.normal(cfg.n)
    z2 = s.normal(cfg.n)
    x = p.get("sigma_x", 1.0) * z1
    y = p.get("sigma_y", 1.0) * (rho * z1 + np.sqrt(1 - rho * rho) * z2)
    return _series(("X", "Y"), (x, y), cfg.n)


def _one_factor(cfg, p):
    # stream 0: market; stream i: idiosyncratic noise of asset i
    k = int(p.get("n_assets", 20))
    betas = np.broadcast_to(np.asarray(p.get("beta", 1.0), dtype=float), (k,))
    sig_eps = np.broadcast_to(np.asarray(p.get("sigma_eps", 0.01), dtype=float), (k,))
    alphas = np.broadcast_to(np.asarray(p.get("alpha", 0.0), dtype=float), (k,))
    m = p.get("sigma_m", 0.01) * UniformStream(cfg.seed, 0).normal(cfg.n)
    names = [p.get("market_ticker", "MKT")]
    cols = [m]
    for i in range(k):
        eps = sig_eps[i] * UniformStream(cfg.seed, i + 1).normal(cfg.n)
        names.append(f"A{i + 1:02d}")
        cols.append(alphas[i] + betas[i] * m + eps)
    return _series(names, cols, cfg.n)


def _ar1(cfg, p):
    phi = float(p.get("phi", 0.5))
    sigma = float(p.get("sigma", 1.0))
    e = sigma * UniformStream(cfg.seed, 0).normal(cfg.n)
    e[0] /= np.sqrt(1 - phi * phi)  # stationary start
    x = signal.lfilter([1.0], [1.0, -phi], e)
    return _series(("X",), (x,), cfg.n)


def _arch1(cfg, p):
    a0 = float(p.get("alpha0", 1.0))
    a1 = float(p.get("alpha1", 0.5))
    z = UniformStream(cfg.seed, 0).normal(cfg.n)
    x = np.empty(cfg.n)
    prev_sq = a0 / (1 - a1)
    for t in range(cfg.n):
        x[t] = np.sqrt(a0 + a1 * prev_sq) * z[t]
        prev_sq = x[t] * x[t]
    return _series(("X",), (x,), cfg.n)


def _beta_break(cfg, p):
    # stream 0: market, stream 1: stock noise
    n = cfg.n
    bp = p.get("break_point", 0.5)
    cut = int(round(bp * n)) if isinstance(bp, float) else int(bp)
    m = p.get("sigma_m", 1.0) * UniformStream(cfg.seed, 0).normal(n)
    z = UniformStream(cfg.seed, 1).normal(n)
    after = np.arange(n) >= cut
    beta = np.where(after, p.get("beta_after", p.get("beta", 1.0)), p.get("beta", 1.0))
    alpha = np.where(after, p.get("alpha_after", p.get("alpha", 0.0)), p.get("alpha", 0.0))
    s0 = p.get("sigma_eps", 1.0)
    sig = np.where(after, p.get("sigma_eps_after", s0), s0)
    x = alpha + beta * m + sig * z
    return _series(("MKT", "X"), (m, x), n)


def generate(cfg: GeneratorConfig) -> list[ReturnSeries]:
    """Draw the series described by ``cfg``; identical configs give identical bits.

    Output tickers: ``X`` (univariate kinds), ``X, Y`` (bivariate_gaussian),
    ``MKT, A01..Ak`` (one_factor_universe), ``MKT, X`` (beta_break).
    """
    cfg.validate()
    p = cfg.params
    kind = cfg.kind
    if kind == "gaussian":
        x = p.get("mu", 0.0) + p.get("sigma", 1.0) * UniformStream(cfg.seed).normal(cfg.n)
        return _series(("X",), (x,), cfg.n)
    if kind == "bivariate_gaussian":
        return _bivariate(cfg, p)
    if kind == "student_t":
        nu = float(p.get("nu", 4.0))
        x = UniformStream(cfg.seed).student_t(cfg.n, nu)
        if p.get("standardize", False):
            x = x * np.sqrt((nu - 2) / nu)
        return _series(("X",), (p.get("scale", 1.0) * x,), cfg.n)
    if kind == "one_factor_universe":
        return _one_factor(cfg, p)
    if kind == "ar1":
        return _ar1(cfg, p)
    if kind == "arch1":
        return _arch1(cfg, p)
    return _beta_break(cfg, p)


def to_prices(r: ReturnSeries, start_price: float = 100.0) -> PriceSeries:
    """Turn log returns back into a price path with one extra leading date."""
    n = len(r)
    dates = synthetic_dates(n + 1)
    prices = start_price * np.exp(np.concatenate([[0.0], np.cumsum(r.values)]))
    return PriceSeries(r.ticker, dates, prices)
