"""Residual test battery: normality, autocorrelation, ARCH effects, stability.

CUSUM uses the Brown-Durbin-Evans 5% boundary lines
``+/- 0.948 [sqrt(T - k) + 2 (t - k) / sqrt(T - k)]``.

CUSUM of squares uses the Edgerton & Wells (1994) response-surface
approximation to Durbin's critical value::

    c0 = a / sqrt(m) + b / m + c / m**1.5,   m = (T - k) / 2 - 1

with coefficients from their table (columns keyed by one-sided level).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DegenerateError, DomainError, InsufficientDataError
from .ingest import aligned_arrays, as_array, describe

CUSUM_5PCT = 0.948

# one-sided level -> (a, b, c)
_EDGERTON_WELLS = {
    0.10: (1.0729830, -0.6698868, -0.5816458),
    0.05: (1.2238734, -0.6700069, -0.7351697),
    0.025: (1.3581015, -0.6701218, -0.8858694),
    0.01: (1.5174271, -0.6702672, -1.0847745),
    0.005: (1.6276236, -0.6703724, -1.2365861),
}


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    p_value: float
    dof_or_params: tuple[int, ...] = ()

    __test__ = False  # not a pytest class

    @property
    def reject_at_5pct(self) -> bool:
        return self.p_value < 0.05

    def to_dict(self) -> dict:
        return {"name": self.name, "statistic": self.statistic, "p_value": self.p_value,
                "dof_or_params": list(self.dof_or_params), "reject_at_5pct": self.reject_at_5pct}


@dataclass(frozen=True)
class StabilityPath:
    name: str
    t_index: np.ndarray
    path: np.ndarray
    lower_bound: np.ndarray
    upper_bound: np.ndarray
    crossed: bool = field(init=False)

    def __post_init__(self):
        crossed = bool(np.any((self.path < self.lower_bound) | (self.path > self.upper_bound)))
        object.__setattr__(self, "crossed", crossed)


def chi2_sf(stat: float, dof: int) -> float:
    """Upper tail of the chi-square law (regularised upper incomplete gamma)."""
    if stat <= 0:
        return 1.0
    return float(min(max(special.gammaincc(dof / 2.0, stat / 2.0), 0.0), 1.0))


def jarque_bera(x) -> TestResult:
    """``JB = n/6 (S**2 + K**2 / 4)`` with divisor-n moments, chi-square(2) tail."""
    v = as_array(x)
    if v.size < 20:
        raise InsufficientDataError("Jarque-Bera needs n >= 20")
    s = describe(v)
    if s.skewness is None:
        raise DegenerateError("zero variance")
    jb = v.size / 6.0 * (s.skewness**2 + s.excess_kurtosis**2 / 4.0)
    return TestResult("jarque_bera", float(jb), chi2_sf(jb, 2), (2,))


def autocorrelations(x, lags: int) -> np.ndarray:
    v = as_array(x)
    d = v - v.mean()
    denom = float(d @ d)
    if denom == 0:
        raise DegenerateError("zero variance")
    return np.array([d[k:] @ d[:-k] for k in range(1, lags + 1)]) / denom


def default_lb_lags(n: int) -> int:
    return max(1, math.ceil(math.log(n)))


def ljung_box(x, lags: int | None = None) -> TestResult:
    """``Q = n (n + 2) sum_k rho_k**2 / (n - k)``, chi-square(lags) tail."""
    v = as_array(x)
    n = v.size
    h = default_lb_lags(n) if lags is None else int(lags)
    if h <= 0:
        raise DomainError("lags must be positive")
    if n <= 3 * h:
        raise InsufficientDataError(f"Ljung-Box with {h} lags needs n > {3 * h}")
    rho = autocorrelations(v, h)
    q = n * (n + 2) * float(np.sum(rho**2 / (n - np.arange(1, h + 1))))
    return TestResult("ljung_box", q, chi2_sf(q, h), (h,))


def engle_arch(x, lags: int = 5) -> TestResult:
    """Engle LM test: regress ``x_t**2`` on a constant and ``lags`` own lags, ``LM = n R**2``."""
    v = as_array(x)
    q = int(lags)
    if q <= 0:
        raise DomainError("lags must be positive")
    if v.size <= 3 * q + 1:
        raise InsufficientDataError(f"ARCH-LM with {q} lags needs n > {3 * q + 1}")
    sq = v * v
    y = sq[q:]
    design = np.column_stack([np.ones(y.size)] + [sq[q - j:-j] for j in range(1, q + 1)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    yc = y - y.mean()
    tss = float(yc @ yc)
    r2 = 0.0 if tss <= 1e-14 * max(float(y @ y), 1e-300) else max(0.0, 1.0 - float(resid @ resid) / tss)
    lm = y.size * r2
    return TestResult("engle_arch", lm, chi2_sf(lm, q), (q,))


def recursive_residuals(stock, market) -> np.ndarray:
    """Standardised one-step-ahead errors of an expanding-window OLS fit.

    For ``t = k+1..n`` (``k = 2``: intercept and slope) the fit on the first
    ``t - 1`` points predicts point ``t``::

        w_t = (y_t - x_t' b_{t-1}) / sqrt(1 + x_t' (X' X)^{-1} x_t)

    The normal equations of the 2-parameter fit are accumulated with
    cumulative sums of mean-centred data, so the whole path costs O(n).
    """
    y, x = aligned_arrays(stock, market)
    n = y.size
    k = 2
    if n < k + 10:
        raise InsufficientDataError("recursive residuals need n >= 12")
    # intercept absorbs the centring, residuals are unchanged
    x = x - x.mean()
    y = y - y.mean()
    m = np.arange(1, n + 1, dtype=float)
    sx, sy = np.cumsum(x), np.cumsum(y)
    mx, my = sx / m, sy / m
    # running centred moments (Welford form avoids raw-moment cancellation)
    dx = x - np.concatenate([[0.0], mx[:-1]])
    dy = y - np.concatenate([[0.0], my[:-1]])
    frac = (m - 1) / m
    sxx = np.cumsum(frac * dx * dx)
    sxy = np.cumsum(frac * dx * dy)

    prev = slice(k - 1, n - 1)   # statistics of the first t-1 points
    cur = slice(k, n)            # point t
    sxx_p = sxx[prev]
    scale = np.maximum(np.abs(sxx[-1]), 1e-300)
    if np.any(sxx_p <= 1e-12 * scale):
        warnings.warn("near-singular design in the early recursive window",
                      RuntimeWarning, stacklevel=2)
        sxx_p = np.where(sxx_p <= 1e-12 * scale, np.nan, sxx_p)
    b = sxy[prev] / sxx_p
    a = my[prev] - b * mx[prev]
    xt, yt = x[cur], y[cur]
    f = 1.0 + 1.0 / m[prev] + (xt - mx[prev]) ** 2 / sxx_p
    w = (yt - a - b * xt) / np.sqrt(f)
    return np.nan_to_num(w, nan=0.0)


def cusum(w, k: int = 2) -> StabilityPath:
    """Brown-Durbin-Evans CUSUM path with 5% boundaries.

    The path starts at 0 at ``t = k`` and then adds ``w_t / s`` where ``s``
    is the sample standard deviation of the recursive residuals.
    """
    w = as_array(w)
    if w.size == 0:
        raise InsufficientDataError("empty residual vector")
    span = w.size  # T - k
    t_index = np.arange(k, k + span + 1)
    if np.all(w == 0):
        path = np.zeros(span + 1)
    else:
        s = float(np.std(w, ddof=1)) if span > 1 else 0.0
        if s == 0:
            raise DegenerateError("recursive residuals have zero spread")
        path = np.concatenate([[0.0], np.cumsum(w) / s])
    steps = np.arange(span + 1, dtype=float)
    band = CUSUM_5PCT * (math.sqrt(span) + 2.0 * steps / math.sqrt(span))
    return StabilityPath("CUSUM", t_index, path, -band, band)


def cusum_sq_critical(span: int, alpha: float = 0.05) -> float:
    """Two-sided CUSUM-of-squares half-width for ``span = T - k`` residuals."""
    try:
        a, b, c = _EDGERTON_WELLS[round(alpha / 2, 6)]
    except KeyError:
        raise DomainError(f"no CUSUM-of-squares table entry for alpha={alpha}") from None
    m = 0.5 * span - 1
    if m <= 0:
        raise InsufficientDataError("too few residuals for CUSUM of squares")
    return a / math.sqrt(m) + b / m + c / m**1.5


def cusum_sq(w, k: int = 2, alpha: float = 0.05) -> StabilityPath:
    """CUSUM of squares: path from exactly 0 to exactly 1, line +/- c0 boundaries."""
    w = as_array(w)
    if w.size == 0:
        raise InsufficientDataError("empty residual vector")
    cs = np.cumsum(w * w)
    if cs[-1] == 0:
        raise DegenerateError("all recursive residuals are zero")
    span = w.size
    path = np.concatenate([[0.0], cs / cs[-1]])
    line = np.arange(span + 1, dtype=float) / span
    c0 = cusum_sq_critical(span, alpha)
    return StabilityPath("CUSUM_Q", np.arange(k, k + span + 1), path, line - c0, line + c0)


def residual_battery(resid, lb_lags: int | None = None, arch_lags: int = 5) -> list[TestResult]:
    """Jarque-Bera, Ljung-Box and ARCH-LM on one residual vector."""
    return [jarque_bera(resid), ljung_box(resid, lb_lags), engle_arch(resid, arch_lags)]
