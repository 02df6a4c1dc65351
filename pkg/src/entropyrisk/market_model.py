"""Market Model OLS fit and the systematic / specific variance split."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DegenerateError, InsufficientDataError
from .ingest import ReturnSeries, aligned_arrays, as_array

MIN_OBS = 30
COND_WARN = 1e8


@dataclass(frozen=True)
class MarketModelFit:
    alpha: float
    beta: float
    residuals: np.ndarray
    r: float
    r_squared: float
    sigma_m_sq: float
    systematic_risk: float
    specific_risk: float
    total_variance: float
    n: int

    def summary(self) -> dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta, "r": self.r,
                "r_squared": self.r_squared, "systematic_risk": self.systematic_risk,
                "specific_risk": self.specific_risk, "total_variance": self.total_variance}


def fit_market_model(stock, market, risk_free=None, min_obs: int = MIN_OBS) -> MarketModelFit:
    """Least-squares fit of ``stock - rf = alpha + beta (market - rf) + eps``.

    ``risk_free`` may be a constant, an array or a ReturnSeries aligned with
    the other two; it defaults to 0. The fit uses a QR factorisation of the
    design ``[1, market - rf]``. Variances use divisor ``n``, so the
    decomposition ``total = beta**2 * sigma_m**2 + sigma_eps**2`` is exact
    OLS algebra.
    """
    y, x = aligned_arrays(stock, market)
    n = y.size
    if n < min_obs:
        raise InsufficientDataError(f"market model needs {min_obs} observations, got {n}")
    if risk_free is not None:
        rf = as_array(risk_free) if isinstance(risk_free, ReturnSeries) else np.asarray(risk_free, float)
        rf = np.broadcast_to(rf, y.shape)
        y, x = y - rf, x - rf
    if np.all(x == x[0]):
        raise DegenerateError("market excess returns are constant")

    design = np.column_stack([np.ones(n), x])
    q, r_mat = np.linalg.qr(design)
    cond = np.linalg.cond(r_mat)
    if cond > COND_WARN:
        warnings.warn(f"ill-conditioned market model design (cond={cond:.3g})",
                      RuntimeWarning, stacklevel=2)
    alpha, beta = np.linalg.solve(r_mat, q.T @ y)
    resid = y - design @ np.array([alpha, beta])

    xc = x - x.mean()
    yc = y - y.mean()
    sigma_m_sq = float(np.mean(xc * xc))
    total = float(np.mean(yc * yc))
    systematic = float(beta * beta * sigma_m_sq)
    specific = total - systematic
    rc = resid - resid.mean()
    direct_specific = float(np.mean(rc * rc))
    if abs(specific - direct_specific) > 1e-9 * max(total, 1e-300):
        raise ConsistencyError("residual variance disagrees with the variance decomposition")
    specific = max(specific, 0.0)
    r_squared = systematic / total if total > 0 else 1.0
    r_squared = min(r_squared, 1.0)
    r = math.copysign(math.sqrt(r_squared), beta)
    return MarketModelFit(float(alpha), float(beta), resid, r, r * r, sigma_m_sq,
                          systematic, specific, total, n)


def risk_decomposition(fit: MarketModelFit) -> dict[str, float]:
    """Systematic, specific and total variance plus the systematic share."""
    systematic = fit.beta * fit.beta * fit.sigma_m_sq
    specific = fit.specific_risk
    total = fit.total_variance
    if abs(total - systematic - specific) > 1e-12 * max(total, 1e-300):
        raise ConsistencyError("variance decomposition identity violated")
    share = systematic / total if total > 0 else 1.0
    return {"systematic": systematic, "specific": specific, "total": total,
            "systematic_share": min(max(share, 0.0), 1.0)}
