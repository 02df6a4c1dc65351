"""Plug-in histogram entropy estimates (nats) and the Gaussian baseline.

Continuous estimates add the cell-width term to the discrete plug-in
entropy::

    H = -sum p_i ln p_i + sum p_i ln w_i

so that the result approximates the differential entropy of the density and
shifts by ``ln c`` when the data are scaled by ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateError, DomainError, InsufficientDataError
from .ingest import aligned_arrays, as_array

LOG_SQRT_2PI_E = 0.5 * math.log(2 * math.pi * math.e)

Scheme = Literal["equidistant", "equiprobable"]


@dataclass(frozen=True)
class HistogramSpec:
    """Binning scheme; ``bins=None`` picks a default from the data.

    Univariate equidistant: Freedman-Diaconis count. Univariate
    equiprobable: ``ceil(n**(1/3))``. Bivariate: ``ceil(n**(1/4))`` per axis.
    """

    scheme: Scheme = "equidistant"
    bins: int | None = None

    def __post_init__(self):
        if self.scheme not in ("equidistant", "equiprobable"):
            raise DomainError(f"unknown binning scheme {self.scheme!r}")
        if self.bins is not None and int(self.bins) < 2:
            raise DomainError("bins must be >= 2")

    def univariate_bins(self, x: np.ndarray) -> int:
        if self.bins is not None:
            return int(self.bins)
        if self.scheme == "equidistant":
            return freedman_diaconis_bins(x)
        return default_bins(x.size)

    def bivariate_bins(self, n: int) -> int:
        return int(self.bins) if self.bins is not None else default_bins(n, dims=2)


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    estimator: str
    bins_used: int
    n: int

    def __float__(self) -> float:
        return self.value


def default_bins(n: int, dims: int = 1) -> int:
    """``ceil(n**(1/3))`` cells for one axis, ``ceil(n**(1/4))`` per axis for two."""
    root = 3 if dims == 1 else 4
    b = math.ceil(n ** (1.0 / root) - 1e-9)
    return max(b, 2)


def freedman_diaconis_bins(x: np.ndarray) -> int:
    """Equal-width cell count with width ``2 IQR n**(-1/3)``.

    Floored at ``ceil(n**(1/3))`` and capped at ``n // 4``; heavy tails widen
    the range, and a fixed count would then leave the body of the
    distribution in a handful of cells.
    """
    n = x.size
    floor = default_bins(n)
    q75, q25 = np.percentile(x, [75, 25])
    span = x.max() - x.min()
    if not q75 > q25 or not span > 0:
        return floor
    width = 2.0 * (q75 - q25) * n ** (-1.0 / 3.0)
    return int(min(max(math.ceil(span / width), floor), max(n // 4, 2)))


def entropy_discrete(p) -> float:
    """Shannon entropy ``-sum p ln p`` of a probability vector, with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise DomainError("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def bin_edges(x: np.ndarray, bins: int, scheme: Scheme) -> np.ndarray:
    """Cell boundaries over ``[min, max]``: equal widths or midpoint quantiles."""
    lo, hi = x.min(), x.max()
    if not hi > lo:
        raise DegenerateError("all values are equal; the data range has zero width")
    if scheme == "equidistant":
        return np.linspace(lo, hi, bins + 1)
    edges = np.quantile(x, np.linspace(0.0, 1.0, bins + 1), method="midpoint")
    edges[0], edges[-1] = lo, hi
    return edges


def bin_index(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Cell index per value; cells are ``(e_i, e_i+1]`` and the first also holds ``e_0``.

    A value sitting exactly on an interior boundary goes to the lower cell.
    """
    bins = edges.size - 1
    return np.clip(np.searchsorted(edges, x, side="left") - 1, 0, bins - 1)


def _plugin(counts: np.ndarray, log_size: np.ndarray, n: int, miller_madow: bool) -> float:
    mask = counts > 0
    if np.any(~np.isfinite(log_size[mask])):
        raise DegenerateError("an occupied cell has zero width (tied values across a quantile)")
    p = counts[mask] / n
    h = float(-np.sum(p * np.log(p)) + np.sum(p * log_size[mask]))
    if miller_madow:
        h += (mask.sum() - 1) / (2.0 * n)
    return h


def differential_entropy(x, spec: HistogramSpec | None = None, *,
                         miller_madow: bool = False) -> EntropyEstimate:
    """Histogram estimate of the differential entropy of ``x``.

    Parameters
    ----------
    x : ReturnSeries or array_like
    spec : HistogramSpec, optional
        Defaults to equidistant cells, Freedman-Diaconis count.
    miller_madow : bool
        Add the ``(m - 1) / 2n`` bias correction, ``m`` = occupied cells.

    Raises
    ------
    InsufficientDataError
        ``n < 4 * bins``.
    DegenerateError
        Constant input.
    """
    spec = spec or HistogramSpec()
    v = as_array(x)
    n = v.size
    bins = spec.univariate_bins(v)
    if n < 4 * bins:
        raise InsufficientDataError(f"{n} observations for {bins} bins; need {4 * bins}")
    edges = bin_edges(v, bins, spec.scheme)
    counts = np.bincount(bin_index(v, edges), minlength=bins)
    with np.errstate(divide="ignore"):
        log_w = np.log(np.diff(edges))
    h = _plugin(counts, log_w, n, miller_madow)
    return EntropyEstimate(h, f"plug_in_{spec.scheme}", bins, n)


def normal_entropy(sigma: float) -> float:
    """Entropy of a normal law with standard deviation ``sigma``: ``ln(sqrt(2 pi e) sigma)``."""
    if not sigma > 0:
        raise DomainError("sigma must be > 0")
    return LOG_SQRT_2PI_E + math.log(sigma)


@dataclass(frozen=True)
class JointGrid:
    """Two-dimensional histogram shared by joint, marginal and conditional estimates."""

    counts: np.ndarray  # shape (bins_x, bins_y)
    x_edges: np.ndarray
    y_edges: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def build(cls, x, y, bins: int, scheme: Scheme = "equiprobable") -> "JointGrid":
        a, b = aligned_arrays(x, y)
        n = a.size
        if n < 4 * bins * bins:
            raise InsufficientDataError(
                f"{n} observations for a {bins}x{bins} grid; need {4 * bins * bins}")
        ex = bin_edges(a, bins, scheme)
        ey = bin_edges(b, bins, scheme)
        flat = bin_index(a, ex) * bins + bin_index(b, ey)
        counts = np.bincount(flat, minlength=bins * bins).reshape(bins, bins)
        return cls(counts, ex, ey)

    def _log_widths(self):
        with np.errstate(divide="ignore"):
            return np.log(np.diff(self.x_edges)), np.log(np.diff(self.y_edges))

    def joint(self) -> float:
        lx, ly = self._log_widths()
        return _plugin(self.counts.ravel(), (lx[:, None] + ly[None, :]).ravel(), self.n, False)

    def marginal_x(self) -> float:
        return _plugin(self.counts.sum(axis=1), self._log_widths()[0], self.n, False)

    def marginal_y(self) -> float:
        return _plugin(self.counts.sum(axis=0), self._log_widths()[1], self.n, False)


def joint_entropy(x, y, spec: HistogramSpec | None = None) -> EntropyEstimate:
    """``H(X, Y)`` from a 2-D histogram, cell areas included."""
    spec = spec or HistogramSpec()
    n = as_array(x).size
    bins = spec.bivariate_bins(n)
    grid = JointGrid.build(x, y, bins, spec.scheme)
    return EntropyEstimate(grid.joint(), f"plug_in_{spec.scheme}", bins, n)


def conditional_entropy(x, y, spec: HistogramSpec | None = None) -> EntropyEstimate:
    """``H(X | Y) = H(X, Y) - H(Y)``, both read off one grid."""
    spec = spec or HistogramSpec()
    n = as_array(x).size
    bins = spec.bivariate_bins(n)
    grid = JointGrid.build(x, y, bins, spec.scheme)
    return EntropyEstimate(grid.joint() - grid.marginal_y(), f"plug_in_{spec.scheme}", bins, n)
