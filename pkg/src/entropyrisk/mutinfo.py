"""Mutual information estimators and the global correlation coefficient.

Two histogram estimators are provided:

``mutual_information_grid``
    plug-in sum over a fixed grid with equiprobable marginal cells.
``mutual_information_adaptive``
    recursive marginal-equiquantization partition. Both coordinates are
    replaced by their ranks, so each margin is uniform on (0, 1). A cell is
    cut into four at the midpoint of its rank interval on each axis, which
    halves its marginal probability on both axes. The cut is kept when a
    chi-square test rejects an even spread of the cell's points over the
    four children (3 dof) or over the sixteen grandchildren (15 dof).
    Each leaf then adds ``p ln(p / (wx * wy))``, where ``wx`` and ``wy`` are
    the leaf's rank-interval widths, i.e. its marginal probabilities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .entropy import JointGrid
from .errors import ConsistencyError, DomainError, InsufficientDataError
from .ingest import aligned_arrays

NEG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MiEstimate:
    value: float
    estimator: str
    cells: int
    n: int

    def __float__(self) -> float:
        return self.value


@dataclass
class PartitionCell:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    count: int
    depth: int = 0
    children: list["PartitionCell"] = field(default_factory=list)

    def leaves(self):
        if not self.children:
            yield self
            return
        for c in self.children:
            yield from c.leaves()

    def to_dict(self) -> dict:
        d = {"x_range": list(self.x_range), "y_range": list(self.y_range), "count": self.count}
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d


@dataclass
class PartitionTree:
    root: PartitionCell
    n: int

    @property
    def leaves(self) -> list[PartitionCell]:
        return list(self.root.leaves())

    @property
    def depth(self) -> int:
        return max(c.depth for c in self.root.leaves())

    def to_dict(self) -> dict:
        return {"n": self.n, "root": self.root.to_dict()}


def _checked(raw: float) -> float:
    if raw < -NEG_TOLERANCE:
        raise ConsistencyError(f"mutual information sum is negative: {raw!r}")
    return max(raw, 0.0)


def _is_constant(v: np.ndarray) -> bool:
    return bool(np.all(v == v[0]))


def mi_from_table(counts) -> float:
    """Plug-in ``sum p_ij ln(p_ij / (p_i. p_.j))`` over the nonempty cells of a table."""
    c = np.asarray(counts, dtype=float)
    n = c.sum()
    p = c / n
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    return _checked(float(np.sum(p[mask] * np.log(p[mask] / (px * py)[mask]))))


def default_grid_bins(n: int) -> int:
    """Per-axis cell count for the grid MI estimator: ``ceil(n**(1/3))``."""
    return max(2, math.ceil(n ** (1.0 / 3.0) - 1e-9))


def mutual_information_grid(x, y, bins: int | None = None) -> MiEstimate:
    """Plug-in MI on a ``bins`` x ``bins`` grid of equiprobable marginal cells."""
    a, b = aligned_arrays(x, y)
    n = a.size
    if bins is None:
        bins = default_grid_bins(n)
    if n < 4 * bins * bins:
        raise InsufficientDataError(f"{n} observations for a {bins}x{bins} grid")
    if _is_constant(a) or _is_constant(b):
        warnings.warn("constant input: mutual information set to 0", RuntimeWarning, stacklevel=2)
        return MiEstimate(0.0, "grid", bins * bins, n)
    grid = JointGrid.build(a, b, bins, "equiprobable")
    return MiEstimate(mi_from_table(grid.counts), "grid", bins * bins, n)


@dataclass(frozen=True)
class AdaptiveOptions:
    alpha: float = 0.05
    min_count: int = 16
    max_depth: int = 20
    second_level: bool = True

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if self.min_count < 4 or self.max_depth < 1:
            raise DomainError("min_count must be >= 4 and max_depth >= 1")


def _uniform_rank(v: np.ndarray) -> np.ndarray:
    return (stats.rankdata(v, method="average") - 0.5) / v.size


def _quadrant(u, v, xm, ym):
    return (u >= xm).astype(np.intp) * 2 + (v >= ym)


def _chi2_uniform(counts: np.ndarray) -> float:
    e = counts.sum() / counts.size
    return float(np.sum((counts - e) ** 2) / e)


def mutual_information_adaptive(x, y, opts: AdaptiveOptions | None = None, **kw):
    """Adaptive-partition MI estimate.

    Parameters
    ----------
    x, y : ReturnSeries or array_like
        Paired samples, ``n >= 100``.
    opts : AdaptiveOptions, optional
        ``alpha`` (test level), ``min_count`` (cells with fewer points are
        not split), ``max_depth``, ``second_level`` (also test the 16
        grandchildren before giving up on a cell). Keyword arguments
        override the corresponding fields.

    Returns
    -------
    (MiEstimate, PartitionTree)
    """
    if opts is None:
        opts = AdaptiveOptions(**kw)
    elif kw:
        opts = AdaptiveOptions(**{**opts.__dict__, **kw})
    a, b = aligned_arrays(x, y)
    n = a.size
    if n < 100:
        raise InsufficientDataError(f"adaptive MI needs n >= 100, got {n}")
    root = PartitionCell((0.0, 1.0), (0.0, 1.0), n)
    if _is_constant(a) or _is_constant(b):
        warnings.warn("constant input: mutual information set to 0", RuntimeWarning, stacklevel=2)
        return MiEstimate(0.0, "adaptive", 1, n), PartitionTree(root, n)

    u, v = _uniform_rank(a), _uniform_rank(b)
    crit4 = stats.chi2.isf(opts.alpha, 3)
    crit16 = stats.chi2.isf(opts.alpha, 15)
    total = 0.0
    leaves = 0
    stack = [(root, np.arange(n))]
    while stack:
        cell, idx = stack.pop()
        m = idx.size
        split = False
        if m >= opts.min_count and cell.depth < opts.max_depth:
            (x0, x1), (y0, y1) = cell.x_range, cell.y_range
            xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
            cu, cv = u[idx], v[idx]
            q = _quadrant(cu, cv, xm, ym)
            split = _chi2_uniform(np.bincount(q, minlength=4)) > crit4
            if not split and opts.second_level:
                sx = np.where(cu >= xm, 0.5 * (xm + x1), 0.5 * (x0 + xm))
                sy = np.where(cv >= ym, 0.5 * (ym + y1), 0.5 * (y0 + ym))
                q16 = q * 4 + _quadrant(cu, cv, sx, sy)
                split = _chi2_uniform(np.bincount(q16, minlength=16)) > crit16
        if split:
            ranges = (((x0, xm), (y0, ym)), ((x0, xm), (ym, y1)),
                      ((xm, x1), (y0, ym)), ((xm, x1), (ym, y1)))
            for k, (xr, yr) in enumerate(ranges):
                sub = idx[q == k]
                child = PartitionCell(xr, yr, int(sub.size), cell.depth + 1)
                cell.children.append(child)
                stack.append((child, sub))
        else:
            leaves += 1
            if m:
                p = m / n
                w = (cell.x_range[1] - cell.x_range[0]) * (cell.y_range[1] - cell.y_range[0])
                total += p * math.log(p / w)
    return MiEstimate(_checked(total), "adaptive", leaves, n), PartitionTree(root, n)


def global_correlation(i) -> float:
    """``sqrt(1 - exp(-2 I))``: MI mapped onto [0, 1)."""
    value = float(i)
    if not value >= 0:
        raise DomainError("mutual information must be >= 0")
    return math.sqrt(-math.expm1(-2.0 * value))


def normal_mutual_information(r: float) -> float:
    """MI of a bivariate normal with correlation ``r``: ``-0.5 ln(1 - r**2)``."""
    if not abs(r) < 1:
        raise DomainError("|r| must be < 1")
    return -0.5 * math.log1p(-r * r)


def entropy_decomposition(x, benchmark, bins: int | None = None) -> dict[str, float]:
    """Split ``H(X)`` into ``I(X, B) + H(X | B)`` on one equiprobable grid.

    All three terms come from the same 2-D histogram, so
    ``h_x == mi + h_cond`` up to floating-point rounding.
    """
    a, b = aligned_arrays(x, benchmark)
    if bins is None:
        bins = default_grid_bins(a.size)
    grid = JointGrid.build(a, b, bins, "equiprobable")
    h_x = grid.marginal_x()
    h_joint = grid.joint()
    h_b = grid.marginal_y()
    mi = mi_from_table(grid.counts)
    h_cond = h_joint - h_b
    if abs(h_x - mi - h_cond) > 1e-9 * max(1.0, abs(h_x)):
        raise ConsistencyError("entropy decomposition identity violated")
    return {"h_x": h_x, "mi": mi, "h_cond": h_cond, "bins": bins}
