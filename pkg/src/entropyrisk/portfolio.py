"""Random equal-weight portfolios and the diversification curve."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .entropy import HistogramSpec, differential_entropy
from .errors import AlignmentError, DomainError
from .ingest import ReturnSeries


@dataclass(frozen=True)
class Portfolio:
    tickers: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        if w.shape != (len(self.tickers),):
            raise DomainError("one weight per ticker required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be non-negative and sum to 1")

    @classmethod
    def equal(cls, tickers: Sequence[str]) -> "Portfolio":
        k = len(tickers)
        return cls(tuple(tickers), np.full(k, 1.0 / k))


@dataclass(frozen=True)
class DiversificationCurve:
    k: np.ndarray
    avg_std: np.ndarray
    avg_entropy: np.ndarray
    replications: int
    seed: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "avg_std", "avg_entropy"])
            for k, s, h in zip(self.k, self.avg_std, self.avg_entropy):
                w.writerow([int(k), f"{s:.12g}", f"{h:.12g}"])


def _universe_map(universe) -> dict[str, ReturnSeries]:
    if isinstance(universe, Mapping):
        return dict(universe)
    return {s.ticker: s for s in universe}


def portfolio_returns(universe, p: Portfolio) -> ReturnSeries:
    """Weighted sum of member log returns (first-order approximation of the portfolio log return)."""
    u = _universe_map(universe)
    missing = [t for t in p.tickers if t not in u]
    if missing:
        raise DomainError(f"unknown tickers: {', '.join(missing)}")
    members = [u[t] for t in p.tickers]
    dates = members[0].dates
    for s in members[1:]:
        if s.dates != dates:
            raise AlignmentError(f"{s.ticker} is not aligned with {members[0].ticker}")
    values = np.stack([s.values for s in members]).T @ p.weights
    return ReturnSeries("+".join(p.tickers), dates, values)


def diversification_curve(universe, max_k: int | None = None, replications: int = 200,
                          seed: int = 0, spec: HistogramSpec | None = None) -> DiversificationCurve:
    """Average std-dev and entropy of random equal-weight k-asset portfolios.

    Each (k, replication) pair draws its subset from its own generator
    seeded with ``(seed, k, replication)``, so results do not depend on
    evaluation order. When ``k`` equals the universe size the only subset
    is evaluated once.
    """
    u = _universe_map(universe)
    tickers = sorted(u)
    size = len(tickers)
    max_k = size if max_k is None else int(max_k)
    if not 1 <= max_k <= size:
        raise DomainError(f"max_k={max_k} outside 1..{size}")
    if replications < 1:
        raise DomainError("replications must be >= 1")
    dates = u[tickers[0]].dates
    for t in tickers[1:]:
        if u[t].dates != dates:
            raise AlignmentError(f"{t} is not aligned with {tickers[0]}")
    matrix = np.stack([u[t].values for t in tickers])  # (assets, n)

    ks = np.arange(1, max_k + 1)
    avg_std = np.empty(max_k)
    avg_h = np.empty(max_k)
    for i, k in enumerate(ks):
        reps = 1 if k == size else replications
        stds = np.empty(reps)
        hs = np.empty(reps)
        for rep in range(reps):
            rng = np.random.default_rng([seed, int(k), rep])
            members = np.sort(rng.choice(size, size=int(k), replace=False))
            r = matrix[members].mean(axis=0)
            stds[rep] = r.std()
            hs[rep] = differential_entropy(r, spec).value
        avg_std[i] = stds.mean()
        avg_h[i] = hs.mean()
    return DiversificationCurve(ks, avg_std, avg_h, replications, seed)
