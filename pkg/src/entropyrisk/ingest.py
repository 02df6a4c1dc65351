"""CSV price ingestion, log returns and moment statistics.

Two CSV layouts are accepted:

* long: header ``date,ticker,close``, one row per (date, ticker);
* wide: header ``date,<ticker1>,<ticker2>,...``, empty cell means missing.

Dates must be ISO-8601 (``YYYY-MM-DD``). They are kept as strings and only
used for ordering and alignment.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, DataError, FormatError, InsufficientDataError

logger = logging.getLogger(__name__)

MIN_ROWS = 30


@dataclass(frozen=True)
class PriceSeries:
    ticker: str
    dates: tuple[str, ...]
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(prices):
            raise DataError(f"{self.ticker}: {len(self.dates)} dates for {len(prices)} prices")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise DataError(f"{self.ticker}: dates are not strictly increasing")
        bad = np.flatnonzero(~(prices > 0))
        if bad.size:
            i = bad[0]
            raise DataError(f"{self.ticker}: non-positive price {prices[i]!r} on {self.dates[i]}")

    def __len__(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns of one instrument, labelled by the later date of each pair."""

    ticker: str
    dates: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(values):
            raise DataError(f"{self.ticker}: {len(self.dates)} dates for {len(values)} values")
        if not np.all(np.isfinite(values)):
            raise DataError(f"{self.ticker}: non-finite return")

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_array(cls, values, ticker: str = "X") -> "ReturnSeries":
        """Wrap a bare array, labelling observations ``t000000, t000001, ...``."""
        values = np.asarray(values, dtype=float)
        return cls(ticker, tuple(f"t{i:06d}" for i in range(len(values))), values)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    variance: float
    std_dev: float
    skewness: float | None
    excess_kurtosis: float | None


def as_array(x) -> np.ndarray:
    """Return the numeric values of a ReturnSeries or array-like as float64."""
    if isinstance(x, ReturnSeries):
        return x.values
    return np.asarray(x, dtype=float).ravel()


def aligned_arrays(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Return the values of two series, checking that they are paired."""
    if isinstance(x, ReturnSeries) and isinstance(y, ReturnSeries) and x.dates != y.dates:
        raise AlignmentError(f"{x.ticker} and {y.ticker} are not date-aligned")
    a, b = as_array(x), as_array(y)
    if a.shape != b.shape:
        raise AlignmentError(f"length mismatch: {a.size} vs {b.size}")
    return a, b


def align(series: Sequence[ReturnSeries]) -> list[ReturnSeries]:
    """Restrict every series to the dates common to all of them."""
    if not series:
        return []
    common = set(series[0].dates)
    for s in series[1:]:
        common &= set(s.dates)
    out = []
    for s in series:
        keep = np.fromiter((d in common for d in s.dates), dtype=bool, count=len(s))
        out.append(ReturnSeries(s.ticker, tuple(np.asarray(s.dates, dtype=object)[keep]), s.values[keep]))
    return out


def _parse_date(text: str, line: int) -> str:
    text = text.strip()
    try:
        _dt.date.fromisoformat(text)
    except ValueError:
        raise FormatError(f"not an ISO-8601 date: {text!r}", line) from None
    return text


def _parse_price(text: str, line: int) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise FormatError(f"not a finite number: {text!r}", line)
    return value


def _read_rows(path) -> list[list[str]]:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise FormatError(f"not UTF-8: {exc}") from None
    return list(csv.reader(io.StringIO(text, newline="")))


def detect_format(path) -> str:
    """Guess ``"long"`` or ``"wide"`` from the header row."""
    rows = _read_rows(path)
    if not rows:
        raise FormatError("empty file", 1)
    header = [h.strip().lower() for h in rows[0]]
    return "long" if header == ["date", "ticker", "close"] else "wide"


def load_prices(path, format: str = "wide", min_rows: int = MIN_ROWS) -> list[PriceSeries]:
    """Read a price CSV into one PriceSeries per ticker, sorted by ticker.

    Parameters
    ----------
    path : path-like
        UTF-8 CSV file, LF or CRLF line endings.
    format : {"wide", "long", "auto"}
        Layout of the file.
    min_rows : int
        Minimum usable (non-missing) rows per ticker.

    Raises
    ------
    FormatError
        Unparseable content; the message carries the 1-based line number.
    DataError
        Non-positive price or duplicated date, naming ticker and date.
    InsufficientDataError
        A ticker has fewer than ``min_rows`` usable rows.
    """
    if format == "auto":
        format = detect_format(path)
    if format not in ("wide", "long"):
        raise ValueError(f"unknown format {format!r}")
    rows = _read_rows(path)
    if not rows:
        raise FormatError("empty file", 1)

    header = [h.strip() for h in rows[0]]
    columns: dict[str, dict[str, float]] = {}
    if format == "long":
        if [h.lower() for h in header] != ["date", "ticker", "close"]:
            raise FormatError(f"expected header date,ticker,close, got {','.join(header)}", 1)
        for line, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise FormatError(f"expected 3 fields, got {len(row)}", line)
            date = _parse_date(row[0], line)
            ticker = row[1].strip()
            if not ticker:
                raise FormatError("empty ticker", line)
            price = _parse_price(row[2], line)
            if price is None:
                continue
            per = columns.setdefault(ticker, {})
            if date in per:
                raise DataError(f"{ticker}: duplicate date {date}")
            per[date] = price
    else:
        if len(header) < 2 or header[0].lower() != "date":
            raise FormatError("expected header date,<ticker1>,...", 1)
        tickers = header[1:]
        if any(not t for t in tickers) or len(set(tickers)) != len(tickers):
            raise FormatError("empty or duplicated ticker in header", 1)
        for t in tickers:
            columns[t] = {}
        for line, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} fields, got {len(row)}", line)
            date = _parse_date(row[0], line)
            for t, cell in zip(tickers, row[1:]):
                price = _parse_price(cell, line)
                if price is None:
                    continue
                if date in columns[t]:
                    raise DataError(f"{t}: duplicate date {date}")
                columns[t][date] = price

    out = []
    for ticker in sorted(columns):
        per = columns[ticker]
        for date, price in per.items():
            if price <= 0:
                raise DataError(f"{ticker}: non-positive price {price!r} on {date}")
        if len(per) < min_rows:
            raise InsufficientDataError(f"{ticker}: {len(per)} usable rows, need {min_rows}")
        dates = sorted(per)
        out.append(PriceSeries(ticker, tuple(dates), np.array([per[d] for d in dates])))
    return out


def write_prices_wide(dest, series: Iterable[PriceSeries]) -> None:
    """Write price series in the wide layout to a path or open text file.

    Missing cells are left empty; prices are written with ``repr`` so they
    round-trip exactly.
    """
    series = list(series)
    dates = sorted(set().union(*(s.dates for s in series))) if series else []
    lookup = [dict(zip(s.dates, s.prices)) for s in series]

    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date"] + [s.ticker for s in series])
        for d in dates:
            w.writerow([d] + [repr(float(m[d])) if d in m else "" for m in lookup])

    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            _write(fh)


def log_returns(p: PriceSeries) -> ReturnSeries:
    """``values[t] = ln(prices[t+1] / prices[t])``, dated at ``t+1``."""
    if len(p) < 2:
        raise InsufficientDataError(f"{p.ticker}: need at least 2 prices")
    return ReturnSeries(p.ticker, p.dates[1:], np.diff(np.log(p.prices)))


def describe(r, ddof: int = 0) -> SummaryStats:
    """Moment summary of a return series.

    Skewness is ``m3 / m2**1.5`` and excess kurtosis ``m4 / m2**2 - 3`` with
    central moments taken over ``n``. ``ddof`` only changes the reported
    variance and standard deviation. Both shape statistics are ``None`` when
    the sample has zero variance.
    """
    x = as_array(r)
    n = x.size
    if n < 2:
        raise InsufficientDataError("describe needs at least 2 observations")
    if np.all(x == x[0]):
        v = float(x[0])
        return SummaryStats(n, v, 0.0, 0.0, None, None)
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    variance = m2 * n / (n - ddof)
    skew = float(np.mean(d**3) / m2**1.5)
    kurt = float(np.mean(d**4) / m2**2 - 3.0)
    return SummaryStats(n, mean, variance, math.sqrt(variance), skew, kurt)
