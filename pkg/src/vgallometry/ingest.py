"""Loading, cleaning and transforming price series."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CANONICAL_HEADER = ("index", "price")


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Positive price sequence on an integer trading-day axis 0..N-1."""

    label: str
    prices: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        prices = np.array(self.prices, dtype=np.float64)
        if prices.ndim != 1:
            raise ValueError("prices must be one-dimensional")
        if prices.size < 3:
            raise ValueError(f"need at least 3 prices, got {prices.size}")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise ValueError("prices must be finite and strictly positive")
        prices.setflags(write=False)
        object.__setattr__(self, "prices", prices)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.prices.size)

    def __len__(self) -> int:
        return self.prices.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.prices, other.prices)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    label: str
    returns: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        returns = np.array(self.returns, dtype=np.float64)
        if returns.ndim != 1 or not np.all(np.isfinite(returns)):
            raise ValueError("returns must be a finite one-dimensional sequence")
        returns.setflags(write=False)
        object.__setattr__(self, "returns", returns)

    def __len__(self) -> int:
        return self.returns.size


def _parse_price(text: str) -> float | None:
    try:
        value = float(text)
    except (TypeError, ValueError):
        return None
    if not math.isfinite(value) or value <= 0:
        return None
    return value


def load_price_csv(path, column: str = "Close", date_column: str = "Date",
                   label: str | None = None) -> PriceSeries:
    """Read a vendor-style CSV (e.g. a Yahoo Finance download).

    Rows are sorted by ISO ``yyyy-mm-dd`` date, rows whose price is missing,
    non-numeric, non-finite or non-positive are dropped, and the surviving
    rows are re-indexed 0..N-1.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in (column, date_column):
            if name not in header:
                raise KeyError(f"column {name!r} not found in {path} (header: {header})")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            raw_date = (row[date_column] or "").strip()
            try:
                date = dt.date.fromisoformat(raw_date)
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: date {raw_date!r} is not ISO yyyy-mm-dd") from None
            price = _parse_price(row[column])
            if price is not None:
                rows.append((date, price))
    # stable sort keeps file order among equal dates
    rows.sort(key=lambda r: r[0])
    if len(rows) < 3:
        raise ValueError(f"{path}: only {len(rows)} valid rows, need at least 3")
    return PriceSeries(label or path.stem, np.array([p for _, p in rows]))


def write_series_csv(s: PriceSeries, path) -> None:
    """Write the canonical two-column ``index,price`` form."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CANONICAL_HEADER)
        for t, p in enumerate(s.prices):
            writer.writerow((t, repr(float(p))))


def read_series_csv(path, label: str | None = None) -> PriceSeries:
    """Read the canonical ``index,price`` form written by :func:`write_series_csv`."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CANONICAL_HEADER:
            raise ValueError(f"{path}: expected header 'index,price', got {header}")
        rows = [(int(r[0]), float(r[1])) for r in reader if r]
    rows.sort()
    return PriceSeries(label or path.stem, np.array([p for _, p in rows]))


def load_series(path, column: str = "Close", date_column: str = "Date") -> PriceSeries:
    """Load either the canonical form or a dated vendor CSV, by sniffing the header."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    if tuple(h.strip() for h in header) == CANONICAL_HEADER:
        return read_series_csv(path)
    return load_price_csv(path, column=column, date_column=date_column)


def log_returns(s: PriceSeries) -> ReturnSeries:
    return ReturnSeries(s.label, np.diff(np.log(s.prices)))


def prices_from_returns(r: ReturnSeries, p0: float, label: str | None = None) -> PriceSeries:
    """Rebuild prices with ``prices[t+1] = prices[t] * exp(returns[t])``."""
    if not p0 > 0:
        raise ValueError("p0 must be positive")
    log_path = np.concatenate(([0.0], np.cumsum(r.returns)))
    return PriceSeries(r.label if label is None else label, p0 * np.exp(log_path))


def random_subseries(s: PriceSeries, length: int, rng_seed: int) -> PriceSeries:
    """Contiguous window of ``length`` points with a uniformly random start."""
    n = len(s)
    if not 3 <= length <= n:
        raise ValueError(f"subseries length must lie in [3, {n}], got {length}")
    start = int(np.random.default_rng(rng_seed).integers(0, n - length + 1))
    return PriceSeries(s.label, s.prices[start:start + length])
