"""Synthetic and surrogate series.

Brownian and fractional Brownian paths come in two forms:

* ``"level"`` (default): the cumulative sum itself, shifted by a constant so
  its minimum is ``p0``.  Visibility topology and ``"linear"`` edge weights
  are shift invariant, so this is the raw random-walk path.
* ``"log"``: increments are read as log-returns and exponentiated onto
  ``p0`` (a geometric walk).

Surrogates of a price series always work on its log-returns and rebuild
prices by exponentiation from the original starting price.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ingest import PriceSeries, ReturnSeries, log_returns, prices_from_returns

PATH_FORMS = ("level", "log")
DEFAULT_P0 = 100.0


class EmbeddingError(RuntimeError):
    """Circulant embedding produced negative eigenvalues even after padding."""


class SurrogateKind(enum.Enum):
    SURR1 = "Surr1"
    SURR2 = "Surr2"
    SURR3 = "Surr3"

    @classmethod
    def parse(cls, text: str) -> "SurrogateKind":
        for kind in cls:
            if kind.value.lower() == text.strip().lower():
                return kind
        raise ValueError(f"unknown surrogate kind {text!r}; expected surr1, surr2 or surr3")


@dataclass(frozen=True)
class FbmSpec:
    hurst: float
    length: int
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"Hurst index must lie strictly inside (0, 1), got {self.hurst}")
        if self.length < 3:
            raise ValueError(f"length must be >= 3, got {self.length}")


def _to_series(increments: np.ndarray, form: str, scale: float, label: str,
               p0: float = DEFAULT_P0) -> PriceSeries:
    if form not in PATH_FORMS:
        raise ValueError(f"path form must be one of {PATH_FORMS}, got {form!r}")
    steps = scale * increments
    if form == "log":
        return prices_from_returns(ReturnSeries(label, steps), p0)
    path = np.concatenate(([0.0], np.cumsum(steps)))
    return PriceSeries(label, path - path.min() + p0)


def gen_brownian(length: int, seed: int, form: str = "level", scale: float = 1.0) -> PriceSeries:
    """Random walk with i.i.d. N(0, scale^2) increments, ``length`` points."""
    if length < 3:
        raise ValueError(f"length must be >= 3, got {length}")
    increments = np.random.default_rng(seed).standard_normal(length - 1)
    return _to_series(increments, form, scale, f"bm-{seed}")


def fgn_autocovariance(hurst: float, lags) -> np.ndarray:
    k = np.abs(np.asarray(lags, dtype=np.float64))
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)


def fgn(n: int, hurst: float, rng: np.random.Generator, max_doublings: int = 4) -> np.ndarray:
    """Exact unit-variance fractional Gaussian noise by circulant embedding.

    The autocovariance row is embedded in a circulant of size ``2m`` with
    ``m`` the first power of two >= ``n``; ``m`` is doubled while any
    eigenvalue is negative.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m = 1 << max(n - 1, 1).bit_length()
    for _ in range(max_doublings + 1):
        gamma = fgn_autocovariance(hurst, np.arange(m + 1))
        row = np.concatenate((gamma, gamma[-2:0:-1]))
        eig = np.fft.fft(row).real
        if eig.min() >= -1e-10 * eig.max():
            break
        m *= 2
    else:
        raise EmbeddingError(f"circulant embedding failed for H={hurst}, n={n}")
    size = row.size
    eig = np.clip(eig, 0.0, None)
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    w = np.fft.fft(np.sqrt(eig / size) * z)
    return w.real[:n]


def gen_fbm(spec: FbmSpec, form: str = "level", scale: float = 1.0) -> PriceSeries:
    """Fractional Brownian path of ``spec.length`` points with Hurst index ``spec.hurst``."""
    rng = np.random.default_rng(spec.seed)
    if spec.hurst == 0.5:
        increments = rng.standard_normal(spec.length - 1)
    else:
        increments = fgn(spec.length - 1, spec.hurst, rng)
    return _to_series(increments, form, scale, f"fbm-H{spec.hurst:g}-{spec.seed}")


def rank_reorder(values, template) -> np.ndarray:
    """Rearrange ``values`` so their rank order matches that of ``template``."""
    values = np.asarray(values, dtype=np.float64)
    template = np.asarray(template)
    if values.shape != template.shape:
        raise ValueError("values and template must have the same shape")
    out = np.empty_like(values)
    out[np.argsort(template, kind="stable")] = np.sort(values, kind="stable")
    return out


def make_surrogate(s: PriceSeries, kind: SurrogateKind | str, seed: int) -> PriceSeries:
    """Surrogate price series of the same length as ``s``.

    Surr1 shuffles the log-returns.  Surr2 draws Gaussian returns with the
    original's mean and standard deviation and gives them the original's rank
    order.  Surr3 resamples the original returns with replacement and gives
    them the original's rank order.
    """
    if isinstance(kind, str):
        kind = SurrogateKind.parse(kind)
    rng = np.random.default_rng(seed)
    r = log_returns(s).returns
    if kind is SurrogateKind.SURR1:
        new = rng.permutation(r)
    elif kind is SurrogateKind.SURR2:
        new = rank_reorder(r.mean() + r.std() * rng.standard_normal(r.size), r)
    else:
        new = rank_reorder(rng.choice(r, size=r.size, replace=True), r)
    label = f"{s.label}-{kind.value.lower()}-{seed}"
    return prices_from_returns(ReturnSeries(label, new), float(s.prices[0]))


def gen_matched_brownian(s: PriceSeries, seed: int) -> PriceSeries:
    """Geometric walk with Gaussian returns matching the mean and std of ``s``'s returns."""
    r = log_returns(s).returns
    increments = r.mean() + r.std() * np.random.default_rng(seed).standard_normal(r.size)
    return prices_from_returns(ReturnSeries(f"{s.label}-bm-{seed}", increments),
                               float(s.prices[0]))


def gen_fat_tailed_series(length: int, seed: int, dof: float = 3.0, daily_vol: float = 0.01,
                          memory_hurst: float = 0.9, vol_of_vol: float = 0.5) -> PriceSeries:
    """Index-like test series: Student-t returns with long-memory volatility clustering.

    A template ``exp(vol_of_vol * x_t) * e_t`` (``x`` fractional Gaussian noise,
    ``e`` white noise) fixes the rank order; Student-t draws scaled to
    ``daily_vol`` are rearranged to follow it.
    """
    if length < 3:
        raise ValueError(f"length must be >= 3, got {length}")
    rng = np.random.default_rng(seed)
    n = length - 1
    log_vol = fgn(n, memory_hurst, rng)
    template = np.exp(vol_of_vol * log_vol) * rng.standard_normal(n)
    draws = rng.standard_t(dof, size=n) * daily_vol / np.sqrt(dof / (dof - 2.0))
    returns = rank_reorder(draws, template)
    return prices_from_returns(ReturnSeries(f"fat-tailed-{seed}", returns), DEFAULT_P0)
