"""Weighted natural visibility graphs of price series.

Two points ``i < j`` see each other when every intermediate point ``k``
satisfies ``(p[j] - p[k]) / (j - k) > (p[j] - p[i]) / (j - i)``.  A point
lying exactly on the sight line blocks it.  Each edge carries the average
log-price growth rate ``(ln p[j] - ln p[i]) / (j - i)`` by default; the
``"absolute"`` mode takes its magnitude and ``"linear"`` uses the plain
price slope ``(p[j] - p[i]) / (j - i)`` (for arithmetic random-walk paths).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .ingest import PriceSeries

WEIGHT_MODES = ("signed", "absolute", "linear")


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    """Undirected weighted graph stored as parallel edge arrays.

    Edges satisfy ``src < dst`` and are sorted lexicographically.
    """

    n: int
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.src.tolist(), self.dst.tolist()))

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def degrees(self) -> np.ndarray:
        return np.bincount(np.concatenate((self.src, self.dst)), minlength=self.n)

    def with_weights(self, weight) -> "VisibilityGraph":
        weight = np.asarray(weight, dtype=np.float64)
        if weight.shape != self.src.shape:
            raise ValueError("weight array does not match edge count")
        return VisibilityGraph(self.n, self.src, self.dst, weight)


def make_graph(n: int, edges) -> VisibilityGraph:
    """Build a graph from ``(i, j, w)`` triples (any order, any orientation)."""
    triples = [(min(i, j), max(i, j), float(w)) for i, j, w in edges]
    if any(i == j for i, j, _ in triples):
        raise ValueError("self-loops are not allowed")
    if any(not 0 <= i < j < n for i, j, _ in triples):
        raise ValueError("edge endpoint out of range")
    triples.sort()
    if len({(i, j) for i, j, _ in triples}) != len(triples):
        raise ValueError("duplicate edges")
    src = np.array([t[0] for t in triples], dtype=np.int64)
    dst = np.array([t[1] for t in triples], dtype=np.int64)
    w = np.array([t[2] for t in triples], dtype=np.float64)
    return VisibilityGraph(n, src, dst, w)


def _check_pair(s: PriceSeries, i: int, j: int) -> None:
    if not 0 <= i < j < len(s):
        raise IndexError(f"need 0 <= i < j < {len(s)}, got i={i}, j={j}")


def visible(s: PriceSeries, i: int, j: int) -> bool:
    _check_pair(s, i, j)
    p = s.prices
    sight = (p[j] - p[i]) / (j - i)
    return all((p[j] - p[k]) / (j - k) > sight for k in range(i + 1, j))


def edge_weight(s: PriceSeries, i: int, j: int, mode: str = "signed") -> float:
    _check_pair(s, i, j)
    p = s.prices
    return float(_weights(p, np.array([i]), np.array([j]), mode)[0])


@njit(cache=True)
def _sweep_edges(p):
    # For each right end j, walk i leftwards keeping the minimum slope from
    # the points already passed to j; i is visible iff its own slope is lower.
    # Stop early once (p[j] - max(p[:i+1])) / (j - i) bounds every remaining
    # slope from below at or above that minimum.  Rounded subtraction and
    # division are monotone, so the bound also holds for the computed slopes.
    n = p.size
    prefix_max = np.empty(n)
    top = -np.inf
    for k in range(n):
        top = max(top, p[k])
        prefix_max[k] = top
    cap = 4 * n
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    m = 0
    for j in range(1, n):
        lowest = np.inf
        pj = p[j]
        for i in range(j - 1, -1, -1):
            if (j - i) % 8 == 0:
                rise = pj - prefix_max[i]
                bound = rise / (j - i) if rise < 0 else 0.0
                if bound >= lowest:
                    break
            slope = (pj - p[i]) / (j - i)
            if lowest > slope:
                if m == cap:
                    cap *= 2
                    src2 = np.empty(cap, dtype=np.int64)
                    dst2 = np.empty(cap, dtype=np.int64)
                    src2[:m] = src[:m]
                    dst2[:m] = dst[:m]
                    src = src2
                    dst = dst2
                src[m] = i
                dst[m] = j
                m += 1
                lowest = slope
    return src[:m], dst[:m]


@njit(cache=True)
def _naive_edges(p):
    n = p.size
    src = []
    dst = []
    for i in range(n):
        for j in range(i + 1, n):
            sight = (p[j] - p[i]) / (j - i)
            ok = True
            for k in range(i + 1, j):
                if not (p[j] - p[k]) / (j - k) > sight:
                    ok = False
                    break
            if ok:
                src.append(i)
                dst.append(j)
    return np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)


def _weights(p: np.ndarray, src: np.ndarray, dst: np.ndarray, mode: str) -> np.ndarray:
    if mode not in WEIGHT_MODES:
        raise ValueError(f"weight mode must be one of {WEIGHT_MODES}, got {mode!r}")
    if mode == "linear":
        return (p[dst] - p[src]) / (dst - src)
    logp = np.log(p)
    w = (logp[dst] - logp[src]) / (dst - src)
    return np.abs(w) if mode == "absolute" else w


def build_visibility_graph(s: PriceSeries, weight_mode: str = "signed") -> VisibilityGraph:
    """O(n^2) sweep construction; the default builder."""
    p = np.ascontiguousarray(s.prices, dtype=np.float64)
    src, dst = _sweep_edges(p)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    return VisibilityGraph(p.size, src, dst, _weights(p, src, dst, weight_mode))


def build_visibility_graph_naive(s: PriceSeries, weight_mode: str = "signed") -> VisibilityGraph:
    """Check every intermediate point of every pair.  Test oracle, O(n^3)."""
    p = np.ascontiguousarray(s.prices, dtype=np.float64)
    src, dst = _naive_edges(p)
    return VisibilityGraph(p.size, src, dst, _weights(p, src, dst, weight_mode))


def write_edge_csv(g: VisibilityGraph, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("i", "j", "weight"))
        for i, j, w in g.edges():
            writer.writerow((i, j, repr(w)))
