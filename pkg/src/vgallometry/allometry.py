"""Allometric scaling of rooted spanning trees.

Each node gets ``A = 1 + sum(A over children)`` and
``C = A + sum(C over children)``; the exponent ``eta`` is the OLS slope of
``ln C`` against ``ln A`` over non-leaf nodes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit

from .spanning import SpanningTree
from .stats import ols


class FitError(ValueError):
    """Too few usable non-leaf points to fit a scaling exponent."""


@dataclass(frozen=True, eq=False)
class AllometryResult:
    root: int
    A: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    eta: float | None = None
    eta_stderr: float | None = None
    intercept: float | None = None
    n_fit_points: int | None = None
    r_squared: float | None = None

    @property
    def is_leaf(self) -> np.ndarray:
        return self.A == 1

    @property
    def fitted(self) -> bool:
        return self.eta is not None


def choose_root(t: SpanningTree) -> int:
    """Node of maximum degree within the tree; smallest index on ties."""
    return int(np.argmax(t.degrees()))


@njit(cache=True)
def _accumulate(parent, root):
    n = parent.size
    # children lists in CSR form
    count = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        if parent[v] >= 0:
            count[parent[v] + 1] += 1
    for v in range(n):
        count[v + 1] += count[v]
    fill = count[:-1].copy()
    children = np.empty(max(n - 1, 0), dtype=np.int64)
    for v in range(n):
        if parent[v] >= 0:
            children[fill[parent[v]]] = v
            fill[parent[v]] += 1
    order = np.empty(n, dtype=np.int64)
    order[0] = root
    head, tail = 0, 1
    while head < tail:
        v = order[head]
        head += 1
        for t in range(count[v], count[v + 1]):
            order[tail] = children[t]
            tail += 1
    A = np.ones(n, dtype=np.int64)
    C = np.zeros(n, dtype=np.int64)
    for idx in range(n - 1, -1, -1):
        v = order[idx]
        C[v] += A[v]
        p = parent[v]
        if p >= 0:
            A[p] += A[v]
            C[p] += C[v]
    return A, C, tail


def compute_ac(t: SpanningTree, root: int | None = None) -> AllometryResult:
    """Orient the tree away from ``root`` (default: :func:`choose_root`) and fill A, C."""
    if root is None:
        root = choose_root(t)
    if not 0 <= root < t.n:
        raise IndexError(f"root {root} out of range for a tree of {t.n} nodes")
    rooted = t if t.root == root else t.reroot(root)
    A, C, reached = _accumulate(rooted.parent, root)
    if reached != t.n:
        raise ValueError("parent array does not describe a single tree")
    return AllometryResult(root=root, A=A, C=C)


def fit_eta(r: AllometryResult) -> AllometryResult:
    """Fit ``ln C = c0 + eta ln A`` over non-leaf nodes, one point per node."""
    mask = r.A > 1
    a_vals, c_vals = r.A[mask], r.C[mask]
    if a_vals.size < 3 or np.unique(a_vals).size < 2:
        raise FitError(
            f"need >= 3 non-leaf nodes with >= 2 distinct A values, "
            f"got {a_vals.size} nodes and {np.unique(a_vals).size} distinct A")
    reg = ols(np.log(a_vals), np.log(c_vals))
    return replace(r, eta=reg.b, eta_stderr=reg.stderr_b, intercept=reg.a,
                   n_fit_points=int(a_vals.size), r_squared=reg.r_squared)


def tree_eta(t: SpanningTree) -> AllometryResult:
    """Root at the maximum-degree node, compute A and C, and fit."""
    return fit_eta(compute_ac(t))


def binned_eta(r: AllometryResult, bins_per_decade: int = 10) -> float:
    """Slope over log-binned (mean ln A, mean ln C) points.

    Diagnostic only; the reported exponent is the unbinned fit.
    """
    mask = r.A > 1
    la, lc = np.log(r.A[mask]), np.log(r.C[mask])
    edges = np.arange(0.0, la.max() + 1e-9 + np.log(10) / bins_per_decade,
                      np.log(10) / bins_per_decade)
    idx = np.digitize(la, edges)
    keys = np.unique(idx)
    xs = np.array([la[idx == k].mean() for k in keys])
    ys = np.array([lc[idx == k].mean() for k in keys])
    if xs.size < 3:
        raise FitError("too few occupied bins")
    return ols(xs, ys).b


def write_ac_csv(r: AllometryResult, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("node", "A", "C", "is_leaf"))
        for node, (a, c) in enumerate(zip(r.A.tolist(), r.C.tolist())):
            writer.writerow((node, a, c, int(a == 1)))
