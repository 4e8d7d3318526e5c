"""Maximal, minimal and random spanning trees grown edge by edge.

All three trees grow from a seed edge by repeatedly attaching one frontier
edge (an edge with exactly one endpoint in the tree).  MaxST/MinST take the
extremal-weight frontier edge, breaking ties by the smaller ``(i, j)``;
RanST takes a uniformly random one.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .visibility import VisibilityGraph

TREE_KINDS = ("MaxST", "MinST", "RanST")


class DisconnectedGraphError(ValueError):
    """The input graph has no spanning tree."""


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """A spanning tree kept in parent-pointer form.

    ``parent[root] == -1``.  The root here is simply where growth started;
    :mod:`vgallometry.allometry` re-roots the tree before measuring it.
    """

    kind: str
    n: int
    parent: np.ndarray = field(repr=False)
    root: int
    weight: np.ndarray = field(repr=False)  # weight of the edge to the parent, 0 at root

    def edges(self) -> np.ndarray:
        """``(n-1, 2)`` array of ``(min, max)`` node pairs, sorted."""
        child = np.flatnonzero(self.parent >= 0)
        par = self.parent[child]
        pairs = np.column_stack((np.minimum(child, par), np.maximum(child, par)))
        return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges()}

    def degrees(self) -> np.ndarray:
        child = np.flatnonzero(self.parent >= 0)
        return np.bincount(np.concatenate((child, self.parent[child])), minlength=self.n)

    def total_weight(self) -> float:
        return float(self.weight[self.parent >= 0].sum())

    def reroot(self, root: int) -> "SpanningTree":
        if not 0 <= root < self.n:
            raise IndexError(f"root {root} out of range")
        parent = self.parent.copy()
        weight = self.weight.copy()
        # reverse the pointers along the path from the new root to the old one
        prev, prev_w, node = -1, 0.0, root
        while node != -1:
            nxt, nxt_w = int(parent[node]), float(weight[node])
            parent[node], weight[node] = prev, prev_w
            prev, prev_w, node = node, nxt_w, nxt
        return SpanningTree(self.kind, self.n, parent, root, weight)


def _incidence(g: VisibilityGraph) -> tuple[np.ndarray, np.ndarray]:
    """CSR incidence: edges touching node v are ``index[offset[v]:offset[v+1]]``."""
    ends = np.concatenate((g.src, g.dst))
    edge_ids = np.concatenate((np.arange(g.n_edges), np.arange(g.n_edges)))
    order = np.argsort(ends, kind="stable")
    offset = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(ends, minlength=g.n), out=offset[1:])
    return offset, edge_ids[order].astype(np.int64)


@njit(cache=True)
def _grow_by_rank(n, src, dst, rank, offset, index):
    # rank[e] is the priority of edge e (0 = best); a heap of ranks picks the
    # best frontier edge.  Stale entries (both ends already in) are skipped.
    m = src.size
    by_rank = np.empty(m, dtype=np.int64)
    by_rank[rank] = np.arange(m)
    parent = np.full(n, -1, dtype=np.int64)
    via = np.full(n, -1, dtype=np.int64)
    if n == 1:
        return parent, via, 0, 1
    if m == 0:
        return parent, via, 0, 1
    in_tree = np.zeros(n, dtype=np.bool_)
    seed = by_rank[0]
    root = src[seed]
    other = dst[seed]
    in_tree[root] = True
    in_tree[other] = True
    parent[other] = root
    via[other] = seed
    added = 2
    heap = [np.int64(0)]
    heap.pop()
    for v in (root, other):
        for t in range(offset[v], offset[v + 1]):
            e = index[t]
            if not (in_tree[src[e]] and in_tree[dst[e]]):
                heapq.heappush(heap, rank[e])
    while added < n and len(heap) > 0:
        e = by_rank[heapq.heappop(heap)]
        a = src[e]
        b = dst[e]
        if in_tree[a] and in_tree[b]:
            continue
        if in_tree[a]:
            new, old = b, a
        else:
            new, old = a, b
        in_tree[new] = True
        parent[new] = old
        via[new] = e
        added += 1
        for t in range(offset[new], offset[new + 1]):
            f = index[t]
            if not (in_tree[src[f]] and in_tree[dst[f]]):
                heapq.heappush(heap, rank[f])
    return parent, via, root, added


@njit(cache=True)
def _grow_random(n, src, dst, offset, index, u):
    # u holds uniforms on [0, 1); u[0] picks the seed edge, the rest index the
    # candidate list.  Candidates whose far end has since joined are removed
    # when drawn, so accepted draws are uniform over the live frontier.
    m = src.size
    parent = np.full(n, -1, dtype=np.int64)
    via = np.full(n, -1, dtype=np.int64)
    if n == 1 or m == 0:
        return parent, via, 0, 1
    in_tree = np.zeros(n, dtype=np.bool_)
    seed = min(int(u[0] * m), m - 1)
    root = src[seed]
    other = dst[seed]
    in_tree[root] = True
    in_tree[other] = True
    parent[other] = root
    via[other] = seed
    added = 2
    cand = np.empty(m, dtype=np.int64)
    size = 0
    for v in (root, other):
        for t in range(offset[v], offset[v + 1]):
            e = index[t]
            if not (in_tree[src[e]] and in_tree[dst[e]]):
                cand[size] = e
                size += 1
    draw = 1
    while added < n and size > 0:
        k = min(int(u[draw] * size), size - 1)
        draw += 1
        e = cand[k]
        a = src[e]
        b = dst[e]
        size -= 1
        cand[k] = cand[size]
        if in_tree[a] and in_tree[b]:
            continue
        if in_tree[a]:
            new, old = b, a
        else:
            new, old = a, b
        in_tree[new] = True
        parent[new] = old
        via[new] = e
        added += 1
        for t in range(offset[new], offset[new + 1]):
            f = index[t]
            if not (in_tree[src[f]] and in_tree[dst[f]]):
                cand[size] = f
                size += 1
    return parent, via, root, added


def _finish(kind: str, g: VisibilityGraph, parent, via, root, added) -> SpanningTree:
    if added < g.n:
        raise DisconnectedGraphError(
            f"graph with {g.n} nodes is disconnected; tree reached only {added}")
    weight = np.where(via >= 0, g.weight[np.maximum(via, 0)], 0.0)
    return SpanningTree(kind, g.n, parent, int(root), weight)


def _extremal_tree(g: VisibilityGraph, kind: str) -> SpanningTree:
    key = -g.weight if kind == "MaxST" else g.weight
    order = np.lexsort((g.dst, g.src, key))
    rank = np.empty(g.n_edges, dtype=np.int64)
    rank[order] = np.arange(g.n_edges)
    offset, index = _incidence(g)
    return _finish(kind, g, *_grow_by_rank(g.n, g.src, g.dst, rank, offset, index))


def max_spanning_tree(g: VisibilityGraph) -> SpanningTree:
    return _extremal_tree(g, "MaxST")


def min_spanning_tree(g: VisibilityGraph) -> SpanningTree:
    return _extremal_tree(g, "MinST")


def random_spanning_tree(g: VisibilityGraph, rng_seed: int) -> SpanningTree:
    # each edge enters the candidate list at most once, so n + m draws suffice
    u = np.random.default_rng(rng_seed).random(g.n + g.n_edges + 1)
    offset, index = _incidence(g)
    return _finish("RanST", g, *_grow_random(g.n, g.src, g.dst, offset, index, u))


def spanning_tree(g: VisibilityGraph, kind: str, rng_seed: int = 0) -> SpanningTree:
    if kind == "MaxST":
        return max_spanning_tree(g)
    if kind == "MinST":
        return min_spanning_tree(g)
    if kind == "RanST":
        return random_spanning_tree(g, rng_seed)
    raise ValueError(f"tree kind must be one of {TREE_KINDS}, got {kind!r}")


def write_tree_csv(t: SpanningTree, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("child", "parent"))
        for child, par in enumerate(t.parent.tolist()):
            writer.writerow((child, "" if par < 0 else par))
