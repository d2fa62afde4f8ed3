"""Simple undirected graphs and exact per-node neighbor-degree statistics.

The central quantities, for a node i with degree k_i:

    delta_i   = (1/k_i) sum_j A_ij k_j - k_i     (mean neighbor degree minus own)
    kappa_i   = sum_j A_ij / k_j                 (sum of reciprocal neighbor degrees)
    delta_x_i = (1/k_i) sum_j A_ij x_j - x_i     (attribute version)

Two exact identities anchor the whole package and are enforced to 1e-12:
mean(kappa) = 1 on any graph without isolated nodes, and
mean(delta_x) = Cov(x, kappa) with population (1/n) normalization.
Aggregates use compensated summation so the identities hold at that
tolerance independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .degree import JointDegree
from .errors import ParameterError, ParseError


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph in CSR-like adjacency form.

    indptr/adj hold sorted neighbor lists; labels keeps the original
    external node ids in index order.
    """

    indptr: np.ndarray
    adj: np.ndarray
    labels: tuple
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.adj) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.adj[self.indptr[i]:self.indptr[i + 1]]


def from_edges(u, v, labels, self_loops_dropped=0, duplicates_dropped=0) -> Graph:
    """Build a Graph from parallel endpoint index arrays (one entry per edge)."""
    n = len(labels)
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(indptr, dst, tuple(labels),
                 self_loops_dropped, duplicates_dropped)


def load_edge_list(source) -> Graph:
    """Parse a whitespace-separated edge list into a Graph.

    One edge per line as two node-id tokens; ids are arbitrary strings mapped
    to dense indices in first-appearance order.  Lines starting with '#' and
    blank lines are ignored.  Duplicate edges and self-loops are dropped and
    counted on the returned Graph.  Accepts a path, an open text file, or any
    iterable of lines.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source) as fh:
            return load_edge_list(fh)
    index = {}
    labels = []
    seen = set()
    us, vs = [], []
    self_loops = 0
    dups = 0
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode()
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected two node ids, got {len(tokens)}: {line!r}",
                             line_no=line_no)
        pair = []
        for tok in tokens:
            idx = index.get(tok)
            if idx is None:
                idx = index[tok] = len(labels)
                labels.append(tok)
            pair.append(idx)
        a, b = pair
        if a == b:
            self_loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            dups += 1
            continue
        seen.add(key)
        us.append(a)
        vs.append(b)
    return from_edges(us, vs, labels, self_loops, dups)


def remove_isolates(g: Graph) -> Graph:
    """Drop all degree-0 nodes, compacting indices; labels are preserved."""
    deg = g.degrees
    keep = deg > 0
    if keep.all():
        return g
    old_to_new = np.full(g.n, -1, dtype=np.int64)
    old_to_new[keep] = np.arange(int(keep.sum()))
    new_labels = tuple(lab for lab, k in zip(g.labels, keep) if k)
    new_indptr = np.concatenate([[0], np.cumsum(deg[keep])])
    new_adj = old_to_new[g.adj[np.repeat(keep, deg)]]
    return Graph(new_indptr.astype(np.int64), new_adj, new_labels,
                 g.self_loops_dropped, g.duplicates_dropped)


@dataclass(frozen=True)
class NodeStats:
    """Per-node paradox quantities; delta_x and x present only with attributes."""

    delta: np.ndarray
    kappa: np.ndarray
    x: np.ndarray | None = None
    delta_x: np.ndarray | None = None


def node_stats(g: Graph, x=None) -> NodeStats:
    """Exact delta_i, kappa_i (and delta_x_i when attribute values are given).

    Requires every node to have degree >= 1; run remove_isolates first.
    """
    deg = g.degrees.astype(float)
    if g.n == 0:
        raise ParameterError("empty graph has no node statistics")
    if deg.min() < 1:
        raise ParameterError("graph has degree-0 nodes; remove isolates first")
    nbr_deg = deg[g.adj]
    sums = np.add.reduceat(nbr_deg, g.indptr[:-1])
    delta = sums / deg - deg
    kappa = np.add.reduceat(1.0 / deg[g.adj], g.indptr[:-1])
    if x is None:
        return NodeStats(delta, kappa)
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ParameterError(f"attribute vector length {x.shape} != n={g.n}")
    if not np.isfinite(x).all():
        raise ParameterError("attribute values must be finite")
    xsums = np.add.reduceat(x[g.adj], g.indptr[:-1])
    delta_x = xsums / deg - x
    return NodeStats(delta, kappa, x=x, delta_x=delta_x)


@dataclass(frozen=True)
class ParadoxSummary:
    mean_delta: float
    var_delta: float
    frac_delta_pos: float
    frac_delta_zero: float
    frac_delta_neg: float
    mean_kappa: float
    cov_x_kappa: float | None = None
    mean_delta_x: float | None = None


def _fmean(a) -> float:
    return math.fsum(a) / len(a)


def _fcov(a, b) -> float:
    # population covariance, compensated
    ma, mb = _fmean(a), _fmean(b)
    return math.fsum((x - ma) * (y - mb) for x, y in zip(a, b)) / len(a)


def paradox_summary(stats: NodeStats) -> ParadoxSummary:
    """Aggregate node statistics; strict sign buckets for delta.

    Population (1/n) normalization throughout, so mean(delta_x) and
    Cov(x, kappa) agree to machine precision.
    """
    d = stats.delta
    n = len(d)
    mean_d = _fmean(d)
    var_d = math.fsum((di - mean_d) ** 2 for di in d) / n
    out = dict(
        mean_delta=mean_d,
        var_delta=var_d,
        frac_delta_pos=float(np.count_nonzero(d > 0) / n),
        frac_delta_zero=float(np.count_nonzero(d == 0) / n),
        frac_delta_neg=float(np.count_nonzero(d < 0) / n),
        mean_kappa=_fmean(stats.kappa),
    )
    if stats.delta_x is not None:
        out["mean_delta_x"] = _fmean(stats.delta_x)
        out["cov_x_kappa"] = _fcov(stats.x, stats.kappa)
    return ParadoxSummary(**out)


def assortativity(g: Graph) -> float:
    """Pearson correlation of degrees across edge ends (both orientations).

    Returns NaN when the edge-end degree variance vanishes (regular graphs,
    or no edges): the coefficient is undefined there, not an error.
    """
    if g.m == 0:
        return float("nan")
    deg = g.degrees.astype(float)
    src_deg = np.repeat(deg, g.degrees)
    dst_deg = deg[g.adj]
    mu = math.fsum(src_deg) / len(src_deg)
    var = math.fsum((d - mu) ** 2 for d in src_deg) / len(src_deg)
    if var <= 0:
        return float("nan")
    cov = math.fsum((a - mu) * (b - mu)
                    for a, b in zip(src_deg, dst_deg)) / len(src_deg)
    return cov / var


def empirical_joint(g: Graph) -> JointDegree:
    """Observed joint degree distribution over edges, both orientations."""
    if g.m == 0:
        raise ParameterError("graph has no edges")
    deg = g.degrees
    src_deg = np.repeat(deg, deg)
    dst_deg = deg[g.adj]
    kv = np.unique(deg[deg > 0])
    K = len(kv)
    idx = np.searchsorted(kv, src_deg) * K + np.searchsorted(kv, dst_deg)
    counts = np.bincount(idx, minlength=K * K).reshape(K, K)
    return JointDegree(kv, counts / counts.sum())
