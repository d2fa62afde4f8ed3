"""Seeded graph samplers for the three model families.

Every sampler takes an integer seed, draws from numpy's default_rng, and
returns (Graph, meta).  meta records the model parameters, the rng identity,
and all repair accounting (erased stubs, swap repairs, shortfall), so a run
is reproducible bit for bit from its metadata.
"""

from __future__ import annotations

import math

import numpy as np

from .degree import DegreeDistribution, JointDegree
from .errors import ConvergenceError, ParameterError
from .graph import Graph, from_edges

RNG_ID = "numpy-default_rng-PCG64"


def _base_meta(model, seed, **kw):
    meta = {"model": model, "seed": int(seed), "rng": RNG_ID}
    meta.update(kw)
    return meta


def sample_poisson_rg(n: int, lam: float, seed: int):
    """G(n, p) with p = lam / (n - 1), by geometric skipping over pairs.

    Runs in O(n + m): successive retained pair indices differ by iid
    geometric gaps, and linear indices are mapped back to pairs in closed
    form (with an integer correction after the float square root).
    """
    n = int(n)
    if n < 2:
        raise ParameterError("need at least two nodes")
    lam = float(lam)
    p = lam / (n - 1.0)
    if not (0.0 < p < 1.0):
        raise ParameterError(f"lambda {lam} gives edge probability {p} outside (0, 1)")
    rng = np.random.default_rng(seed)
    T = n * (n - 1) // 2
    log1mp = math.log1p(-p)
    chunks = []
    last = -1
    while last < T:
        remaining = (T - last) * p
        size = int(remaining + 10.0 * math.sqrt(remaining + 1.0)) + 64
        gaps = 1 + np.floor(np.log(rng.random(size)) / log1mp).astype(np.int64)
        pos = last + np.cumsum(gaps)
        chunks.append(pos)
        last = int(pos[-1])
    t = np.concatenate(chunks)
    t = t[t < T]
    # pair (i, j), i < j, at linear index t = j(j-1)/2 + i
    j = ((1.0 + np.sqrt(1.0 + 8.0 * t.astype(float))) / 2.0).astype(np.int64)
    j = np.where(j * (j - 1) // 2 > t, j - 1, j)
    j = np.where((j + 1) * j // 2 <= t, j + 1, j)
    i = t - j * (j - 1) // 2
    g = from_edges(i, j, labels=tuple(range(n)))
    meta = _base_meta("poisson", seed, n=n, lam=lam, edge_prob=p, m=g.m)
    return g, meta


def sample_configuration(p: DegreeDistribution, n: int, seed: int,
                         max_parity_redraw: int = 1000):
    """Configuration model with the erase policy for loops and multi-edges.

    Degrees are iid from p; an odd-sum draw is redrawn wholesale (this is the
    exact conditioning on even total).  Stubs are shuffled and paired; self
    loops and duplicate pairs are erased and counted.
    """
    n = int(n)
    if n < 2:
        raise ParameterError("need at least two nodes")
    rng = np.random.default_rng(seed)
    pk = p.pmf / p.pmf.sum()
    redraws = 0
    while True:
        degrees = rng.choice(p.k, size=n, p=pk)
        if int(degrees.sum()) % 2 == 0:
            break
        redraws += 1
        if redraws >= max_parity_redraw:
            raise ConvergenceError("could not draw an even-sum degree sequence",
                                   iterations=redraws)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    u, v = stubs[0::2], stubs[1::2]
    m_attempted = len(u)
    loops = u == v
    a = np.minimum(u[~loops], v[~loops])
    b = np.maximum(u[~loops], v[~loops])
    key = a * n + b
    _, first = np.unique(key, return_index=True)
    n_loops = int(loops.sum())
    n_dups = len(a) - len(first)
    g = from_edges(a[first], b[first], labels=tuple(range(n)),
                   self_loops_dropped=n_loops, duplicates_dropped=n_dups)
    erased = n_loops + n_dups
    meta = _base_meta("configuration", seed, n=n, m=g.m,
                      m_attempted=m_attempted, parity_redraws=redraws,
                      erased_self_loops=n_loops, erased_duplicates=n_dups,
                      erased_fraction=erased / max(m_attempted, 1))
    return g, meta


def _ipf_symmetric(Q, s, tol=1e-12, max_iter=20000):
    """Scale Q to Q'_jk = Q_jk u_j u_k with margins s; returns (Q', iters)."""
    u = np.ones(len(s))
    for it in range(1, max_iter + 1):
        row = u * (Q @ u)
        if np.max(np.abs(row - s)) < tol:
            N = Q * np.outer(u, u)
            return N / N.sum(), it
        u *= np.sqrt(s / np.maximum(row, 1e-300))
    raise ConvergenceError("margin rescaling of the joint did not converge",
                           residual=float(np.max(np.abs(row - s))),
                           iterations=max_iter)


def _capacity_project(t, cap, D, max_rounds=80):
    """Project upper-triangular cell targets onto simple-graph capacity.

    Alternates clipping t <= cap with symmetric margin rescaling back to the
    stub margins D (Bregman projections for the KL divergence, so the result
    is the least-distorted distribution with both properties).  Demand that a
    cell cannot carry moves to other cells in the same rows, keeping degrees
    exact instead of losing edges to erasure.
    """
    tt = t.copy()
    scale = max(float(D.sum()), 1.0)
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        if not np.any(tt > cap + 1e-9):
            break
        tt = np.minimum(tt, cap)
        ends = tt + tt.T                   # doubles the diagonal: two ends per loop-cell edge
        for _ in range(2000):
            row = ends.sum(axis=1)
            if np.max(np.abs(row - D)) < 1e-9 * scale:
                break
            u = np.sqrt(D / np.maximum(row, 1e-300))
            ends *= np.outer(u, u)
        tt = np.triu(ends, 1) + np.diag(np.diag(ends) / 2.0)
    tt = np.minimum(tt, cap)
    saturated = int(np.count_nonzero((tt > 0) & (tt >= cap - 1e-6)))
    return tt, saturated, rounds


def _round_cells(t, D, cap=None):
    """Integer edge counts per cell matching stub margins D exactly.

    t[j, k] (j <= k used) holds real-valued edge targets; floor first, then
    distribute remaining stubs by largest fractional part, then close any
    parity leftovers greedily (preferring cells below cap when given).
    Returns dict {(j, k): count} and the number of cleanup edges placed
    outside the fractional-remainder order.
    """
    K = len(D)
    cells = {}
    r = D.astype(np.int64).copy()
    fracs = []
    for j in range(K):
        for k in range(j, K):
            base = int(np.floor(t[j, k]))
            if base:
                cells[(j, k)] = base
                use = 2 * base if j == k else base
                r[j] -= base
                r[k] -= use - base if j == k else base
            f = t[j, k] - base
            if f > 1e-9:
                fracs.append((f, j, k))
    if np.any(r < 0):
        raise ConvergenceError("cell rounding overdrew a stub margin",
                               residual=float(r.min()))
    fracs.sort(key=lambda x: (-x[0], x[1], x[2]))
    for _, j, k in fracs:
        if cap is not None and cells.get((j, k), 0) + 1 > cap[j, k]:
            continue
        if j == k:
            if r[j] >= 2:
                cells[(j, k)] = cells.get((j, k), 0) + 1
                r[j] -= 2
        elif r[j] >= 1 and r[k] >= 1:
            cells[(j, k)] = cells.get((j, k), 0) + 1
            r[j] -= 1
            r[k] -= 1
    cleanup = 0
    while r.sum() > 0:
        order = np.argsort(-r, kind="stable")
        j = int(order[0])
        picked = None
        if K > 1 and r[order[1]] > 0:
            for cand in order[1:9]:
                k = int(cand)
                if r[k] <= 0:
                    break
                jj, kk = min(j, k), max(j, k)
                if cap is None or cells.get((jj, kk), 0) < cap[jj, kk]:
                    picked = (jj, kk)
                    break
            if picked is None:             # every candidate capped: overfill one
                k = int(order[1])
                picked = (min(j, k), max(j, k))
            r[picked[0]] -= 1
            r[picked[1]] -= 1
        else:
            if r[j] < 2:                   # odd leftover stub, drop it
                break
            picked = (j, j)                # lone class: close with a loop cell
            r[j] -= 2
        cells[picked] = cells.get(picked, 0) + 1
        cleanup += 1
    return cells, cleanup


def sample_degree_correlated(joint: JointDegree, m_edges: int, seed: int,
                             repair_rounds: int = 80):
    """Graph whose edge-end degree pairs follow the joint distribution Q.

    Node-first construction: degrees are drawn iid from the node law implied
    by the margins of Q (p_k proportional to q_k / k), so every node realizes
    its degree exactly.  Q is rescaled to the realized stub margins, the
    per-cell demand is projected onto simple-graph capacity (an assortative Q
    can ask for more edges between two small high-degree classes than
    distinct node pairs exist; clipping plus margin rescaling moves that
    demand to nearby cells instead of losing it to erasure, which would bias
    r downward), edge counts are rounded margin-exactly, and stubs are
    matched uniformly within cells.  Cells near capacity deal their stubs
    evenly over the class nodes, matching the conditioning a simple graph
    imposes there.  The realized edge count fluctuates around m_edges; meta
    reports it.  Loops and duplicates are repaired by double-edge swaps whose
    partner edge shares a degree class, which preserves every per-cell count
    exactly; edges still invalid after `repair_rounds` passes are dropped and
    reported as shortfall.
    """
    m = int(m_edges)
    if m < 1:
        raise ParameterError("need at least one edge")
    rng = np.random.default_rng(seed)
    kv_full = joint.k_values.astype(np.int64)
    q = joint.Q.sum(axis=1)
    p_node = q / kv_full
    p_node /= p_node.sum()
    n = max(2, int(round(2.0 * m / float(kv_full @ p_node))))
    degrees = rng.choice(kv_full, size=n, p=p_node)
    if int(degrees.sum()) % 2:
        odd = p_node * (kv_full % 2 == 1)  # an odd degree was drawn, so odd.sum() > 0
        degrees = np.append(degrees, rng.choice(kv_full, p=odd / odd.sum()))
        n += 1
    counts_full = np.bincount(np.searchsorted(kv_full, degrees),
                              minlength=len(kv_full))
    live = counts_full > 0
    lv = np.flatnonzero(live)
    kv = kv_full[lv]
    counts = counts_full[lv]
    K = len(lv)
    cls = np.searchsorted(kv, degrees)     # live-class index per node
    D = counts * kv                        # realized stubs per class
    S = int(D.sum())

    Qs, ipf_iters = _ipf_symmetric(joint.Q[np.ix_(live, live)], D / S)
    T = Qs * S                             # end-pair counts; T[j,k]+T[k,j] ends
    t = np.triu(T, 1) + np.diag(np.diag(T) / 2.0)   # per-cell edge targets
    cap = np.outer(counts, counts).astype(float)
    np.fill_diagonal(cap, counts * (counts - 1) / 2.0)
    cap = np.triu(cap)
    t, saturated, _ = _capacity_project(t, cap, D.astype(float))
    cells, cleanup = _round_cells(t, D, cap)

    offsets = np.concatenate([[0], np.cumsum(counts)])
    node_of = np.argsort(cls, kind="stable")

    # stub allocation per class: cells near capacity take even windows of the
    # tiled node list (their conditional law under simplicity), the rest is
    # shuffled and sliced as in plain stub matching
    order = sorted((j, k) for j, k in cells if cells[(j, k)] > 0)
    row_items = [[] for _ in range(K)]
    for (j, k) in order:
        c = cells[(j, k)]
        if j == k:
            row_items[j].append((j, k, 0, 2 * c))
        else:
            row_items[j].append((j, k, 0, c))
            row_items[k].append((j, k, 1, c))
    owners = {}
    for c in range(K):
        seq = np.tile(rng.permutation(node_of[offsets[c]:offsets[c + 1]]), kv[c])
        pos = 0
        loose = []
        for (j, k, side, w) in row_items[c]:
            if cells[(j, k)] > 0.25 * max(cap[j, k], 1.0):
                owners[(j, k, side)] = seq[pos:pos + w]
                pos += w
            else:
                loose.append((j, k, side, w))
        rest = seq[pos:]
        rng.shuffle(rest)
        pos = 0
        for (j, k, side, w) in loose:
            owners[(j, k, side)] = rest[pos:pos + w]
            pos += w

    m_alloc = sum(cells[jk] for jk in order)
    u = np.empty(m_alloc, dtype=np.int64)
    v = np.empty(m_alloc, dtype=np.int64)
    su = np.empty(m_alloc, dtype=np.int64)  # stub slot of each endpoint ...
    sv = np.empty(m_alloc, dtype=np.int64)
    cu = np.empty(m_alloc, dtype=np.int64)  # ... and its degree class
    cv = np.empty(m_alloc, dtype=np.int64)
    se = [np.empty(D[c], dtype=np.int64) for c in range(K)]  # slot -> edge
    ptr = np.zeros(K, dtype=np.int64)
    pos = 0
    for (j, k) in order:
        c = cells[(j, k)]
        ids = np.arange(pos, pos + c)
        if j == k:
            block = owners[(j, k, 0)]
            rng.shuffle(block)
            u[ids], v[ids] = block[0::2], block[1::2]
            su[ids] = ptr[j] + 2 * np.arange(c)
            sv[ids] = su[ids] + 1
            se[j][ptr[j]:ptr[j] + 2 * c] = np.repeat(ids, 2)
            ptr[j] += 2 * c
        else:
            a, b = owners[(j, k, 0)], owners[(j, k, 1)]
            rng.shuffle(a)
            rng.shuffle(b)
            u[ids], v[ids] = a, b
            su[ids] = ptr[j] + np.arange(c)
            sv[ids] = ptr[k] + np.arange(c)
            se[j][ptr[j]:ptr[j] + c] = ids
            se[k][ptr[k]:ptr[k] + c] = ids
            ptr[j] += c
            ptr[k] += c
        cu[ids] = j
        cv[ids] = k
        pos += c
    m = m_alloc

    # repair pass: double-edge swaps against a partner drawn by a uniform
    # stub of one of the edge's own classes; the two edges exchange their
    # opposite endpoints, so the multiset of class pairs never changes
    key = np.minimum(u, v) * n + np.maximum(u, v)
    nonloop = np.flatnonzero(u != v)
    _, first_pos = np.unique(key[nonloop], return_index=True)
    goodmask = np.zeros(m, dtype=bool)
    goodmask[nonloop[first_pos]] = True
    bad = np.flatnonzero(~goodmask).tolist()
    badset = set(bad)
    seen = set(key[goodmask].tolist())
    repaired = 0
    for _ in range(repair_rounds):
        if not bad:
            break
        still = []
        for e in bad:
            c_star = int(cu[e] if rng.random() < 0.5 else cv[e])
            s_idx = int(rng.integers(D[c_star]))
            f = int(se[c_star][s_idx])
            if f == e or f in badset:      # partner must currently be valid
                still.append(e)
                continue
            if cu[e] != c_star:            # orient both edges class-side first
                u[e], v[e] = v[e], u[e]
                su[e], sv[e] = sv[e], su[e]
                cu[e], cv[e] = cv[e], cu[e]
            if not (cu[f] == c_star and su[f] == s_idx):
                u[f], v[f] = v[f], u[f]
                su[f], sv[f] = sv[f], su[f]
                cu[f], cv[f] = cv[f], cu[f]
            a, b = int(u[e]), int(v[e])
            w, x = int(u[f]), int(v[f])
            if a == x or w == b:
                still.append(e)
                continue
            k1 = min(a, x) * n + max(a, x)
            k2 = min(w, b) * n + max(w, b)
            if k1 == k2 or k1 in seen or k2 in seen:
                still.append(e)
                continue
            seen.discard(min(w, x) * n + max(w, x))
            seen.add(k1)
            seen.add(k2)
            v[e], v[f] = x, b
            su_e = int(sv[e])
            sv[e], sv[f] = sv[f], su_e
            cv_e = int(cv[e])
            cv[e], cv[f] = cv[f], cv_e
            se[cv[e]][sv[e]] = e
            se[cv[f]][sv[f]] = f
            badset.discard(e)
            repaired += 1
        bad = still
    shortfall = len(bad)
    if shortfall:
        keep = np.ones(m, dtype=bool)
        keep[bad] = False
        u, v = u[keep], v[keep]
    g = from_edges(u, v, labels=tuple(range(n)))
    meta = _base_meta("degree-correlated", seed, n=n, m=g.m,
                      m_target=int(m_edges), m_matched=m,
                      ipf_iterations=ipf_iters, cleanup_edges=cleanup,
                      capped_cells=saturated, repaired_edges=repaired,
                      shortfall_edges=shortfall,
                      shortfall_fraction=shortfall / max(m, 1))
    return g, meta
