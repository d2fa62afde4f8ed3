"""Degree distributions on k >= 1: parametric families, edge-end weighting, moments.

Supports are truncated at a finite k_max chosen adaptively so the dropped
tail mass stays below tail_tol; the dropped mass is recorded on the
distribution.  Zero-truncation (k >= 1) is used throughout because the
neighbor-degree difference is undefined for isolated nodes and all analysis
removes them first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import ConsistencyError, ParameterError, UnachievableTargetError

DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class DegreeDistribution:
    """pmf over an ascending integer support with k >= 1."""

    k: np.ndarray            # integer support, ascending
    pmf: np.ndarray          # probabilities, sum to 1
    tail_mass_dropped: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.k, dtype=np.int64)
        p = np.asarray(self.pmf, dtype=float)
        if k.ndim != 1 or p.shape != k.shape or len(k) == 0:
            raise ParameterError("support and pmf must be matching 1-d arrays")
        if k[0] < 1 or np.any(np.diff(k) <= 0):
            raise ParameterError("support must be ascending integers >= 1")
        if np.any(p < 0) or not np.isfinite(p).all():
            raise ParameterError("pmf entries must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ParameterError(f"pmf sums to {p.sum():.3e}, expected 1")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "pmf", p)

    @property
    def k_min(self) -> int:
        return int(self.k[0])

    @property
    def k_max(self) -> int:
        return int(self.k[-1])

    def mean(self) -> float:
        return float(np.sum(self.k * self.pmf))

    def var(self) -> float:
        m = self.mean()
        return float(np.sum((self.k - m) ** 2 * self.pmf))

    def mean_inverse(self) -> float:
        return float(np.sum(self.pmf / self.k))


class EdgeEndDistribution(DegreeDistribution):
    """Degree distribution of a uniformly random edge endpoint, q_k ∝ k p_k."""


class DistMoments(NamedTuple):
    mean: float
    variance: float
    mean_inverse: float


@dataclass(frozen=True)
class JointDegree:
    """Joint degree distribution across edges: Q[j, k] is the fraction of
    edge ends pairing degrees k_values[j] and k_values[k].  Symmetric,
    sums to 1; marginals give the edge-end distribution q."""

    k_values: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        kv = np.asarray(self.k_values, dtype=np.int64)
        Q = np.asarray(self.Q, dtype=float)
        if Q.shape != (len(kv), len(kv)):
            raise ParameterError("Q must be square over k_values")
        if np.any(Q < -1e-15):
            raise ParameterError("Q entries must be nonnegative")
        if abs(Q.sum() - 1.0) > 1e-8:
            raise ParameterError(f"Q sums to {Q.sum():.3e}, expected 1")
        if np.max(np.abs(Q - Q.T)) > 1e-10:
            raise ParameterError("Q must be symmetric")
        object.__setattr__(self, "k_values", kv)
        object.__setattr__(self, "Q", np.maximum(Q, 0.0))

    def marginal(self) -> EdgeEndDistribution:
        q = self.Q.sum(axis=0)
        keep = q > 0
        return EdgeEndDistribution(self.k_values[keep], q[keep] / q.sum())


def moments(p: DegreeDistribution) -> DistMoments:
    """Exact (mean, variance, mean 1/k) over the truncated support."""
    return DistMoments(p.mean(), p.var(), p.mean_inverse())


def make_poisson(lam: float, tail_tol: float = DEFAULT_TAIL_TOL) -> DegreeDistribution:
    """Zero-truncated Poisson(lam) pmf, truncated at the smallest k_max whose
    dropped mass (relative to the zero-truncated law) is below tail_tol."""
    if not (lam > 0):
        raise ParameterError(f"lambda must be positive, got {lam}")
    _check_tail_tol(tail_tol)
    kmax = int(lam + 30.0 * np.sqrt(lam + 1.0) + 60.0)
    k = np.arange(1, kmax + 1, dtype=np.int64)
    logp = k * np.log(lam) - special.gammaln(k + 1.0) - lam
    w = np.exp(logp)
    norm = -special.expm1(-lam)        # 1 - e^{-lam}, mass on k >= 1
    return _truncate(k, w, norm, tail_tol)


def make_power_law_cutoff(alpha: float, beta: float,
                          tail_tol: float = DEFAULT_TAIL_TOL,
                          k_cap: int = 2 ** 22) -> DegreeDistribution:
    """pmf proportional to k^(-alpha) e^(-beta k) on k >= 1.

    beta > 0 guarantees normalizability for any alpha.  The support is grown
    until a geometric bound on the remaining tail drops below tail_tol.
    """
    if not (beta > 0):
        raise ParameterError(f"beta must be positive, got {beta}")
    _check_tail_tol(tail_tol)
    kmax = 64
    while True:
        k = np.arange(1, kmax + 1, dtype=np.int64)
        logw = -alpha * np.log(k) - beta * k
        logw -= logw.max()
        w = np.exp(logw)
        # w_{j+1}/w_j <= ratio for all j > kmax, giving a geometric tail bound
        ratio = np.exp(-beta) * ((kmax + 1) / kmax) ** max(-alpha, 0.0)
        if ratio < 1.0:
            tail = w[-1] * ratio / (1.0 - ratio)
            total = w.sum()
            if tail < tail_tol * total:
                return _truncate(k, w, total + tail, tail_tol)
        kmax *= 2
        if kmax > k_cap:
            raise ParameterError(
                f"support exceeded {k_cap} at alpha={alpha}, beta={beta}; "
                "distribution too heavy for this truncation tolerance")


def _check_tail_tol(tail_tol):
    if not (0 < tail_tol <= 1e-6):
        raise ParameterError(f"tail_tol must lie in (0, 1e-6], got {tail_tol}")


def _truncate(k, w, total, tail_tol):
    """Cut the support at the smallest k_max with dropped mass < tail_tol*total."""
    rev_tail = np.cumsum(w[::-1])[::-1]       # rev_tail[i] = sum w[i:]
    dropped = total - w.sum() + np.concatenate([rev_tail[1:], [0.0]])
    keep = int(np.argmax(dropped < tail_tol * total)) + 1
    w = w[:keep]
    frac_dropped = float((total - w.sum()) / total)
    return DegreeDistribution(k[:keep], w / w.sum(), frac_dropped)


def edge_end(p: DegreeDistribution) -> EdgeEndDistribution:
    """q_k = k p_k / <k> on the same support."""
    q = p.k * p.pmf
    s = q.sum()
    if not (s > 0):
        raise ParameterError("degree distribution has zero mean")
    return EdgeEndDistribution(p.k, q / s, p.tail_mass_dropped)


def degree_histogram(degrees) -> DegreeDistribution:
    """Empirical degree distribution on the contiguous support 1..max(degrees)."""
    d = np.asarray(degrees, dtype=np.int64)
    if len(d) == 0:
        raise ParameterError("empty degree sequence")
    if d.min() < 1:
        raise ParameterError("degree histogram requires all degrees >= 1 "
                             "(remove isolated nodes first)")
    counts = np.bincount(d)[1:]
    k = np.arange(1, len(counts) + 1, dtype=np.int64)
    return DegreeDistribution(k, counts / d.size, 0.0)


def fit_mean_var(target_mean: float, target_var: float,
                 tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, float]:
    """Find (alpha, beta) so the truncated power law hits the target moments.

    Nested 1-d root finding: for each alpha, beta is solved so the mean
    matches (mean is monotone decreasing in beta); the variance residual is
    then bracketed and solved in alpha (variance is monotone increasing in
    alpha at fixed mean, heavier tails to the right).
    """
    if not (target_mean > 1):
        raise ParameterError(f"target mean must exceed 1, got {target_mean}")
    if not (target_var > 0):
        raise ParameterError(f"target variance must be positive, got {target_var}")

    def beta_for_mean(alpha):
        def mean_resid(beta):
            try:
                d = make_power_law_cutoff(alpha, beta, tail_tol, k_cap=2 ** 20)
            except ParameterError:
                return np.inf    # support blew up: mean far above target
            return d.mean() - target_mean
        blo, bhi = 1e-9, 60.0
        flo = mean_resid(blo)
        while not np.isfinite(flo):
            blo *= 10.0
            if blo >= bhi:
                return None
            flo = mean_resid(blo)
        if flo < 0:
            return None          # tail too light: mean below target everywhere
        return brentq(mean_resid, blo, bhi, xtol=1e-13, rtol=8.9e-16)

    def var_resid(alpha):
        beta = beta_for_mean(alpha)
        if beta is None:
            return None
        d = make_power_law_cutoff(alpha, beta, tail_tol)
        return d.var() - target_var, beta

    probes = [-60.0, -30.0, -15.0, -8.0, -4.0, -2.0, -1.0, 0.0, 0.5,
              1.0, 1.25, 1.5, 1.75, 1.9, 1.95]
    vals = []
    for a in probes:
        r = var_resid(a)
        vals.append(None if r is None else r[0])
    bracket = None
    feasible = [(a, v) for a, v in zip(probes, vals) if v is not None]
    for (a1, v1), (a2, v2) in zip(feasible[:-1], feasible[1:]):
        if v1 <= 0 <= v2:
            bracket = (a1, a2)
            break
    if bracket is None:
        lo = min((v for _, v in feasible), default=np.nan) + target_var
        hi = max((v for _, v in feasible), default=np.nan) + target_var
        raise UnachievableTargetError(
            f"no (alpha, beta) reaches mean={target_mean}, var={target_var}; "
            f"achievable variance at this mean spans about [{lo:.4g}, {hi:.4g}]",
            achievable=(lo, hi))
    alpha = brentq(lambda a: var_resid(a)[0], *bracket, xtol=1e-10)
    beta = beta_for_mean(alpha)
    d = make_power_law_cutoff(alpha, beta, tail_tol)
    if abs(d.mean() - target_mean) > 1e-6 or abs(d.var() - target_var) > 1e-4:
        raise UnachievableTargetError(
            f"fit stalled: best residuals mean {d.mean() - target_mean:.3e}, "
            f"var {d.var() - target_var:.3e}")
    return float(alpha), float(beta)


def to_csv(p: DegreeDistribution, path) -> None:
    with open(path, "w") as fh:
        fh.write("k,p_k\n")
        for k, pk in zip(p.k, p.pmf):
            fh.write(f"{k},{float(pk)!r}\n")


def from_csv(path) -> DegreeDistribution:
    k, pmf = [], []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or (i == 1 and line.lower().startswith("k,")):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ConsistencyError(f"bad distribution row at line {i}: {line!r}")
            k.append(int(parts[0]))
            pmf.append(float(parts[1]))
    return DegreeDistribution(np.array(k), np.array(pmf))
