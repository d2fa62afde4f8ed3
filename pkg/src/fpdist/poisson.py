"""Friendship-paradox difference for the Poisson random graph.

In the sparse limit a node of degree k >= 1 sees iid neighbor degrees
1 + Pois(lam), so the neighbor sum is S = k + T with T ~ Pois(k lam) and

    Delta = S/k - k = (T - k(k-1)) / k,

a lattice of rationals with denominator k.  Own degree is Poisson(lam)
conditioned on k >= 1 (isolated nodes have no Delta).  Everything here is
exact up to explicitly budgeted tail truncation: atoms, sign masses, and
a closed-form transform.

The transform compensates for zero-truncation: the k = 0 weight (plus any
k-tail beyond the series cap) is carried by a Gaussian component with the
k -> infinity limiting mean lam + 1 and variance lam E[1/k | k >= 1], which
restores the sparse-limit moments E[Delta] = 1 and
Var[Delta] = lam (1 + E[1/k | k >= 1]) exactly.  The conditional atom set
itself has mean 1 - lam p0 / (1 - p0); both are exposed below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .degree import make_poisson
from .errors import ParameterError
from .transform import TransformFn


def _check_lam(lam):
    lam = float(lam)
    if not (lam > 0) or not np.isfinite(lam):
        raise ParameterError(f"lambda must be positive and finite, got {lam}")
    return lam


def mean_inverse_degree(lam) -> float:
    """E[1/k] for k ~ Poisson(lam) conditioned on k >= 1, by series."""
    lam = _check_lam(lam)
    # sum_{k>=1} e^{-lam} lam^k / (k! k), stable in log space
    kmax = int(lam + 40.0 * math.sqrt(lam + 1.0) + 80.0)
    k = np.arange(1, kmax + 1, dtype=float)
    logt = k * math.log(lam) - special.gammaln(k + 1.0) - lam - np.log(k)
    s = float(np.exp(logt).sum())
    return s / -math.expm1(-lam)


def poisson_delta_moments(lam):
    """Sparse-limit (mean, variance) of Delta: (1, lam (1 + E[1/k | k>=1]))."""
    lam = _check_lam(lam)
    return 1.0, lam * (1.0 + mean_inverse_degree(lam))


def poisson_delta_conditional_mean(lam) -> float:
    """Mean of Delta over nodes with k >= 1: 1 - lam p0 / (1 - p0)."""
    lam = _check_lam(lam)
    return 1.0 - lam * math.exp(-lam) / -math.expm1(-lam)


@dataclass(frozen=True)
class DeltaAtomDistribution:
    """Atoms of Delta as reduced rationals num/den with probabilities."""

    num: np.ndarray
    den: np.ndarray
    prob: np.ndarray
    tail_mass_dropped: float = 0.0

    def __post_init__(self):
        if np.any(self.den <= 0):
            raise ParameterError("atom denominators must be positive")

    @property
    def values(self) -> np.ndarray:
        return self.num / self.den

    def total(self) -> float:
        return math.fsum(self.prob)

    def mean(self) -> float:
        return math.fsum(self.prob * self.values) / self.total()

    def var(self) -> float:
        v = self.values
        mu = self.mean()
        return math.fsum(self.prob * (v - mu) ** 2) / self.total()

    def mass_negative(self) -> float:
        return math.fsum(self.prob[self.num < 0])

    def mass_zero(self) -> float:
        return math.fsum(self.prob[self.num == 0])

    def mass_positive(self) -> float:
        return math.fsum(self.prob[self.num > 0])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("delta_num,delta_den,prob\n")
            for n, d, p in zip(self.num, self.den, self.prob):
                fh.write(f"{n},{d},{float(p)!r}\n")


def poisson_delta_pmf(lam, tail_tol: float = 1e-8) -> DeltaAtomDistribution:
    """Exact atom distribution of Delta, truncated to total mass >= 1 - tail_tol.

    Budget split evenly: half for the k-tail of the conditioned degree,
    half shared across per-degree windows of the neighbor-sum Poisson.
    """
    lam = _check_lam(lam)
    deg = make_poisson(lam, tail_tol=tail_tol / 2.0)
    K = len(deg.k)
    eps = (tail_tol / 2.0) / K
    nums = []
    dens = []
    probs = []
    dropped = deg.tail_mass_dropped
    for k, pk in zip(deg.k.tolist(), deg.pmf.tolist()):
        mu = k * lam
        m_lo = int(stats.poisson.ppf(eps / 2.0, mu))
        m_hi = int(stats.poisson.isf(eps / 2.0, mu))
        m = np.arange(m_lo, m_hi + 1, dtype=np.int64)
        logp = m * math.log(mu) - special.gammaln(m + 1.0) - mu
        w = np.exp(logp)
        dropped += pk * max(1.0 - float(w.sum()), 0.0)
        num = m - k * (k - 1)
        den = np.full_like(num, k)
        g = np.gcd(num, den)
        nums.append(num // g)
        dens.append(den // g)
        probs.append(pk * w)
    pairs = np.stack([np.concatenate(nums), np.concatenate(dens)], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    merged = np.bincount(inv, weights=np.concatenate(probs), minlength=len(uniq))
    order = np.argsort(uniq[:, 0] / uniq[:, 1], kind="stable")
    return DeltaAtomDistribution(num=uniq[order, 0], den=uniq[order, 1],
                                 prob=merged[order], tail_mass_dropped=dropped)


def poisson_delta_sign_masses(lam):
    """Exact (P(Delta > 0), P(Delta = 0), P(Delta < 0)).

    Delta < 0 iff T <= k(k-1) - 1 with T ~ Pois(k lam), so the negative
    mass is a sum of regularized-gamma terms; no atom enumeration needed.
    """
    lam = _check_lam(lam)
    kmax = int(lam + 40.0 * math.sqrt(lam + 1.0) + 80.0)
    k = np.arange(1, kmax + 1, dtype=float)
    logpk = k * math.log(lam) - special.gammaln(k + 1.0) - lam
    pk = np.exp(logpk) / -math.expm1(-lam)
    thresh = k * (k - 1.0) - 1.0
    neg_t = np.where(thresh >= 0, special.pdtr(np.maximum(thresh, 0.0), k * lam), 0.0)
    m0 = k * (k - 1.0)
    zer_t = np.exp(m0 * np.log(k * lam) - special.gammaln(m0 + 1.0) - k * lam)
    neg = float(pk @ neg_t)
    zer = float(pk @ zer_t)
    return 1.0 - neg - zer, zer, neg


def poisson_delta_negative_fraction(lam) -> float:
    """P(Delta < 0): the probability a node out-degrees its friends' average."""
    return poisson_delta_sign_masses(lam)[2]


def poisson_delta_transform(lam, tail_tol: float = 1e-12) -> TransformFn:
    """Two-sided transform F(i theta) = E[exp(-i theta Delta)], sparse limit.

    Per-degree closed form exp(i theta (k-1)) exp(k lam (e^{-i theta / k} - 1))
    under untruncated Poisson degree weights; the k = 0 weight and the series
    tail ride a moment-matched Gaussian component (see module docstring).
    """
    lam = _check_lam(lam)
    kmax = int(lam + 40.0 * math.sqrt(lam + 1.0) + 80.0)
    k = np.arange(1, kmax + 1, dtype=float)
    w = np.exp(k * math.log(lam) - special.gammaln(k + 1.0) - lam)
    ph_w = max(1.0 - float(w.sum()), math.exp(-lam))
    mu0 = lam + 1.0
    v0 = lam * mean_inverse_degree(lam)
    if tail_tol < 1e-300:
        raise ParameterError("tail_tol too small")
    keep = w > tail_tol * 1e-3
    k = k[keep]
    w = w[keep]

    def fn(theta):
        th = np.asarray(theta, dtype=float)
        s = 1j * th[:, None]
        logterm = s * (k - 1.0) + (k * lam) * np.expm1(-s / k)
        out = np.exp(logterm) @ w
        out += ph_w * np.exp(-mu0 * 1j * th - 0.5 * v0 * th * th)
        return out

    sd1 = math.sqrt(lam)
    lo = 1.0 + lam - float(k[-1]) - 14.0 * sd1 - 10.0
    hi = lam + 14.0 * sd1 + 10.0
    return TransformFn(fn=fn, support=(lo, hi), kind="poisson-sparse")
