"""Maximum-entropy joint edge-end distribution with tunable assortativity.

Among joint distributions Q_jk with both marginals fixed to the edge-end
distribution q, the entropy maximizer subject to a fixed correlation
E[jk] is exponential in the product of end degrees:

    Q_jk = exp(gamma j k) q_j q_k / (Z_j Z_k),

with Z determined self-consistently so the marginals come out right.
gamma = 0 recovers the uncorrelated configuration model; gamma above or
below zero gives assortative or disassortative mixing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .degree import DegreeDistribution, EdgeEndDistribution, JointDegree, edge_end
from .errors import ConvergenceError, ParameterError, UnachievableTargetError

# exp(gamma j k) must stay representable across the support
GAMMA_GUARD = 7000.0


@dataclass
class MaxEntModel:
    gamma: float
    r: float
    k_values: np.ndarray          # support with q_k > 0
    log_z: np.ndarray             # log Z_k on that support
    joint: JointDegree
    residual: float
    iterations: int

    def to_json(self) -> str:
        return json.dumps({
            "gamma": self.gamma,
            "r": self.r,
            "k_support": self.k_values.tolist(),
            "Z": np.exp(self.log_z).tolist(),
            "convergence": {"residual": self.residual,
                            "iterations": self.iterations},
        }, indent=2)


def _guard(gamma, k_values):
    worst = abs(gamma) * float(k_values[-1]) ** 2
    if worst > GAMMA_GUARD:
        raise ParameterError(
            f"|gamma| k_max^2 = {worst:.3g} exceeds overflow guard {GAMMA_GUARD:g}")


def solve_partition(q: EdgeEndDistribution, gamma: float,
                    damping: float = 0.5, tol: float = 1e-12,
                    max_iter: int = 100_000, log_z0=None):
    """Fixed point for log Z_k:  Z_k = sum_j q_j exp(gamma j k) / Z_j.

    Damped log-space iteration; returns (k_values, log_z, residual, iters)
    on the compressed support q_k > 0.
    """
    keep = q.pmf > 0
    kv = q.k[keep].astype(float)
    logq = np.log(q.pmf[keep])
    _guard(gamma, kv)
    gjk = gamma * np.outer(kv, kv)
    log_z = (np.zeros_like(kv) if log_z0 is None
             else np.array(log_z0, dtype=float, copy=True))
    for it in range(1, max_iter + 1):
        new = logsumexp(logq[None, :] + gjk - log_z[None, :], axis=1)
        resid = float(np.max(np.abs(new - log_z)))
        log_z = (1.0 - damping) * log_z + damping * new
        if resid < tol:
            return q.k[keep], log_z, resid, it
    raise ConvergenceError(
        f"partition fixed point stalled at residual {resid:.3e}",
        residual=resid, iterations=max_iter)


def joint_from_gamma(p: DegreeDistribution, gamma: float,
                     log_z0=None) -> MaxEntModel:
    """Build the correlated joint for degree distribution p at coupling gamma."""
    q = edge_end(p)
    kv, log_z, resid, iters = solve_partition(q, gamma, log_z0=log_z0)
    kvf = kv.astype(float)
    keep = q.pmf > 0
    logq = np.log(q.pmf[keep])
    logQ = (logq[:, None] + logq[None, :] + gamma * np.outer(kvf, kvf)
            - log_z[:, None] - log_z[None, :])
    Q = np.exp(logQ)
    Q /= Q.sum()
    joint = JointDegree(kv, Q)
    drift = float(np.max(np.abs(joint.marginal().pmf - q.pmf[keep])))
    if drift > 1e-8:
        raise ConvergenceError(
            f"joint marginal drifted {drift:.3e} from edge-end target",
            residual=drift, iterations=iters)
    model = MaxEntModel(gamma=float(gamma), r=assortativity_of(joint),
                        k_values=kv, log_z=log_z, joint=joint,
                        residual=resid, iterations=iters)
    return model


def assortativity_of(joint: JointDegree) -> float:
    """Pearson correlation of end degrees under Q; NaN if degenerate."""
    kv = joint.k_values.astype(float)
    q = joint.Q.sum(axis=1)
    mu = float(kv @ q)
    var = float((kv - mu) ** 2 @ q)
    if var <= 0.0:
        return float("nan")
    cov = float((kv - mu) @ joint.Q @ (kv - mu))
    return cov / var


def entropy_of(joint: JointDegree) -> float:
    Q = joint.Q[joint.Q > 0]
    return float(-(Q * np.log(Q)).sum())


def achievable_r_range(p: DegreeDistribution, n_probe: int = 25):
    """Assortativity reachable under the overflow guard, by probing gamma."""
    q = edge_end(p)
    kmax = float(q.k[q.pmf > 0][-1])
    gmax = GAMMA_GUARD / kmax ** 2
    lo = hi = 0.0
    log_z0 = None
    for g in np.linspace(0.0, gmax * (1 - 1e-9), n_probe):
        m = joint_from_gamma(p, g, log_z0=log_z0)
        log_z0 = m.log_z
        hi = max(hi, m.r)
    log_z0 = None
    for g in np.linspace(0.0, -gmax * (1 - 1e-9), n_probe):
        m = joint_from_gamma(p, g, log_z0=log_z0)
        log_z0 = m.log_z
        lo = min(lo, m.r)
    return lo, hi


def gamma_for_r(p: DegreeDistribution, r_target: float,
                tol: float = 1e-6) -> MaxEntModel:
    """Invert r(gamma) = r_target by bracket expansion plus root finding."""
    if not np.isfinite(r_target):
        raise ParameterError(f"assortativity target must be finite, got {r_target}")
    m0 = joint_from_gamma(p, 0.0)
    if abs(m0.r - r_target) <= tol:
        return m0
    sign = 1.0 if r_target > m0.r else -1.0
    q = edge_end(p)
    kmax = float(q.k[q.pmf > 0][-1])
    gmax = GAMMA_GUARD / kmax ** 2

    cache = {0.0: m0}

    def r_at(g):
        if g not in cache:
            near = min(cache, key=lambda x: abs(x - g))
            cache[g] = joint_from_gamma(p, g, log_z0=cache[near].log_z)
        return cache[g].r - r_target

    # expand outward until the target is straddled
    g = sign * gmax / 64.0
    while True:
        if r_at(g) * sign >= 0:
            break
        if abs(g) >= gmax * (1 - 1e-9):
            lo, hi = achievable_r_range(p)
            raise UnachievableTargetError(
                f"assortativity {r_target} outside achievable range "
                f"[{lo:.6f}, {hi:.6f}]", achievable=(lo, hi))
        g = sign * min(abs(g) * 2.0, gmax * (1 - 1e-9))
    a, b = (0.0, g) if g > 0 else (g, 0.0)
    gamma = brentq(r_at, a, b, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    model = cache.get(gamma)
    if model is None:
        near = min(cache, key=lambda x: abs(x - gamma))
        model = joint_from_gamma(p, gamma, log_z0=cache[near].log_z)
    if abs(model.r - r_target) > tol:
        raise ConvergenceError(
            f"root finding left |r - target| = {abs(model.r - r_target):.3e} > {tol}",
            residual=abs(model.r - r_target), iterations=0)
    return model
