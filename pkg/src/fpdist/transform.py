"""Two-sided Laplace transforms of the neighbor-degree difference.

Convention: F(s) = E[exp(-s Delta)], evaluated on the imaginary axis as
F(i theta).  Under this convention F(-i theta) = conj(F(i theta)), the
transform of a*X + b is exp(-b s) F(a s), and independent sums multiply.

For the configuration model (edge-end distribution q),

    F(s) = sum_k p_k e^{s k} G(s/k)^k,     G(s) = sum_j q_j e^{-s j},

and for a degree-correlated ensemble with joint edge distribution Q the
neighbor transform becomes degree-conditioned, G_k(s) = sum_j (Q_jk/q_k) e^{-s j}.

Transforms built from integer degree structure carry a DegreeLattice payload
describing the conditional sums S_k = (neighbor-degree total of a degree-k
node); downstream inversion and tail code exploits it for exact lattice
computation instead of oscillatory quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degree import DegreeDistribution, JointDegree, edge_end
from .errors import ConsistencyError, ParameterError

_EVAL_CHUNK = 1024   # bound transient T x J matrices to a few tens of MB


@dataclass(frozen=True)
class DegreeLattice:
    """Integer lattice structure behind a mixture transform.

    Class c describes nodes of degree own[c] (mixture weight weights[c]);
    one neighbor summand takes value nbr_values[j] with probability
    nbr_pmf[j, c].  The represented variable is scale * (S/own - own)
    with S the sum of `own` iid neighbor summands.
    """

    own: np.ndarray
    weights: np.ndarray
    nbr_values: np.ndarray
    nbr_pmf: np.ndarray
    scale: float = 1.0


class TransformFn:
    """Evaluable transform theta -> F(i theta), with metadata.

    support is a (lo, hi) hint for the bulk of the underlying distribution;
    lattice, when present, enables exact inversion and tail sums.
    """

    def __init__(self, fn, support, kind="generic", lattice=None):
        self._fn = fn
        self.support = (float(support[0]), float(support[1]))
        self.kind = kind
        self.lattice = lattice

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        scalar = th.ndim == 0
        out = self._fn(np.atleast_1d(th))
        return complex(out[0]) if scalar else out


def atom_transform(values, probs, kind="atoms") -> TransformFn:
    """Transform of a finite atomic distribution (test and oracle helper)."""
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    if v.shape != p.shape or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ParameterError("atom values/probs must match and sum to 1")

    def fn(theta):
        return np.exp(-1j * np.outer(theta, v)) @ p

    return TransformFn(fn, (v.min(), v.max()), kind=kind)


def linear_transform(F: TransformFn, a: float, b: float) -> TransformFn:
    """Transform of a*X + b given the transform of X."""
    lo, hi = F.support
    pts = sorted((a * lo + b, a * hi + b))

    def fn(theta):
        return np.exp(-1j * theta * b) * np.atleast_1d(F(a * theta))

    return TransformFn(fn, pts, kind=f"linear({F.kind})")


def sum_transform(F: TransformFn, G: TransformFn) -> TransformFn:
    """Transform of X + Y for independent X, Y."""

    def fn(theta):
        return np.atleast_1d(F(theta)) * np.atleast_1d(G(theta))

    return TransformFn(fn, (F.support[0] + G.support[0],
                            F.support[1] + G.support[1]),
                       kind=f"sum({F.kind},{G.kind})")


def _lattice_support(lat: DegreeLattice):
    own = lat.own.astype(float)
    w = lat.weights
    jv = lat.nbr_values.astype(float)
    live = w > 1e-14
    if not live.any():
        return (-1.0, 1.0)
    P = lat.nbr_pmf[:, live]
    mu = jv @ P
    var = (jv ** 2) @ P - mu ** 2
    k = own[live]
    mean_c = mu - k
    sd_c = np.sqrt(np.maximum(var, 0.0) / k)
    s = abs(lat.scale)
    lo = float(np.min(mean_c - 14.0 * sd_c) - 6.0)
    hi = float(np.max(mean_c + 14.0 * sd_c) + 6.0)
    return (s * lo if lat.scale >= 0 else lat.scale * hi,
            s * hi if lat.scale >= 0 else lat.scale * lo)


def _lattice_eval(lat: DegreeLattice):
    own = lat.own.astype(float)
    w = lat.weights
    jv = lat.nbr_values.astype(float)
    P = lat.nbr_pmf
    scale = lat.scale

    def fn(theta):
        th_all = scale * np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.empty(len(th_all), dtype=complex)
        for s0 in range(0, len(th_all), _EVAL_CHUNK):
            th = th_all[s0:s0 + _EVAL_CHUNK]
            acc = np.zeros(len(th), dtype=complex)
            for c in range(len(own)):
                if w[c] <= 0.0:
                    continue
                k = own[c]
                G = np.exp(-1j * np.outer(th / k, jv)) @ P[:, c]
                # integer exponent: principal-branch power is single valued
                acc += w[c] * np.exp(1j * th * k) * G ** int(k)
            out[s0:s0 + _EVAL_CHUNK] = acc
        return out

    return fn


def from_lattice(lat: DegreeLattice, kind: str) -> TransformFn:
    return TransformFn(_lattice_eval(lat), _lattice_support(lat),
                       kind=kind, lattice=lat)


def config_delta_transform(p: DegreeDistribution) -> TransformFn:
    """Transform of Delta under the configuration model with degree pmf p."""
    q = edge_end(p)
    nbr = np.tile(q.pmf[:, None], (1, len(p.k)))
    lat = DegreeLattice(own=p.k.copy(), weights=p.pmf.copy(),
                        nbr_values=p.k.copy(), nbr_pmf=nbr)
    return from_lattice(lat, "config")


def correlated_delta_transform(p: DegreeDistribution,
                               joint: JointDegree) -> TransformFn:
    """Transform of Delta when edges follow the joint degree distribution Q.

    The marginals of Q must agree with edge_end(p) (tolerance 1e-8); the
    neighbor law of a degree-k node is the conditioned column Q[:, k]/q_k.
    """
    q = edge_end(p)
    kv = joint.k_values
    marg = joint.Q.sum(axis=0)
    q_dense = dict(zip(q.k.tolist(), q.pmf.tolist()))
    worst = 0.0
    for kval, mv in zip(kv.tolist(), marg.tolist()):
        worst = max(worst, abs(mv - q_dense.pop(kval, 0.0)))
    for leftover in q_dense.values():
        worst = max(worst, abs(leftover))
    if worst > 1e-8:
        raise ConsistencyError(
            f"joint marginal differs from edge-end distribution by {worst:.3e}")

    p_dense = dict(zip(p.k.tolist(), p.pmf.tolist()))
    weights = np.array([p_dense.get(int(kval), 0.0) for kval in kv])
    colsum = joint.Q.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        W = np.where(colsum > 0, joint.Q / colsum, 0.0)
    lat = DegreeLattice(own=kv.copy(), weights=weights,
                        nbr_values=kv.copy(), nbr_pmf=W)
    return from_lattice(lat, "correlated")


def mean_var_from_transform(F: TransformFn, h: float = 1e-3):
    """(mean, variance) from transform derivatives at 0.

    Central differences on the imaginary axis, Richardson-extrapolated over
    steps h, h/2, h/4.  Under the E[e^{-s X}] convention, mean = -F'(0) and
    variance = F''(0) - F'(0)^2; conjugate symmetry reduces both to the
    imaginary and real parts of F(i theta) near 0.
    """
    th = np.array([0.0, h / 4, h / 2, h])
    g = np.atleast_1d(F(th))
    g0 = g[0].real

    def extrap(d_h, d_h2, d_h4):
        r1 = (4.0 * d_h2 - d_h) / 3.0
        r2 = (4.0 * d_h4 - d_h2) / 3.0
        return (16.0 * r2 - r1) / 15.0

    d1 = [-g[i].imag / t for i, t in ((3, h), (2, h / 2), (1, h / 4))]
    d2 = [-2.0 * (g[i].real - g0) / t ** 2 for i, t in ((3, h), (2, h / 2), (1, h / 4))]
    mean = extrap(*d1)
    second = extrap(*d2)
    return float(mean), float(second - mean * mean)
