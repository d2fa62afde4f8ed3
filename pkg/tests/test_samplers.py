"""Graph samplers: determinism, degree laws, and mixing targets."""

import numpy as np
import pytest
from scipy.stats import chi2

from fpdist import (DegreeDistribution, fit_mean_var, gamma_for_r,
                    joint_from_gamma, make_poisson, make_power_law_cutoff,
                    node_stats, sample_configuration, sample_degree_correlated,
                    sample_poisson_rg)
from fpdist.graph import assortativity


def edges_of(g):
    out = []
    for u in range(g.n):
        for v in g.neighbors(u):
            if v > u:
                out.append((u, v))
    return out


def test_poisson_rg_deterministic():
    g1, m1 = sample_poisson_rg(400, 5.0, seed=123)
    g2, m2 = sample_poisson_rg(400, 5.0, seed=123)
    assert edges_of(g1) == edges_of(g2)
    assert m1 == m2
    g3, _ = sample_poisson_rg(400, 5.0, seed=124)
    assert edges_of(g1) != edges_of(g3)


def test_poisson_rg_degree_law():
    # chi-square against Binomial(n-1, lam/(n-1)) with tail pooled to >= 5
    n, lam = 4000, 6.0
    g, meta = sample_poisson_rg(n, lam, seed=2024)
    assert meta["edge_prob"] == pytest.approx(lam / (n - 1))
    from scipy.stats import binom
    counts = np.bincount(g.degrees, minlength=n)
    probs = binom.pmf(np.arange(n), n - 1, lam / (n - 1))
    hi = int(np.searchsorted(np.cumsum(probs), 1.0 - 1e-6))
    obs = np.append(counts[:hi].astype(float), counts[hi:].sum())
    exp = np.append(probs[:hi], 1.0 - probs[:hi].sum()) * n
    while exp[-1] < 5.0:
        exp[-2] += exp[-1]
        obs[-2] += obs[-1]
        exp, obs = exp[:-1], obs[:-1]
    keep = exp >= 5.0
    lowmass = ~keep
    if lowmass.any():
        exp = np.append(exp[keep], exp[lowmass].sum())
        obs = np.append(obs[keep], obs[lowmass].sum())
    stat = float(((obs - exp) ** 2 / exp).sum())
    crit = chi2.ppf(0.999, len(exp) - 1)
    assert stat < crit


def test_configuration_erasure_and_degrees():
    a, b = fit_mean_var(8.0, 64.0)
    p = make_power_law_cutoff(a, b)
    g, meta = sample_configuration(p, 100_000, seed=11)
    assert meta["erased_fraction"] < 0.01
    assert g.n == 100_000
    # realized degree law close to p in total variation (erasure nudges it)
    counts = np.bincount(g.degrees, minlength=int(p.k[-1]) + 1)
    emp = counts / counts.sum()
    pmf_full = np.zeros(len(emp))
    pmf_full[p.k[p.k < len(emp)]] = p.pmf[p.k < len(emp)]
    tv = 0.5 * np.abs(emp - pmf_full).sum()
    assert tv < 0.02


def test_configuration_deterministic():
    p = make_poisson(5.0)
    g1, m1 = sample_configuration(p, 3000, seed=5)
    g2, m2 = sample_configuration(p, 3000, seed=5)
    assert edges_of(g1) == edges_of(g2)
    assert m1 == m2


def test_correlated_recovers_assortativity():
    a, b = fit_mean_var(8.0, 64.0)
    p = make_power_law_cutoff(a, b)
    for target in (-0.5, 0.5):
        joint = gamma_for_r(p, target).joint
        g, meta = sample_degree_correlated(joint, 200_000, seed=31)
        assert abs(assortativity(g) - target) < 0.02
        assert meta["shortfall_fraction"] < 0.01
        assert meta["m_matched"] > 0


def test_correlated_gamma_zero_is_uncorrelated():
    p = make_poisson(8.0)
    joint = joint_from_gamma(p, 0.0).joint
    g, _ = sample_degree_correlated(joint, 150_000, seed=17)
    assert abs(assortativity(g)) < 0.02


def test_correlated_deterministic_and_identity():
    p = make_poisson(6.0)
    joint = gamma_for_r(p, 0.3).joint
    g1, m1 = sample_degree_correlated(joint, 30_000, seed=8)
    g2, m2 = sample_degree_correlated(joint, 30_000, seed=8)
    assert edges_of(g1) == edges_of(g2)
    assert m1 == m2
    import math
    stats = node_stats(g1)
    assert math.fsum(stats.kappa) / g1.n == pytest.approx(1.0, abs=1e-12)


def test_correlated_two_point_degrees():
    # realized degree histogram close to the node law implied by Q margins
    p = DegreeDistribution(np.array([2, 6]), np.array([0.75, 0.25]))
    joint = joint_from_gamma(p, 0.0).joint
    g, _ = sample_degree_correlated(joint, 60_000, seed=3)
    counts = np.bincount(g.degrees, minlength=7)
    emp = counts / counts.sum()
    want = np.zeros(7)
    want[2], want[6] = 0.75, 0.25
    assert 0.5 * np.abs(emp - want).sum() < 0.02


def test_rng_meta_identifies_generator():
    _, meta = sample_poisson_rg(50, 3.0, seed=1)
    assert meta["rng"] == "numpy-default_rng-PCG64"
    assert meta["seed"] == 1
