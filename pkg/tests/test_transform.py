"""Two-sided Laplace transforms on the imaginary axis: laws and exact oracles."""

import numpy as np
import pytest

from fpdist import (ConsistencyError, DegreeDistribution,
                    config_delta_transform, correlated_delta_transform,
                    joint_from_gamma, mean_var_from_transform)
from fpdist.transform import atom_transform, linear_transform, sum_transform

RNG = np.random.default_rng(20240817)


def random_atoms(rng, n=6):
    vals = np.sort(rng.uniform(-5, 5, n))
    w = rng.uniform(0.1, 1.0, n)
    return vals, w / w.sum()


def test_f_zero_is_one():
    vals, w = random_atoms(RNG)
    F = atom_transform(vals, w)
    assert abs(F(np.array([0.0]))[0] - 1.0) < 1e-12
    p = DegreeDistribution(np.array([1, 2, 5]), np.array([0.3, 0.5, 0.2]))
    assert abs(config_delta_transform(p)(np.array([0.0]))[0] - 1.0) < 1e-12


def test_linearity_against_atoms():
    # transform of a*X + b agrees with the atom transform of the moved atoms
    for _ in range(5):
        vals, w = random_atoms(RNG)
        a, b = RNG.uniform(-3, 3), RNG.uniform(-2, 2)
        F = atom_transform(vals, w)
        G = linear_transform(F, a, b)
        H = atom_transform(a * vals + b, w)
        th = RNG.uniform(-20, 20, 100)
        assert np.max(np.abs(G(th) - H(th))) < 1e-12


def test_product_law_is_convolution():
    vals1, w1 = random_atoms(RNG, 5)
    vals2, w2 = random_atoms(RNG, 4)
    F, G = atom_transform(vals1, w1), atom_transform(vals2, w2)
    S = sum_transform(F, G)
    sum_vals = (vals1[:, None] + vals2[None, :]).ravel()
    sum_w = (w1[:, None] * w2[None, :]).ravel()
    H = atom_transform(sum_vals, sum_w)
    th = RNG.uniform(-20, 20, 100)
    assert np.max(np.abs(S(th) - H(th))) < 1e-12
    assert np.max(np.abs(S(th) - F(th) * G(th))) < 1e-12


def test_conjugate_symmetry():
    p = DegreeDistribution(np.array([1, 3, 4]), np.array([0.2, 0.5, 0.3]))
    F = config_delta_transform(p)
    th = RNG.uniform(0.0, 30.0, 100)
    assert np.max(np.abs(F(-th) - np.conj(F(th)))) < 1e-12


def test_config_transform_matches_brute_enumeration():
    # two degree classes keep the neighbor sums enumerable by hand
    p = DegreeDistribution(np.array([1, 2]), np.array([0.5, 0.5]))
    q = np.array([1.0, 2.0]) * p.pmf
    q /= q.sum()
    F = config_delta_transform(p)
    th = RNG.uniform(-10, 10, 30)
    kv = np.array([1.0, 2.0])
    brute = np.zeros(len(th), dtype=complex)
    for k, pk in zip(kv, p.pmf):
        G = (q * np.exp(-1j * np.outer(th, kv) / k)).sum(axis=1)
        brute += pk * np.exp(1j * th * k) * G ** int(k)
    assert np.max(np.abs(F(th) - brute)) < 1e-12


def test_correlated_reduces_to_config_at_gamma_zero():
    p = DegreeDistribution(np.array([1, 2, 4]), np.array([0.4, 0.4, 0.2]))
    m = joint_from_gamma(p, 0.0)
    Fc = config_delta_transform(p)
    Fr = correlated_delta_transform(p, m.joint)
    th = RNG.uniform(-15, 15, 100)
    assert np.max(np.abs(Fc(th) - Fr(th))) < 1e-12


def test_correlated_margin_mismatch_raises():
    p = DegreeDistribution(np.array([1, 2, 4]), np.array([0.4, 0.4, 0.2]))
    other = DegreeDistribution(np.array([1, 2, 4]), np.array([0.2, 0.4, 0.4]))
    joint = joint_from_gamma(other, 0.0).joint
    with pytest.raises(ConsistencyError):
        correlated_delta_transform(p, joint)


def test_mean_var_from_transform_exact_atoms():
    vals = np.array([-1.0, 2.0])
    w = np.array([0.3, 0.7])
    mean, var = mean_var_from_transform(atom_transform(vals, w))
    assert mean == pytest.approx(1.1, abs=1e-9)
    assert var == pytest.approx(1.89, abs=1e-8)
