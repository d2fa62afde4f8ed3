"""Attribute-gap (generalized paradox) transforms and attribute sampling."""

import itertools

import numpy as np
import pytest

from fpdist import (AttributeModel, DegreeDistribution, ParameterError,
                    config_delta_transform, gfp_delta_transform, make_poisson,
                    mean_var_from_transform, sample_attributes)
from fpdist.degree import edge_end
from fpdist.transform import atom_transform

RNG = np.random.default_rng(20240819)


def test_identity_attribute_recovers_degree_gap():
    p = make_poisson(6.0)
    model = AttributeModel(kind="gaussian_linear", a=0.0, b=1.0, sigma=0.0)
    F = config_delta_transform(p)
    G = gfp_delta_transform(p, model)
    th = RNG.uniform(-25, 25, 100)
    assert np.max(np.abs(F(th) - G(th))) < 1e-12


def test_linear_attribute_rescales_the_gap():
    # x = a + b k with no noise gives Delta^(x) = b Delta exactly
    p = make_poisson(6.0)
    model = AttributeModel(kind="gaussian_linear", a=3.0, b=2.5, sigma=0.0)
    F = config_delta_transform(p)
    G = gfp_delta_transform(p, model)
    th = RNG.uniform(-8, 8, 100)
    assert np.max(np.abs(G(th) - F(2.5 * th))) < 1e-12


def gfp_moment_oracle(p, model):
    q = edge_end(p)
    kv = q.k.astype(float)
    mu_q = float(kv @ q.pmf)
    var_q = float((kv - mu_q) ** 2 @ q.pmf)
    b, sig = model.b, model.sigma
    mean = b * p.var() / p.mean()
    var = ((b * b * var_q + sig * sig) * p.mean_inverse()
           + sig * sig + b * b * p.var())
    return mean, var


def test_gaussian_linear_moments_match_analytic():
    p = make_poisson(8.0)
    for b, sig in ((1.0, 0.0), (2.0, 1.3), (-0.7, 0.4)):
        model = AttributeModel(kind="gaussian_linear", a=1.0, b=b, sigma=sig)
        want_mean, want_var = gfp_moment_oracle(p, model)
        got_mean, got_var = mean_var_from_transform(gfp_delta_transform(p, model))
        assert got_mean == pytest.approx(want_mean, abs=1e-6)
        assert got_var == pytest.approx(want_var, abs=1e-4)


def test_table_attribute_matches_brute_atoms():
    p = DegreeDistribution(np.array([1, 2]), np.array([0.5, 0.5]))
    table = {1: 0.4, 2: -1.7}
    model = AttributeModel(kind="table", sigma=0.0, table=table)
    q = {1: 1.0 / 3.0, 2: 2.0 / 3.0}
    atoms = {}
    for j, qj in q.items():
        d = table[j] - table[1]
        atoms[d] = atoms.get(d, 0.0) + 0.5 * qj
    for j1, j2 in itertools.product(q, repeat=2):
        d = (table[j1] + table[j2]) / 2.0 - table[2]
        atoms[d] = atoms.get(d, 0.0) + 0.5 * q[j1] * q[j2]
    vals = np.array(sorted(atoms))
    w = np.array([atoms[v] for v in vals])
    G = gfp_delta_transform(p, model)
    H = atom_transform(vals, w)
    th = RNG.uniform(-10, 10, 100)
    assert np.max(np.abs(G(th) - H(th))) < 1e-12


def test_noise_widens_but_preserves_the_mean():
    p = make_poisson(6.0)
    quiet = AttributeModel(kind="gaussian_linear", b=1.0, sigma=0.0)
    noisy = AttributeModel(kind="gaussian_linear", b=1.0, sigma=2.0)
    m0, v0 = mean_var_from_transform(gfp_delta_transform(p, quiet))
    m1, v1 = mean_var_from_transform(gfp_delta_transform(p, noisy))
    assert m1 == pytest.approx(m0, abs=1e-6)
    assert v1 > v0 + 4.0


def test_sample_attributes_statistics():
    rng = np.random.default_rng(99)
    degrees = rng.integers(1, 20, 40000)
    model = AttributeModel(kind="gaussian_linear", a=2.0, b=0.5, sigma=1.5)
    x = sample_attributes(model, degrees, rng)
    resid = x - (2.0 + 0.5 * degrees)
    se = 1.5 / np.sqrt(len(x))
    assert abs(resid.mean()) < 4 * se
    assert resid.std() == pytest.approx(1.5, rel=0.03)
    exact = sample_attributes(AttributeModel(sigma=0.0), degrees, rng)
    assert np.array_equal(exact, degrees.astype(float))


def test_attribute_model_validation():
    with pytest.raises(ParameterError):
        AttributeModel(kind="cubic")
    with pytest.raises(ParameterError):
        AttributeModel(sigma=-0.1)
    with pytest.raises(ParameterError):
        AttributeModel(kind="table", table={})
    model = AttributeModel(kind="table", sigma=0.0, table={1: 0.0})
    with pytest.raises(ParameterError):
        model.mean_at(np.array([1, 3]))
