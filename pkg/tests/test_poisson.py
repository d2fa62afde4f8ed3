"""Exact atom law of Delta for the sparse Poisson graph."""

import math

import numpy as np
import pytest

from fpdist import (mean_inverse_degree, mean_var_from_transform,
                    poisson_delta_moments, poisson_delta_negative_fraction,
                    poisson_delta_pmf, poisson_delta_sign_masses,
                    poisson_delta_transform)
from fpdist.poisson import poisson_delta_conditional_mean


def test_atoms_are_reduced_and_sorted():
    d = poisson_delta_pmf(3.0)
    assert np.all(d.prob > 0)
    assert np.all(d.den >= 1)
    g = np.gcd(np.abs(d.num), d.den)
    assert np.all(g[d.num != 0] == 1)
    assert np.all(np.diff(d.values) > 0)
    assert abs(d.total() - 1.0) < 1e-8


def test_sign_masses_match_atom_enumeration():
    for lam in (1.5, 3.0, 8.0):
        d = poisson_delta_pmf(lam)
        pos, zero, neg = poisson_delta_sign_masses(lam)
        assert d.mass_negative() == pytest.approx(neg, abs=2e-8)
        assert d.mass_zero() == pytest.approx(zero, abs=2e-8)
        assert d.mass_positive() == pytest.approx(pos, abs=2e-8)


def test_negative_fraction_frozen_values():
    # closed-form Poisson cdf sums, frozen before the transform machinery
    assert poisson_delta_negative_fraction(8.0) == pytest.approx(0.351673, abs=1e-6)
    assert poisson_delta_negative_fraction(64.0) == pytest.approx(0.442751, abs=1e-6)
    assert poisson_delta_negative_fraction(1024.0) == pytest.approx(0.485470, abs=1e-6)


def test_conditional_mean_zero_truncation_bias():
    for lam in (2.0, 5.0):
        p0 = math.exp(-lam)
        expect = 1.0 - lam * p0 / (1.0 - p0)
        assert poisson_delta_conditional_mean(lam) == pytest.approx(expect, rel=1e-12)
        assert poisson_delta_pmf(lam).mean() == pytest.approx(expect, abs=1e-6)


def test_transform_moments_compensated():
    # the transform carries the exact sparse-limit moments, not the truncated ones
    for lam in (2.0, 8.0):
        mean, var = mean_var_from_transform(poisson_delta_transform(lam))
        assert mean == pytest.approx(1.0, abs=1e-6)
        assert var == pytest.approx(lam * (1.0 + mean_inverse_degree(lam)), abs=1e-4)
        m_th, v_th = poisson_delta_moments(lam)
        assert m_th == 1.0
        assert v_th == pytest.approx(lam * (1.0 + mean_inverse_degree(lam)), rel=1e-12)


def test_mean_inverse_series_frozen():
    assert mean_inverse_degree(2.0) == pytest.approx(0.576590885022, abs=1e-10)
    assert mean_inverse_degree(8.0) == pytest.approx(0.146889064957, abs=1e-10)
    assert mean_inverse_degree(32.0) == pytest.approx(0.032294173882, abs=1e-10)
