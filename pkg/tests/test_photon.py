import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from catlab.errors import DomainError
from catlab.phase_space import CatState, ThermalChannel, coefficients
from catlab.photon import (
    klyshko_relative,
    klyshko_statistic,
    mean_photon_number,
    photon_cutoff,
    photon_distribution,
    photon_prob,
    photon_probs,
)

CAT = CatState(2.0)
T0 = coefficients(ThermalChannel(100.0), 0.0)


def cat_overlap(alpha, n):
    if n % 2:
        return 0.0
    return 4 * math.exp(-alpha**2) * alpha ** (2 * n) / (math.factorial(n) * CatState(alpha).norm)


def test_initial_cat_probabilities_match_overlap():
    p = photon_probs(CAT, T0, 20)
    exact = np.array([cat_overlap(2.0, n) for n in range(21)])
    assert np.max(np.abs(p - exact)) < 1e-12
    assert p[0] == pytest.approx(4 * math.exp(-4) / CAT.norm, rel=1e-10)
    assert p[0] == pytest.approx(0.0366190, abs=1e-7)
    assert photon_prob(CAT, T0, 1) == pytest.approx(0.0, abs=1e-13)


def test_parity_at_time_zero():
    p = photon_distribution(CatState(3.0), T0)
    assert np.max(np.abs(p[1::2])) < 1e-12


@pytest.mark.parametrize("alpha,nbar,tau", [(2, 100, 0.0), (2, 100, 0.003), (2, 100, 0.1), (3, 10, 0.05), (1, 1, 0.5), (0, 5, 0.2)])
def test_distribution_sums_to_one(alpha, nbar, tau):
    co = coefficients(ThermalChannel(nbar), tau)
    p = photon_distribution(CatState(alpha), co)
    assert abs(p.sum() - 1.0) < 1e-8
    assert np.all(p > -1e-12)


def test_vacuum_becomes_thermal():
    nbar, tau = 2.0, 0.4
    co = coefficients(ThermalChannel(nbar), tau)
    p = photon_distribution(CatState(0.0), co)
    n = np.arange(len(p))
    thermal = co.d**n / (1 + co.d) ** (n + 1)
    assert np.max(np.abs(p - thermal)) < 1e-11


def test_mean_photon_number_matches_distribution():
    co = coefficients(ThermalChannel(10.0), 0.02)
    p = photon_distribution(CAT, co)
    assert p @ np.arange(len(p)) == pytest.approx(mean_photon_number(CAT, co), rel=1e-9)
    assert CAT.mean_photon_number == pytest.approx(4 * math.tanh(4))


def test_cutoff_grows_with_amplitude_and_noise():
    assert photon_cutoff(2.0, 0.0) < photon_cutoff(3.0, 0.0) < photon_cutoff(3.0, 5.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 30.0))
def test_poisson_statistics_saturate_klyshko(mean):
    p = poisson.pmf(np.arange(14), mean)
    for n in range(11):
        assert abs(klyshko_statistic(p, n)) < 1e-12


def test_klyshko_of_cat_at_time_zero():
    p = photon_probs(CAT, T0, 3)
    assert klyshko_statistic(p, 1) == pytest.approx(-2 * p[2] ** 2, rel=1e-12)
    assert klyshko_statistic(p, 1) < 0


def test_klyshko_rejects_short_input():
    with pytest.raises(DomainError):
        klyshko_statistic(np.array([0.5, 0.5]), 1)


def test_klyshko_relative_is_scale_free():
    p = photon_probs(CAT, T0, 3)
    assert klyshko_relative(p, 1) == pytest.approx(-1.0, abs=1e-9)
    assert klyshko_relative(p * 1e-12, 1) == pytest.approx(-1.0, abs=1e-9)
    assert klyshko_relative(np.array([1.0, 0.0, 0.0, 0.0]), 1) == 0.0
    pois = poisson.pmf(np.arange(6), 2.0)
    assert abs(klyshko_relative(pois, 2)) < 1e-12
