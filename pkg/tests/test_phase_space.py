import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import fftconvolve

from catlab.errors import DomainError
from catlab.numerics import integrate_radial_gaussian
from catlab.phase_space import (
    CatState,
    PhasePoint,
    ThermalChannel,
    char_normal,
    char_s,
    coefficients,
    eval_quasiprob,
    gaussian_kernel,
    minimal_ordering,
    quasiprob_terms,
)

E8 = math.exp(-8.0)
CAT = CatState(2.0)
T0 = coefficients(ThermalChannel(100.0), 0.0)


def grid(half, h):
    x = np.arange(-half, half + h / 2, h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return x, X + 1j * Y


def test_cat_state_validation_and_norm():
    with pytest.raises(DomainError):
        CatState(-1.0)
    with pytest.raises(DomainError):
        CatState(1 + 1j)
    assert CatState(0.0).norm == pytest.approx(4.0)
    assert CatState(10.0).norm == pytest.approx(2.0)
    for a in np.linspace(0, 5, 11):
        assert 2.0 <= CatState(a).norm <= 4.0


def test_channel_validation():
    with pytest.raises(DomainError):
        ThermalChannel(-0.1)
    with pytest.raises(DomainError):
        coefficients(ThermalChannel(1.0), -0.1)
    assert ThermalChannel(1.0, gamma=2.0).rescale(0.25) == pytest.approx(0.5)


def test_coefficients_examples():
    co = coefficients(ThermalChannel(100.0), 0.0)
    assert (co.c, co.d, co.s) == (1.0, 0.0, 1.0)
    tw = 0.5 * math.log1p(1 / 200)
    assert coefficients(ThermalChannel(100.0), tw).s == pytest.approx(0.0, abs=1e-12)
    co = coefficients(ThermalChannel(1.0), 0.5)
    assert co.c == pytest.approx(0.60653066, abs=1e-8)
    assert co.d == pytest.approx(0.63212056, abs=1e-8)
    assert co.v == pytest.approx(co.d / co.c**2)
    assert co.s == pytest.approx(1 - 2 * co.v)


def test_char_normal_examples():
    assert char_normal(CAT, T0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert char_normal(CAT, T0, 1.0) == pytest.approx((1 + E8 * math.cosh(4)) / (1 + E8), rel=1e-14)
    assert char_normal(CAT, T0, 1.0) == pytest.approx(1.0088, abs=1e-4)
    assert char_normal(CAT, T0, PhasePoint(0.0, math.pi / 8)) == pytest.approx(2 * E8 / CAT.norm, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.0, 4.0),
    st.floats(0.0, 200.0),
    st.floats(0.0, 0.5),
    st.floats(-3.0, 3.0),
    st.floats(-3.0, 3.0),
)
def test_char_normal_symmetries_and_origin(alpha, nbar, tau, u, v):
    state, co = CatState(alpha), coefficients(ThermalChannel(nbar), tau)
    val = char_normal(state, co, complex(u, v))
    assert char_normal(state, co, 0.0) == pytest.approx(1.0, abs=1e-14)
    for other in (complex(-u, -v), complex(-u, v), complex(u, -v)):
        assert char_normal(state, co, other) == pytest.approx(val, rel=1e-12, abs=1e-300)
    for s in (-1.0, 0.0, 0.7):
        assert char_s(state, co, 0.0, s) == pytest.approx(1.0, abs=1e-14)


def test_char_s_rescaling():
    assert char_s(CAT, T0, 1.0, -1.0) == pytest.approx(char_normal(CAT, T0, 1.0) * math.exp(-1.0), rel=1e-14)


def test_char_s_round_trip_through_wigner_fourier_transform():
    h = 0.02
    _, B = grid(8.0, h)
    W = eval_quasiprob(CAT, T0, B, 0.0)
    xi = 0.5 + 0.5j
    ft = np.sum(W * np.exp(xi * np.conj(B) - np.conj(xi) * B)) * h * h
    assert ft.real == pytest.approx(char_s(CAT, T0, xi, 0.0), abs=1e-8)
    assert abs(ft.imag) < 1e-10


def test_vacuum_wigner_and_kernel_peak():
    assert eval_quasiprob(CatState(0.0), T0, 0.0, 0.0) == pytest.approx(2 / math.pi, rel=1e-14)
    assert gaussian_kernel(1.0, 0.0) == pytest.approx(2 / math.pi, rel=1e-14)
    with pytest.raises(DomainError):
        gaussian_kernel(0.0, 0.0)


def test_wigner_at_lobe_peak_against_fourier_quadrature():
    # W(beta, 0) = (1/pi^2) integral of chi(xi, 0) exp(beta xi* - beta* xi) d^2 xi,
    # evaluated independently from the characteristic function
    beta = 2.0
    f = lambda u, v: np.real(char_normal(CAT, T0, u + 1j * v) * np.exp(beta * (u - 1j * v) - beta * (u + 1j * v))) / math.pi**2  # noqa: E731
    oracle = integrate_radial_gaussian(f, 0.5, tol=1e-12)
    val = eval_quasiprob(CAT, T0, beta, 0.0)
    assert val == pytest.approx(oracle, abs=1e-10)
    assert val == pytest.approx((1 + 2 * E8 + math.exp(-32)) / (math.pi * (1 + E8)), rel=1e-12)


def test_quasiprob_terms_sum_and_interference_sign():
    plus, minus, interf = quasiprob_terms(CAT, T0, np.array([0.0, 1j * math.pi / 8]), 0.0)
    assert interf[0] > 0 and interf[1] < 0
    assert np.allclose(plus + minus + interf, eval_quasiprob(CAT, T0, np.array([0.0, 1j * math.pi / 8]), 0.0))


def test_singular_ordering_raises_with_minimal_s():
    co = coefficients(ThermalChannel(100.0), 0.0)
    with pytest.raises(DomainError, match="s"):
        eval_quasiprob(CAT, co, 0.0, 1.0)
    co = coefficients(ThermalChannel(100.0), 0.001)
    assert minimal_ordering(co) == pytest.approx(1 + 2 * co.d, abs=1e-5)
    assert minimal_ordering(co) < 1 + 2 * co.d
    assert eval_quasiprob(CAT, co, 0.0, 1.0) > 0


@pytest.mark.parametrize("tau,s", [(0.0, 0.0), (0.0, -1.0), (0.001, 0.5), (0.003, 0.0), (0.05, 1.0)])
def test_quasiprob_normalisation(tau, s):
    co = coefficients(ThermalChannel(100.0), tau)
    h = 0.02
    _, B = grid(10.0 + 8 * math.sqrt(co.d), h)
    total = np.sum(eval_quasiprob(CAT, co, B, s)) * h * h
    assert total == pytest.approx(1.0, abs=1e-6)


def test_convolution_identity_on_grid():
    co = coefficients(ThermalChannel(100.0), 0.001)
    s_hi, s_lo = 0.5, -0.5
    h = 0.03
    x, B = grid(9.0, h)
    w_hi = eval_quasiprob(CAT, co, B, s_hi)
    kern = gaussian_kernel(s_hi - s_lo, B)
    conv = fftconvolve(w_hi, kern, mode="same") * h * h
    direct = eval_quasiprob(CAT, co, B, s_lo)
    assert np.max(np.abs(conv - direct)) < 1e-6
