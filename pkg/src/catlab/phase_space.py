"""Even cat state in a thermal channel: characteristic functions and quasiprobabilities.

Conventions
-----------
Phase-space points are complex numbers ``xi = u + 1j*v`` (or ``beta`` for the
quasiprobability argument).  Time is the dimensionless ``tau = gamma*t``.

The channel acts on the normally ordered characteristic function as
``Phi_t(xi) = Phi_0(c*xi) * exp(-d*|xi|**2)`` with ``c = exp(-tau)`` and
``d = nbar*(1 - exp(-2*tau))``.  Quasiprobabilities are normalised to one
with respect to ``d^2 beta = d(Re beta) d(Im beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

MIN_WIDTH = 1e-6


@dataclass(frozen=True)
class CatState:
    """(|alpha> + |-alpha>)/sqrt(N) with real alpha >= 0."""

    alpha: float

    def __post_init__(self):
        if isinstance(self.alpha, complex) or np.iscomplexobj(self.alpha):
            raise DomainError("only real cat amplitudes are supported")
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"alpha must be finite and >= 0, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def norm(self) -> float:
        return 2.0 * (1.0 + math.exp(-2.0 * self.alpha**2))

    @property
    def mean_photon_number(self) -> float:
        a2 = self.alpha**2
        return a2 * math.tanh(a2)


@dataclass(frozen=True)
class ThermalChannel:
    nbar: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.nbar) and self.nbar >= 0):
            raise DomainError(f"nbar must be >= 0, got {self.nbar}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    def rescale(self, t):
        """Physical time to tau = gamma*t."""
        return self.gamma * t


@dataclass(frozen=True)
class ChannelCoefficients:
    tau: float
    c: float
    d: float
    v: float
    s: float


class PhasePoint(NamedTuple):
    u: float
    v: float

    def __complex__(self):
        return complex(self.u, self.v)


def _as_xi(xi):
    if isinstance(xi, PhasePoint):
        return complex(xi)
    return np.asarray(xi, dtype=complex)


def coefficients(channel: ThermalChannel, tau: float) -> ChannelCoefficients:
    if tau < 0 or not math.isfinite(tau):
        raise DomainError(f"tau must be finite and >= 0, got {tau}")
    c = math.exp(-tau)
    d = -channel.nbar * math.expm1(-2.0 * tau)
    v = d / (c * c)
    return ChannelCoefficients(tau=float(tau), c=c, d=d, v=v, s=1.0 - 2.0 * v)


def _cosh_part(alpha, z, damp):
    # exp(-2 alpha^2) cosh(z) exp(-damp), kept finite for large |z|
    z = np.abs(z)
    return 0.5 * np.exp(z - 2.0 * alpha**2 - damp) * (1.0 + np.exp(-2.0 * z))


def char_normal(state: CatState, coeffs: ChannelCoefficients, xi):
    """Normally ordered characteristic function Phi_t(xi) (real for real alpha)."""
    xi = _as_xi(xi)
    u, v = np.real(xi), np.imag(xi)
    a, c, d = state.alpha, coeffs.c, coeffs.d
    damp = d * (u * u + v * v)
    val = np.exp(-damp) * np.cos(2 * c * a * v) + _cosh_part(a, 2 * c * a * u, damp)
    val = (2.0 / state.norm) * val
    return float(val) if np.ndim(val) == 0 else val


def log_char_normal_axis(state: CatState, coeffs: ChannelCoefficients, u):
    """log Phi_t(u, 0), finite even where Phi_t itself would overflow."""
    u = np.abs(np.asarray(u, dtype=float))
    a, c, d = state.alpha, coeffs.c, coeffs.d
    z = 2 * c * a * u
    # 1 + e^{-2a^2} cosh z = 1 + 0.5 e^{z-2a^2}(1 + e^{-2z})
    tail = np.log(0.5) + z - 2 * a * a + np.log1p(np.exp(-2 * z))
    return math.log(2.0 / state.norm) - d * u * u + np.logaddexp(0.0, tail)


def char_s(state: CatState, coeffs: ChannelCoefficients, xi, s: float):
    """s-ordered characteristic function chi(xi, s)."""
    if s > 1:
        raise DomainError(f"ordering parameter must be <= 1, got {s}")
    xi = _as_xi(xi)
    return char_normal(state, coeffs, xi) * np.exp(-0.5 * (1.0 - s) * np.abs(xi) ** 2)


def gaussian_kernel(kappa: float, beta):
    """Convolution kernel (2/(pi*kappa)) exp(-2|beta|^2/kappa) linking orderings."""
    if kappa <= 0:
        raise DomainError(f"kernel width must be positive, got {kappa}")
    beta = _as_xi(beta)
    return 2.0 / (math.pi * kappa) * np.exp(-2.0 * np.abs(beta) ** 2 / kappa)


def gaussian_width(coeffs: ChannelCoefficients, s: float) -> float:
    """Total Gaussian coefficient a in chi(xi, s) ~ exp(-a |xi|^2)."""
    return coeffs.d + 0.5 * (1.0 - s)


def minimal_ordering(coeffs: ChannelCoefficients) -> float:
    """Largest s for which the closed-form quasiprobability is regular enough."""
    return 1.0 + 2.0 * (coeffs.d - MIN_WIDTH)


def quasiprob_terms(state: CatState, coeffs: ChannelCoefficients, beta, s: float):
    """The three Gaussian pieces of W(beta, s): (+ lobe, - lobe, interference)."""
    if s > 1:
        raise DomainError(f"ordering parameter must be <= 1, got {s}")
    width = gaussian_width(coeffs, s)
    if width < MIN_WIDTH:
        raise DomainError(
            f"s={s} is too close to the singular P limit at tau={coeffs.tau}; "
            f"need s <= {minimal_ordering(coeffs):.12g}"
        )
    beta = _as_xi(beta)
    x, y = np.real(beta), np.imag(beta)
    a = state.alpha
    ca = coeffs.c * a
    pref = 1.0 / (state.norm * math.pi * width)
    plus = pref * np.exp(-((x - ca) ** 2 + y * y) / width)
    minus = pref * np.exp(-((x + ca) ** 2 + y * y) / width)
    interf = 2.0 * pref * np.exp(-2 * a * a + (ca * ca - x * x - y * y) / width) * np.cos(2 * ca * y / width)
    return plus, minus, interf


def eval_quasiprob(state: CatState, coeffs: ChannelCoefficients, beta, s: float):
    """s-parametrised quasiprobability W(beta, s) of the evolved cat."""
    plus, minus, interf = quasiprob_terms(state, coeffs, beta, s)
    val = plus + minus + interf
    return float(val) if np.ndim(val) == 0 else val


def initial_quasiprob(state: CatState, beta, s: float):
    """W(beta, s) of the undecohered cat, for any s < 1 (including s < -1)."""
    return eval_quasiprob(state, ChannelCoefficients(0.0, 1.0, 0.0, 0.0, 1.0), beta, s)
