"""Photon-number statistics of the evolved cat from its characteristic function.

p(n) = (1/pi) * integral Phi_t(u, v) exp(-r^2) L_n(r^2) du dv, with the
Gaussian exp(-(1 + d) r^2) absorbed into a polar Gauss-Laguerre rule.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, DomainError
from .numerics import MAX_DOUBLINGS, laguerre_table, radial_gaussian_rule
from .phase_space import CatState, ChannelCoefficients

QUAD_TOL = 1e-10


def photon_cutoff(alpha, nbar_eff):
    """Fock cutoff covering the coherent support plus thermal broadening."""
    return math.ceil(alpha**2 + 10 * alpha + 20 + 6 * math.sqrt(nbar_eff) + nbar_eff)


def _angular_part(state, coeffs, u, v):
    # Phi_t without its exp(-d r^2) factor, which lives in the rule weight
    a, ca = state.alpha, coeffs.c * state.alpha
    z = np.abs(2 * ca * u)
    hyp = 0.5 * np.exp(z - 2 * a * a) * (1.0 + np.exp(-2 * z))
    return (2.0 / state.norm) * (np.cos(2 * ca * v) + hyp)


def photon_probs(state: CatState, coeffs: ChannelCoefficients, n_max: int, tol: float = QUAD_TOL):
    """p(0..n_max) by adaptive polar quadrature; raises ConvergenceError on failure."""
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    width = 1.0 + coeffs.d
    n_rad = max(32, 1 << math.ceil(math.log2(n_max + 2)))
    n_ang = 32
    prev = None
    for _ in range(MAX_DOUBLINGS + 1):
        rule = radial_gaussian_rule(width, n_rad, n_ang)
        ang = np.sum(rule.weights * _angular_part(state, coeffs, rule.u, rule.v), axis=1)
        r2 = rule.u[:, 0] ** 2 + rule.v[:, 0] ** 2
        cur = ang @ laguerre_table(n_max, r2) / math.pi
        if prev is not None:
            resid = float(np.max(np.abs(cur - prev)))
            if resid < tol:
                return cur
        prev = cur
        n_rad *= 2
        n_ang *= 2
    raise ConvergenceError("photon-number quadrature did not converge", resid)


def photon_prob(state: CatState, coeffs: ChannelCoefficients, n: int, tol: float = QUAD_TOL) -> float:
    if n < 0:
        raise DomainError(f"photon number must be >= 0, got {n}")
    return float(photon_probs(state, coeffs, n, tol)[n])


def photon_distribution(state: CatState, coeffs: ChannelCoefficients, tail_tol: float = 1e-11):
    """Photon distribution up to a cutoff whose neglected tail is below ``tail_tol``."""
    # thermal part of the distribution is geometric with ratio d/(1+d)
    n_max = photon_cutoff(state.alpha, coeffs.d) + math.ceil((1 + coeffs.d) * math.log(1 / tail_tol))
    for _ in range(4):
        p = photon_probs(state, coeffs, n_max)
        if 1.0 - p.sum() < tail_tol and np.all(np.abs(p[-4:]) < tail_tol):
            return p
        n_max *= 2
    raise ConvergenceError("photon distribution tail did not become negligible", 1.0 - p.sum())


def mean_photon_number(state: CatState, coeffs: ChannelCoefficients) -> float:
    """<a^dag a> at time tau: c^2 <n>_0 + d."""
    return coeffs.c**2 * state.mean_photon_number + coeffs.d


def klyshko_statistic(p, n):
    """B(n) = (n+2) p(n) p(n+2) - (n+1) p(n+1)^2 for a probability vector ``p``."""
    p = np.asarray(p, dtype=float)
    n = np.asarray(n)
    if np.any(n < 0) or np.any(n + 2 >= p.shape[-1]):
        raise DomainError("need p(n), p(n+1) and p(n+2)")
    return (n + 2) * p[..., n] * p[..., n + 2] - (n + 1) * p[..., n + 1] ** 2


def klyshko_relative(p, n):
    """B(n) divided by the sum of its two terms, so it lies in [-1, 1].

    The sign matches B(n) but does not depend on how small p(n..n+2) are,
    which matters for large cats whose low photon numbers are nearly empty.
    """
    p = np.asarray(p, dtype=float)
    if n < 0 or n + 2 >= p.shape[-1]:
        raise DomainError("need p(n), p(n+1) and p(n+2)")
    a = (n + 2) * p[..., n] * p[..., n + 2]
    b = (n + 1) * p[..., n + 1] ** 2
    scale = np.abs(a) + np.abs(b)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, (a - b) / np.where(scale > 0, scale, 1.0), 0.0)
