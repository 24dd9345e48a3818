"""Brute-force check of the analytic path: the thermal master equation in a truncated Fock basis.

Nothing in the analytic modules imports this one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .errors import ConvergenceError, DomainError, TruncationError
from .phase_space import CatState, PhasePoint, ThermalChannel
from .photon import photon_cutoff

LEAK_TOL = 1e-6
HERMITIAN_TOL = 1e-12


@dataclass
class FockDensityMatrix:
    """Density matrix on span{|0>, ..., |dim-1>}."""

    elements: np.ndarray

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.elements)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.elements + self.elements.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def mean_photon_number(self) -> float:
        return float(np.real(np.diagonal(self.elements)) @ np.arange(self.dim))


def cutoff_for(alpha, nbar, tau_max, tail=1e-12):
    """Basis size: coherent support, thermal broadening and a geometric thermal tail."""
    d = -nbar * math.expm1(-2.0 * tau_max)
    return photon_cutoff(alpha, d) + math.ceil((1 + d) * math.log(1 / tail)) * (d > 0) + 1


def cat_density_matrix(state: CatState, dim: int) -> FockDensityMatrix:
    n = np.arange(dim)
    a = state.alpha
    if a == 0.0:
        amp = (n == 0).astype(float)
    else:
        # (1 + (-1)^n) e^{-a^2/2} a^n / sqrt(n! N), built in log space
        logmag = -0.5 * a * a + n * math.log(a) - 0.5 * gammaln(n + 1) - 0.5 * math.log(state.norm)
        amp = np.where(n % 2 == 0, 2.0 * np.exp(logmag), 0.0)
    captured = float(amp @ amp)
    if captured < 1.0 - 1e-10:
        raise TruncationError(f"dim={dim} keeps only {captured:.12f} of the cat norm; increase dim")
    return FockDensityMatrix(np.outer(amp, amp).astype(complex))


def _generator_coefficients(nbar, dim):
    # rates for the untruncated equation; population leaving the top level is lost,
    # which makes 1 - trace a direct measure of truncation error
    n = np.arange(dim, dtype=float)
    nm = n[:, None] + n[None, :]
    diag = -((nbar + 1) * nm + nbar * (nm + 2))
    sq = np.sqrt(n[1:])
    down = 2 * (nbar + 1) * np.outer(sq, sq)  # rho[m+1,k+1] -> rho[m,k]
    up = 2 * nbar * np.outer(sq, sq)  # rho[m-1,k-1] -> rho[m,k]
    return diag, down, up


def _rhs(rho, coef):
    diag, down, up = coef
    out = diag * rho
    out[:-1, :-1] += down * rho[1:, 1:]
    out[1:, 1:] += up * rho[:-1, :-1]
    return out


def liouvillian(nbar, dim):
    """Sparse generator acting on row-major vec(rho), in units of gamma."""
    sq = np.sqrt(np.arange(dim, dtype=float))
    n = np.arange(dim)
    idx = np.arange(dim * dim).reshape(dim, dim)
    m_i, k_i = np.meshgrid(n, n, indexing="ij")
    diag = -((nbar + 1) * (m_i + k_i) + nbar * (m_i + k_i + 2)).ravel().astype(float)
    rows, cols, vals = [idx.ravel()], [idx.ravel()], [diag]
    # d rho[m,k] += 2(n+1) sqrt((m+1)(k+1)) rho[m+1,k+1]
    rows.append(idx[:-1, :-1].ravel())
    cols.append(idx[1:, 1:].ravel())
    vals.append((2 * (nbar + 1) * np.outer(sq[1:], sq[1:])).ravel())
    # d rho[m,k] += 2n sqrt(m k) rho[m-1,k-1]
    rows.append(idx[1:, 1:].ravel())
    cols.append(idx[:-1, :-1].ravel())
    vals.append((2 * nbar * np.outer(sq[1:], sq[1:])).ravel())
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim * dim, dim * dim)
    )


def default_dt(nbar, dim):
    # fastest decay rate of the truncated generator is ~ 2(2n+1)(dim-1) + 2n;
    # h*lambda = 0.2 keeps RK4 well inside its stability region and accurate
    lam = 2 * (2 * nbar + 1) * (dim - 1) + 2 * nbar + 1e-12
    return min(1e-3, 0.1 / (nbar + 1), 0.2 / lam)


def evolve(rho: FockDensityMatrix, channel: ThermalChannel, tau: float, dt=None, method="rk4") -> FockDensityMatrix:
    """Integrate the thermal master equation over rescaled time ``tau``.

    ``method="rk4"`` steps classical Runge-Kutta; ``method="expm"`` applies the
    exact propagator of the truncated generator.  Raises TruncationError when
    more than LEAK_TOL of the trace leaks through the cutoff.
    """
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if tau == 0:
        return FockDensityMatrix(rho.elements.copy())
    dim, nbar = rho.dim, channel.nbar
    t0 = rho.trace
    if method == "expm":
        vec = expm_multiply(liouvillian(nbar, dim) * tau, rho.elements.ravel())
        out = vec.reshape(dim, dim)
    elif method == "rk4":
        h_max = default_dt(nbar, dim) if dt is None else dt
        steps = max(1, math.ceil(tau / h_max))
        h = tau / steps
        coef = _generator_coefficients(nbar, dim)
        out = rho.elements.copy()
        if not np.any(out.imag):
            out = out.real  # the channel maps real matrices to real matrices
        for _ in range(steps):
            k1 = _rhs(out, coef)
            k2 = _rhs(out + 0.5 * h * k1, coef)
            k3 = _rhs(out + 0.5 * h * k2, coef)
            k4 = _rhs(out + h * k3, coef)
            out = out + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(out)):
            raise ConvergenceError("RK4 integration diverged; reduce dt", float("inf"))
    else:
        raise DomainError(f"unknown method {method!r}")
    leak = t0 - float(np.real(np.trace(out)))
    if leak > LEAK_TOL:
        raise TruncationError(f"trace leakage {leak:.2e} through cutoff dim={dim}; increase dim")
    return FockDensityMatrix(out.astype(complex))


def oracle_photon_probs(rho: FockDensityMatrix) -> np.ndarray:
    p = np.real(np.diagonal(rho.elements)).copy()
    p[(p < 0) & (p > -1e-14)] = 0.0
    return p


def displacement_matrix(xi: complex, dim: int) -> np.ndarray:
    """<m|D(xi)|n> for m, n < dim via D[m,n] = (sqrt(m) D[m-1,n-1] - conj(xi) D[m,n-1]) / sqrt(n)."""
    D = np.zeros((dim, dim), dtype=complex)
    sq = np.sqrt(np.arange(dim, dtype=float))
    col = np.empty(dim, dtype=complex)
    col[0] = math.exp(-0.5 * abs(xi) ** 2)
    for m in range(1, dim):
        col[m] = col[m - 1] * xi / sq[m]
    D[:, 0] = col
    for n in range(1, dim):
        D[1:, n] = (sq[1:] * D[:-1, n - 1] - np.conj(xi) * D[1:, n - 1]) / sq[n]
        D[0, n] = -np.conj(xi) * D[0, n - 1] / sq[n]
    return D


def oracle_char_normal(rho: FockDensityMatrix, xi) -> complex:
    """Tr[rho D(xi)] exp(|xi|^2/2)."""
    xi = complex(xi) if isinstance(xi, PhasePoint) else complex(xi)
    amp = math.exp(0.5 * abs(xi) ** 2)
    resid = amp * np.finfo(float).eps * rho.dim
    if resid > 1e-8:
        raise ConvergenceError(f"|xi|={abs(xi):.3g} amplifies rounding beyond tolerance", resid)
    D = displacement_matrix(xi, rho.dim)
    return complex(np.sum(rho.elements.T * D) * amp)
