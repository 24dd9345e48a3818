"""Small numerical kernels shared by the rest of the package.

Laguerre polynomials, Gaussian-weighted quadrature rules on the plane,
bisection on a certified bracket and golden-section line search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_hermite

from .errors import ConvergenceError, DomainError

MAX_DOUBLINGS = 12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def laguerre(n, x):
    """L_n(x) from the three-term recurrence.

    Works elementwise on array ``x``.
    """
    if n < 0:
        raise DomainError(f"Laguerre order must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(n_max, x):
    """All of L_0 .. L_{n_max} at ``x``; result has a trailing axis of length n_max+1."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = 1.0 - x
    for k in range(1, n_max):
        out[..., k + 1] = ((2 * k + 1 - x) * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (u, v) and positive weights for integrals over the plane.

    The Gaussian factor exp(-width*(u**2 + v**2)) is folded into ``weights``,
    so ``sum(weights * f(u, v))`` approximates the weighted integral of f.
    """

    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray
    kind: str
    order: int

    def integrate(self, f):
        vals = np.asarray(f(self.u, self.v))
        w = self.weights.reshape(self.weights.shape + (1,) * (vals.ndim - self.weights.ndim))
        return np.sum(w * vals, axis=tuple(range(self.weights.ndim)))


def _scaled_laguerre_pair(n, x):
    # (L_{n-1}, L_n) * exp(-logscale), rescaled on the fly so high orders never overflow
    prev = np.ones_like(x)
    cur = 1.0 - x
    logscale = np.zeros_like(x)
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
        big = np.abs(cur) > 1e150
        if np.any(big):
            prev[big] *= 1e-150
            cur[big] *= 1e-150
            logscale[big] += 150 * math.log(10.0)
    return prev, cur, logscale


@lru_cache(maxsize=32)
def gauss_laguerre(n):
    """Nodes and weights of n-point Gauss-Laguerre quadrature (weight e^{-x}).

    Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, polished by
    Newton steps.  Weights come from the squared first eigenvector components
    where those are well resolved, and from w = x / ((n+1) L_{n+1}(x))^2 in
    log space for the far tail.  Weights that underflow are dropped with their
    nodes.
    """
    off = np.arange(1, n, dtype=float)
    x, vecs = eigh_tridiagonal(2.0 * np.arange(n) + 1.0, off)
    w_gw = vecs[0, :] ** 2
    for _ in range(2):
        lm1, ln, _ = _scaled_laguerre_pair(n, x)
        x = x - ln / (n * (ln - lm1) / x)
    _, lp1, logscale = _scaled_laguerre_pair(n + 1, x)
    logw = np.log(x) - 2.0 * (math.log(n + 1) + np.log(np.abs(lp1)) + logscale)
    w = np.where(w_gw > 1e-8, w_gw, np.exp(logw))
    keep = w > 0.0
    return x[keep], w[keep]


def _laguerre_nodes(n_radial):
    return gauss_laguerre(n_radial)


def radial_gaussian_rule(width, n_radial, n_angular):
    """Polar rule for the weight exp(-width*r**2) on the plane.

    Radial part is Gauss-Laguerre in x = width*r**2, angular part is the
    equispaced trapezoid rule (spectrally accurate for periodic integrands).
    Exact for weighted polynomials u**a v**b with a+b < min(2*n_radial, n_angular).
    """
    if width <= 0:
        raise DomainError(f"Gaussian width must be positive, got {width}")
    x, wx = _laguerre_nodes(n_radial)
    r = np.sqrt(x / width)
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    R, T = np.meshgrid(r, theta, indexing="ij")
    # r dr dtheta e^{-width r^2} = dx dtheta e^{-x} / (2 width)
    W = np.broadcast_to((wx / (2.0 * width))[:, None] * (2.0 * np.pi / n_angular), R.shape)
    return QuadratureRule(R * np.cos(T), R * np.sin(T), np.array(W), "radial-gaussian", n_radial)


def tensor_hermite_rule(width, order):
    """Tensor-product Gauss-Hermite rule for exp(-width*(u**2+v**2))."""
    if width <= 0:
        raise DomainError(f"Gaussian width must be positive, got {width}")
    t, w = roots_hermite(order)
    t = t / math.sqrt(width)
    w = w / math.sqrt(width)
    U, V = np.meshgrid(t, t, indexing="ij")
    return QuadratureRule(U, V, np.outer(w, w), "tensor-2d", order)


def integrate_radial_gaussian(f, width, tol=1e-10, n_start=32):
    """Integrate f(u, v)*exp(-width*(u**2+v**2)) over the plane.

    Radial and angular node counts are doubled together until two successive
    estimates agree to ``tol`` (absolute, elementwise if ``f`` is array-valued
    with a trailing axis).
    """
    n = n_start
    prev = radial_gaussian_rule(width, n, n).integrate(f)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        cur = radial_gaussian_rule(width, n, n).integrate(f)
        resid = float(np.max(np.abs(cur - prev)))
        if resid < tol:
            return cur if np.ndim(cur) else float(cur)
        prev = cur
    raise ConvergenceError(f"radial quadrature did not converge after {MAX_DOUBLINGS} doublings", resid)


# --------------------------------------------------------------------------
# root finding and line search
# --------------------------------------------------------------------------

def _sign(val):
    if isinstance(val, (bool, np.bool_)):
        return 1 if val else -1
    if not np.isfinite(val) and not np.isinf(val):
        raise ConvergenceError("function returned NaN inside bracket", float("nan"))
    return 1 if val > 0 else -1


@dataclass(frozen=True)
class Bracket:
    """Interval with a certified sign change of ``f``.

    A boolean predicate counts True as positive.  Build with :meth:`certify`
    to evaluate the endpoints once.
    """

    lo: float
    hi: float
    sign_lo: int
    sign_hi: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.sign_lo == self.sign_hi:
            raise DomainError(f"no sign change on [{self.lo}, {self.hi}]")

    @classmethod
    def certify(cls, f, lo, hi):
        return cls(lo, hi, _sign(f(lo)), _sign(f(hi)))

    @property
    def width(self):
        return self.hi - self.lo


class BisectResult(NamedTuple):
    root: float
    iterations: int
    bracket: Bracket


def bisect(f: Callable, bracket: Bracket, tol: float = 1e-7, max_iter: int = 200) -> BisectResult:
    """Bisect a certified bracket until hi - lo <= tol.

    ``f`` may be real-valued or a boolean predicate.  Only midpoints are
    evaluated, so f is never called outside the initial bracket.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    lo, hi, s_lo = bracket.lo, bracket.hi, bracket.sign_lo
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            raise ConvergenceError("bisection hit the iteration cap", hi - lo)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution
            break
        if _sign(f(mid)) == s_lo:
            lo = mid
        else:
            hi = mid
        it += 1
    final = Bracket(lo, hi, bracket.sign_lo, bracket.sign_hi)
    return BisectResult(0.5 * (lo + hi), it, final)


def golden_section_max(f, lo, hi, tol=1e-10, max_iter=500):
    """Maximise a unimodal f on [lo, hi]; returns (argmax, max)."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    # the endpoints may beat the interior probes when the peak sits on the boundary
    cands = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    best_val, best_x = max(cands, key=lambda t: t[0])
    return best_x, best_val
