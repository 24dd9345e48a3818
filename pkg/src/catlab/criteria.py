"""Nonclassicality indicators for the decohering cat and their threshold times.

Every threshold finder works in rescaled time tau = gamma*t and returns a
:class:`ThresholdResult`.  Under a zero-temperature channel (nbar = 0) the
closed-form bounds, the Vogel and the Klyshko criteria never switch off, which
is reported as ``tau_star = inf``; Wigner negativity alone still disappears,
at tau = ln(2)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, DomainError
from .numerics import Bracket, bisect, golden_section_max
from .phase_space import (
    MIN_WIDTH,
    CatState,
    ChannelCoefficients,
    PhasePoint,
    ThermalChannel,
    char_normal,
    coefficients,
    eval_quasiprob,
    gaussian_width,
    log_char_normal_axis,
)
from .photon import klyshko_relative, klyshko_statistic, photon_probs

EPS_STRICT = 1e-10
# photon_probs is accurate to ~2e-15 absolute; below this p(n) loses its relative accuracy
KLYSHKO_FLOOR = 1e-11
TAU_TOL = 1e-7
CRITERIA = ("fringe", "depth", "wigner_neg", "vogel1", "vogel2", "klyshko")

_INITIAL = ChannelCoefficients(0.0, 1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class CriterionVerdict:
    value: float
    nonclassical: bool
    criterion_id: str


@dataclass(frozen=True)
class ThresholdResult:
    """Quantum-to-classical threshold in rescaled time.

    ``bracket`` is the final bisection interval: nonclassical at its lower end,
    classical at its upper end.  ``crossings`` lists every coarse-grid interval
    on which the verdict changed.
    """

    tau_star: float
    bracket: tuple
    iterations: int
    criterion_id: str
    crossings: tuple = ()
    never_nonclassical: bool = False

    @property
    def finite(self) -> bool:
        return math.isfinite(self.tau_star)


def _infinite(criterion_id):
    return ThresholdResult(math.inf, (math.inf, math.inf), 0, criterion_id)


def _never(criterion_id):
    return ThresholdResult(0.0, (0.0, 0.0), 0, criterion_id, never_nonclassical=True)


def find_threshold(nonclassical, tau_hi, criterion_id, tol=TAU_TOL, n_scan=48, max_expand=8):
    """Supremum of {tau : nonclassical(tau)} via coarse scan plus bisection.

    The scan runs over [0, tau_hi], doubling tau_hi while the last sample is
    still nonclassical.  The last True -> False change is refined by bisection.
    """
    if not nonclassical(0.0):
        return _never(criterion_id)
    for _ in range(max_expand + 1):
        grid = np.linspace(0.0, tau_hi, n_scan + 1)
        flags = [True] + [bool(nonclassical(t)) for t in grid[1:]]
        if not flags[-1]:
            break
        tau_hi *= 2.0
    else:
        raise DomainError(f"{criterion_id}: still nonclassical at tau={tau_hi / 2:.3g}")
    changes = [(float(grid[i]), float(grid[i + 1])) for i in range(n_scan) if flags[i] != flags[i + 1]]
    lo, hi = changes[-1]
    res = bisect(nonclassical, Bracket(lo, hi, 1, -1), tol=tol)
    return ThresholdResult(
        res.root, (res.bracket.lo, res.bracket.hi), res.iterations, criterion_id, tuple(changes)
    )


# --------------------------------------------------------------------------
# fringe visibility and the closed-form bounds
# --------------------------------------------------------------------------

def fringe_visibility(state: CatState, coeffs: ChannelCoefficients) -> float:
    return math.exp(-2.0 * state.alpha**2 * (1.0 - coeffs.c**2 / (1.0 + 2.0 * coeffs.d)))


def tau_nonclassical_depth(channel: ThermalChannel) -> float:
    """Time at which the channel has turned the initial P function into its Q function."""
    if channel.nbar == 0:
        return math.inf
    return 0.5 * math.log1p(1.0 / channel.nbar)


def tau_wigner_negativity(channel: ThermalChannel) -> float:
    """Time at which the channel has turned the initial P function into its Wigner function."""
    if channel.nbar == 0:
        return math.inf
    return 0.5 * math.log1p(1.0 / (2.0 * channel.nbar))


# --------------------------------------------------------------------------
# quasiprobability negativity
# --------------------------------------------------------------------------

def _y_scan(width, ca, grid_factor, periodic=False):
    # the interference fringes have period pi*width/ca along the imaginary axis
    period = math.pi * width / ca if ca > 0 else math.inf
    if periodic:
        y_max = period
    else:
        y_max = ca + 6.0 * math.sqrt(width)
        if period < math.inf:
            y_max = max(y_max, 0.6 * period)  # always reach the first trough
    step = min(math.sqrt(width), period) / (20.0 * grid_factor)
    return np.linspace(0.0, y_max, int(math.ceil(y_max / step)) + 1)


def quasiprob_minimum(state: CatState, coeffs: ChannelCoefficients, s: float, grid_factor: float = 1.0):
    """Global minimum of W(beta, s) over the plane as (value, PhasePoint).

    Scans the imaginary axis (where the interference fringes of a real cat
    live), refines with golden section, then polishes in 2D.
    """
    width = gaussian_width(coeffs, s)
    ca = coeffs.c * state.alpha
    y = _y_scan(width, ca, grid_factor)
    vals = eval_quasiprob(state, coeffs, 1j * y, s)
    i = int(np.argmin(vals))
    lo, hi = y[max(i - 1, 0)], y[min(i + 1, len(y) - 1)]
    y_best, neg = golden_section_max(lambda t: -eval_quasiprob(state, coeffs, 1j * t, s), lo, hi, tol=1e-12)
    res = minimize(
        lambda p: eval_quasiprob(state, coeffs, complex(p[0], p[1]), s),
        x0=[0.0, y_best],
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-16},
    )
    if res.fun < -neg:
        return float(res.fun), PhasePoint(float(res.x[0]), float(res.x[1]))
    return float(-neg), PhasePoint(0.0, float(y_best))


def wigner_minimum(state: CatState, coeffs: ChannelCoefficients):
    return quasiprob_minimum(state, coeffs, 0.0)


def relative_negativity(state: CatState, coeffs: ChannelCoefficients, s: float, grid_factor: float = 1.0) -> float:
    """min over the plane of W(beta, s) / (lobe part of W at beta).

    Scale-free: negative exactly when W(., s) has a negative region, however
    small the envelope there.  Off the imaginary axis the ratio is pulled
    towards 1 by cosh(2 c alpha x / width), so the axis scan is exhaustive.
    """
    width = gaussian_width(coeffs, s)
    if width < MIN_WIDTH:
        raise DomainError(f"ordering s={s} too close to the singular limit")
    a, ca = state.alpha, coeffs.c * state.alpha
    # clipped: past ~e^700 only the sign of the trough matters
    log_amp = min(-2.0 * a * a + 2.0 * ca * ca / width, 700.0)

    def ratio(y):
        return 1.0 + np.exp(log_amp) * np.cos(2.0 * ca * y / width)

    if ca == 0:
        return 1.0
    y = _y_scan(width, ca, grid_factor, periodic=True)
    vals = ratio(y)
    i = int(np.argmin(vals))
    lo, hi = y[max(i - 1, 0)], y[min(i + 1, len(y) - 1)]
    _, neg = golden_section_max(lambda t: -ratio(t), lo, hi, tol=1e-12)
    return float(-neg)


def tau_wigner_numeric(state: CatState, channel: ThermalChannel, tol: float = TAU_TOL) -> ThresholdResult:
    """Time at which the evolved Wigner function stops having a negative region.

    Finite even for nbar = 0, where the closed-form bound diverges.
    """

    def negative(tau):
        return relative_negativity(state, coefficients(channel, tau), 0.0) < -EPS_STRICT

    tau_hi = 2.0 * tau_nonclassical_depth(channel) if channel.nbar > 0 else 1.0
    return find_threshold(negative, tau_hi, "wigner_neg", tol)


def exact_depth_threshold(
    state: CatState, channel: ThermalChannel, tol: float = TAU_TOL, grid_factor: float = 1.0
) -> ThresholdResult:
    """Smallest tau at which the initial cat's W(., s_tau) is everywhere nonnegative.

    The evolved P function equals the initial W at ordering s_tau up to a
    rescaling, so this is when the evolved P function becomes a probability
    density.
    """
    if channel.nbar == 0:
        return _infinite("depth") if state.alpha > 0 else _never("depth")
    if state.alpha == 0:
        return _never("depth")

    def nonclassical(tau):
        s = coefficients(channel, tau).s
        if 0.5 * (1.0 - s) < MIN_WIDTH:
            return True  # the cat's P function is singular
        return relative_negativity(state, _INITIAL, s, grid_factor) < -EPS_STRICT

    return find_threshold(nonclassical, 2.0 * tau_nonclassical_depth(channel), "depth", tol)


# --------------------------------------------------------------------------
# Vogel criteria
# --------------------------------------------------------------------------

def _vogel_scan_grid(state, coeffs):
    ca, d = coeffs.c * state.alpha, coeffs.d
    u_max = ca / d + 8.0 / math.sqrt(d)
    scale = max(math.sqrt(1.0 + d), 2.0 * ca)
    n = int(min(max(20.0 * u_max * scale, 2001), 400001))
    return np.linspace(0.0, u_max, n)


def vogel_supremum(state: CatState, coeffs: ChannelCoefficients):
    """sup_u Phi_t(u, 0) and its maximiser; inf when the supremum is unbounded.

    Phi_t(u, v) <= Phi_t(u, 0), and Phi_t is even, so u >= 0 on the real axis
    suffices.  Search happens on log Phi to stay finite for large alpha.
    """
    if state.alpha == 0:
        return 1.0, 0.0
    if coeffs.d == 0:
        return math.inf, math.inf
    u = _vogel_scan_grid(state, coeffs)
    logphi = log_char_normal_axis(state, coeffs, u)
    i = int(np.argmax(logphi))
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    u_best, log_best = golden_section_max(
        lambda t: float(log_char_normal_axis(state, coeffs, t)), lo, hi, tol=1e-12
    )
    if log_best <= 0.0:
        return 1.0, 0.0
    with np.errstate(over="ignore"):
        return float(np.exp(log_best)), float(u_best)


def vogel1_nonclassical(state: CatState, coeffs: ChannelCoefficients) -> bool:
    sup, _ = vogel_supremum(state, coeffs)
    return sup > 1.0 + EPS_STRICT


def tau_vogel(state: CatState, channel: ThermalChannel, tol: float = TAU_TOL) -> ThresholdResult:
    if channel.nbar == 0:
        return _infinite("vogel1") if state.alpha > 0 else _never("vogel1")
    return find_threshold(
        lambda tau: vogel1_nonclassical(state, coefficients(channel, tau)),
        2.0 * tau_nonclassical_depth(channel),
        "vogel1",
        tol,
    )


def vogel_second_order(state: CatState, coeffs: ChannelCoefficients, xi1, xi2):
    """|P1|^2 + |P2|^2 + |P12|^2 - 2 Re(P1 P2 conj(P12)) with P12 = Phi(xi1 + xi2).

    Values above 1 witness nonclassicality.  Broadcasts over array inputs.
    """
    xi1 = np.asarray(complex(xi1) if isinstance(xi1, PhasePoint) else xi1, dtype=complex)
    xi2 = np.asarray(complex(xi2) if isinstance(xi2, PhasePoint) else xi2, dtype=complex)
    p1 = char_normal(state, coeffs, xi1)
    p2 = char_normal(state, coeffs, xi2)
    p12 = char_normal(state, coeffs, xi1 + xi2)
    val = np.abs(p1) ** 2 + np.abs(p2) ** 2 + np.abs(p12) ** 2 - 2.0 * np.real(p1 * p2 * np.conj(p12))
    return float(val) if np.ndim(val) == 0 else val


def vogel_second_order_supremum(state: CatState, coeffs: ChannelCoefficients, n_grid: int = 401):
    """Maximum of the second-order combination over real xi1, xi2 as (value, xi1, xi2)."""
    if state.alpha == 0:
        return 1.0, 0j, 0j
    if coeffs.d == 0:
        return math.inf, math.inf, math.inf
    u0 = coeffs.c * state.alpha / coeffs.d
    span = 1.2 * (u0 + 6.0 / math.sqrt(coeffs.d))
    u = np.linspace(-span, span, n_grid)
    U1, U2 = np.meshgrid(u, u, indexing="ij")
    with np.errstate(over="ignore", invalid="ignore"):
        F = vogel_second_order(state, coeffs, U1, U2)
    F = np.where(np.isfinite(F), F, -np.inf)
    k = int(np.argmax(F))
    start = [U1.flat[k], U2.flat[k]]
    res = minimize(
        lambda p: -vogel_second_order(state, coeffs, p[0], p[1]),
        x0=start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-15},
    )
    if -res.fun > F.flat[k]:
        return float(-res.fun), complex(res.x[0]), complex(res.x[1])
    return float(F.flat[k]), complex(start[0]), complex(start[1])


def tau_vogel_second_order(state: CatState, channel: ThermalChannel, tol: float = TAU_TOL) -> ThresholdResult:
    if channel.nbar == 0:
        return _infinite("vogel2") if state.alpha > 0 else _never("vogel2")

    def nonclassical(tau):
        val, _, _ = vogel_second_order_supremum(state, coefficients(channel, tau))
        return val > 1.0 + EPS_STRICT

    return find_threshold(nonclassical, 2.0 * tau_nonclassical_depth(channel), "vogel2", tol, n_scan=24)


# --------------------------------------------------------------------------
# Klyshko criterion
# --------------------------------------------------------------------------

def klyshko_B(state: CatState, coeffs: ChannelCoefficients, n: int) -> float:
    """B(n) from photon-number probabilities of the evolved cat; negative means nonclassical."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    p = photon_probs(state, coeffs, n + 2)
    return float(klyshko_statistic(p, n))


def klyshko_nonclassical(state: CatState, coeffs: ChannelCoefficients, n: int) -> bool:
    """B(n) < 0, judged on the scale-free ratio B / (sum of its terms)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if state.alpha == 0:
        return False  # thermal states are Poissonian or broader
    p = photon_probs(state, coeffs, n + 2)
    top = float(np.max(p[n : n + 3]))
    if top < KLYSHKO_FLOOR:
        raise ConvergenceError(
            f"p({n}..{n + 2}) <= {top:.1e} is below the resolvable level {KLYSHKO_FLOOR:g}; "
            "the sign of B(n) cannot be determined for this amplitude",
            top,
        )
    return bool(klyshko_relative(p, n) < -EPS_STRICT)


def tau_klyshko(state: CatState, channel: ThermalChannel, tol: float = TAU_TOL, n: int = 1) -> ThresholdResult:
    """Last time at which B(n) < 0; every detected sign change is kept in ``crossings``."""
    if channel.nbar == 0:
        # zero-temperature damping keeps the state pure-cat-like only if it starts nonclassical
        if klyshko_nonclassical(state, _INITIAL, n):
            return _infinite("klyshko")
        return _never("klyshko")
    return find_threshold(
        lambda tau: klyshko_nonclassical(state, coefficients(channel, tau), n),
        2.0 * tau_nonclassical_depth(channel),
        "klyshko",
        tol,
    )


@dataclass(frozen=True)
class SubsumptionReport:
    alpha: float
    nbar: float
    thresholds: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        ref = self.thresholds[1].tau_star
        return all(r.tau_star <= ref + 2 * TAU_TOL for r in self.thresholds.values())


def klyshko_subsumption_check(state: CatState, channel: ThermalChannel, n_max: int = 3, tol: float = TAU_TOL):
    """tau_K for B(1)..B(n_max); the report holds when none outlives B(1)."""
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    res = {n: tau_klyshko(state, channel, tol, n) for n in range(1, n_max + 1)}
    return SubsumptionReport(state.alpha, channel.nbar, res)


# --------------------------------------------------------------------------
# one-shot verdicts
# --------------------------------------------------------------------------

def evaluate(criterion_id: str, state: CatState, coeffs: ChannelCoefficients) -> CriterionVerdict:
    """Indicator value and verdict for one criterion at one instant.

    fringe: visibility F (nonclassical while F exceeds its asymptote);
    depth / wigner_neg: relative negativity of W(., s_tau) / W(., 0);
    vogel1 / vogel2: supremum, nonclassical above 1; klyshko: B(1), nonclassical below 0.
    """
    if criterion_id == "fringe":
        val = fringe_visibility(state, coeffs)
        return CriterionVerdict(val, val > math.exp(-2 * state.alpha**2) * (1 + EPS_STRICT), "fringe")
    if criterion_id == "depth":
        if 0.5 * (1.0 - coeffs.s) < MIN_WIDTH:
            return CriterionVerdict(-math.inf, state.alpha > 0, "depth")
        val = relative_negativity(state, _INITIAL, coeffs.s) if state.alpha > 0 else 1.0
        return CriterionVerdict(val, val < -EPS_STRICT, "depth")
    if criterion_id == "wigner_neg":
        val = relative_negativity(state, coeffs, 0.0)
        return CriterionVerdict(val, val < -EPS_STRICT, "wigner_neg")
    if criterion_id == "vogel1":
        val, _ = vogel_supremum(state, coeffs)
        return CriterionVerdict(val, val > 1 + EPS_STRICT, "vogel1")
    if criterion_id == "vogel2":
        val, _, _ = vogel_second_order_supremum(state, coeffs)
        return CriterionVerdict(val, val > 1 + EPS_STRICT, "vogel2")
    if criterion_id == "klyshko":
        val = klyshko_B(state, coeffs, 1)
        return CriterionVerdict(val, klyshko_nonclassical(state, coeffs, 1), "klyshko")
    raise DomainError(f"unknown criterion {criterion_id!r}; choose from {CRITERIA}")
