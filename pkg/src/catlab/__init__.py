"""Decoherence of an even Schrödinger-cat state in a thermal channel.

Five nonclassicality indicators (fringe visibility, nonclassical depth,
Wigner negativity, Vogel's characteristic-function criterion and Klyshko's
photon-number criterion) together with their quantum-to-classical threshold
times.
"""
__version__ = "0.1.0"

from .errors import CatlabError, ConvergenceError, DomainError, TruncationError
from .phase_space import (
    CatState,
    ChannelCoefficients,
    PhasePoint,
    ThermalChannel,
    char_normal,
    char_s,
    coefficients,
    eval_quasiprob,
    gaussian_kernel,
)
from .photon import klyshko_statistic, photon_distribution, photon_prob, photon_probs
from .criteria import (
    CriterionVerdict,
    ThresholdResult,
    evaluate,
    exact_depth_threshold,
    fringe_visibility,
    klyshko_B,
    klyshko_subsumption_check,
    tau_klyshko,
    tau_nonclassical_depth,
    tau_vogel,
    tau_vogel_second_order,
    tau_wigner_negativity,
    tau_wigner_numeric,
    vogel_second_order,
    vogel_supremum,
    wigner_minimum,
)
