"""SDP models of the channel-capacity bounds and zero-error quantities."""

from .builder import LmiModel, SolveStats
from .cbnorm import CbNormResult, cb_norm_pt
from .fidelity import (
    CodeClass,
    FidelityDualVars,
    FidelityResult,
    fidelity,
    fidelity_dual_residuals,
    lemma1_check,
)
from .gamma import GammaResult, gamma, superactivation_bound
from .zero_error import (
    EPS_DEVIATION,
    KappaResult,
    UpsilonResult,
    deviation,
    deviation_with_idle,
    kappa,
    kappa_activated,
    upsilon,
)

__all__ = [
    "CbNormResult",
    "CodeClass",
    "EPS_DEVIATION",
    "FidelityDualVars",
    "FidelityResult",
    "GammaResult",
    "KappaResult",
    "LmiModel",
    "SolveStats",
    "UpsilonResult",
    "cb_norm_pt",
    "deviation",
    "deviation_with_idle",
    "fidelity",
    "fidelity_dual_residuals",
    "gamma",
    "kappa",
    "kappa_activated",
    "lemma1_check",
    "superactivation_bound",
    "upsilon",
]
