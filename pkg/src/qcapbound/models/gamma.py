"""The additive SDP capacity bound.

Primal form, over the channel's Choi matrix J on A (x) B:

    Gamma = max  tr(J R)
            s.t. R >= 0, rho >= 0, tr(rho) = 1,
                 -rho (x) 1  <=  R^{T_B}  <=  rho (x) 1.

The reported capacity bound is log2(Gamma).  The dual certificate

    min mu  s.t.  Y, V >= 0, (V - Y)^{T_B} >= J, tr_B(V + Y) <= mu 1

is recovered from the LMI multipliers: V and Y are the multipliers of the
upper/lower partial-transpose constraints, and mu is the stationarity
component along the eliminated unit-trace direction of rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channels import QuantumChannel, choi
from ..linalg import partial_trace, partial_transpose
from ..sdp import SolverSettings
from .builder import (
    LmiModel,
    SolveStats,
    op_lift_b,
    op_pt_b,
    op_scale,
)


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    q_gamma: float
    R: np.ndarray
    rho: np.ndarray
    dual_mu: float | None
    dual_y: np.ndarray | None
    dual_v: np.ndarray | None
    stats: SolveStats

    def certificate_residuals(self, ch: QuantumChannel) -> dict[str, float]:
        """Feasibility residuals of the recovered dual certificate."""
        if self.dual_y is None:
            return {}
        J = choi(ch)
        shape = J.shape
        diff = partial_transpose(self.dual_v - self.dual_y, shape, "B") - J.matrix
        lam_min = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0])
        red = partial_trace(self.dual_v + self.dual_y, shape, "B")
        lam_max = float(
            np.linalg.eigvalsh((red + red.conj().T) / 2)[-1]
        )
        return {
            "pt_dominates_choi": max(0.0, -lam_min),
            "trace_cap": max(0.0, lam_max - self.dual_mu),
        }


def _gamma_model(ch: QuantumChannel):
    J = choi(ch)
    shape = J.shape
    n = shape.side
    model = LmiModel(name=f"gamma[{ch.name}]")
    r_var = model.hermitian_var(n, "R")
    rho = model.trace_affine_var(shape.dA, 1.0, "rho")
    lift = op_lift_b(shape.dB)
    model.add_lmi(n, [(r_var, op_scale(1.0))], name="R_psd")
    i_rho = model.add_lmi(shape.dA, [(rho, op_scale(1.0))], name="rho_psd")
    i_v = model.add_lmi(
        n, [(rho, lift), (r_var, op_pt_b(shape, -1.0))], name="pt_upper"
    )
    i_y = model.add_lmi(
        n, [(rho, lift), (r_var, op_pt_b(shape, +1.0))], name="pt_lower"
    )
    model.maximize([(r_var, J.matrix)])
    return model, J, r_var, rho, i_rho, i_v, i_y


def gamma(
    ch: QuantumChannel,
    side: str = "both",
    settings: SolverSettings | None = None,
) -> GammaResult:
    """Solve the bound; side in {"primal", "dual", "both"} selects which
    certificates are populated (a single solve yields both)."""
    if side not in ("primal", "dual", "both"):
        raise ValueError(f"side must be primal, dual or both, got {side!r}")
    model, J, r_var, rho, i_rho, i_v, i_y = _gamma_model(ch)
    can = model.canonicalize()
    sol = can.solve(settings, label=model.name)

    r_opt = can.var_value(sol, r_var)
    rho_opt = can.var_value(sol, rho)
    value = float(np.trace(J.matrix @ r_opt).real)
    stats = SolveStats(iterations=sol.iterations, gap=sol.residuals[2])

    dual_mu = dual_y = dual_v = None
    if side in ("dual", "both"):
        z_rho = can.dual_block(sol, i_rho)
        dual_v = can.dual_block(sol, i_v)
        dual_y = can.dual_block(sol, i_y)
        dual_mu = float(
            (
                np.trace(partial_trace(dual_v + dual_y, J.shape, "B"))
                + np.trace(z_rho)
            ).real
            / J.shape.dA
        )
    return GammaResult(
        gamma=value,
        q_gamma=math.log2(value),
        R=r_opt,
        rho=rho_opt,
        dual_mu=dual_mu,
        dual_y=dual_y,
        dual_v=dual_v,
        stats=stats,
    )


def superactivation_bound(
    a: QuantumChannel,
    b: QuantumChannel,
    settings: SolverSettings | None = None,
) -> float:
    """Upper bound on the quantum capacity of a (x) b: the sum of the two
    log-bounds, which by additivity equals the bound of the joint channel."""
    ga = gamma(a, side="primal", settings=settings)
    gb = gamma(b, side="primal", settings=settings)
    return ga.q_gamma + gb.q_gamma
