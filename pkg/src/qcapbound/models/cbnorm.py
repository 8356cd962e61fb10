"""Completely bounded trace norm of the partially transposed Choi matrix.

With T = J^{T_B}, the norm is the SDP

    max  Re tr(T X)
    s.t. [[rho_0 (x) 1,  X       ],
          [X^dagger,     rho_1 (x) 1]] >= 0,
         tr(rho_0) = tr(rho_1) = 1,

over a general complex X and density operators rho_0, rho_1.  The
capacity bound is log2 of the optimal value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channels import QuantumChannel, choi
from ..linalg import partial_transpose
from ..sdp import SolverSettings
from .builder import (
    LmiModel,
    SolveStats,
    op_compose,
    op_embed_diag,
    op_lift_b,
    op_offdiag_pair,
)


@dataclass(frozen=True)
class CbNormResult:
    value: float
    q_theta: float
    X: np.ndarray
    rho0: np.ndarray
    rho1: np.ndarray
    stats: SolveStats


def cb_norm_pt(
    ch: QuantumChannel,
    settings: SolverSettings | None = None,
) -> CbNormResult:
    """cb norm of the partially transposed Choi matrix and its log bound."""
    J = choi(ch)
    shape = J.shape
    n = shape.side
    t_mat = partial_transpose(J.matrix, shape, "B")
    model = LmiModel(name=f"cbnorm[{ch.name}]")
    x_var = model.general_var(n, "X")
    rho0 = model.trace_affine_var(shape.dA, 1.0, "rho0")
    rho1 = model.trace_affine_var(shape.dA, 1.0, "rho1")
    lift = op_lift_b(shape.dB)
    model.add_lmi(
        2 * n,
        [
            (rho0, op_compose(op_embed_diag(2 * n, 0), lift)),
            (rho1, op_compose(op_embed_diag(2 * n, n), lift)),
            (x_var, op_offdiag_pair(2 * n, 0, n)),
        ],
        name="block",
    )
    model.maximize([(x_var, t_mat)])
    can = model.canonicalize()
    sol = can.solve(settings, label=model.name)
    x_opt = can.var_value(sol, x_var)
    value = float(np.trace(t_mat @ x_opt).real)
    return CbNormResult(
        value=value,
        q_theta=math.log2(value),
        X=x_opt,
        rho0=can.var_value(sol, rho0),
        rho1=can.var_value(sol, rho1),
        stats=SolveStats(iterations=sol.iterations, gap=sol.residuals[2]),
    )
