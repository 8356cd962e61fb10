"""Optimal channel fidelity of size-k codes, for the three code classes.

Primal form, over the Choi matrix J on A (x) B:

    F(N, k) = max  tr(J W)
              s.t. 0 <= W <= rho (x) 1,  tr(rho) = 1,
    PPTp:          -(rho (x) 1)/k <= W^{T_B} <= (rho (x) 1)/k,
    NS:            tr_A W = 1_B / k^2.

The dual certificate

    min mu + tr(S_B)/k^2
    s.t. J + (Y - V)^{T_B} <= X + 1 (x) S_B,
         tr_B(X + (Y + V)/k) <= mu 1,   X, Y, V >= 0

is recovered from the LMI multipliers: X from the upper bound on W, V/Y
from the upper/lower partial-transpose constraints, mu and S_B from the
stationarity components along the eliminated trace and no-signalling
directions.  Dropping PPTp sets Y = V = 0; dropping NS sets S_B = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..channels import QuantumChannel, choi, tensor_channels
from ..linalg import BipartiteShape, partial_trace, partial_transpose
from ..sdp import SolverSettings
from .builder import (
    LmiModel,
    SolveStats,
    Variable,
    op_lift_b,
    op_pt_b,
    op_scale,
)


class CodeClass(enum.Enum):
    NS = "ns"
    PPTP = "pptp"
    NS_AND_PPTP = "ns-pptp"

    @property
    def has_ns(self) -> bool:
        return self in (CodeClass.NS, CodeClass.NS_AND_PPTP)

    @property
    def has_pptp(self) -> bool:
        return self in (CodeClass.PPTP, CodeClass.NS_AND_PPTP)

    @classmethod
    def parse(cls, text: str) -> "CodeClass":
        for member in cls:
            if member.value == text.lower():
                return member
        raise ValueError(
            f"unknown code class {text!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


@dataclass(frozen=True)
class FidelityDualVars:
    mu: float
    s_b: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class FidelityResult:
    value: float
    W: np.ndarray
    rho: np.ndarray
    code: CodeClass
    k: float
    dual_value: float | None
    dual_vars: FidelityDualVars | None
    stats: SolveStats


def _code_model(
    shape: BipartiteShape, k: float, code: CodeClass, name: str
) -> tuple[LmiModel, Variable, Variable, dict[str, int]]:
    """Variables and constraint blocks shared by fidelity and deviation."""
    n = shape.side
    model = LmiModel(name=name)
    if code.has_ns:
        w_var = model.partial_trace_affine_var(
            shape, np.eye(shape.dB, dtype=complex) / k**2, "W"
        )
    else:
        w_var = model.hermitian_var(n, "W")
    rho = model.trace_affine_var(shape.dA, 1.0, "rho")
    lift = op_lift_b(shape.dB)
    lift_k = op_lift_b(shape.dB, 1.0 / k)
    idx = {
        "W_psd": model.add_lmi(n, [(w_var, op_scale(1.0))], name="W_psd"),
        "upper": model.add_lmi(n, [(rho, lift), (w_var, op_scale(-1.0))], name="upper"),
    }
    if code.has_pptp:
        idx["pt_upper"] = model.add_lmi(
            n, [(rho, lift_k), (w_var, op_pt_b(shape, -1.0))], name="pt_upper"
        )
        idx["pt_lower"] = model.add_lmi(
            n, [(rho, lift_k), (w_var, op_pt_b(shape, +1.0))], name="pt_lower"
        )
    return model, w_var, rho, idx


def _extract_dual(can, sol, idx, shape, k, code, objective_matrix):
    """Recover the dual certificate from the LMI multipliers."""
    n = shape.side
    z_w = can.dual_block(sol, idx["W_psd"])
    x_d = can.dual_block(sol, idx["upper"])
    if code.has_pptp:
        v_d = can.dual_block(sol, idx["pt_upper"])
        y_d = can.dual_block(sol, idx["pt_lower"])
    else:
        v_d = np.zeros((n, n), dtype=complex)
        y_d = np.zeros((n, n), dtype=complex)
    mu = float(
        (np.trace(x_d) + (np.trace(v_d) + np.trace(y_d)) / k).real / shape.dA
    )
    if code.has_ns:
        resid = (
            objective_matrix
            + z_w
            - x_d
            - partial_transpose(v_d - y_d, shape, "B")
        )
        s_b = partial_trace(resid, shape, "A") / shape.dA
        s_b = (s_b + s_b.conj().T) / 2
    else:
        s_b = np.zeros((shape.dB, shape.dB), dtype=complex)
    dual_value = mu + float(np.trace(s_b).real) / k**2
    return dual_value, FidelityDualVars(mu=mu, s_b=s_b, X=x_d, Y=y_d, V=v_d)


def fidelity(
    ch: QuantumChannel,
    k: float,
    code: CodeClass,
    side: str = "primal",
    settings: SolverSettings | None = None,
) -> FidelityResult:
    """Best fidelity of a size-k code of the given class through the channel."""
    if k < 1.0:
        raise ValueError("code size k must be >= 1")
    if side not in ("primal", "dual", "both"):
        raise ValueError(f"side must be primal, dual or both, got {side!r}")
    J = choi(ch)
    shape = J.shape
    n = shape.side

    if k == 1.0:
        # Constraints are slack and tr(J (rho (x) 1)) = 1 for any state rho.
        rho = np.eye(shape.dA, dtype=complex) / shape.dA
        w = np.kron(rho, np.eye(shape.dB, dtype=complex))
        dual = FidelityDualVars(
            mu=1.0,
            s_b=np.zeros((shape.dB, shape.dB), dtype=complex),
            X=J.matrix.copy(),
            Y=np.zeros((n, n), dtype=complex),
            V=np.zeros((n, n), dtype=complex),
        )
        want_dual = side in ("dual", "both")
        return FidelityResult(
            value=1.0,
            W=w,
            rho=rho,
            code=code,
            k=k,
            dual_value=1.0 if want_dual else None,
            dual_vars=dual if want_dual else None,
            stats=SolveStats(iterations=0, gap=0.0, solves=0),
        )

    model, w_var, rho_var, idx = _code_model(
        shape, k, code, name=f"fidelity[{ch.name},k={k:g},{code.value}]"
    )
    model.maximize([(w_var, J.matrix)])
    can = model.canonicalize()
    sol = can.solve(settings, label=model.name)

    w_opt = can.var_value(sol, w_var)
    rho_opt = can.var_value(sol, rho_var)
    value = float(np.trace(J.matrix @ w_opt).real)
    stats = SolveStats(iterations=sol.iterations, gap=sol.residuals[2])

    dual_value = None
    dual_vars = None
    if side in ("dual", "both"):
        dual_value, dual_vars = _extract_dual(can, sol, idx, shape, k, code, J.matrix)
    return FidelityResult(
        value=value,
        W=w_opt,
        rho=rho_opt,
        code=code,
        k=k,
        dual_value=dual_value,
        dual_vars=dual_vars,
        stats=stats,
    )


def fidelity_dual_residuals(
    ch: QuantumChannel, result: FidelityResult
) -> dict[str, float]:
    """Feasibility residuals of the recovered dual certificate (all should
    be at solver-noise level)."""
    if result.dual_vars is None:
        return {}
    dv = result.dual_vars
    J = choi(ch)
    shape = J.shape
    lhs = J.matrix + partial_transpose(dv.Y - dv.V, shape, "B")
    rhs = dv.X + np.kron(np.eye(shape.dA), dv.s_b)
    lam = float(np.linalg.eigvalsh(((rhs - lhs) + (rhs - lhs).conj().T) / 2)[0])
    red = partial_trace(dv.X + (dv.Y + dv.V) / result.k, shape, "B")
    lam2 = float(np.linalg.eigvalsh((red + red.conj().T) / 2)[-1])
    out = {
        "blocking": max(0.0, -lam),
        "trace_cap": max(0.0, lam2 - dv.mu),
        "psd": max(
            0.0,
            *(-float(np.linalg.eigvalsh(m)[0]) for m in (dv.X, dv.Y, dv.V)),
        ),
    }
    return out


def lemma1_check(
    n1: QuantumChannel,
    n2: QuantumChannel,
    k: float,
    settings: SolverSettings | None = None,
) -> tuple[float, float, float]:
    """Sandwich of fidelities linking a tensor product to its factors.

    Returns (lhs, mid, rhs) =
      (F(n1,k) * F(n2, Gamma(n2)),  F(n1 (x) n2, k * Gamma(n2)),  F(n1, k)),
    which satisfy lhs <= mid <= rhs up to solver tolerance.
    """
    from .gamma import gamma as gamma_bound

    g2 = max(1.0, gamma_bound(n2, side="primal", settings=settings).gamma)
    f1 = fidelity(n1, k, CodeClass.PPTP, settings=settings).value
    f2 = fidelity(n2, g2, CodeClass.PPTP, settings=settings).value
    mid = fidelity(
        tensor_channels(n1, n2), k * g2, CodeClass.PPTP, settings=settings
    ).value
    return f1 * f2, mid, f1
