"""Zero-error quantities of a Kraus-operator space.

Everything here depends on the channel only through the projector P onto
the support of its Choi matrix:

* deviation D(K, k): the gap SDP max tr P (W - rho (x) 1) over the code
  constraints; it is <= 0, and equals 0 exactly when a size-k code of the
  class reaches fidelity one.
* kappa: the largest k with D(K, k) = 0, located by bisection on the
  deviation sign with threshold EPS_DEVIATION.
* upsilon: the no-signalling zero-error classical capacity SDP; kappa for
  NS codes equals its square root.
* kappa_activated: sup over borrowed noiseless qudits d of
  floor(kappa(N (x) I_d)) / d.  The tensor-with-identity deviation SDP is
  block-diagonalized exactly over the local-unitary symmetry of the
  identity factor, so only base-channel-sized blocks are ever solved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..channels import KrausSupport, QuantumChannel, kraus_support
from ..linalg import BipartiteShape, partial_trace
from ..sdp import SolverSettings
from .builder import (
    LmiModel,
    SolveStats,
    op_lift_b,
    op_pt_b,
    op_scale,
)
from .fidelity import CodeClass, _code_model

# Numerical meaning of "D = 0": one order above the solver gap tolerance.
EPS_DEVIATION = 1e-7


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    one_shot_zero_error: int
    bracket: tuple[float, float]
    code: CodeClass
    stats: SolveStats


@dataclass(frozen=True)
class UpsilonResult:
    upsilon: float
    U: np.ndarray
    S: np.ndarray
    kappa_ns: float
    stats: SolveStats


def _deviation_solve(
    ks: KrausSupport,
    k: float,
    code: CodeClass,
    settings: SolverSettings | None,
) -> tuple[float, SolveStats]:
    if k == 1.0:
        return 0.0, SolveStats(iterations=0, gap=0.0, solves=0)
    shape = ks.shape
    model, w_var, rho_var, _ = _code_model(
        shape, k, code, name=f"deviation[k={k:g},{code.value}]"
    )
    p = np.asarray(ks.projector)
    p_red = partial_trace(p, shape, "B")
    model.maximize([(w_var, p), (rho_var, -p_red)])
    can = model.canonicalize()
    sol = can.solve(settings, label=model.name)
    value = can.primal_objective(sol)
    # The objective is <= 0 in exact arithmetic; clip solver noise.
    return min(value, 0.0), SolveStats(iterations=sol.iterations, gap=sol.residuals[2])


def deviation(
    ks: KrausSupport,
    k: float,
    code: CodeClass,
    settings: SolverSettings | None = None,
) -> float:
    """D(K, k); nonpositive, zero iff fidelity one is reachable at size k."""
    if k < 1.0:
        raise ValueError("code size k must be >= 1")
    return _deviation_solve(ks, k, code, settings)[0]


def _deviation_with_idle_model(
    p_base: np.ndarray, shape: BipartiteShape, d: int, k: float
) -> tuple[LmiModel, object, object]:
    """Deviation SDP of (base channel) (x) I_d for PPTp codes, reduced over
    the u-bar (x) u symmetry of the idle factor.

    The invariant subalgebra of the idle factor is spanned by the projector
    onto its maximally entangled state (weight W1) and its complement
    (weight W0); the PPTp constraints split along the symmetric and
    antisymmetric eigenspaces of the partially transposed projector.
    """
    n = shape.side
    model = LmiModel(name=f"deviation-idle[d={d},k={k:g}]")
    w1 = model.hermitian_var(n, "W1")
    w0 = model.hermitian_var(n, "W0")
    rho = model.trace_affine_var(shape.dA, 1.0, "rho")
    lift_d = op_lift_b(shape.dB, 1.0 / d)
    lift_dk = op_lift_b(shape.dB, 1.0 / (d * k))
    pt = lambda coeff: op_pt_b(shape, coeff)  # noqa: E731
    model.add_lmi(n, [(w1, op_scale(1.0))], name="W1_psd")
    model.add_lmi(n, [(w0, op_scale(1.0))], name="W0_psd")
    model.add_lmi(n, [(rho, lift_d), (w1, op_scale(-1.0))], name="upper1")
    model.add_lmi(n, [(rho, lift_d), (w0, op_scale(-1.0))], name="upper0")
    cp = 1.0 - 1.0 / d
    cm = 1.0 + 1.0 / d
    model.add_lmi(
        n, [(rho, lift_dk), (w1, pt(-1.0 / d)), (w0, pt(-cp))], name="pt_up_sym"
    )
    model.add_lmi(
        n, [(rho, lift_dk), (w1, pt(+1.0 / d)), (w0, pt(-cm))], name="pt_up_anti"
    )
    model.add_lmi(
        n, [(rho, lift_dk), (w1, pt(+1.0 / d)), (w0, pt(+cp))], name="pt_lo_sym"
    )
    model.add_lmi(
        n, [(rho, lift_dk), (w1, pt(-1.0 / d)), (w0, pt(+cm))], name="pt_lo_anti"
    )
    p_red = partial_trace(p_base, shape, "B")
    model.maximize([(w1, p_base), (rho, -p_red / d)])
    return model, w1, rho


def _deviation_with_idle_solve(
    ks: KrausSupport,
    d: int,
    k: float,
    settings: SolverSettings | None,
) -> tuple[float, SolveStats]:
    if k == 1.0:
        return 0.0, SolveStats(iterations=0, gap=0.0, solves=0)
    model, _, _ = _deviation_with_idle_model(
        np.asarray(ks.projector), ks.shape, d, k
    )
    can = model.canonicalize()
    sol = can.solve(settings, label=model.name)
    value = min(can.primal_objective(sol), 0.0)
    return value, SolveStats(iterations=sol.iterations, gap=sol.residuals[2])


def deviation_with_idle(
    ks: KrausSupport,
    d: int,
    k: float,
    settings: SolverSettings | None = None,
) -> float:
    """D(K (x) K(I_d), k) for PPTp codes, via the reduced SDP."""
    if d < 2:
        raise ValueError("idle dimension must be >= 2")
    if k < 1.0:
        raise ValueError("code size k must be >= 1")
    return _deviation_with_idle_solve(ks, d, k, settings)[0]


def _bisect_kappa(
    dev,
    k_max: float,
    hard_cap: float,
    tol_k: float,
    prescan: bool,
    label: str,
) -> tuple[float, float]:
    """Bracket the threshold of the predicate D(k) >= -EPS_DEVIATION."""
    feasible = lambda k: dev(k) >= -EPS_DEVIATION  # noqa: E731
    lo, hi = 1.0, float(k_max)
    if prescan:
        grid = np.linspace(lo, hi, 8)
        flags = [True] + [feasible(k) for k in grid[1:]]
        if any(
            flags[i] and not flags[i - 1] for i in range(1, len(flags))
        ):
            raise RuntimeError(
                f"{label}: the zero region of the deviation is not an interval "
                "on the pre-scan grid; rerun with a dedicated grid scan"
            )
        trues = [k for k, f in zip(grid, flags) if f]
        falses = [k for k, f in zip(grid, flags) if not f]
        lo = max(trues)
        if falses:
            hi = min(falses)
    while feasible(hi):
        lo = hi
        if hi >= hard_cap:
            raise RuntimeError(
                f"{label}: deviation stays zero beyond the safe cap k = {hard_cap:g}"
            )
        hi = min(hard_cap, hi * 1.5)
    while hi - lo > tol_k:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def _floor_from_bracket(dev, lo: float, hi: float) -> int:
    """Integer part of the threshold, testing the boundary integer directly
    so that exactly-integer thresholds are not lost to bracket noise."""
    cand = math.floor(hi + 1e-12)
    if cand > lo and cand >= 1:
        if dev(float(cand)) >= -EPS_DEVIATION:
            return cand
    return math.floor(lo + 1e-12)


def kappa(
    ch: QuantumChannel,
    code: CodeClass,
    tol_k: float = 1e-4,
    settings: SolverSettings | None = None,
    rank_tol: float | None = None,
) -> KappaResult:
    """Largest (possibly fractional) perfect-fidelity code size.

    Bisection on the deviation sign; the bracket cap comes from the gamma
    bound for PPTp-containing codes and from the input dimension for NS.
    """
    from .gamma import gamma as gamma_bound

    ks = kraus_support(ch) if rank_tol is None else kraus_support(ch, rank_tol)
    acc = _StatsAccumulator()

    def dev(k: float) -> float:
        value, stats = _deviation_solve(ks, k, code, settings)
        acc.add(stats)
        return value

    if code.has_pptp:
        g = gamma_bound(ch, side="primal", settings=settings)
        acc.add(g.stats)
        k_max = g.gamma + 1.0
        hard_cap = 4.0 * k_max
    else:
        k_max = float(ch.dim_in)
        hard_cap = 2.0 * ch.dim_in
    lo, hi = _bisect_kappa(
        dev, k_max, hard_cap, tol_k, prescan=code.has_ns, label=f"kappa[{ch.name}]"
    )
    one_shot = _floor_from_bracket(dev, lo, hi)
    return KappaResult(
        kappa=lo,
        one_shot_zero_error=one_shot,
        bracket=(lo, hi),
        code=code,
        stats=acc.stats,
    )


class _StatsAccumulator:
    """Folds per-solve statistics from repeated oracle calls."""

    def __init__(self):
        self.stats = SolveStats(iterations=0, gap=0.0, solves=0)

    def add(self, stats: SolveStats) -> None:
        self.stats = self.stats.merge(stats)


def kappa_activated(
    ch: QuantumChannel,
    d_max: int,
    tol_k: float = 1e-4,
    settings: SolverSettings | None = None,
) -> float:
    """Activated zero-error capacity in message-number form:
    max over idle dimensions d in 2..d_max of floor(kappa(N (x) I_d)) / d,
    for PPTp codes."""
    from .gamma import gamma as gamma_bound

    if d_max < 2:
        raise ValueError("d_max must be >= 2")
    if ch.dim_in * d_max > 12:
        raise ValueError(
            f"scale guard: dim_in * d_max = {ch.dim_in * d_max} exceeds 12"
        )
    ks = kraus_support(ch)
    g = gamma_bound(ch, side="primal", settings=settings).gamma
    best = 0.0
    for d in range(2, d_max + 1):
        def dev(k: float, _d=d) -> float:
            return _deviation_with_idle_solve(ks, _d, k, settings)[0]

        k_max = d * (g + 1.0)
        lo, hi = _bisect_kappa(
            dev, k_max, 4.0 * k_max, tol_k, prescan=False,
            label=f"kappa_activated[{ch.name},d={d}]",
        )
        best = max(best, _floor_from_bracket(dev, lo, hi) / d)
    return best


def _graph_slack_model(ks: KrausSupport, t: float):
    """Model for g(t) = min tr P (S (x) 1 - U) over 0 <= U <= S (x) 1,
    tr_A U = 1_B, tr S = t; returned as a maximization of -g."""
    shape = ks.shape
    p = np.asarray(ks.projector)
    model = LmiModel(name=f"graph-slack[t={t:g}]")
    u_var = model.partial_trace_affine_var(
        shape, np.eye(shape.dB, dtype=complex), "U"
    )
    s_var = model.trace_affine_var(shape.dA, t, "S")
    model.add_lmi(shape.side, [(u_var, op_scale(1.0))], name="U_psd")
    model.add_lmi(
        shape.side, [(s_var, op_lift_b(shape.dB)), (u_var, op_scale(-1.0))], name="upper"
    )
    p_red = partial_trace(p, shape, "B")
    model.maximize([(u_var, p), (s_var, -p_red)])
    return model, u_var, s_var


def upsilon(
    ks: KrausSupport,
    settings: SolverSettings | None = None,
    tol_t: float = 1e-5,
) -> UpsilonResult:
    """No-signalling zero-error classical capacity SDP of the graph:

        max tr(S)  s.t.  0 <= U <= S (x) 1,  tr_A U = 1_B,
                         tr P (S (x) 1 - U) <= EPS_DEVIATION,

    with the trace-orthogonality equality relaxed to the deviation
    threshold (an interior-point method cannot represent a boundary-only
    feasible set, and the relaxed set's multiplier grows like the inverse
    square root of the relaxation).  The optimum is located by bisection
    over the trace budget t: the auxiliary slack g(t) = min tr P(S(x)1 - U)
    under tr S = t is zero up to the true value and convex increasing
    beyond it, so the relaxed optimum is the threshold g(t) <= EPS_DEVIATION.
    """
    shape = ks.shape
    acc = _StatsAccumulator()
    witnesses: dict[str, np.ndarray] = {}

    def g(t: float) -> float:
        model, u_var, s_var = _graph_slack_model(ks, t)
        can = model.canonicalize()
        sol = can.solve(settings, label=model.name)
        acc.add(SolveStats(iterations=sol.iterations, gap=sol.residuals[2]))
        witnesses["U"] = can.var_value(sol, u_var)
        witnesses["S"] = can.var_value(sol, s_var)
        return max(0.0, -can.primal_objective(sol))

    feasible = lambda t: g(t) <= EPS_DEVIATION  # noqa: E731
    lo = 1.0
    if not feasible(lo):  # pragma: no cover - t = 1 is always feasible
        raise RuntimeError("upsilon: unit trace budget infeasible")
    lo_wit = dict(witnesses)
    hi = float(shape.dA**2)
    cap = 2.0 * hi + 2.0
    while feasible(hi):
        lo, lo_wit = hi, dict(witnesses)
        if hi >= cap:
            raise RuntimeError(
                f"upsilon: slack stays below threshold beyond t = {cap:g}"
            )
        hi = min(cap, hi * 1.25 + 0.5)
    while hi - lo > tol_t:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo, lo_wit = mid, dict(witnesses)
        else:
            hi = mid
    value = lo
    u_opt = lo_wit["U"]
    s_opt = lo_wit["S"]
    p = np.asarray(ks.projector)
    slack = float(
        np.trace(p @ (np.kron(s_opt, np.eye(shape.dB)) - u_opt)).real
    )
    if slack > 10.0 * EPS_DEVIATION:
        raise RuntimeError(
            f"upsilon: graph-orthogonality slack {slack:.3e} exceeds "
            f"{10 * EPS_DEVIATION:.1e} at the reported optimum"
        )
    return UpsilonResult(
        upsilon=value,
        U=u_opt,
        S=s_opt,
        kappa_ns=math.sqrt(max(value, 0.0)),
        stats=acc.stats,
    )
