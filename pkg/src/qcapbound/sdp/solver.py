"""Primal-dual interior-point solver for small dense SDPs.

Nesterov-Todd scaling with a Mehrotra predictor-corrector step,
infeasible start, dense Cholesky of the Schur complement with escalating
diagonal regularization.  A solve is single-threaded and deterministic;
independent solves can run concurrently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from threadpoolctl import threadpool_limits

from .problem import (
    SdpProblem,
    SdpSolution,
    SolverSettings,
    SolverStatus,
    residuals,
)

_STALL_STEP = 1e-8
_DIVERGE_FACTOR = 1e12


@dataclass
class _BlockData:
    side: int
    csr: sp.csr_matrix  # (m, side^2), one constraint per row
    csc: sp.csc_matrix  # transpose, for the adjoint
    dense: np.ndarray  # (m, side, side) stacked constraint matrices


class _Workspace:
    """Constraint data restricted to an independent subset of rows."""

    def __init__(self, problem: SdpProblem, keep: np.ndarray):
        self.blocks = problem.blocks
        self.keep = keep
        self.m = keep.size
        self.b = problem.b[keep]
        self.C = problem.C
        self.data: list[_BlockData] = []
        for n, full in zip(problem.blocks, problem.A):
            csr = full[keep].tocsr()
            csr.sum_duplicates()
            self.data.append(
                _BlockData(
                    side=n,
                    csr=csr,
                    csc=csr.T.tocsc(),
                    dense=np.ascontiguousarray(csr.toarray().reshape(self.m, n, n)),
                )
            )

    def apply(self, mats: list[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.m)
        for bd, x in zip(self.data, mats):
            out += bd.csr @ x.reshape(-1)
        return out

    def adjoint(self, y: np.ndarray) -> list[np.ndarray]:
        out = []
        for bd in self.data:
            v = (bd.csc @ y).reshape(bd.side, bd.side)
            out.append((v + v.T) / 2)
        return out

    def schur(self, W: list[np.ndarray]) -> np.ndarray:
        """Assemble M[i, j] = sum_l <A_i, W_l A_j W_l>."""
        M = np.zeros((self.m, self.m))
        for bd, w in zip(self.data, W):
            if bd.csr.nnz == 0:
                continue
            n = bd.side
            # u_i = W A_i W for all i: one full-size GEMM for A_i W, then a
            # batched left-multiply.  Gram against the sparse rows costs
            # only nnz * m.
            t = (bd.dense.reshape(self.m * n, n) @ w).reshape(self.m, n, n)
            u = np.matmul(w, t)
            M += u.reshape(self.m, n * n) @ bd.csc
        return (M + M.T) / 2


def _independent_rows(problem: SdpProblem) -> tuple[np.ndarray, np.ndarray, bool]:
    """Detect dependent constraint rows via a pivoted Cholesky of the Gram matrix.

    Returns (keep, drop, consistent).
    """
    m = problem.m
    G = np.zeros((m, m))
    for mat in problem.A:
        G += (mat @ mat.T).toarray()
    scale = max(G.diagonal().max(), 1e-300)
    c, piv, rank, info = sla.lapack.dpstrf(G, lower=1, tol=scale * 1e-20)
    del c, info
    piv = piv - 1  # LAPACK is 1-based
    keep = np.sort(piv[:rank])
    drop = np.sort(piv[rank:])
    consistent = True
    if drop.size:
        names = problem.names
        labels = ", ".join(
            str(names[i]) if names else str(i) for i in drop[:8]
        )
        warnings.warn(
            f"dropping {drop.size} linearly dependent constraint row(s): {labels}",
            stacklevel=3,
        )
        Gkk = G[np.ix_(keep, keep)]
        Gkd = G[np.ix_(keep, drop)]
        try:
            cf = sla.cho_factor(Gkk + np.eye(keep.size) * scale * 1e-14)
            alpha = sla.cho_solve(cf, Gkd)
            b_pred = alpha.T @ problem.b[keep]
            if np.abs(b_pred - problem.b[drop]).max() > 1e-7 * (1 + np.abs(problem.b).max()):
                consistent = False
        except sla.LinAlgError:  # pragma: no cover - Gram is PSD by construction
            pass
    return keep, drop, consistent


def _nt_scaling(X: np.ndarray, S: np.ndarray):
    """Nesterov-Todd scaling point: returns (R, Rinv, W, lam) with

    R^-1 X R^-T = R^T S R = diag(lam)  and  W = R R^T.
    """
    Lx = np.linalg.cholesky(X)
    Ls = np.linalg.cholesky(S)
    U, sig, Vt = np.linalg.svd(Ls.T @ Lx)
    sqrt_sig = np.sqrt(sig)
    R = (Lx @ Vt.T) / sqrt_sig
    Rinv = (U.T @ Ls.T) / sqrt_sig[:, None]
    W = R @ R.T
    return R, Rinv, W, sig


def _step_to_boundary(lam: np.ndarray, d_hat: np.ndarray) -> float:
    """Largest alpha with diag(lam) + alpha * d_hat >= 0."""
    denom = np.sqrt(lam)
    T = d_hat / np.outer(denom, denom)
    nu_min = float(np.linalg.eigvalsh(T)[0])
    if nu_min >= -1e-14:
        return np.inf
    return 1.0 / (-nu_min)


def _factor_schur(M: np.ndarray):
    """Cholesky with escalating diagonal regularization (1e-12 .. 1e-6)."""
    scale = max(1.0, float(M.diagonal().max()))
    for reg in (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6):
        try:
            cf = sla.cho_factor(
                M + reg * scale * np.eye(M.shape[0]), lower=True, check_finite=False
            )
            return cf, reg
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            break
    return None, None


def solve(problem: SdpProblem, settings: SolverSettings | None = None) -> SdpSolution:
    """Solve a standard-form SDP; see :class:`SdpProblem` for the formulation.

    BLAS pools are pinned to one thread for the duration of a solve: the
    kernels here are small and oversubscription slows them down, and it
    also keeps concurrent solves from fighting over cores.
    """
    with threadpool_limits(limits=1):
        return _solve_single_threaded(problem, settings)


def _solve_single_threaded(
    problem: SdpProblem, settings: SolverSettings | None = None
) -> SdpSolution:
    settings = settings or SolverSettings()
    keep, _dropped, consistent = _independent_rows(problem)
    work = _Workspace(problem, keep)

    def inflate(y_kept: np.ndarray) -> np.ndarray:
        y_full = np.zeros(problem.m)
        y_full[keep] = y_kept
        return y_full

    def finish(status, X, y_kept, S, iters) -> SdpSolution:
        sol = SdpSolution(
            status=status,
            primal_value=problem.objective(X),
            dual_value=float(problem.b @ inflate(y_kept)),
            X=[x.copy() for x in X],
            y=inflate(y_kept),
            S=[s.copy() for s in S],
            iterations=iters,
        )
        sol.residuals = residuals(problem, sol)
        return sol

    tau = 1.0 + max(
        float(np.abs(work.b).max(initial=0.0)),
        max(float(np.abs(c).max(initial=0.0)) for c in work.C),
    )
    X = [tau * np.eye(n) for n in work.blocks]
    S = [tau * np.eye(n) for n in work.blocks]
    y = np.zeros(work.m)
    nu = sum(work.blocks)

    if not consistent:
        return finish(SolverStatus.INFEASIBLE, X, y, S, 0)

    best = None
    best_score = np.inf
    stalls = 0

    for it in range(settings.max_iter):
        rp = work.b - work.apply(X)
        adj = work.adjoint(y)
        Rd = [c - a - s for c, a, s in zip(work.C, adj, S)]
        pobj = problem.objective(X)
        dobj = float(work.b @ y)
        pres = float(np.abs(rp).max(initial=0.0))
        dres = max(float(np.abs(r).max(initial=0.0)) for r in Rd)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj))
        if settings.verbose:
            mu_dbg = sum(float(np.vdot(x, s).real) for x, s in zip(X, S)) / nu
            print(
                f"it {it:3d}  pobj {pobj:+.9e}  dobj {dobj:+.9e}  "
                f"pres {pres:.2e}  dres {dres:.2e}  gap {relgap:.2e}  mu {mu_dbg:.2e}"
            )

        score = max(
            pres / settings.tol_feas, dres / settings.tol_feas, relgap / settings.tol_gap
        )
        if score < best_score:
            best_score = score
            best = ([x.copy() for x in X], y.copy(), [s.copy() for s in S], it)

        if pres <= settings.tol_feas and dres <= settings.tol_feas and relgap <= settings.tol_gap:
            return finish(SolverStatus.OPTIMAL, X, y, S, it)

        if max(float(np.abs(x).max()) for x in X) > _DIVERGE_FACTOR * tau or np.abs(
            y
        ).max(initial=0.0) > _DIVERGE_FACTOR * tau:
            bx, by, bs, _ = best
            return finish(SolverStatus.INFEASIBLE, bx, by, bs, it)

        mu = sum(float(np.vdot(x, s).real) for x, s in zip(X, S)) / nu

        try:
            scalings = [_nt_scaling(x, s) for x, s in zip(X, S)]
        except np.linalg.LinAlgError:
            bx, by, bs, _ = best
            return finish(SolverStatus.NUMERICAL_FAILURE, bx, by, bs, it)

        W = [sc[2] for sc in scalings]
        M = work.schur(W)
        cf, reg = _factor_schur(M)
        if cf is None:
            bx, by, bs, _ = best
            return finish(SolverStatus.NUMERICAL_FAILURE, bx, by, bs, it)

        def schur_solve(rhs: np.ndarray) -> np.ndarray:
            x = sla.cho_solve(cf, rhs, check_finite=False)
            best_x, best_r = x, np.inf
            for _ in range(8):
                r = rhs - M @ x
                rnorm = float(np.abs(r).max())
                if rnorm < best_r:
                    best_x, best_r = x, rnorm
                if rnorm <= 1e-14 * max(1.0, float(np.abs(rhs).max())):
                    break
                x = x + sla.cho_solve(cf, r, check_finite=False)
            return best_x

        a_wrdw = work.apply([w @ r @ w for w, r in zip(W, Rd)])

        def direction(d_list):
            rhs = rp - work.apply(
                [sc[0] @ d @ sc[0].T for sc, d in zip(scalings, d_list)]
            ) + a_wrdw
            dy = schur_solve(rhs)
            adj_dy = work.adjoint(dy)
            dS = [r - a for r, a in zip(Rd, adj_dy)]
            dS_hat = []
            dX_hat = []
            dX = []
            for sc, d, ds in zip(scalings, d_list, dS):
                R = sc[0]
                sh = R.T @ ds @ R
                sh = (sh + sh.T) / 2
                xh = d - sh
                dS_hat.append(sh)
                dX_hat.append(xh)
                dxm = R @ xh @ R.T
                dX.append((dxm + dxm.T) / 2)
            return dy, dX, dS, dX_hat, dS_hat

        lam = [sc[3] for sc in scalings]

        # Mehrotra predictor: pure affine direction, equal step lengths for
        # the primal and dual iterates (more stable on degenerate problems).
        d_aff = [-np.diag(l) for l in lam]
        dy_a, dX_a, dS_a, dXh_a, dSh_a = direction(d_aff)
        a_aff = min(
            1.0,
            min(_step_to_boundary(l, dh) for l, dh in zip(lam, dXh_a)),
            min(_step_to_boundary(l, dh) for l, dh in zip(lam, dSh_a)),
        )
        gap_aff = sum(
            float(np.vdot(np.diag(l) + a_aff * xh, np.diag(l) + a_aff * sh).real)
            for l, xh, sh in zip(lam, dXh_a, dSh_a)
        )
        gap = mu * nu
        sigma = min(1.0, max(0.0, gap_aff / gap)) ** 3

        # Corrector with Mehrotra second-order term, in scaled coordinates.
        d_corr = []
        for l, xh, sh in zip(lam, dXh_a, dSh_a):
            H = (xh @ sh + sh @ xh) / 2
            den = l[:, None] + l[None, :]
            target = -2.0 * H
            np.fill_diagonal(target, target.diagonal() + 2.0 * (sigma * mu - l * l))
            d_corr.append(target / den)
        dy, dX, dS, dXh, dSh = direction(d_corr)

        eta = settings.step_fraction
        alpha = min(
            1.0,
            eta * min(_step_to_boundary(l, dh) for l, dh in zip(lam, dXh)),
            eta * min(_step_to_boundary(l, dh) for l, dh in zip(lam, dSh)),
        )
        ap = ad = alpha
        if ap < _STALL_STEP and ad < _STALL_STEP:
            stalls += 1
            if stalls >= 3:
                bx, by, bs, _ = best
                return finish(SolverStatus.NUMERICAL_FAILURE, bx, by, bs, it)
        else:
            stalls = 0

        X = [(x + ap * dx + (x + ap * dx).T) / 2 for x, dx in zip(X, dX)]
        S = [(s + ad * ds + (s + ad * ds).T) / 2 for s, ds in zip(S, dS)]
        y = y + ad * dy

    bx, by, bs, _ = best
    return finish(SolverStatus.MAX_ITER, bx, by, bs, settings.max_iter)
