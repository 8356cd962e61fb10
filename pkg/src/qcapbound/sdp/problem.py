"""Standard-form semidefinite programs over real symmetric blocks.

A problem is

    minimize    <C, X>
    subject to  <A_i, X> = b_i,   i = 1..m
                X >= 0, block-diagonal over the declared blocks,

with all data real symmetric.  Complex Hermitian models are canonicalized
to this form through the 2n x 2n embedding in :mod:`qcapbound.sdp.embedding`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

SYMMETRY_TOL = 1e-10


class SolverStatus(enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"
    INFEASIBLE = "infeasible"


class SdpSolverError(RuntimeError):
    """Raised by callers when a solve did not reach an acceptable status."""


@dataclass(frozen=True)
class SolverSettings:
    """Interior-point stopping and stepping parameters."""

    tol_gap: float = 1e-8
    tol_feas: float = 1e-8
    max_iter: int = 100
    step_fraction: float = 0.98
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.tol_gap <= 0 or self.tol_feas <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")
        if not 0.0 < self.step_fraction < 1.0:
            raise ValueError("step_fraction must lie in (0, 1)")


@dataclass
class SdpSolution:
    status: SolverStatus
    primal_value: float
    dual_value: float
    X: list[np.ndarray]
    y: np.ndarray
    S: list[np.ndarray]
    iterations: int
    residuals: tuple[float, float, float] = field(default=(np.inf, np.inf, np.inf))


def _triplets(mat, n: int, label: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Extract (rows, cols, vals) from a dense array or a triplet tuple."""
    if isinstance(mat, tuple):
        rows, cols, vals = mat
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if rows.size and (
            rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n
        ):
            raise ValueError(f"{label}: triplet indices out of range for block side {n}")
        return rows, cols, vals
    arr = np.asarray(mat, dtype=np.float64)
    if arr.shape != (n, n):
        raise ValueError(f"{label}: matrix shape {arr.shape} does not match block side {n}")
    rows, cols = np.nonzero(arr)
    return rows.astype(np.int64), cols.astype(np.int64), arr[rows, cols]


def _build_objective(blocks: list[int], C) -> list[np.ndarray]:
    out = []
    for bi, n in enumerate(blocks):
        dense = np.zeros((n, n))
        if C and bi in C:
            rr, cc, vv = _triplets(C[bi], n, "objective")
            np.add.at(dense, (rr, cc), vv)
        sym_err = np.abs(dense - dense.T).max() if dense.size else 0.0
        if sym_err > SYMMETRY_TOL * max(1.0, np.abs(dense).max()):
            raise ValueError(f"objective: block {bi} is not symmetric within {SYMMETRY_TOL:g}")
        out.append((dense + dense.T) / 2)
    return out


def _assemble_block(m: int, n: int, cons, vec_idx, vals) -> sp.csr_matrix:
    """Stack constraint matrices for one block into a (m, n*n) CSR, with
    symmetrization in vec coordinates and a symmetry check."""
    if not cons or sum(v.size for v in vals) == 0:
        return sp.csr_matrix((m, n * n))
    ci = np.concatenate([np.asarray(c, dtype=np.int64) for c in cons])
    vi = np.concatenate([np.asarray(v, dtype=np.int64) for v in vec_idx])
    vv = np.concatenate([np.asarray(v, dtype=np.float64) for v in vals])
    mat = sp.csr_matrix((vv, (ci, vi)), shape=(m, n * n))
    mat.sum_duplicates()
    swapped = sp.csr_matrix((vv, (ci, (vi % n) * n + vi // n)), shape=(m, n * n))
    swapped.sum_duplicates()
    diff = mat - swapped
    scale = max(1.0, np.abs(mat.data).max() if mat.nnz else 0.0)
    if diff.nnz and np.abs(diff.data).max() > SYMMETRY_TOL * scale:
        raise ValueError(f"constraint data is not symmetric within {SYMMETRY_TOL:g}")
    mat = (mat + swapped) * 0.5
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return mat


class SdpProblem:
    """Block-structured SDP in standard primal form.

    Parameters
    ----------
    blocks:
        Side lengths of the symmetric blocks of X.
    C:
        Objective, as {block_index: matrix}; missing blocks are zero.
        Matrices may be dense arrays or (rows, cols, vals) triplets.
    constraints:
        List of ({block_index: matrix}, b_i) pairs.
    names:
        Optional per-constraint labels used in warnings.
    """

    def __init__(self, blocks, C, constraints, names=None):
        self.blocks = [int(n) for n in blocks]
        if any(n <= 0 for n in self.blocks):
            raise ValueError("block sides must be positive")
        if not constraints:
            raise ValueError("at least one constraint is required")
        self.m = len(constraints)
        if names is not None and len(names) != self.m:
            raise ValueError("names must match the number of constraints")
        self.names = list(names) if names is not None else None

        self.C = _build_objective(self.blocks, C)

        self.b = np.array([float(b) for _, b in constraints])
        per_block: list[tuple[list, list, list]] = [([], [], []) for _ in self.blocks]
        for i, (mats, _) in enumerate(constraints):
            for bi, mat in mats.items():
                bi = int(bi)
                if not 0 <= bi < len(self.blocks):
                    raise ValueError(f"constraint {i}: block index {bi} out of range")
                rr, cc, vv = _triplets(mat, self.blocks[bi], f"constraint {i}")
                if vv.size:
                    cons, vec_idx, vals = per_block[bi]
                    cons.append(np.full(vv.size, i, dtype=np.int64))
                    vec_idx.append(rr * self.blocks[bi] + cc)
                    vals.append(vv)
        self.A = [
            _assemble_block(self.m, n, *per_block[bi])
            for bi, n in enumerate(self.blocks)
        ]

    @classmethod
    def from_block_triplets(cls, blocks, C, b, block_triplets, names=None):
        """Fast construction path: per-block (constraint_idx, vec_idx, vals)
        arrays instead of per-constraint dictionaries."""
        self = object.__new__(cls)
        self.blocks = [int(n) for n in blocks]
        self.b = np.asarray(b, dtype=float)
        self.m = self.b.size
        if self.m == 0:
            raise ValueError("at least one constraint is required")
        if names is not None and len(names) != self.m:
            raise ValueError("names must match the number of constraints")
        self.names = list(names) if names is not None else None
        self.C = _build_objective(self.blocks, C)
        self.A = []
        for bi, n in enumerate(self.blocks):
            if bi in block_triplets:
                cons, vec_idx, vals = block_triplets[bi]
                self.A.append(_assemble_block(self.m, n, [cons], [vec_idx], [vals]))
            else:
                self.A.append(sp.csr_matrix((self.m, n * n)))
        return self

    # -- linear operators ----------------------------------------------------

    def apply(self, X: list[np.ndarray]) -> np.ndarray:
        """Evaluate the constraint map A(X)."""
        out = np.zeros(self.m)
        for mat, x in zip(self.A, X):
            out += mat @ x.reshape(-1)
        return out

    def adjoint(self, y: np.ndarray) -> list[np.ndarray]:
        """Evaluate A^*(y) as dense symmetric blocks."""
        out = []
        for mat, n in zip(self.A, self.blocks):
            v = (mat.T @ y).reshape(n, n)
            out.append((v + v.T) / 2)
        return out

    def objective(self, X: list[np.ndarray]) -> float:
        return float(sum(np.vdot(c, x).real for c, x in zip(self.C, X)))


def residuals(problem: SdpProblem, solution: SdpSolution) -> tuple[float, float, float]:
    """Feasibility and gap measures of a primal/dual pair.

    Returns (primal_res, dual_res, gap) with
    primal_res = max_i |<A_i, X> - b_i|,
    dual_res   = max-entry norm of C - A^*(y) - S,
    gap        = |<C, X> - b . y| / (1 + |<C, X>|).
    """
    pres = float(np.abs(problem.apply(solution.X) - problem.b).max())
    dres = 0.0
    for c, adj, s in zip(problem.C, problem.adjoint(solution.y), solution.S):
        dres = max(dres, float(np.abs(c - adj - s).max()))
    pobj = problem.objective(solution.X)
    dobj = float(problem.b @ solution.y)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj))
    return pres, dres, gap
