"""Canonicalization of Hermitian LMI models into standard-form SDPs.

A model is

    maximize   sum_v Re<M_v, V_v> + const
    subject to G_l(x) >= 0 for every declared LMI block,

where the V_v are matrix variables parameterized affinely by a real vector
x (full Hermitian, trace-fixed Hermitian, partial-trace-fixed Hermitian,
or general complex) and each G_l is affine in x with Hermitian values.

Canonicalization emits the Lagrangian-dual standard form

    minimize   sum_l <G_{l,0}, Z_l>
    subject to sum_l <G_{l,j}, Z_l> = -c_j  for every parameter j,
               Z_l >= 0,

so the solver's dual vector y recovers the model variables via x = -y and
the solver's primal blocks are the LMI multipliers.  Affine constraints on
variables (unit trace, fixed partial trace) are eliminated by the
parameterization itself, which keeps the cone purely PSD; their
multipliers are recovered from the stationarity residual along the
eliminated directions (see the individual models).

Variable bases are stacked (size, n, n) arrays, and the affine ops act on
whole stacks, so canonicalization is a handful of vectorized passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..linalg import BipartiteShape
from ..sdp import (
    SdpProblem,
    SdpSolution,
    SdpSolverError,
    SolverSettings,
    SolverStatus,
    embed_hermitian,
    extract_hermitian,
    solve,
)

_TRIPLET_TOL = 1e-15


@dataclass(frozen=True)
class SolveStats:
    """Aggregate interior-point statistics across the solves behind a result."""

    iterations: int
    gap: float
    solves: int = 1

    def merge(self, other: "SolveStats") -> "SolveStats":
        return SolveStats(
            iterations=self.iterations + other.iterations,
            gap=max(self.gap, other.gap),
            solves=self.solves + other.solves,
        )


def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal basis of n x n Hermitian matrices, stacked (n^2, n, n)."""
    out = np.zeros((n * n, n, n), dtype=complex)
    idx = np.arange(n)
    out[idx, idx, idx] = 1.0
    inv = 1.0 / np.sqrt(2.0)
    k = n
    for a in range(n):
        for b in range(a + 1, n):
            out[k, a, b] = inv
            out[k, b, a] = inv
            out[k + 1, a, b] = 1j * inv
            out[k + 1, b, a] = -1j * inv
            k += 2
    return out


def traceless_hermitian_basis(n: int) -> np.ndarray:
    """Basis of traceless Hermitian matrices, stacked (n^2 - 1, n, n)."""
    out = np.zeros((n * n - 1, n, n), dtype=complex)
    inv = 1.0 / np.sqrt(2.0)
    for a in range(n - 1):
        out[a, a, a] = inv
        out[a, a + 1, a + 1] = -inv
    k = n - 1
    for a in range(n):
        for b in range(a + 1, n):
            out[k, a, b] = inv
            out[k, b, a] = inv
            out[k + 1, a, b] = 1j * inv
            out[k + 1, b, a] = -1j * inv
            k += 2
    return out


def general_basis(n: int) -> np.ndarray:
    """Real basis of all complex n x n matrices, stacked (2 n^2, n, n)."""
    out = np.zeros((2 * n * n, n, n), dtype=complex)
    k = np.arange(n * n)
    out[k, k // n, k % n] = 1.0
    out[k + n * n, k // n, k % n] = 1j
    return out


def tensor_basis(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """All Kronecker products left_i (x) right_j, stacked."""
    tl, nl = left.shape[0], left.shape[1]
    tr, nr = right.shape[0], right.shape[1]
    out = np.einsum("tij,skl->tsikjl", left, right)
    return out.reshape(tl * tr, nl * nr, nl * nr)


@dataclass
class Variable:
    name: str
    dim: int
    base: np.ndarray
    basis: np.ndarray  # (size, dim, dim)
    offset: int = 0
    hermitian: bool = True

    @property
    def size(self) -> int:
        return self.basis.shape[0]

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.base + np.tensordot(x, self.basis, axes=1)


# A stacked op maps (t, n, n) arrays of matrices to (t, N, N) contributions.
Op = Callable[[np.ndarray], np.ndarray]


@dataclass
class Lmi:
    name: str
    side: int
    const: np.ndarray
    terms: list[tuple[Variable, Op]]
    complex_block: bool = True


@dataclass
class LmiModel:
    """Collects variables, LMIs and an objective, then canonicalizes."""

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    lmis: list[Lmi] = field(default_factory=list)
    obj_terms: list[tuple[Variable, np.ndarray]] = field(default_factory=list)
    obj_const: float = 0.0

    def _register(self, var: Variable) -> Variable:
        var.offset = self.num_params
        self.variables.append(var)
        return var

    @property
    def num_params(self) -> int:
        return sum(v.size for v in self.variables)

    def hermitian_var(self, dim: int, name: str) -> Variable:
        return self._register(
            Variable(name, dim, np.zeros((dim, dim), dtype=complex), hermitian_basis(dim))
        )

    def trace_affine_var(self, dim: int, trace: float, name: str) -> Variable:
        """Hermitian variable with tr(V) fixed to the given value."""
        base = (trace / dim) * np.eye(dim, dtype=complex)
        return self._register(Variable(name, dim, base, traceless_hermitian_basis(dim)))

    def partial_trace_affine_var(
        self, shape: BipartiteShape, target_b: np.ndarray, name: str
    ) -> Variable:
        """Bipartite Hermitian variable with tr_A(V) fixed to target_b."""
        dA, dB = shape
        base = np.kron(np.eye(dA, dtype=complex) / dA, np.asarray(target_b, dtype=complex))
        basis = tensor_basis(traceless_hermitian_basis(dA), hermitian_basis(dB))
        return self._register(Variable(name, dA * dB, base, basis))

    def general_var(self, dim: int, name: str) -> Variable:
        return self._register(
            Variable(
                name,
                dim,
                np.zeros((dim, dim), dtype=complex),
                general_basis(dim),
                hermitian=False,
            )
        )

    def add_lmi(
        self,
        side: int,
        terms: list[tuple[Variable, Op]],
        const: np.ndarray | None = None,
        name: str = "",
        complex_block: bool = True,
    ) -> int:
        """Declare G(x) = const + sum_terms op(V) >= 0; returns the LMI index.

        Base offsets of affine variables are folded into the constant term.
        """
        g0 = np.zeros((side, side), dtype=complex) if const is None else np.asarray(
            const, dtype=complex
        ).copy()
        for var, op in terms:
            if np.abs(var.base).max() > 0.0:
                g0 = g0 + op(var.base[None])[0]
        self.lmis.append(Lmi(name or f"lmi{len(self.lmis)}", side, g0, list(terms), complex_block))
        return len(self.lmis) - 1

    def maximize(self, terms: list[tuple[Variable, np.ndarray]], const: float = 0.0) -> None:
        """Objective: maximize sum Re tr(M V) + const."""
        self.obj_terms = [(v, np.asarray(m, dtype=complex)) for v, m in terms]
        self.obj_const = float(const)
        for var, m in self.obj_terms:
            self.obj_const += float(np.trace(m @ var.base).real)

    def canonicalize(self) -> "CanonicalSdp":
        p = self.num_params
        c = np.zeros(p)
        for var, m in self.obj_terms:
            c[var.offset : var.offset + var.size] += np.einsum(
                "ij,tji->t", m, var.basis, optimize=True
            ).real

        block_triplets: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        C: dict[int, np.ndarray] = {}
        for li, lmi in enumerate(self.lmis):
            cons_parts = []
            vec_parts = []
            val_parts = []
            side = 2 * lmi.side if lmi.complex_block else lmi.side
            for var, op in lmi.terms:
                g = op(var.basis)
                t_idx, rr, cc = np.nonzero(np.abs(g) > _TRIPLET_TOL)
                vv = g[t_idx, rr, cc]
                cons = var.offset + t_idx
                if lmi.complex_block:
                    n = lmi.side
                    re = vv.real * 0.5
                    im = vv.imag * 0.5
                    nz = re != 0.0
                    cons_parts += [cons[nz], cons[nz]]
                    vec_parts += [
                        rr[nz] * side + cc[nz],
                        (rr[nz] + n) * side + cc[nz] + n,
                    ]
                    val_parts += [re[nz], re[nz]]
                    nz = im != 0.0
                    cons_parts += [cons[nz], cons[nz]]
                    vec_parts += [
                        rr[nz] * side + cc[nz] + n,
                        (rr[nz] + n) * side + cc[nz],
                    ]
                    val_parts += [-im[nz], im[nz]]
                else:
                    cons_parts.append(cons)
                    vec_parts.append(rr * side + cc)
                    val_parts.append(vv.real)
            if cons_parts:
                block_triplets[li] = (
                    np.concatenate(cons_parts),
                    np.concatenate(vec_parts),
                    np.concatenate(val_parts),
                )
            C[li] = embed_hermitian(lmi.const) / 2 if lmi.complex_block else np.real(
                lmi.const
            )

        blocks = [2 * l.side if l.complex_block else l.side for l in self.lmis]
        names = [f"{v.name}[{j}]" for v in self.variables for j in range(v.size)]
        problem = SdpProblem.from_block_triplets(blocks, C, -c, block_triplets, names=names)
        return CanonicalSdp(model=self, problem=problem, c=c)


@dataclass
class CanonicalSdp:
    """Standard-form problem plus the recovery maps back to model variables."""

    model: LmiModel
    problem: SdpProblem
    c: np.ndarray

    def solve(
        self, settings: SolverSettings | None = None, label: str = ""
    ) -> SdpSolution:
        sol = solve(self.problem, settings)
        if sol.status is not SolverStatus.OPTIMAL:
            raise SdpSolverError(
                f"SDP solve failed for {label or self.model.name}: "
                f"status={sol.status.value}, residuals={sol.residuals}"
            )
        return sol

    def x(self, sol: SdpSolution) -> np.ndarray:
        return -sol.y

    def var_value(self, sol: SdpSolution, var: Variable) -> np.ndarray:
        x = self.x(sol)
        return var.value(x[var.offset : var.offset + var.size])

    def dual_block(self, sol: SdpSolution, lmi_index: int) -> np.ndarray:
        lmi = self.model.lmis[lmi_index]
        block = sol.X[lmi_index]
        if lmi.complex_block:
            return extract_hermitian(block)
        return np.asarray(block)

    def primal_objective(self, sol: SdpSolution) -> float:
        """Model objective value at the recovered variables."""
        return float(self.model.obj_const + self.c @ self.x(sol))

    def dual_objective(self, sol: SdpSolution) -> float:
        """Value of the multiplier certificate (upper bound on the model max)."""
        return float(self.model.obj_const + sol.primal_value)


# -- stacked affine ops -------------------------------------------------------


def op_scale(coeff: float) -> Op:
    return lambda m: coeff * m


def op_lift_b(d_b: int, coeff: float = 1.0) -> Op:
    """M_A -> coeff * M_A (x) 1_B, batched."""
    eye = np.eye(d_b)

    def apply(m: np.ndarray) -> np.ndarray:
        t, n = m.shape[0], m.shape[1]
        out = np.einsum("tij,ab->tiajb", m, eye) * coeff
        return out.reshape(t, n * d_b, n * d_b)

    return apply


def op_pt_b(shape: BipartiteShape, coeff: float = 1.0) -> Op:
    """M -> coeff * M^{T_B}, batched."""
    dA, dB = shape

    def apply(m: np.ndarray) -> np.ndarray:
        t = m.shape[0]
        v = m.reshape(t, dA, dB, dA, dB).transpose(0, 1, 4, 3, 2)
        return coeff * v.reshape(t, dA * dB, dA * dB)

    return apply


def op_compose(outer: Op, inner: Op) -> Op:
    return lambda m: outer(inner(m))


def op_embed_diag(side: int, at: int, coeff: float = 1.0) -> Op:
    """Place coeff * M as a diagonal block starting at the given offset."""

    def apply(m: np.ndarray) -> np.ndarray:
        t, n = m.shape[0], m.shape[1]
        out = np.zeros((t, side, side), dtype=complex)
        out[:, at : at + n, at : at + n] = coeff * m
        return out

    return apply


def op_offdiag_pair(side: int, row: int, col: int, coeff: float = 1.0) -> Op:
    """Place coeff * M at (row, col) and its adjoint at (col, row)."""

    def apply(m: np.ndarray) -> np.ndarray:
        t, n = m.shape[0], m.shape[1]
        out = np.zeros((t, side, side), dtype=complex)
        out[:, row : row + n, col : col + n] = coeff * m
        out[:, col : col + n, row : row + n] = coeff * m.conj().transpose(0, 2, 1)
        return out

    return apply


def op_scalar_inner(matrix: np.ndarray, coeff: float = 1.0) -> Op:
    """M -> [[coeff * Re<matrix, M>]] as a 1 x 1 block, batched."""
    mat = np.asarray(matrix, dtype=complex)

    def apply(m: np.ndarray) -> np.ndarray:
        vals = coeff * np.einsum("ij,tij->t", mat.conj(), m, optimize=True).real
        return vals.reshape(-1, 1, 1).astype(complex)

    return apply

