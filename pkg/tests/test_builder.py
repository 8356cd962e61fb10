import numpy as np
import pytest

from qcapbound.channels import choi, identity_channel
from qcapbound.linalg import BipartiteShape, max_entangled_projector, swap_operator
from qcapbound.models.builder import (
    LmiModel,
    general_basis,
    hermitian_basis,
    op_embed_diag,
    op_lift_b,
    op_offdiag_pair,
    op_pt_b,
    op_scalar_inner,
    op_scale,
    tensor_basis,
    traceless_hermitian_basis,
)
from qcapbound.sdp import SdpSolution, SolverStatus, embed_hermitian, residuals


def test_hermitian_basis_is_orthonormal():
    for n in (2, 3):
        basis = hermitian_basis(n)
        assert basis.shape == (n * n, n, n)
        gram = np.einsum("tij,sji->ts", basis, basis).real
        assert np.abs(gram - np.eye(n * n)).max() <= 1e-12
        assert all(np.abs(b - b.conj().T).max() <= 1e-15 for b in basis)


def test_traceless_basis_spans_traceless():
    basis = traceless_hermitian_basis(3)
    assert basis.shape[0] == 8
    assert all(abs(np.trace(b)) <= 1e-14 for b in basis)
    rank = np.linalg.matrix_rank(basis.reshape(8, -1))
    assert rank == 8


def test_general_basis_spans_everything():
    basis = general_basis(2)
    assert basis.shape[0] == 8
    rank = np.linalg.matrix_rank(
        np.concatenate([basis.reshape(8, -1).real, basis.reshape(8, -1).imag], axis=1)
    )
    assert rank == 8


def test_variable_parameterizations():
    model = LmiModel()
    rho = model.trace_affine_var(3, 1.0, "rho")
    w = model.partial_trace_affine_var(BipartiteShape(2, 3), np.eye(3) / 4.0, "W")
    rng = np.random.default_rng(0)
    x = rng.standard_normal(model.num_params)
    rho_val = rho.value(x[rho.offset : rho.offset + rho.size])
    w_val = w.value(x[w.offset : w.offset + w.size])
    assert abs(np.trace(rho_val) - 1.0) <= 1e-12
    red = np.einsum("iaib->ab", w_val.reshape(2, 3, 2, 3))
    assert np.abs(red - np.eye(3) / 4.0).max() <= 1e-12


def test_ops_match_single_matrix_oracles():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
    m = (m + m.conj().transpose(0, 2, 1)) / 2
    lifted = op_lift_b(3)(m)
    for t in range(3):
        assert np.abs(lifted[t] - np.kron(m[t], np.eye(3))).max() <= 1e-14
    shape = BipartiteShape(2, 2)
    big = rng.standard_normal((2, 4, 4)) + 1j * rng.standard_normal((2, 4, 4))
    pt = op_pt_b(shape, -2.0)(big)
    for t in range(2):
        expect = -2.0 * big[t].reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
        assert np.abs(pt[t] - expect).max() <= 1e-14
    emb = op_embed_diag(5, 1, 2.0)(m)
    assert np.abs(emb[0][1:3, 1:3] - 2.0 * m[0]).max() <= 1e-14
    assert np.abs(emb[0][0, :]).max() == 0.0
    off = op_offdiag_pair(4, 0, 2)(m)
    assert np.abs(off[1][0:2, 2:4] - m[1]).max() <= 1e-14
    assert np.abs(off[1][2:4, 0:2] - m[1].conj().T).max() <= 1e-14
    scal = op_scalar_inner(np.eye(2), 3.0)(m)
    for t in range(3):
        assert np.isclose(scal[t][0, 0].real, 3.0 * np.trace(m[t]).real)
    assert np.abs(op_scale(-0.5)(m) + 0.5 * m).max() == 0.0


def test_tensor_basis_matches_kron():
    left = hermitian_basis(2)
    right = traceless_hermitian_basis(2)
    stack = tensor_basis(left, right)
    assert stack.shape == (4 * 3, 4, 4)
    k = 0
    for bl in left:
        for br in right:
            assert np.abs(stack[k] - np.kron(bl, br)).max() <= 1e-14
            k += 1


def _gamma_identity_model(d):
    """The capacity-bound SDP of the noiseless qudit, built directly."""
    j = choi(identity_channel(d))
    model = LmiModel(name="gamma-test")
    r_var = model.hermitian_var(d * d, "R")
    rho = model.trace_affine_var(d, 1.0, "rho")
    model.add_lmi(d * d, [(r_var, op_scale(1.0))], name="R_psd")
    model.add_lmi(d, [(rho, op_scale(1.0))], name="rho_psd")
    model.add_lmi(
        d * d, [(rho, op_lift_b(d)), (r_var, op_pt_b(j.shape, -1.0))], name="pt_upper"
    )
    model.add_lmi(
        d * d, [(rho, op_lift_b(d)), (r_var, op_pt_b(j.shape, +1.0))], name="pt_lower"
    )
    model.maximize([(r_var, j.matrix)])
    return model, r_var, rho


def test_canonicalized_model_solves_to_known_value():
    model, r_var, rho = _gamma_identity_model(2)
    can = model.canonicalize()
    sol = can.solve()
    assert abs(can.primal_objective(sol) - 2.0) <= 1e-6
    assert abs(can.dual_objective(sol) - 2.0) <= 1e-6
    r_opt = can.var_value(sol, r_var)
    assert abs(np.trace(choi(identity_channel(2)).matrix @ r_opt).real - 2.0) <= 1e-6


def test_hand_built_pair_for_identity_gamma_has_tiny_residuals():
    # Matched primal/dual certificates in exact arithmetic: R = Phi/2 with
    # the maximally mixed state, and the symmetric/antisymmetric projectors
    # as multipliers of the partial-transpose constraints.
    d = 2
    model, r_var, rho_var = _gamma_identity_model(d)
    can = model.canonicalize()
    phi = max_entangled_projector(d)
    swap = swap_operator(d)
    p_sym = (np.eye(d * d) + swap) / 2
    p_anti = (np.eye(d * d) - swap) / 2

    # model-side point x: R = Phi/2, rho = 1/d (the parameterization base)
    x = np.zeros(can.problem.m)
    r_target = phi / 2
    sl = slice(r_var.offset, r_var.offset + r_var.size)
    x[sl] = np.einsum("tij,ji->t", r_var.basis, r_target).real
    y = -x

    # multiplier blocks: (Z_R, Z_rho, V, Y) = (0, 0, P_sym, P_anti)
    x_blocks = [
        np.zeros((2 * d * d, 2 * d * d)),
        np.zeros((2 * d, 2 * d)),
        embed_hermitian(p_sym),
        embed_hermitian(p_anti),
    ]
    # slacks are the LMI values at x, in embedded halved scale
    rho_mat = np.eye(d) / d
    g_vals = [
        r_target,
        rho_mat,
        np.kron(rho_mat, np.eye(d)) - swap / 2,
        np.kron(rho_mat, np.eye(d)) + swap / 2,
    ]
    s_blocks = [embed_hermitian(g) / 2 for g in g_vals]
    sol = SdpSolution(
        status=SolverStatus.OPTIMAL,
        primal_value=can.problem.objective(x_blocks),
        dual_value=float(can.problem.b @ y),
        X=x_blocks,
        y=y,
        S=s_blocks,
        iterations=0,
    )
    pres, dres, gap = residuals(can.problem, sol)
    assert pres <= 1e-12
    assert dres <= 1e-12
    assert gap <= 1e-12
    assert abs(sol.primal_value - 2.0) <= 1e-12
    assert abs(sol.dual_value - 2.0) <= 1e-12


def test_linked_objective_constant_and_base_folding():
    # a variable base contributes to both the LMI constant and the objective
    model = LmiModel()
    rho = model.trace_affine_var(2, 1.0, "rho")
    model.add_lmi(2, [(rho, op_scale(1.0))], name="rho_psd")
    model.maximize([(rho, np.diag([1.0, 0.0]).astype(complex))])
    can = model.canonicalize()
    sol = can.solve()
    # max <diag(1,0), rho> over states is 1
    assert abs(can.primal_objective(sol) - 1.0) <= 1e-7
    rho_val = can.var_value(sol, rho)
    assert abs(np.trace(rho_val) - 1.0) <= 1e-12
    assert np.linalg.eigvalsh(rho_val)[0] >= -1e-7


def test_model_requires_valid_side():
    model = LmiModel()
    with pytest.raises(ValueError):
        model.add_lmi(0, [], name="empty")  # zero-sided block is invalid
        can = model.canonicalize()
        can.solve()
