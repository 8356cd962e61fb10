import numpy as np
import pytest

from qcapbound.channels import (
    choi,
    identity_channel,
    random_channel,
    werner_holevo,
)
from qcapbound.linalg import max_entangled_projector, partial_transpose
from qcapbound.models import (
    CodeClass,
    fidelity,
    fidelity_dual_residuals,
    lemma1_check,
)

ALL_CODES = (CodeClass.NS, CodeClass.PPTP, CodeClass.NS_AND_PPTP)


def test_code_class_parse():
    assert CodeClass.parse("pptp") is CodeClass.PPTP
    assert CodeClass.parse("NS") is CodeClass.NS
    assert CodeClass.parse("ns-pptp") is CodeClass.NS_AND_PPTP
    with pytest.raises(ValueError, match="unknown code class"):
        CodeClass.parse("bogus")


def test_fidelity_at_unit_size_is_one():
    for ch in (identity_channel(2), werner_holevo(3), random_channel(2, 2, 2, seed=0)):
        for code in ALL_CODES:
            res = fidelity(ch, 1.0, code, side="both")
            assert res.value == 1.0
            assert res.dual_value == 1.0
            # the closed-form witness W = rho (x) 1 reaches fidelity one
            assert np.abs(res.W - np.kron(res.rho, np.eye(ch.dim_out))).max() <= 1e-14
            assert abs(np.trace(choi(ch).matrix @ res.W).real - 1.0) <= 1e-12
            assert abs(np.trace(res.rho).real - 1.0) <= 1e-14


def test_fidelity_rejects_bad_arguments():
    with pytest.raises(ValueError, match=">= 1"):
        fidelity(identity_channel(2), 0.5, CodeClass.PPTP)
    with pytest.raises(ValueError, match="side"):
        fidelity(identity_channel(2), 1.5, CodeClass.PPTP, side="sideways")


def test_werner_holevo_closed_form_witness_is_feasible_and_optimal():
    # rho = 1/3 and W with W^{T_B} = (1/5) 1 - (2/15) Phi_3 reach fidelity
    # one at code size 5/3
    d = 3
    k = (d + 2) / d
    ch = werner_holevo(d)
    j = choi(ch)
    rho = np.eye(d) / d
    w_pt = np.eye(d * d) / (d + 2) - 2.0 / (d * (d + 2)) * max_entangled_projector(d)
    w = partial_transpose(w_pt, j.shape, "B")

    lift = np.kron(rho, np.eye(d))
    assert np.linalg.eigvalsh(w)[0] >= -1e-9
    assert np.linalg.eigvalsh(lift - w)[0] >= -1e-9
    assert np.linalg.eigvalsh(lift / k - w_pt)[0] >= -1e-9
    assert np.linalg.eigvalsh(lift / k + w_pt)[0] >= -1e-9
    assert abs(np.trace(j.matrix @ w).real - 1.0) <= 1e-9

    res = fidelity(ch, k, CodeClass.PPTP)
    assert res.value >= 1.0 - 1e-6


def test_fidelity_upper_bound_and_identity_gap():
    res = fidelity(identity_channel(2), 3.0, CodeClass.PPTP, side="both")
    assert res.value < 1.0 - 1e-3
    assert abs(res.value - res.dual_value) <= 1e-6
    for ch in (identity_channel(2), random_channel(2, 2, 2, seed=3)):
        for k in (1.0, 1.5, 2.5):
            val = fidelity(ch, k, CodeClass.PPTP).value
            assert -1e-9 <= val <= 1.0 + 1e-7


def test_fidelity_monotone_in_code_size():
    ch = random_channel(2, 2, 2, seed=11)
    ks = [1.0, 1.2, 1.5, 2.0]
    vals = [fidelity(ch, k, CodeClass.PPTP).value for k in ks]
    for lo, hi in zip(vals[1:], vals[:-1]):
        assert lo <= hi + 1e-7


def test_intersection_code_is_most_constrained():
    ch = random_channel(2, 2, 2, seed=19)
    k = 1.4
    f_ns = fidelity(ch, k, CodeClass.NS).value
    f_pptp = fidelity(ch, k, CodeClass.PPTP).value
    f_both = fidelity(ch, k, CodeClass.NS_AND_PPTP).value
    assert f_both <= min(f_ns, f_pptp) + 1e-7


def test_dual_certificates_are_feasible():
    for ch, code in [
        (werner_holevo(3), CodeClass.PPTP),
        (identity_channel(2), CodeClass.NS),
        (random_channel(2, 2, 2, seed=7), CodeClass.NS_AND_PPTP),
    ]:
        res = fidelity(ch, 1.3, code, side="both")
        bad = fidelity_dual_residuals(ch, res)
        assert max(bad.values()) <= 1e-6
        # the certificate upper-bounds the primal value
        assert res.dual_value >= res.value - 1e-6


def test_lemma1_identity_pair():
    lhs, mid, rhs = lemma1_check(identity_channel(2), identity_channel(2), 2.0)
    assert abs(lhs - 1.0) <= 1e-6
    assert abs(mid - 1.0) <= 1e-6
    assert abs(rhs - 1.0) <= 1e-6


def test_lemma1_sandwich_on_random_channels():
    n1 = random_channel(2, 2, 2, seed=23)
    n2 = random_channel(2, 2, 3, seed=24)
    lhs, mid, rhs = lemma1_check(n1, n2, 1.5)
    assert lhs <= mid + 1e-6
    assert mid <= rhs + 1e-6


def test_lemma1_with_noiseless_factor_is_tight():
    # with a noiseless second factor the middle and right terms coincide
    n1 = random_channel(2, 2, 2, seed=25)
    k = 1.5
    lhs, mid, rhs = lemma1_check(n1, identity_channel(2), k)
    assert abs(mid - rhs) <= 1e-5
