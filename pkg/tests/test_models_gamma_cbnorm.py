import math

import numpy as np
import pytest

from qcapbound.channels import (
    erasure_channel,
    identity_channel,
    nr_channel,
    random_channel,
    tensor_channels,
    werner_holevo,
)
from qcapbound.models import cb_norm_pt, gamma, superactivation_bound


def test_gamma_identity_matched_pair():
    for d in (2, 3):
        res = gamma(identity_channel(d))
        assert abs(res.gamma - d) <= 1e-5 * d
        assert abs(res.dual_mu - d) <= 1e-5 * d
        bad = res.certificate_residuals(identity_channel(d))
        assert max(bad.values()) <= 1e-6
        assert abs(np.trace(res.rho).real - 1.0) <= 1e-12


def test_gamma_sides():
    res = gamma(identity_channel(2), side="primal")
    assert res.dual_mu is None and res.dual_y is None
    res = gamma(identity_channel(2), side="dual")
    assert res.dual_mu is not None
    with pytest.raises(ValueError, match="side"):
        gamma(identity_channel(2), side="sideways")


def test_gamma_werner_holevo_lower_bound():
    res = gamma(werner_holevo(3))
    assert res.q_gamma >= math.log2(5 / 3) - 1e-6
    assert abs(res.gamma - res.dual_mu) <= 1e-6


def test_gamma_erasure_closed_form():
    # symmetric ansatz: the optimum is (1 - p) d + p, found by twirling
    # over local unitaries and optimizing the three remaining weights
    for d, p in [(2, 0.5), (3, 0.5), (2, 0.25), (3, 0.7)]:
        res = gamma(erasure_channel(d, p), side="primal")
        assert abs(res.gamma - ((1 - p) * d + p)) <= 2e-6


def test_gamma_additive_on_random_pair():
    a = random_channel(2, 2, 2, seed=51)
    b = random_channel(2, 2, 3, seed=52)
    ga = gamma(a, side="primal").gamma
    gb = gamma(b, side="primal").gamma
    gab = gamma(tensor_channels(a, b), side="primal").gamma
    assert abs(gab - ga * gb) <= 1e-5 * ga * gb


def test_superactivation_bound():
    assert abs(superactivation_bound(identity_channel(2), identity_channel(2)) - 2.0) <= 1e-6
    a = nr_channel(0.2)
    b = random_channel(2, 2, 2, seed=53)
    bound = superactivation_bound(a, b)
    joint = gamma(tensor_channels(a, b), side="primal").q_gamma
    assert abs(bound - joint) <= 1e-5


def test_cb_norm_identity():
    for d in (2, 3):
        res = cb_norm_pt(identity_channel(d))
        assert abs(res.value - d) <= 1e-5 * d
        assert abs(res.q_theta - math.log2(d)) <= 1e-5
        assert abs(np.trace(res.rho0).real - 1.0) <= 1e-12
        assert abs(np.trace(res.rho1).real - 1.0) <= 1e-12


def test_cb_norm_dominates_gamma():
    for ch in (werner_holevo(3), nr_channel(0.3), random_channel(2, 2, 2, seed=54)):
        qg = gamma(ch, side="primal").q_gamma
        qt = cb_norm_pt(ch).q_theta
        assert qg <= qt + 1e-6


def test_cb_norm_strict_gap_for_high_noise():
    ch = nr_channel(0.5)
    qg = gamma(ch, side="primal").q_gamma
    qt = cb_norm_pt(ch).q_theta
    assert qt - qg > 0.01
