"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and margins.  Tests appear in criterion order; the final one also
checks the whole-module runtime budget.
"""

import math
import time
from pathlib import Path

import numpy as np

from qcapbound.bounds import sweep, sweep_csv_str, verify_suite
from qcapbound.channels import (
    choi,
    erasure_channel,
    identity_channel,
    kraus_support,
    werner_holevo,
)
from qcapbound.linalg import max_entangled_projector, partial_transpose
from qcapbound.models import CodeClass, cb_norm_pt, fidelity, gamma, kappa, upsilon
from qcapbound.sdp import SdpProblem, SolverSettings, SolverStatus, residuals, solve

SEED = 42
_MODULE_T0 = time.perf_counter()


def _report(num: int, ok: bool, msg: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {msg}")
    assert ok, f"criterion {num}: {msg}"


def _suite_margin(rep):
    worst = None
    for s in rep.suites:
        for c in s.checks:
            slack = c.allowed - c.observed
            if worst is None or slack < worst[0]:
                worst = (slack, c.label)
    return worst


def test_criterion_1_werner_holevo_anchor():
    t0 = time.perf_counter()
    errs = {}
    for d in (3, 4, 5):
        res = kappa(werner_holevo(d), CodeClass.PPTP)
        errs[d] = abs(res.kappa - (d + 2) / d)
    fid = fidelity(werner_holevo(3), 5 / 3, CodeClass.PPTP)

    # the explicit fidelity-one witness, checked by direct arithmetic
    d = 3
    k = (d + 2) / d
    j = choi(werner_holevo(d))
    rho = np.eye(d) / d
    w_pt = np.eye(d * d) / (d + 2) - 2.0 / (d * (d + 2)) * max_entangled_projector(d)
    w = partial_transpose(w_pt, j.shape, "B")
    lift = np.kron(rho, np.eye(d))
    witness_viol = max(
        -np.linalg.eigvalsh(w)[0],
        -np.linalg.eigvalsh(lift - w)[0],
        -np.linalg.eigvalsh(lift / k - w_pt)[0],
        -np.linalg.eigvalsh(lift / k + w_pt)[0],
        abs(np.trace(j.matrix @ w).real - 1.0),
    )
    elapsed = time.perf_counter() - t0
    ok = (
        all(e <= 1e-3 for e in errs.values())
        and fid.value >= 1 - 1e-6
        and witness_viol <= 1e-9
        and elapsed < 30.0
    )
    _report(
        1,
        ok,
        f"kappa errors {dict((k_, f'{v:.1e}') for k_, v in errs.items())}, "
        f"F(W3,5/3)={fid.value:.9f}, witness violation {witness_viol:.1e}, "
        f"runtime {elapsed:.1f}s < 30s",
    )


def test_criterion_2_identity_anchors():
    worst = 0.0
    for d in (2, 3):
        ch = identity_channel(d)
        worst = max(worst, abs(gamma(ch).gamma - d) / d)
        worst = max(worst, abs(cb_norm_pt(ch).value - d) / d)
        for code in (CodeClass.NS, CodeClass.PPTP, CodeClass.NS_AND_PPTP):
            worst = max(worst, abs(kappa(ch, code, tol_k=1e-5).kappa - d) / d)
        worst = max(worst, abs(upsilon(kraus_support(ch)).upsilon - d * d) / (d * d))
    ok = worst <= 1e-5
    _report(2, ok, f"identity anchors worst relative error {worst:.2e} <= 1e-5")


def test_criterion_3_figure_sweep_structure_and_golden():
    t0 = time.perf_counter()
    grid = [round(0.05 * i, 10) for i in range(11)]
    rows = sweep("nr", grid, ["qGamma", "qTheta"])
    ordered = all(
        r.values["qGamma"] <= r.values["qTheta"] + 1e-6 for r in rows
    )
    max_gap = max(r.values["qTheta"] - r.values["qGamma"] for r in rows)
    golden = Path(__file__).parent / "golden" / "nr_sweep.csv"
    text = sweep_csv_str(rows, ["qGamma", "qTheta"])
    matches = golden.read_text() == text
    elapsed = time.perf_counter() - t0
    ok = ordered and max_gap > 0.01 and matches and elapsed < 120.0
    _report(
        3,
        ok,
        f"ordering holds at all 11 points, max gap {max_gap:.4f} > 0.01, "
        f"golden CSV {'matches' if matches else 'DIFFERS'}, runtime {elapsed:.1f}s < 120s",
    )


def test_criterion_4_erasure_dimension_resolution():
    values = {}
    for d in (2, 3, 4):
        values[d] = gamma(erasure_channel(d, 0.5), side="primal").q_gamma
    # independent oracle: twirling reduces the bound SDP to three weights,
    # giving (1 - p) d + p exactly
    oracle_err = max(
        abs(values[d] - math.log2(0.5 * d + 0.5)) for d in values
    )
    matches = [d for d in values if abs(values[d] - 1.123) <= 0.01]
    lines = ", ".join(f"d={d}: qGamma={values[d]:.6f}" for d in sorted(values))
    if matches:
        msg = f"resolved dimension(s) {matches} reproduce 1.123; {lines}"
    else:
        msg = (
            "discrepancy report: no erasure input dimension in {2,3,4} at p=0.5 "
            f"reproduces 1.123 within 0.01 ({lines}; closed form log2((d+1)/2), "
            f"oracle agreement {oracle_err:.1e}); the quoted value is not "
            "reproducible from the erasure channel alone under any of these "
            "dimensions"
        )
    ok = oracle_err <= 1e-5
    _report(4, ok, msg)


def test_criterion_5_additivity():
    rep = verify_suite(["additivity"], seed=SEED)
    slack, label = _suite_margin(rep)
    _report(
        5,
        rep.passed,
        f"Gamma multiplicative over 20 seeded pairs plus named pairs; "
        f"tightest margin {slack:.2e} at [{label}]",
    )


def test_criterion_6_noiseless_tensor_proposition():
    rep = verify_suite(["prop1"], seed=SEED)
    slack, label = _suite_margin(rep)
    _report(
        6,
        rep.passed,
        f"F(N x I2, 2k) = F(N, k) on the declared set and activated kappa "
        f"matches kappa for werner(3); tightest margin {slack:.2e} at [{label}]",
    )


def test_criterion_7_zero_error_suites():
    rep = verify_suite(["theorem1", "theorem2", "graph_invariance"], seed=SEED)
    slack, label = _suite_margin(rep)
    _report(
        7,
        rep.passed,
        f"fidelity/deviation predicate equivalence, kappa_ns^2 = upsilon, and "
        f"probability-vector invariance; tightest margin {slack:.2e} at [{label}]",
    )


def test_criterion_8_ordering_chain():
    rep = verify_suite(["ordering"], seed=SEED)
    slack, label = _suite_margin(rep)
    _report(
        8,
        rep.passed,
        f"log2(kappa_pptp) <= qGamma <= qTheta on every built-in and seeded "
        f"channel; tightest margin {slack:.2e} at [{label}]",
    )


def test_criterion_9_fidelity_sandwich():
    rep = verify_suite(["lemma1"], seed=SEED)
    slack, label = _suite_margin(rep)
    _report(
        9,
        rep.passed,
        f"tensor fidelity sandwich on 10 seeded triples; tightest margin "
        f"{slack:.2e} at [{label}]",
    )


def test_criterion_10_solver_quality_gates():
    settings = SolverSettings(tol_gap=1e-10, tol_feas=1e-10)
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        b = rng.standard_normal((4, 4))
        c = (b + b.T) / 2
        p = SdpProblem([4], {0: c}, [({0: np.eye(4)}, 1.0)])
        sol = solve(p, settings)
        assert sol.status is SolverStatus.OPTIMAL
        worst = max(worst, abs(sol.primal_value - np.linalg.eigvalsh(c)[0]))

    # spot-check the advertised quality gates on returned solutions; every
    # model raises unless its solves end Optimal, and Optimal itself
    # requires residuals within the defaults
    defaults = SolverSettings()
    gates = []
    for res in (
        gamma(werner_holevo(3)),
        cb_norm_pt(identity_channel(3)),
        fidelity(werner_holevo(3), 1.5, CodeClass.PPTP),
    ):
        gates.append(res.stats.gap <= defaults.tol_gap)
    rng2 = np.random.default_rng(1)
    b = rng2.standard_normal((4, 4))
    c = (b + b.T) / 2
    p = SdpProblem([4], {0: c}, [({0: np.eye(4)}, 1.0)])
    sol = solve(p)
    pres, dres, gap = residuals(p, sol)
    gates.append(pres <= defaults.tol_feas and dres <= defaults.tol_feas and gap <= defaults.tol_gap)

    total = time.perf_counter() - _MODULE_T0
    ok = worst <= 1e-8 and all(gates) and total < 600.0
    _report(
        10,
        ok,
        f"eigenvalue oracle worst error {worst:.2e} <= 1e-8 over 50 instances, "
        f"quality gates hold on sampled solves, full acceptance runtime "
        f"{total:.0f}s < 600s",
    )
