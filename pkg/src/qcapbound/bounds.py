"""Per-channel bound reports, parameter sweeps and verification suites.

The verification suites are executable forms of the structural facts the
models are built on (strong duality, additivity, tensor-with-identity
scaling, the fidelity/deviation equivalence, the NS square-root law, the
fidelity sandwich, the bound ordering chain, and graph dependence); each
returns observed margins so failures are data rather than exceptions.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    QuantumChannel,
    erasure_channel,
    identity_channel,
    kraus_support,
    mixed_unitary,
    nr_channel,
    random_channel,
    tensor_channels,
    werner_holevo,
)
from .models import (
    CodeClass,
    cb_norm_pt,
    deviation,
    fidelity,
    gamma,
    kappa,
    kappa_activated,
    lemma1_check,
    upsilon,
)
from .sdp import SolverSettings

IDENTIFIERS = (
    "qGamma",
    "qTheta",
    "kappaNS",
    "kappaPPTp",
    "kappaNSPPTp",
    "upsilon",
    "oneShotZeroErrorPPTp",
)

_KAPPA_CODES = {
    "kappaNS": CodeClass.NS,
    "kappaPPTp": CodeClass.PPTP,
    "kappaNSPPTp": CodeClass.NS_AND_PPTP,
}


@dataclass
class CheckRecord:
    label: str
    passed: bool
    observed: float
    allowed: float

    def line(self) -> str:
        mark = "ok" if self.passed else "FAIL"
        return f"[{mark}] {self.label}: observed {self.observed:.3e} <= {self.allowed:.3e}"


@dataclass
class BoundReport:
    channel_name: str
    dims: tuple[int, int]
    requested: tuple[str, ...]
    values: dict[str, float]
    wall_times: dict[str, float]
    solver_stats: dict[str, tuple[int, float]]
    errors: dict[str, str] = field(default_factory=dict)
    checks: list[CheckRecord] = field(default_factory=list)

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "channel_name": self.channel_name,
            "dims": list(self.dims),
            "requested": list(self.requested),
            "values": {k: self.values[k] for k in sorted(self.values)},
            "solver_stats": {
                k: {"iterations": v[0], "gap": v[1]}
                for k, v in sorted(self.solver_stats.items())
            },
            "errors": {k: self.errors[k] for k in sorted(self.errors)},
            "checks": [
                {
                    "label": c.label,
                    "passed": c.passed,
                    "observed": c.observed,
                    "allowed": c.allowed,
                }
                for c in self.checks
            ],
        }
        if include_timings:
            out["wall_times"] = {k: self.wall_times[k] for k in sorted(self.wall_times)}
        return out


def report(
    ch: QuantumChannel,
    requested,
    settings: SolverSettings | None = None,
    tol_k: float = 1e-4,
) -> BoundReport:
    """Compute the requested bound identifiers for one channel.

    Failures of individual bounds are recorded per identifier and do not
    abort the remaining ones.
    """
    requested = tuple(requested)
    for ident in requested:
        if ident not in IDENTIFIERS:
            raise ValueError(
                f"unknown bound identifier {ident!r}; known: {', '.join(IDENTIFIERS)}"
            )
    values: dict[str, float] = {}
    wall: dict[str, float] = {}
    stats: dict[str, tuple[int, float]] = {}
    errors: dict[str, str] = {}
    kappa_cache: dict[CodeClass, object] = {}

    def run(ident: str, fn):
        t0 = time.perf_counter()
        try:
            value, stat = fn()
        except Exception as exc:  # noqa: BLE001 - per-identifier error capture
            errors[ident] = f"{type(exc).__name__}: {exc}"
            return
        finally:
            wall[ident] = time.perf_counter() - t0
        values[ident] = value
        stats[ident] = (stat.iterations, stat.gap)

    def kappa_for(code: CodeClass):
        if code not in kappa_cache:
            kappa_cache[code] = kappa(ch, code, tol_k=tol_k, settings=settings)
        return kappa_cache[code]

    for ident in requested:
        if ident == "qGamma":
            run(ident, lambda: (lambda g: (g.q_gamma, g.stats))(gamma(ch, settings=settings)))
        elif ident == "qTheta":
            run(ident, lambda: (lambda r: (r.q_theta, r.stats))(cb_norm_pt(ch, settings=settings)))
        elif ident in _KAPPA_CODES:
            code = _KAPPA_CODES[ident]
            run(ident, lambda code=code: (lambda r: (r.kappa, r.stats))(kappa_for(code)))
        elif ident == "upsilon":
            run(
                ident,
                lambda: (lambda r: (r.upsilon, r.stats))(
                    upsilon(kraus_support(ch), settings=settings)
                ),
            )
        elif ident == "oneShotZeroErrorPPTp":
            run(
                ident,
                lambda: (lambda r: (float(r.one_shot_zero_error), r.stats))(
                    kappa_for(CodeClass.PPTP)
                ),
            )

    checks: list[CheckRecord] = []
    if "qGamma" in values and "qTheta" in values:
        obs = values["qGamma"] - values["qTheta"]
        checks.append(CheckRecord("qGamma <= qTheta + 2e-5", obs <= 2e-5, obs, 2e-5))
    if "kappaPPTp" in values and "qGamma" in values:
        obs = math.log2(values["kappaPPTp"]) - values["qGamma"]
        checks.append(
            CheckRecord("log2(kappaPPTp) <= qGamma + 1e-4", obs <= 1e-4, obs, 1e-4)
        )
    return BoundReport(
        channel_name=ch.name,
        dims=(ch.dim_in, ch.dim_out),
        requested=requested,
        values=values,
        wall_times=wall,
        solver_stats=stats,
        errors=errors,
        checks=checks,
    )


# -- sweeps -------------------------------------------------------------------


@dataclass
class SweepRow:
    parameter: float
    values: dict[str, float]


def sweep(
    family: str,
    grid,
    requested,
    settings: SolverSettings | None = None,
) -> list[SweepRow]:
    """Evaluate the requested bounds along a one-parameter channel family."""
    if family != "nr":
        raise ValueError(f"unknown sweep family {family!r}; known: nr")
    requested = tuple(requested)
    grid = sorted(float(g) for g in grid)
    if grid and (grid[0] < 0.0 or grid[-1] > 0.5):
        raise ValueError("nr sweep grid must lie within [0, 0.5]")
    rows = []
    for r in grid:
        rep = report(nr_channel(r), requested, settings=settings)
        if rep.errors:
            raise RuntimeError(f"sweep failed at r={r:g}: {rep.errors}")
        rows.append(SweepRow(parameter=r, values=dict(rep.values)))
    return rows


def write_sweep_csv(rows: list[SweepRow], identifiers, fp) -> None:
    """CSV with 12 significant digits, '.' decimals and \\n line endings."""
    identifiers = list(identifiers)
    fp.write("param," + ",".join(identifiers) + "\n")
    for row in rows:
        cells = [f"{row.parameter:.12g}"]
        cells += [f"{row.values[ident]:.12g}" for ident in identifiers]
        fp.write(",".join(cells) + "\n")


def sweep_csv_str(rows: list[SweepRow], identifiers) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, identifiers, buf)
    return buf.getvalue()


def read_sweep_csv(fp) -> list[SweepRow]:
    header = fp.readline().strip().split(",")
    if not header or header[0] != "param":
        raise ValueError("malformed sweep CSV: first column must be 'param'")
    idents = header[1:]
    rows = []
    for line in fp:
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        rows.append(
            SweepRow(
                parameter=float(cells[0]),
                values={k: float(v) for k, v in zip(idents, cells[1:])},
            )
        )
    return rows


# -- verification suites ------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: list[CheckRecord]

    def lines(self) -> list[str]:
        head = f"suite {self.name}: {'pass' if self.passed else 'FAIL'}"
        return [head] + ["  " + c.line() for c in self.checks]


@dataclass
class VerifyReport:
    suites: list[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def lines(self) -> list[str]:
        out = []
        for s in self.suites:
            out.extend(s.lines())
        return out


def seeded_channels(seed: int, count: int = 10) -> list[QuantumChannel]:
    """Deterministic list of small random channels (dims 2-3)."""
    specs = [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 3), (3, 3, 3), (2, 2, 4)]
    out = []
    for i in range(count):
        din, dout, rank = specs[i % len(specs)]
        out.append(random_channel(din, dout, rank, seed=seed * 1000 + i))
    return out


def builtin_channels() -> list[QuantumChannel]:
    """Representative parameter points of every named channel family."""
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    return [
        identity_channel(2),
        identity_channel(3),
        erasure_channel(2, 0.25),
        erasure_channel(2, 0.5),
        erasure_channel(3, 0.5),
        werner_holevo(3),
        werner_holevo(4),
        nr_channel(0.1),
        nr_channel(0.3),
        nr_channel(0.5),
        mixed_unitary([np.eye(2), x], [0.7, 0.3], name="bitflip(0.3)"),
    ]


def _check(checks, label, observed, allowed):
    checks.append(CheckRecord(label, observed <= allowed, float(observed), float(allowed)))


def _suite_duality(seed: int, settings) -> SuiteResult:
    channels = [
        identity_channel(2),
        werner_holevo(3),
        nr_channel(0.2),
        *seeded_channels(seed, 3),
    ]
    checks: list[CheckRecord] = []
    for ch in channels:
        g = gamma(ch, side="both", settings=settings)
        _check(
            checks,
            f"gamma primal/dual agree [{ch.name}]",
            abs(g.gamma - g.dual_mu),
            1e-6 * max(1.0, abs(g.gamma)),
        )
        f = fidelity(ch, 1.5, CodeClass.PPTP, side="both", settings=settings)
        _check(
            checks,
            f"fidelity primal/dual agree [{ch.name}]",
            abs(f.value - f.dual_value),
            1e-6,
        )
    return SuiteResult("duality", all(c.passed for c in checks), checks)


def _additivity_pairs(seed: int) -> list[tuple[QuantumChannel, QuantumChannel]]:
    """20 seeded pairs with joint Choi side <= 36, plus the named pairs."""
    pairs = []
    dims = [
        ((2, 2), (2, 2)),
        ((2, 2), (2, 3)),
        ((2, 2), (3, 2)),
        ((2, 3), (3, 2)),
        ((3, 3), (2, 2)),
    ]
    for i in range(20):
        (a_in, a_out), (b_in, b_out) = dims[i % len(dims)]
        a = random_channel(a_in, a_out, 2, seed=seed * 100 + 2 * i)
        b = random_channel(b_in, b_out, 2, seed=seed * 100 + 2 * i + 1)
        pairs.append((a, b))
    pairs.append((werner_holevo(3), identity_channel(2)))
    pairs.append((nr_channel(0.15), nr_channel(0.35)))
    return pairs


def _suite_additivity(seed: int, settings) -> SuiteResult:
    checks: list[CheckRecord] = []
    for a, b in _additivity_pairs(seed):
        ga = gamma(a, side="primal", settings=settings).gamma
        gb = gamma(b, side="primal", settings=settings).gamma
        gab = gamma(tensor_channels(a, b), side="primal", settings=settings).gamma
        _check(
            checks,
            f"Gamma multiplicative [{a.name} x {b.name}]",
            abs(gab - ga * gb),
            1e-5 * ga * gb,
        )
    return SuiteResult("additivity", all(c.passed for c in checks), checks)


def _suite_prop1(seed: int, settings) -> SuiteResult:
    """Tensoring with a noiseless qudit rescales the code size exactly."""
    checks: list[CheckRecord] = []
    idle = identity_channel(2)
    for ch in (nr_channel(0.1), nr_channel(0.3), random_channel(2, 2, 2, seed=seed)):
        joint = tensor_channels(ch, idle)
        for k in (1.0, 1.2, 1.5):
            f_base = fidelity(ch, k, CodeClass.PPTP, settings=settings).value
            f_joint = fidelity(joint, 2 * k, CodeClass.PPTP, settings=settings).value
            _check(
                checks,
                f"F(N x I2, 2k) = F(N, k) [{ch.name}, k={k:g}]",
                abs(f_joint - f_base),
                1e-5,
            )
    ka = kappa_activated(werner_holevo(3), 3, settings=settings)
    kp = kappa(werner_holevo(3), CodeClass.PPTP, settings=settings).kappa
    _check(checks, "activated kappa equals kappa [werner(3)]", abs(ka - kp), 1e-3)
    return SuiteResult("prop1", all(c.passed for c in checks), checks)


def _suite_theorem1(seed: int, settings) -> SuiteResult:
    """Fidelity-one and zero-deviation are the same predicate."""
    checks: list[CheckRecord] = []
    for ch in seeded_channels(seed, 10):
        ks = kraus_support(ch)
        kap = kappa(ch, CodeClass.PPTP, settings=settings).kappa
        samples = {1.0, 1.05, max(1.0, kap - 0.05), kap + 0.05, kap + 0.5}
        for k in sorted(samples):
            f_one = fidelity(ch, k, CodeClass.PPTP, settings=settings).value >= 1 - 1e-6
            d_zero = deviation(ks, k, CodeClass.PPTP, settings=settings) >= -1e-6
            _check(
                checks,
                f"predicates agree [{ch.name}, k={k:.4g}]",
                0.0 if f_one == d_zero else 1.0,
                0.5,
            )
    return SuiteResult("theorem1", all(c.passed for c in checks), checks)


def _suite_theorem2(seed: int, settings) -> SuiteResult:
    """kappa for NS codes is the square root of the classical NS value."""
    checks: list[CheckRecord] = []
    for ch in seeded_channels(seed, 10):
        kap = kappa(ch, CodeClass.NS, settings=settings).kappa
        ups = upsilon(kraus_support(ch), settings=settings).upsilon
        _check(
            checks,
            f"kappa_ns^2 = upsilon [{ch.name}]",
            abs(kap**2 - ups),
            1e-3,
        )
    return SuiteResult("theorem2", all(c.passed for c in checks), checks)


def _suite_lemma1(seed: int, settings) -> SuiteResult:
    checks: list[CheckRecord] = []
    rng = np.random.default_rng(seed)
    for i in range(10):
        n1 = random_channel(2, 2, 2, seed=seed * 77 + 2 * i)
        n2 = random_channel(2, 2, 3, seed=seed * 77 + 2 * i + 1)
        k = float(rng.uniform(1.1, 2.0))
        lhs, mid, rhs = lemma1_check(n1, n2, k, settings=settings)
        _check(checks, f"sandwich lower [{i}: k={k:.3f}]", lhs - mid, 1e-6)
        _check(checks, f"sandwich upper [{i}: k={k:.3f}]", mid - rhs, 1e-6)
    return SuiteResult("lemma1", all(c.passed for c in checks), checks)


def _suite_ordering(seed: int, settings) -> SuiteResult:
    """log2(kappa_pptp) <= qGamma <= qTheta across channels."""
    checks: list[CheckRecord] = []
    for ch in builtin_channels() + seeded_channels(seed, 10):
        kap = kappa(ch, CodeClass.PPTP, settings=settings).kappa
        qg = gamma(ch, side="primal", settings=settings).q_gamma
        qt = cb_norm_pt(ch, settings=settings).q_theta
        _check(checks, f"log2(kappa) <= qGamma [{ch.name}]", math.log2(kap) - qg, 1e-4)
        _check(checks, f"qGamma <= qTheta [{ch.name}]", qg - qt, 2e-4)
    return SuiteResult("ordering", all(c.passed for c in checks), checks)


def _suite_graph_invariance(seed: int, settings) -> SuiteResult:
    """kappa depends on the Kraus span only, not the mixing probabilities."""
    checks: list[CheckRecord] = []
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h = h + h.conj().T
    w, v = np.linalg.eigh(h)
    u_rand = v @ np.diag(np.exp(1j * w)) @ v.conj().T
    unitary_sets = {"1,X": [np.eye(2), x], "1,XZ,U": [np.eye(2), x @ z, u_rand]}
    prob_sets = {2: [(0.5, 0.5), (0.8, 0.2), (0.1, 0.9)], 3: [(1 / 3, 1 / 3, 1 / 3), (0.6, 0.3, 0.1)]}
    for label, us in unitary_sets.items():
        for code in (CodeClass.PPTP, CodeClass.NS):
            kappas = [
                kappa(
                    mixed_unitary(us, probs, name=f"mu[{label}]{probs}"),
                    code,
                    settings=settings,
                ).kappa
                for probs in prob_sets[len(us)]
            ]
            _check(
                checks,
                f"kappa({code.value}) invariant over probabilities [{label}]",
                max(kappas) - min(kappas),
                2e-4,
            )
    return SuiteResult("graph_invariance", all(c.passed for c in checks), checks)


_SUITES = {
    "duality": _suite_duality,
    "additivity": _suite_additivity,
    "prop1": _suite_prop1,
    "theorem1": _suite_theorem1,
    "theorem2": _suite_theorem2,
    "lemma1": _suite_lemma1,
    "ordering": _suite_ordering,
    "graph_invariance": _suite_graph_invariance,
}

SUITE_NAMES = tuple(_SUITES)


def verify_suite(
    suites,
    seed: int,
    settings: SolverSettings | None = None,
) -> VerifyReport:
    """Run the named verification suites on seeded random channels plus the
    named channel families; failures are reported, not raised."""
    names = list(suites)
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown suite {name!r}; known: {', '.join(_SUITES)}")
    results = [_SUITES[name](seed, settings) for name in names]
    return VerifyReport(suites=results)
