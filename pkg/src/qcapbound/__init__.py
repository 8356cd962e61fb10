"""SDP bounds on quantum-channel capacities.

Library surface: channel constructors and Choi/Kraus tooling
(:mod:`qcapbound.channels`), bipartite linear algebra
(:mod:`qcapbound.linalg`), the embedded standard-form SDP solver
(:mod:`qcapbound.sdp`), the bound models (:mod:`qcapbound.models`) and
the report/sweep/verification layer (:mod:`qcapbound.bounds`).
"""

from .bounds import (
    BoundReport,
    IDENTIFIERS,
    SUITE_NAMES,
    SweepRow,
    VerifyReport,
    read_sweep_csv,
    report,
    sweep,
    sweep_csv_str,
    verify_suite,
    write_sweep_csv,
)
from .channels import (
    ChoiMatrix,
    KrausSupport,
    QuantumChannel,
    channel_from_dict,
    channel_to_dict,
    choi,
    erasure_channel,
    from_kraus,
    identity_channel,
    kraus_support,
    load_channel,
    mixed_unitary,
    nr_channel,
    random_channel,
    save_channel,
    tensor_channels,
    werner_holevo,
)
from .linalg import BipartiteShape
from .models import (
    CbNormResult,
    CodeClass,
    FidelityResult,
    GammaResult,
    KappaResult,
    UpsilonResult,
    cb_norm_pt,
    deviation,
    fidelity,
    gamma,
    kappa,
    kappa_activated,
    lemma1_check,
    superactivation_bound,
    upsilon,
)
from .sdp import SdpProblem, SdpSolution, SolverSettings, SolverStatus, residuals, solve

__version__ = "0.1.0"
