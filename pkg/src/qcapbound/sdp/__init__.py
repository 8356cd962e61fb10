"""Embedded standard-form SDP solver and canonicalization helpers."""

from .dump import dump_problem, dump_problem_str
from .embedding import embed_hermitian, embed_triplets, extract_hermitian
from .problem import (
    SdpProblem,
    SdpSolution,
    SdpSolverError,
    SolverSettings,
    SolverStatus,
    residuals,
)
from .solver import solve

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "SdpSolverError",
    "SolverSettings",
    "SolverStatus",
    "dump_problem",
    "dump_problem_str",
    "embed_hermitian",
    "embed_triplets",
    "extract_hermitian",
    "residuals",
    "solve",
]
