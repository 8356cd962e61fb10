"""Debug dump of canonicalized problems in a sparse text format.

Format (one record per line, whitespace separated):

    # qcapbound sdp dump v1
    blocks <side_1> <side_2> ...
    c <block> <row> <col> <value>
    a <constraint> <block> <row> <col> <value>
    b <constraint> <value>
    name <constraint> <label>

Rows/columns are 0-based; only nonzeros are written.  Intended for
cross-checking canonicalized problems against external solvers.
"""

from __future__ import annotations

import io

import numpy as np

from .problem import SdpProblem


def dump_problem(problem: SdpProblem, fp) -> None:
    """Write the problem to a text file object."""
    fp.write("# qcapbound sdp dump v1\n")
    fp.write("blocks " + " ".join(str(n) for n in problem.blocks) + "\n")
    for bi, c in enumerate(problem.C):
        rows, cols = np.nonzero(c)
        for r, col in zip(rows, cols):
            fp.write(f"c {bi} {r} {col} {c[r, col]:.17g}\n")
    for bi, mat in enumerate(problem.A):
        coo = mat.tocoo()
        n = problem.blocks[bi]
        for i, idx, v in zip(coo.row, coo.col, coo.data):
            fp.write(f"a {i} {bi} {idx // n} {idx % n} {v:.17g}\n")
    for i, b in enumerate(problem.b):
        fp.write(f"b {i} {b:.17g}\n")
    if problem.names:
        for i, name in enumerate(problem.names):
            fp.write(f"name {i} {name}\n")


def dump_problem_str(problem: SdpProblem) -> str:
    buf = io.StringIO()
    dump_problem(problem, buf)
    return buf.getvalue()
