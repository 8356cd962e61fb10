"""Canonicalization of complex Hermitian data to real symmetric blocks.

A Hermitian H = Hr + i Hi maps to the symmetric 2n x 2n matrix

    E(H) = [[Hr, -Hi],
            [Hi,  Hr]],

which is PSD iff H is, and satisfies <E(A), E(B)> = 2 <A, B>.  Objective
and constraint matrices are therefore scaled by 1/2 on embedding so that
values and multipliers carry over unchanged; solution blocks are read back
with :func:`extract_hermitian`, which also averages away the (tiny)
component outside the embedded subalgebra.
"""

from __future__ import annotations

import numpy as np


def embed_hermitian(h: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n embedding of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def extract_hermitian(m: np.ndarray) -> np.ndarray:
    """Project a real symmetric 2n x 2n matrix back to Hermitian n x n."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0] // 2
    if m.shape != (2 * n, 2 * n):
        raise ValueError(f"expected an even-sided square matrix, got {m.shape}")
    re = (m[:n, :n] + m[n:, n:]) / 2
    tr = m[:n, n:]
    bl = m[n:, :n]
    im = (bl - tr) / 2
    h = re + 1j * im
    return (h + h.conj().T) / 2


def embed_triplets(
    h: np.ndarray, scale: float = 0.5, tol: float = 0.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sparse triplets (rows, cols, vals) of scale * E(h) for a Hermitian h.

    Entries with |value| <= tol are dropped.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    rr, cc = np.nonzero(np.abs(h) > tol)
    vv = h[rr, cc]
    rows = []
    cols = []
    vals = []
    re = vv.real * scale
    nz = re != 0.0
    rows += [rr[nz], rr[nz] + n]
    cols += [cc[nz], cc[nz] + n]
    vals += [re[nz], re[nz]]
    im = vv.imag * scale
    nz = im != 0.0
    rows += [rr[nz], rr[nz] + n]
    cols += [cc[nz] + n, cc[nz]]
    vals += [-im[nz], im[nz]]
    if rows:
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    empty = np.zeros(0)
    return empty.astype(np.int64), empty.astype(np.int64), empty
