"""Dense Hermitian linear algebra for bipartite operators.

Bipartite operators act on A (x) B with A-major ordering: the composite
index for (iA, iB) is iA * dB + iB.  All functions are pure and return
fresh arrays, so results can safely be shared across threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

DEFAULT_HERMITIAN_TOL = 1e-10
# Support detection must sit above the ~1e-8 noise floor of solver output.
DEFAULT_RANK_TOL = 1e-7


class BipartiteShape(NamedTuple):
    """Dimensions (dA, dB) of a bipartite operator over A (x) B."""

    dA: int
    dB: int

    @property
    def side(self) -> int:
        return self.dA * self.dB


def _as_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def max_asymmetry(m: np.ndarray) -> float:
    """Max absolute entry of m - m^dagger."""
    m = _as_square(m)
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = DEFAULT_HERMITIAN_TOL) -> np.ndarray:
    """Return the Hermitian part of m, or raise if the asymmetry exceeds tol."""
    asym = max_asymmetry(m)
    if asym > tol:
        raise ValueError(
            f"matrix is not Hermitian: max asymmetry {asym:.3e} exceeds tolerance {tol:.3e}"
        )
    m = _as_square(m)
    return (m + m.conj().T) / 2


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with A-major ordering: (iA, iB) -> iA * dB + iB."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects 2-D arrays")
    return np.kron(a, b)


def _check_bipartite(m: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    m = _as_square(m)
    if m.shape[0] != shape.side:
        raise ValueError(
            f"operator side {m.shape[0]} does not match bipartite shape "
            f"({shape.dA}, {shape.dB}) with side {shape.side}"
        )
    return m


def partial_trace(m: np.ndarray, shape: BipartiteShape, system: str) -> np.ndarray:
    """Trace out one subsystem; tr(result) equals tr(m)."""
    shape = BipartiteShape(*shape)
    m = _check_bipartite(m, shape)
    t = m.reshape(shape.dA, shape.dB, shape.dA, shape.dB)
    if system == "A":
        return np.einsum("ijik->jk", t)
    if system == "B":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"system must be 'A' or 'B', got {system!r}")


def partial_transpose(m: np.ndarray, shape: BipartiteShape, system: str) -> np.ndarray:
    """Transpose the indices of one subsystem only.

    Involutive, trace-preserving and Hermiticity-preserving; acts as
    |ij><kl| -> |kj><il| when transposing system A.
    """
    shape = BipartiteShape(*shape)
    m = _check_bipartite(m, shape)
    t = m.reshape(shape.dA, shape.dB, shape.dA, shape.dB)
    if system == "A":
        t = t.transpose(2, 1, 0, 3)
    elif system == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"system must be 'A' or 'B', got {system!r}")
    return t.reshape(shape.side, shape.side).copy()


def hermitian_eig(
    h: np.ndarray, tol: float = DEFAULT_HERMITIAN_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector matrix V) with
    h = V diag(w) V^dagger.  Raises on non-Hermitian input, naming the
    maximal asymmetry.
    """
    h = require_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    return w, v


def positive_negative_parts(
    h: np.ndarray, tol: float = DEFAULT_HERMITIAN_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Jordan decomposition h = h_plus - h_minus with h_plus h_minus = 0."""
    w, v = hermitian_eig(h, tol)
    plus = (v * np.maximum(w, 0.0)) @ v.conj().T
    minus = (v * np.maximum(-w, 0.0)) @ v.conj().T
    return plus, minus


def support_projector(h: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto the eigenspaces of h above rank_tol.

    rank_tol is taken relative to max(1, largest eigenvalue).  Eigenvalues
    below -10 * threshold mean h is significantly non-PSD and raise.
    """
    w, v = hermitian_eig(h)
    lam_max = float(w[-1]) if w.size else 0.0
    thr = rank_tol * max(1.0, lam_max)
    if w.size and float(w[0]) < -10.0 * thr:
        raise ValueError(
            f"matrix has a significantly negative eigenvalue {w[0]:.3e} "
            f"(threshold {-10.0 * thr:.3e}); not positive semidefinite"
        )
    cols = v[:, w > thr]
    return cols @ cols.conj().T


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |ii>, squared norm d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    vec = np.zeros(d * d, dtype=complex)
    vec[:: d + 1] = 1.0
    return vec


def max_entangled_projector(d: int) -> np.ndarray:
    """Unnormalized projector Phi_d = |phi><phi| with |phi> = sum_i |ii>."""
    vec = max_entangled_vector(d)
    return np.outer(vec, vec.conj())


def swap_operator(d: int) -> np.ndarray:
    """SWAP on C^d (x) C^d; equals the partial transpose of Phi_d."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def permute_systems(
    m: np.ndarray, dims: tuple[int, ...], perm: tuple[int, ...]
) -> np.ndarray:
    """Reorder the tensor factors of a square operator over (x)_k C^{dims[k]}.

    perm[j] is the old position of the factor that lands at position j, so
    permute_systems(kron(a, b), (da, db), (1, 0)) == kron(b, a).
    """
    dims = tuple(int(d) for d in dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"perm {perm} is not a permutation of {len(dims)} systems")
    side = int(np.prod(dims))
    m = _as_square(m)
    if m.shape[0] != side:
        raise ValueError(f"operator side {m.shape[0]} does not match dims {dims}")
    t = m.reshape(dims + dims)
    n = len(dims)
    axes = perm + tuple(n + p for p in perm)
    out_dims = tuple(dims[p] for p in perm)
    del out_dims  # side is permutation-invariant
    return t.transpose(axes).reshape(side, side).copy()
