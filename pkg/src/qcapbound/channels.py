"""Quantum channels as Kraus-operator lists, their Choi matrices and
Kraus-operator-space projectors, plus the named channel families used
throughout the package.

All values are immutable after construction; constructors are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_RANK_TOL,
    BipartiteShape,
    kron,
    partial_trace,
    permute_systems,
    support_projector,
)

TRACE_PRESERVING_TOL = 1e-8


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map given by Kraus operators.

    Each Kraus operator maps C^dim_in -> C^dim_out; the defining action is
    rho |-> sum_k E_k rho E_k^dagger.
    """

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]
    name: str = ""

    def __post_init__(self) -> None:
        if not self.kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        if self.dim_in < 1 or self.dim_out < 1:
            raise ValueError("channel dimensions must be positive")
        ops = tuple(_readonly(e) for e in self.kraus)
        for e in ops:
            if e.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"Kraus operator shape {e.shape} does not match "
                    f"({self.dim_out}, {self.dim_in})"
                )
        object.__setattr__(self, "kraus", ops)
        tp = sum(e.conj().T @ e for e in ops)
        resid = float(np.abs(tp - np.eye(self.dim_in)).max())
        if resid > TRACE_PRESERVING_TOL:
            raise ValueError(
                f"Kraus operators are not trace preserving: "
                f"max |sum E^dag E - 1| = {resid:.3e}"
            )

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(e @ rho @ e.conj().T for e in self.kraus)

    def __repr__(self) -> str:  # keep reprs short; Kraus lists are noisy
        return f"QuantumChannel({self.name or 'unnamed'}: {self.dim_in}->{self.dim_out}, {len(self.kraus)} Kraus)"


@dataclass(frozen=True)
class ChoiMatrix:
    """Unnormalized Choi operator of a channel, over (A, B) = (input, output)."""

    matrix: np.ndarray
    shape: BipartiteShape

    def __post_init__(self) -> None:
        m = _readonly(self.matrix)
        if m.shape != (self.shape.side, self.shape.side):
            raise ValueError("Choi matrix side does not match its bipartite shape")
        object.__setattr__(self, "matrix", m)
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        scale = max(1.0, float(w[-1]) if w.size else 0.0)
        if w.size and w[0] < -1e-9 * scale:
            raise ValueError(f"Choi matrix is not PSD: min eigenvalue {w[0]:.3e}")
        red = partial_trace(m, self.shape, "B")
        if float(np.abs(red - np.eye(self.shape.dA)).max()) > TRACE_PRESERVING_TOL:
            raise ValueError("partial trace over the output is not the identity")


@dataclass(frozen=True)
class KrausSupport:
    """Projector onto the span of a channel's Choi matrix.

    The projector is determined by span{E_k} alone, so it carries all
    zero-error data of the channel.
    """

    projector: np.ndarray
    shape: BipartiteShape
    rank: int

    def __post_init__(self) -> None:
        p = _readonly(self.projector)
        object.__setattr__(self, "projector", p)
        if float(np.abs(p @ p - p).max()) > 1e-9:
            raise ValueError("support projector is not idempotent within 1e-9")


def from_kraus(kraus, name: str = "") -> QuantumChannel:
    """Build a validated channel from a list of Kraus operators."""
    ops = [np.asarray(e, dtype=complex) for e in kraus]
    if not ops:
        raise ValueError("a channel needs at least one Kraus operator")
    dim_out, dim_in = ops[0].shape
    return QuantumChannel(dim_in=dim_in, dim_out=dim_out, kraus=tuple(ops), name=name)


def choi(ch: QuantumChannel) -> ChoiMatrix:
    """Choi matrix J = sum_k (1 (x) E_k) Phi (1 (x) E_k)^dagger, unnormalized."""
    d_in, d_out = ch.dim_in, ch.dim_out
    side = d_in * d_out
    J = np.zeros((side, side), dtype=complex)
    for e in ch.kraus:
        # (1 (x) E) |Phi> has components v[i * d_out + mu] = E[mu, i].
        v = np.asarray(e).T.reshape(-1)
        J += np.outer(v, v.conj())
    return ChoiMatrix(matrix=J, shape=BipartiteShape(d_in, d_out))


def kraus_support(ch: QuantumChannel, rank_tol: float = DEFAULT_RANK_TOL) -> KrausSupport:
    cm = choi(ch)
    proj = support_projector(cm.matrix, rank_tol)
    rank = int(round(float(np.trace(proj).real)))
    return KrausSupport(projector=proj, shape=cm.shape, rank=rank)


def tensor_channels(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    """Tensor product channel with Kraus list {E_i (x) F_j}."""
    ops = tuple(kron(e, f) for e in a.kraus for f in b.kraus)
    name = f"{a.name or 'ch'}(x){b.name or 'ch'}"
    return QuantumChannel(
        dim_in=a.dim_in * b.dim_in, dim_out=a.dim_out * b.dim_out, kraus=ops, name=name
    )


def tensor_choi_permutation(a_shape: BipartiteShape, b_shape: BipartiteShape):
    """Index maps taking J_a (x) J_b (ordering A1 B1 A2 B2) to the Choi
    ordering (A1 A2)(B1 B2) of the tensor channel."""
    dims = (a_shape.dA, a_shape.dB, b_shape.dA, b_shape.dB)
    perm = (0, 2, 1, 3)
    return dims, perm


def choi_of_tensor(a: QuantumChannel, b: QuantumChannel) -> np.ndarray:
    """Choi matrix of a (x) b computed by permuting kron(J_a, J_b)."""
    ja = choi(a)
    jb = choi(b)
    dims, perm = tensor_choi_permutation(ja.shape, jb.shape)
    return permute_systems(kron(ja.matrix, jb.matrix), dims, perm)


# -- named channel families --------------------------------------------------


def identity_channel(d: int) -> QuantumChannel:
    """Noiseless qudit channel of dimension d >= 2."""
    if d < 2:
        raise ValueError("identity_channel needs d >= 2")
    return QuantumChannel(d, d, (np.eye(d, dtype=complex),), name=f"identity({d})")


def erasure_channel(d: int, p: float) -> QuantumChannel:
    """Erasure channel: transmit intact with probability 1-p, otherwise
    replace by an orthogonal flag state.  Output dimension is d + 1."""
    if d < 2:
        raise ValueError("erasure_channel needs d >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    keep = np.zeros((d + 1, d), dtype=complex)
    keep[:d, :] = np.eye(d)
    ops = [np.sqrt(1.0 - p) * keep]
    for i in range(d):
        e = np.zeros((d + 1, d), dtype=complex)
        e[d, i] = np.sqrt(p)
        ops.append(e)
    return QuantumChannel(d, d + 1, tuple(ops), name=f"erasure({d},{p:g})")


def werner_holevo(d: int) -> QuantumChannel:
    """Channel rho -> (1 tr(rho) - rho^T) / (d - 1).

    Kraus operators come from the spectral factorization of its Choi matrix
    (1 - SWAP) / (d - 1), which is dimension-generic.
    """
    if d < 2:
        raise ValueError("werner_holevo needs d >= 2")
    side = d * d
    J = (np.eye(side) - _swap(d)) / (d - 1)
    w, v = np.linalg.eigh(J)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam > 1e-12:
            e = np.sqrt(lam) * vec.reshape(d, d).T
            ops.append(e)
    return QuantumChannel(d, d, tuple(ops), name=f"werner({d})")


def _swap(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def nr_channel(r: float) -> QuantumChannel:
    """Two-Kraus family on a 3-level input with a 2-level output.

    E_0 = |0><0| + sqrt(r) |1><1|, E_1 = sqrt(1-r) |0><1| + |1><2|,
    with 0 <= r <= 0.5.
    """
    if not 0.0 <= r <= 0.5:
        raise ValueError("nr_channel needs 0 <= r <= 0.5")
    e0 = np.zeros((2, 3), dtype=complex)
    e0[0, 0] = 1.0
    e0[1, 1] = np.sqrt(r)
    e1 = np.zeros((2, 3), dtype=complex)
    e1[0, 1] = np.sqrt(1.0 - r)
    e1[1, 2] = 1.0
    return QuantumChannel(3, 2, (e0, e1), name=f"nr({r:g})")


def mixed_unitary(unitaries, probs, name: str = "") -> QuantumChannel:
    """Mixture of unitaries with strictly positive probabilities summing to 1."""
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    probs = np.asarray(probs, dtype=float)
    if len(us) != probs.size or probs.size == 0:
        raise ValueError("need one probability per unitary")
    if (probs <= 0).any() or abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError("probabilities must be positive and sum to 1")
    d = us[0].shape[0]
    for u in us:
        if u.shape != (d, d) or np.abs(u.conj().T @ u - np.eye(d)).max() > 1e-10:
            raise ValueError("all operators must be unitaries of equal dimension")
    ops = tuple(np.sqrt(p) * u for p, u in zip(probs, us))
    return QuantumChannel(d, d, ops, name=name or f"mixed-unitary({len(us)})")


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry via QR of a complex Gaussian with a phase-fixed
    R diagonal; rows >= cols."""
    if rows < cols:
        raise ValueError("an isometry needs rows >= cols")
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, rmat = np.linalg.qr(g)
    lam = np.diagonal(rmat).copy()
    lam = lam / np.abs(lam)
    return q * lam.conj()


def random_channel(dim_in: int, dim_out: int, kraus_rank: int, seed: int) -> QuantumChannel:
    """Seeded random channel from a Haar isometry factorization."""
    if kraus_rank < 1 or kraus_rank > dim_in * dim_out:
        raise ValueError("kraus_rank must lie in [1, dim_in * dim_out]")
    if kraus_rank * dim_out < dim_in:
        raise ValueError("kraus_rank * dim_out must be >= dim_in for trace preservation")
    rng = np.random.default_rng(seed)
    v = haar_isometry(kraus_rank * dim_out, dim_in, rng)
    ops = tuple(v[k * dim_out : (k + 1) * dim_out, :] for k in range(kraus_rank))
    return QuantumChannel(dim_in, dim_out, ops, name=f"random({dim_in}->{dim_out},r{kraus_rank},s{seed})")


# -- JSON wire format --------------------------------------------------------


def channel_to_dict(ch: QuantumChannel) -> dict:
    """Schema: {"name", "dim_in", "dim_out", "kraus": [[[ [re, im], .. ], ..], ..]}."""
    return {
        "name": ch.name,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [
            [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(e)]
            for e in ch.kraus
        ],
    }


def channel_from_dict(data: dict) -> QuantumChannel:
    try:
        name = str(data.get("name", ""))
        dim_in = int(data["dim_in"])
        dim_out = int(data["dim_out"])
        kraus = [
            np.array([[complex(re, im) for re, im in row] for row in e], dtype=complex)
            for e in data["kraus"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel JSON: {exc}") from exc
    ch = from_kraus(kraus, name=name)
    if (ch.dim_in, ch.dim_out) != (dim_in, dim_out):
        raise ValueError(
            f"declared dimensions ({dim_in}, {dim_out}) do not match Kraus shapes "
            f"({ch.dim_in}, {ch.dim_out})"
        )
    return ch


def load_channel(path) -> QuantumChannel:
    with open(path, "r", encoding="utf-8") as fp:
        return channel_from_dict(json.load(fp))


def save_channel(ch: QuantumChannel, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(channel_to_dict(ch), fp)
