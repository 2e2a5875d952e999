"""Exact spectral-contrastive embeddings of pair graphs.

The embedding of an N-node pair graph with weights W is F = U_k sqrt(N^2 L_k):
its Gram matrix F F^T is the best rank-k approximation of N^2 W, which is the
global minimizer of the pairwise contrastive objective

    loss(F) = -2 sum_ij W_ij <f_i, f_j> + (1/N^2) sum_ij <f_i, f_j>^2 .

Eigenvectors inside exactly degenerate eigenvalue clusters are not determined
by the matrix alone, so clusters that meet the retained block are
canonicalized against a fixed cascade of secondary operators (domain blocks,
class blocks, node position).  This makes every embedding a pure function of
the input, independent of LAPACK's arbitrary choice of degenerate basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse.linalg

from .graph_core import NodeLabel, PairGraph

_CLUSTER_REL_TOL = 1e-10
_SPLIT_TOL = 1e-8
_SIGN_REL_TOL = 1e-8
_POSITIVE_REL_TOL = 1e-12

QuadraticForm = Callable[[np.ndarray], np.ndarray]


@dataclass
class EigenSystem:
    """Full eigendecomposition, eigenvalues descending, eigenvectors in columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass
class SpectralEmbedding:
    """Rank-k feature matrix and the retained weight-matrix eigenvalues."""

    k: int
    eigenvalues: np.ndarray
    features: np.ndarray
    tie_warning: bool = False

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "features": [float(v) for v in self.features.reshape(-1)],
            "tie_warning": self.tie_warning,
        }


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(float(np.max(np.abs(m))), 1e-300)
    if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return (m + m.T) / 2.0


def _split_groups(values: np.ndarray, tol: float) -> list[tuple[int, int]]:
    """Contiguous [a, b) runs of values closer than tol to their neighbour."""
    groups: list[tuple[int, int]] = []
    start = 0
    n = len(values)
    for i in range(1, n + 1):
        if i == n or abs(values[i] - values[i - 1]) > tol:
            groups.append((start, i))
            start = i
    return groups


def indicator_quadratic(ids: np.ndarray) -> QuadraticForm:
    """Q -> Q^T M Q for the block-membership matrix M_ij = [ids_i == ids_j]."""
    ids = np.asarray(ids)

    def apply(q: np.ndarray) -> np.ndarray:
        s = np.zeros((q.shape[1], q.shape[1]))
        for g in np.unique(ids):
            v = q[ids == g].sum(axis=0)
            s += np.outer(v, v)
        return s

    return apply


def position_quadratic(n: int) -> QuadraticForm:
    """Q -> Q^T diag(0..n-1) Q; breaks any symmetry the label blocks miss."""
    pos = np.arange(n, dtype=np.float64)

    def apply(q: np.ndarray) -> np.ndarray:
        return q.T @ (pos[:, None] * q)

    return apply


def label_quadratics(labels: Sequence[NodeLabel] | None, n: int) -> list[QuadraticForm]:
    ops: list[QuadraticForm] = []
    if labels is not None:
        ops.append(indicator_quadratic(np.array([lab.domain_id for lab in labels])))
        ops.append(indicator_quadratic(np.array([lab.class_id for lab in labels])))
    ops.append(position_quadratic(n))
    return ops


def _canonicalize_cluster(q: np.ndarray, ops: list[QuadraticForm]) -> np.ndarray:
    """Deterministic orthonormal basis of the span of q's columns.

    Diagonalizes the first operator restricted to the span, orders by
    descending projected eigenvalue, and recurses into still-tied sub-blocks
    with the remaining operators.
    """
    if q.shape[1] < 2 or not ops:
        return q
    s = ops[0](q)
    s = (s + s.T) / 2.0
    mu, v = np.linalg.eigh(s)
    order = np.argsort(-mu, kind="stable")
    mu = mu[order]
    q = q @ v[:, order]
    for a, b in _split_groups(mu, _SPLIT_TOL):
        if b - a > 1:
            q[:, a:b] = _canonicalize_cluster(q[:, a:b], ops[1:])
    return q


def _fix_signs(u: np.ndarray) -> np.ndarray:
    """First component larger than 1e-8 of the column max is made positive."""
    for j in range(u.shape[1]):
        col = u[:, j]
        peak = float(np.max(np.abs(col)))
        if peak == 0.0:
            continue
        nz = np.flatnonzero(np.abs(col) > _SIGN_REL_TOL * peak)
        if len(nz) and col[nz[0]] < 0:
            u[:, j] = -col
    return u


def _eigh_descending(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lam, u = np.linalg.eigh(m)
    return lam[::-1].copy(), np.ascontiguousarray(u[:, ::-1])


def canonical_truncation(
    m: np.ndarray,
    k: int | None,
    labels: Sequence[NodeLabel] | None = None,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Descending eigensystem with degenerate clusters resolved deterministically.

    Returns (eigenvalues, eigenvectors, tie_warning).  Only clusters that
    intersect the first k columns are canonicalized when k is given; with
    k=None every cluster is.  tie_warning flags a cluster straddling the
    k / k+1 boundary.
    """
    m = _check_symmetric(m)
    n = m.shape[0]
    lam, u = _eigh_descending(m)
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    tol = _CLUSTER_REL_TOL * scale
    ops = label_quadratics(labels, n)
    limit = n if k is None else min(k, n)
    tie_warning = False
    for a, b in _split_groups(lam, tol):
        if b - a > 1 and a < limit:
            u[:, a:b] = _canonicalize_cluster(u[:, a:b], ops)
            if k is not None and a < k < b:
                tie_warning = True
    if k is not None and 0 < k < n and abs(lam[k - 1] - lam[k]) <= tol:
        tie_warning = True
    _fix_signs(u)
    return lam, u, tie_warning


def _check_residuals(m: np.ndarray, lam: np.ndarray, u: np.ndarray, tol: float) -> None:
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    residual = m @ u - u * lam[None, :]
    worst = float(np.max(np.linalg.norm(residual, axis=0)))
    if worst > tol * scale:
        raise ArithmeticError(
            f"eigendecomposition failed to converge: residual {worst!r} "
            f"exceeds {tol!r} * {scale!r}"
        )


def symmetric_eigensystem(m: np.ndarray, tol: float = 1e-9) -> EigenSystem:
    """Full eigensystem of a symmetric matrix, descending, deterministic.

    Raises on asymmetric input and when any residual ||M u - lam u|| exceeds
    tol times the spectral scale.
    """
    m = _check_symmetric(m)
    lam, u, _ = canonical_truncation(m, None)
    _check_residuals(m, lam, u, tol)
    return EigenSystem(lam, u)


def rank_k_approx(m: np.ndarray, k: int) -> np.ndarray:
    """Sum of the top-k (by value) eigenpairs lam_i u_i u_i^T."""
    m = _check_symmetric(m)
    if not (0 <= k <= m.shape[0]):
        raise ValueError(f"k must be in [0, {m.shape[0]}], got {k}")
    lam, u, _ = canonical_truncation(m, k)
    uk = u[:, :k]
    return (uk * lam[:k][None, :]) @ uk.T


def _embed_weights(
    w: np.ndarray,
    labels: Sequence[NodeLabel],
    k: int,
) -> SpectralEmbedding:
    n = w.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    lam, u, tie = canonical_truncation(w, k, labels)
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    positive = int(np.sum(lam > _POSITIVE_REL_TOL * scale))
    if k > positive:
        raise ValueError(
            f"k={k} exceeds the count of positive eigenvalues ({positive})"
        )
    feats = u[:, :k] * np.sqrt((n * n) * lam[:k])[None, :]
    return SpectralEmbedding(k=k, eigenvalues=lam[:k].copy(), features=feats, tie_warning=tie)


def embed(g: PairGraph, k: int) -> SpectralEmbedding:
    """Exact minimizer features of the pair graph's contrastive objective."""
    return _embed_weights(g.weights, g.labels, k)


def embed_sampled(g, k: int) -> SpectralEmbedding:
    """Same as embed but for a sampled 0/1 graph; weights are A / sum(A).

    Accepts any object with ``adjacency`` and ``labels`` attributes.
    """
    a = np.asarray(g.adjacency, dtype=np.float64)
    total = float(a.sum())
    if total <= 0:
        raise ValueError("sampled graph has no edges")
    return _embed_weights(a / total, g.labels, k)


def operator_norm(m: np.ndarray) -> float:
    """Largest absolute eigenvalue; dense below 512 nodes, Lanczos above."""
    m = _check_symmetric(m)
    n = m.shape[0]
    if n <= 512:
        lam = np.linalg.eigvalsh(m)
        return float(np.max(np.abs(lam)))
    v0 = np.full(n, 1.0 / np.sqrt(n))
    vals = scipy.sparse.linalg.eigsh(m, k=1, which="LM", v0=v0, return_eigenvectors=False)
    return float(np.abs(vals[0]))


@dataclass
class PerturbationBound:
    bound: float
    applicable: bool


def rank_k_perturbation_bound(a: np.ndarray, a_tilde: np.ndarray, k: int) -> PerturbationBound:
    """Operator-norm bound on rank-k truncation transfer between two matrices.

    bound = (1 + (2 dev + 2 ||A_tilde||) / (gap_k - dev)) * dev with
    dev = ||A - A_tilde|| and gap_k the k-th spectral gap of A_tilde; only
    applicable when dev < gap_k.
    """
    a = _check_symmetric(a)
    a_tilde = _check_symmetric(a_tilde)
    if a.shape != a_tilde.shape:
        raise ValueError("matrices must share a shape")
    n = a.shape[0]
    if not (1 <= k < n):
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    dev = operator_norm(a - a_tilde)
    lam = np.sort(np.linalg.eigvalsh(a_tilde))[::-1]
    gap = float(lam[k - 1] - lam[k])
    if dev >= gap:
        return PerturbationBound(bound=float("inf"), applicable=False)
    norm_tilde = float(np.max(np.abs(lam)))
    bound = (1.0 + (2.0 * dev + 2.0 * norm_tilde) / (gap - dev)) * dev
    return PerturbationBound(bound=bound, applicable=True)


def spectral_contrastive_loss(weights: np.ndarray, features: np.ndarray) -> float:
    """Pairwise-sum form of the contrastive objective (no eigen machinery)."""
    w = np.asarray(weights, dtype=np.float64)
    f = np.asarray(features, dtype=np.float64)
    n = w.shape[0]
    gram = f @ f.T
    return float(-2.0 * np.sum(w * gram) + np.sum(gram * gram) / (n * n))


def loss_from_gram_residual(weights: np.ndarray, features: np.ndarray) -> float:
    """Matrix form: (||N^2 W - F F^T||_F^2 - ||N^2 W||_F^2) / N^2."""
    w = np.asarray(weights, dtype=np.float64)
    f = np.asarray(features, dtype=np.float64)
    n = w.shape[0]
    target = (n * n) * w
    diff = target - f @ f.T
    return float((np.sum(diff * diff) - np.sum(target * target)) / (n * n))
