"""Closed-form linear probes on spectral features.

Probes are ridge regressions onto mean-zero one-hot targets, fitted on the
labelled subset and evaluated everywhere.  Two equivalent routes exist for
target predictions: fit in feature space, or work directly with the rank-k
truncation of the graph matrix (kernel form); for eta > 0 they agree exactly
by the push-through identity, and both are exposed so they can be checked
against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph_core import NodeLabel
from .spectral import SpectralEmbedding, canonical_truncation

_PINV_RCOND = 1e-12


def mean_zero_onehot(class_id: int, r: int) -> np.ndarray:
    """e_c - (1/r) 1; rows of the regression target matrix."""
    if not (1 <= class_id <= r):
        raise ValueError(f"class_id must be in [1, {r}], got {class_id}")
    y = np.full(r, -1.0 / r)
    y[class_id - 1] += 1.0
    return y


def label_rows(class_ids: Sequence[int], r: int) -> np.ndarray:
    return np.stack([mean_zero_onehot(c, r) for c in class_ids])


def total_penalty(eta: float, n_samples: int) -> float:
    """Convert the averaged-loss penalty eta into the absolute ridge shift.

    The fitted objective is sum_x ||B^T f_x - y_x||^2 + eta * n_samples * ||B||_F^2,
    i.e. eta penalizes relative to the mean squared error, so the absolute
    shift grows with the training-set size.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return eta * n_samples


@dataclass
class ProbeWeights:
    """Ridge solution B (features x targets) with its averaged-loss eta."""

    weights: np.ndarray
    eta: float


@dataclass
class Predictions:
    scores: np.ndarray
    classes: np.ndarray  # 1-based argmax, lowest class wins ties

    def to_json_dict(self) -> dict:
        return {
            "scores": [float(v) for v in self.scores.reshape(-1)],
            "classes": [int(c) for c in self.classes],
        }


def ridge_fit(features_s: np.ndarray, targets_s: np.ndarray, eta: float) -> ProbeWeights:
    """Minimize sum ||B^T f - y||^2 + eta * |S| * ||B||_F^2 in closed form."""
    f = np.asarray(features_s, dtype=np.float64)
    y = np.asarray(targets_s, dtype=np.float64)
    if f.ndim != 2 or y.ndim != 2 or f.shape[0] != y.shape[0]:
        raise ValueError("features and targets must be 2-d with matching row counts")
    shift = total_penalty(eta, f.shape[0])
    gram = f.T @ f + shift * np.eye(f.shape[1])
    rhs = f.T @ y
    if eta > 0:
        weights = np.linalg.solve(gram, rhs)
    else:
        weights = np.linalg.pinv(gram, rcond=_PINV_RCOND) @ rhs
    return ProbeWeights(weights=weights, eta=float(eta))


def predict(emb: SpectralEmbedding | np.ndarray, pw: ProbeWeights) -> Predictions:
    feats = emb.features if isinstance(emb, SpectralEmbedding) else np.asarray(emb)
    scores = feats @ pw.weights
    classes = np.argmax(scores, axis=1) + 1
    return Predictions(scores=scores, classes=classes)


def zero_one_error(
    predictions: Predictions | np.ndarray,
    labels: Sequence[NodeLabel],
    node_idx: np.ndarray | Sequence[int],
) -> float:
    """Fraction of the given nodes whose predicted class is wrong."""
    classes = (
        predictions.classes if isinstance(predictions, Predictions) else np.asarray(predictions)
    )
    idx = np.asarray(node_idx, dtype=np.intp)
    if idx.size == 0:
        raise ValueError("node set is empty")
    truth = np.array([labels[i].class_id for i in idx])
    return float(np.mean(classes[idx] != truth))


def closed_form_target_prediction(
    matrix: np.ndarray,
    k: int,
    eta: float,
    source_idx: np.ndarray | Sequence[int],
    labels: Sequence[NodeLabel],
) -> np.ndarray:
    """Target scores straight from the rank-k graph truncation (no features).

    Works on any symmetric nonnegative graph matrix (pair weights or a raw
    0/1 adjacency); the ridge shift is rescaled by sum(matrix)/N^2 so the
    result matches the feature-space probe built from the same matrix.
    Returns scores for the complement of source_idx in ascending node order.
    """
    m = np.asarray(matrix, dtype=np.float64)
    n = m.shape[0]
    source_idx = np.asarray(source_idx, dtype=np.intp)
    if source_idx.size == 0:
        raise ValueError("source set is empty")
    target_idx = np.setdiff1d(np.arange(n), source_idx)
    if target_idx.size == 0:
        raise ValueError("target set is empty")
    r = max(lab.class_id for lab in labels)
    lam, u, _ = canonical_truncation(m, k, labels)
    uk = u[:, :k]
    mk = (uk * lam[:k][None, :]) @ uk.T
    y_s = label_rows([labels[i].class_id for i in source_idx], r)
    shift = (float(m.sum()) / (n * n)) * total_penalty(eta, source_idx.size)
    gram = mk[np.ix_(source_idx, source_idx)] + shift * np.eye(source_idx.size)
    if eta > 0:
        solved = np.linalg.solve(gram, y_s)
    else:
        solved = np.linalg.pinv(gram, rcond=_PINV_RCOND) @ y_s
    return mk[np.ix_(target_idx, source_idx)] @ solved


@dataclass
class DomainProbeResult:
    weights: ProbeWeights
    predictions: Predictions
    domain_error: float
    m: int
    extended: bool  # more than two domains


def domain_probe(
    emb: SpectralEmbedding, labels: Sequence[NodeLabel], eta: float
) -> DomainProbeResult:
    """Ridge probe for the domain id, trained on class-1 nodes only."""
    m_domains = max(lab.domain_id for lab in labels)
    train = np.flatnonzero([lab.class_id == 1 for lab in labels])
    seen = {labels[i].domain_id for i in train}
    if seen != set(range(1, m_domains + 1)):
        raise ValueError("every domain needs a class-1 node to train the domain probe")
    targets = label_rows([labels[i].domain_id for i in train], m_domains)
    pw = ridge_fit(emb.features[train], targets, eta)
    preds = predict(emb, pw)
    truth = np.array([lab.domain_id for lab in labels])
    err = float(np.mean(preds.classes != truth))
    return DomainProbeResult(
        weights=pw,
        predictions=preds,
        domain_error=err,
        m=m_domains,
        extended=m_domains > 2,
    )


@dataclass
class CosineReport:
    src_vs_tgt: float
    src_vs_dom: float
    tgt_vs_dom: float

    def to_json_dict(self) -> dict:
        return {
            "src_vs_tgt": self.src_vs_tgt,
            "src_vs_dom": self.src_vs_dom,
            "tgt_vs_dom": self.tgt_vs_dom,
        }


def _flat_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cannot take the cosine of zero probe weights")
    return float(np.sum(a * b) / (na * nb))


def _column_space(w: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(w, full_matrices=False)
    keep = s > _PINV_RCOND * (s[0] if s.size else 0.0)
    if not np.any(keep):
        raise ValueError("probe weights have no numerical column space")
    return u[:, keep]


def _max_principal_cosine(a: np.ndarray, b: np.ndarray) -> float:
    overlap = _column_space(a).T @ _column_space(b)
    return float(np.linalg.svd(overlap, compute_uv=False)[0])


def disentanglement_cosines(
    class_probe_src: ProbeWeights,
    class_probe_tgt: ProbeWeights,
    domain_probe_weights: ProbeWeights,
) -> CosineReport:
    """Alignment of source/target class probes and their overlap with the domain probe.

    src_vs_tgt is the signed cosine of the flattened weight matrices (class
    columns aligned); the *_vs_dom values are the largest principal-angle
    cosine between weight column spaces, which is 0 exactly when the probes
    use disjoint feature directions.
    """
    ws, wt, wd = class_probe_src.weights, class_probe_tgt.weights, domain_probe_weights.weights
    return CosineReport(
        src_vs_tgt=_flat_cosine(ws, wt),
        src_vs_dom=_max_principal_cosine(ws, wd),
        tgt_vs_dom=_max_principal_cosine(wt, wd),
    )
