"""Non-contrastive baselines on the eight-node kernel, solved exactly.

ERM fits pointwise predictions on augmentations of labelled source nodes; its
minimizer is the kernel-weighted average of one-hot targets, defined only on
nodes the source augmentations reach, so unreachable nodes need an explicit
completion.  The domain-adversarial construction groups nodes into two
encoder values whose domain mixture is maximally confusing; its domain term
has a closed form.  The contrastive pipeline runs the full embed-then-probe
path on the same kernel for a like-for-like comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import probe
from .graph_core import (
    AugmentationKernel,
    SeparationKernelParams,
    build_separation_kernel,
    positive_pair_graph,
    separation_pair_params,
)
from .spectral import SpectralEmbedding, embed

_COMPLETIONS = ("adversarial", "oracle")

# encoder grouping used by the domain-adversarial construction: the first
# group holds node 1 and the target cycle nodes that share its predicted
# class, the second group the complementary cycle (1-based ids)
_DANN_GROUP_OF_NODE1 = (1, 3, 6, 7)


@dataclass
class PointwisePredictor:
    """Per-node class scores plus the mask of nodes the fit actually reached."""

    scores: np.ndarray
    reachable: np.ndarray

    @property
    def classes(self) -> np.ndarray:
        return np.argmax(self.scores, axis=1) + 1


def _source_nodes(k: AugmentationKernel, source_domain: int) -> np.ndarray:
    idx = np.flatnonzero([lab.domain_id == source_domain for lab in k.labels])
    if idx.size == 0:
        raise ValueError(f"no nodes in source domain {source_domain}")
    return idx


def _num_classes(k: AugmentationKernel) -> int:
    return max(lab.class_id for lab in k.labels)


def erm_minimizer(
    k: AugmentationKernel,
    source_domain: int = 1,
    completion: str = "adversarial",
) -> PointwisePredictor:
    """Exact minimizer of the augmentation-weighted square loss on source labels.

    Reachable nodes get the kernel-weighted average of their source one-hot
    targets.  Unreachable nodes are filled by the completion: "adversarial"
    assigns the wrong-class one-hot (two classes only), "oracle" the true one.
    """
    if completion not in _COMPLETIONS:
        raise ValueError(f"completion must be one of {_COMPLETIONS}, got {completion!r}")
    src = _source_nodes(k, source_domain)
    r = _num_classes(k)
    n = k.n_nodes
    mass = k.kernel[src, :]  # mass[s, x'] = K(x' | source s)
    onehot = np.zeros((src.size, r))
    for row, s in enumerate(src):
        onehot[row, k.labels[s].class_id - 1] = 1.0
    totals = mass.sum(axis=0)
    reachable = totals > 0.0
    scores = np.zeros((n, r))
    scores[reachable] = (mass.T[reachable] @ onehot) / totals[reachable, None]
    for x in np.flatnonzero(~reachable):
        true_c = k.labels[x].class_id
        if completion == "oracle":
            scores[x, true_c - 1] = 1.0
        else:
            if r != 2:
                raise ValueError("adversarial completion is defined for two classes")
            scores[x, 2 - true_c] = 1.0  # the other class's one-hot
    return PointwisePredictor(scores=scores, reachable=reachable)


def erm_objective(
    k: AugmentationKernel,
    predictor: PointwisePredictor | np.ndarray,
    source_domain: int = 1,
) -> float:
    """(1/|S|) sum over source x, augmentations x' of K(x'|x) ||f(x') - e_y(x)||^2."""
    scores = predictor.scores if isinstance(predictor, PointwisePredictor) else np.asarray(predictor)
    src = _source_nodes(k, source_domain)
    r = _num_classes(k)
    total = 0.0
    for s in src:
        y = np.zeros(r)
        y[k.labels[s].class_id - 1] = 1.0
        diff = scores - y[None, :]
        total += float(k.kernel[s] @ np.sum(diff * diff, axis=1))
    return total / src.size


def dann_domain_term(assignment: np.ndarray | list, lam: float) -> float:
    """Best-response domain loss for an encoder given as per-node group codes.

    For each encoder output value the optimal constant head is the mean of
    the one-hot domain targets over its preimage; the term is lam times the
    uniform average of the squared residuals.  Only the grouping matters,
    not the code values.
    """
    codes = np.asarray(assignment)
    if codes.shape != (8,):
        raise ValueError("assignment must give one code per eight-node graph node")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    domains = np.array([1, 1, 2, 2, 2, 2, 2, 2])
    onehot = np.zeros((8, 2))
    onehot[np.arange(8), domains - 1] = 1.0
    total = 0.0
    for code in np.unique(codes):
        group = onehot[codes == code]
        center = group.mean(axis=0)
        total += float(np.sum((group - center) ** 2)) / 8.0
    return lam * total


@dataclass
class DannResult:
    predictor: PointwisePredictor
    domain_term_value: float
    groups: np.ndarray  # per-node encoder group code (0 or 1)
    optimal_head: np.ndarray  # shared constant domain head


def dann_construction(k: AugmentationKernel, lam: float) -> DannResult:
    """Two-value encoder that maximally confuses domains, with its exact domain term.

    Group 0 holds nodes {1, 3, 6, 7}, group 1 holds {2, 4, 5, 8}; each group
    mixes source and target 1:3, so the optimal constant domain head is
    (1/4, 3/4) and the domain term equals 3*lam/8, the largest value any
    encoder can force.  The classification head maps group 0 to class 1.
    """
    if k.n_nodes != 8:
        raise ValueError("the domain-adversarial construction is defined on eight nodes")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    groups = np.array([0 if i + 1 in _DANN_GROUP_OF_NODE1 else 1 for i in range(8)])
    scores = np.zeros((8, 2))
    scores[np.arange(8), groups] = 1.0
    term = dann_domain_term(groups, lam)
    return DannResult(
        predictor=PointwisePredictor(scores=scores, reachable=np.ones(8, dtype=bool)),
        domain_term_value=term,
        groups=groups,
        optimal_head=np.array([0.25, 0.75]),
    )


@dataclass
class SeparationContrastiveResult:
    target_error: float
    embedding: SpectralEmbedding
    probe_weights: probe.ProbeWeights
    condition_alpha_gt_gamma_plus_beta: bool
    tie_warning: bool


def _kernel_params(k: AugmentationKernel) -> SeparationKernelParams:
    """Recover the eight-node kernel parameters, validating the layout."""
    p = SeparationKernelParams(
        rho_p=float(k.kernel[0, 0]),
        alpha_p=float(k.kernel[0, 2]),
        beta_p=float(k.kernel[0, 1]),
        gamma_p=float(k.kernel[0, 3]),
    )
    reference = build_separation_kernel(p)
    if float(np.max(np.abs(reference.kernel - k.kernel))) > 1e-12:
        raise ValueError("kernel does not have the eight-node layout")
    return p


def contrastive_pipeline_separation(
    k: AugmentationKernel, k_dim: int = 3, eta: float = 0.05
) -> SeparationContrastiveResult:
    """Embed the pair graph of the eight-node kernel and probe the two source nodes."""
    p = _kernel_params(k)
    rho, alpha, beta, gamma, _ = separation_pair_params(p)
    g = positive_pair_graph(k)
    emb = embed(g, k_dim)
    src = g.source_nodes()
    targets = probe.label_rows([g.labels[i].class_id for i in src], 2)
    pw = probe.ridge_fit(emb.features[src], targets, eta)
    preds = probe.predict(emb, pw)
    err = probe.zero_one_error(preds, g.labels, g.target_nodes())
    return SeparationContrastiveResult(
        target_error=err,
        embedding=emb,
        probe_weights=pw,
        condition_alpha_gt_gamma_plus_beta=bool(alpha > gamma + beta),
        tie_warning=emb.tie_warning,
    )


def separation_category_eigenvalues(p: SeparationKernelParams) -> np.ndarray:
    """Closed-form spectrum of the idealized four-category pattern matrix.

    Descending order is not applied; entries are (lam_1, ..., lam_8) in the
    fixed analytic order: full sum, two domain-like pairs, two class-within
    pairs, alternating cycle, cycle parity, class parity.
    """
    rho, alpha, beta, gamma, _ = separation_pair_params(p)
    return np.array(
        [
            rho + 2 * alpha + beta + 2 * gamma,
            rho - beta,
            rho - beta,
            rho + beta,
            rho + beta,
            rho - 2 * alpha - beta + 2 * gamma,
            rho - 2 * alpha + beta - 2 * gamma,
            rho + 2 * alpha - beta - 2 * gamma,
        ]
    )
