"""Multi-domain stochastic block model graphs.

Nodes carry r classes and m domains with n nodes per (domain, class) block,
ordered domain-major: node ((d-1)r + (c-1))n + i.  The expected adjacency has
entry rho within a block (including the diagonal), beta across classes within
a domain, alpha across domains within a class, and gamma across both.  Its
nonzero spectrum is closed-form; sampling draws each symmetric Bernoulli entry
from a counter-based hash of (seed, i, j), so a graph is a pure function of
(params, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .graph_core import NodeLabel
from .rng import pair_uniforms

_EDGE_LIST_THRESHOLD = 512


@dataclass(frozen=True)
class SbmParams:
    """Block counts and connection probabilities; probabilities lie in [0, 1]."""

    r: int
    m: int
    n: int
    rho: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if self.r < 2:
            raise ValueError("r (classes) must be >= 2")
        if self.m < 2:
            raise ValueError("m (domains) must be >= 2")
        if self.n < 1:
            raise ValueError("n (nodes per block) must be >= 1")
        for name in ("rho", "alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def n_nodes(self) -> int:
        return self.r * self.m * self.n

    @property
    def ordering_satisfied(self) -> bool:
        """rho dominates alpha and beta, which both dominate gamma."""
        return self.rho > max(self.alpha, self.beta) and min(self.alpha, self.beta) > self.gamma

    def with_value(self, name: str, value) -> "SbmParams":
        if name == "n":
            return replace(self, n=int(value))
        if name in ("rho", "alpha", "beta", "gamma"):
            return replace(self, **{name: float(value)})
        raise ValueError(f"unknown parameter {name!r}")


def sbm_labels(p: SbmParams) -> list[NodeLabel]:
    labels = []
    for d in range(1, p.m + 1):
        for c in range(1, p.r + 1):
            labels.extend([NodeLabel(c, d)] * p.n)
    return labels


def _label_arrays(p: SbmParams) -> tuple[np.ndarray, np.ndarray]:
    block_cls = np.repeat(np.tile(np.arange(1, p.r + 1), p.m), p.n)
    block_dom = np.repeat(np.arange(1, p.m + 1), p.r * p.n)
    return block_cls, block_dom


def _expected_matrix(p: SbmParams) -> np.ndarray:
    cls, dom = _label_arrays(p)
    same_c = cls[:, None] == cls[None, :]
    same_d = dom[:, None] == dom[None, :]
    mat = np.where(
        same_c & same_d,
        p.rho,
        np.where(same_d, p.beta, np.where(same_c, p.alpha, p.gamma)),
    )
    return mat.astype(np.float64)


@dataclass
class ExpectedGraph:
    """Dense expected adjacency with labels; diagonal is rho."""

    params: SbmParams
    matrix: np.ndarray
    labels: list[NodeLabel]

    @property
    def adjacency(self) -> np.ndarray:
        return self.matrix


@dataclass
class SampledGraph:
    """Symmetric 0/1 draw of the block model; a pure function of (params, seed)."""

    params: SbmParams
    seed: int
    adjacency: np.ndarray
    labels: list[NodeLabel]

    @property
    def edge_count(self) -> int:
        """Total adjacency mass: off-diagonal edges count twice, loops once."""
        return int(self.adjacency.sum())

    def to_json_dict(self) -> dict:
        n = self.params.n_nodes
        d = {
            "n": n,
            "labels": [[lab.class_id, lab.domain_id] for lab in self.labels],
        }
        if n > _EDGE_LIST_THRESHOLD:
            ii, jj = np.nonzero(np.triu(self.adjacency))
            d["edges"] = [[int(i), int(j)] for i, j in zip(ii, jj)]
        else:
            d["weights"] = [float(v) for v in self.adjacency.reshape(-1)]
        d["source_domain"] = 1
        d["seed"] = self.seed
        d["edge_count"] = self.edge_count
        return d


def expected_adjacency(p: SbmParams) -> ExpectedGraph:
    return ExpectedGraph(params=p, matrix=_expected_matrix(p), labels=sbm_labels(p))


def sample_adjacency(p: SbmParams, seed: int) -> SampledGraph:
    prob = _expected_matrix(p)
    n = p.n_nodes
    ii, jj = np.triu_indices(n)
    u = pair_uniforms(seed, ii, jj)
    upper = np.zeros((n, n))
    upper[ii, jj] = (u < prob[ii, jj]).astype(np.float64)
    adj = upper + np.triu(upper, 1).T
    return SampledGraph(params=p, seed=int(seed), adjacency=adj, labels=sbm_labels(p))


@dataclass(frozen=True)
class SbmSpectrum:
    """Nonzero eigenvalues of the expected adjacency with multiplicities."""

    lambda_a: float
    lambda_b: float
    lambda_c: float
    lambda_d: float
    mult_a: int
    mult_b: int
    mult_c: int
    mult_d: int
    mult_zero: int

    def as_sorted_array(self) -> np.ndarray:
        """Full spectrum, descending, including structural zeros."""
        vals = np.concatenate(
            [
                np.full(self.mult_a, self.lambda_a),
                np.full(self.mult_b, self.lambda_b),
                np.full(self.mult_c, self.lambda_c),
                np.full(self.mult_d, self.lambda_d),
                np.zeros(self.mult_zero),
            ]
        )
        return np.sort(vals)[::-1]


def closed_form_spectrum(p: SbmParams) -> SbmSpectrum:
    r, m, n = p.r, p.m, p.n
    rho, alpha, beta, gamma = p.rho, p.alpha, p.beta, p.gamma
    lam_a = n * (rho + (r - 1) * beta + (m - 1) * alpha + (m - 1) * (r - 1) * gamma)
    lam_b = n * (rho + (r - 1) * beta - alpha - (r - 1) * gamma)
    lam_c = n * (rho - beta + (m - 1) * alpha - (m - 1) * gamma)
    lam_d = n * (rho - beta - alpha + gamma)
    return SbmSpectrum(
        lambda_a=lam_a,
        lambda_b=lam_b,
        lambda_c=lam_c,
        lambda_d=lam_d,
        mult_a=1,
        mult_b=m - 1,
        mult_c=r - 1,
        mult_d=(m - 1) * (r - 1),
        mult_zero=p.n_nodes - r * m,
    )


def eigengap(p: SbmParams) -> float:
    """Gap below the r+m-1 retained eigenvalues: n*min(r*(beta-gamma), m*(alpha-gamma)).

    Raises when the ordering hypotheses fail (the formula can be nonpositive)
    or when the next eigenvalue down is a structural zero rather than the
    interaction eigenvalue (lambda_d < 0 with empty extra dimensions present),
    because the closed form no longer equals the sorted-spectrum gap there.
    """
    if not p.ordering_satisfied:
        raise ValueError(
            "eigengap requires rho > max(alpha, beta) and min(alpha, beta) > gamma"
        )
    spec = closed_form_spectrum(p)
    # relative tolerance: rho - beta - alpha + gamma can be exactly 0 in real
    # arithmetic yet come out at +-1e-17 * scale in floating point
    if spec.mult_zero > 0 and spec.lambda_d < -1e-12 * max(1.0, spec.lambda_a):
        raise ValueError(
            "eigengap formula is invalid: interaction eigenvalue is negative, "
            "so the next sorted eigenvalue is a structural zero"
        )
    return p.n * min(p.r * (p.beta - p.gamma), p.m * (p.alpha - p.gamma))


def ridge_shift_from_eta(p: SbmParams, eta: float) -> float:
    """Per-coordinate ridge shift induced by eta on an expected graph.

    Equals (sum(A_tilde) / N^2) * eta * |S| = eta * lambda_a / m for the
    source domain's rn training nodes.
    """
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return eta * closed_form_spectrum(p).lambda_a / p.m


def ideal_scaling_factor(p: SbmParams, xi: float) -> float:
    """Shrinkage of target scores on the expected graph: lambda_c / (lambda_c + m*xi)."""
    lam_c = closed_form_spectrum(p).lambda_c
    if lam_c <= 0:
        raise ValueError("scaling factor undefined: class eigenvalue is not positive")
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    return lam_c / (lam_c + p.m * xi)


def theorem_eta_bound(p: SbmParams, eps: float = 0.25) -> float:
    """Largest eta with guaranteed scaling factor >= 1 - eps: (alpha-gamma)*eps/(2*r*rho)."""
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if p.alpha <= p.gamma:
        raise ValueError("eta bound requires alpha > gamma")
    if p.rho <= 0:
        raise ValueError("eta bound requires rho > 0")
    return (p.alpha - p.gamma) * eps / (2.0 * p.r * p.rho)
