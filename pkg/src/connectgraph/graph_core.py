"""Augmentation kernels and positive-pair graphs on finite node sets.

A node is an (class_id, domain_id) labelled point.  An augmentation kernel
K[x, x'] gives the probability that augmenting x yields x'; the positive-pair
graph is the joint distribution of an augmentation pair drawn from a shared
base point, W = K^T diag(base_weights) K.  Two concrete families ship: a
four-node two-class/two-domain kernel and an eight-node kernel whose target
domain is a six-node two-class cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class NodeLabel:
    """1-based class and domain ids for one node."""

    class_id: int
    domain_id: int

    def __post_init__(self) -> None:
        if self.class_id < 1 or self.domain_id < 1:
            raise ValueError("class_id and domain_id are 1-based and must be >= 1")


def _check_simplex(values: tuple[float, ...], weights: tuple[int, ...], what: str) -> None:
    for v in values:
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{what}: weights must lie in [0, 1], got {v!r}")
    total = sum(w * v for w, v in zip(weights, values))
    if abs(total - 1.0) > _SUM_TOL:
        raise ValueError(f"{what}: weights must sum to 1, got {total!r}")


@dataclass(frozen=True)
class ToyKernelParams:
    """Augmentation weights for the four-node kernel.

    rho_p keeps the node, alpha_p moves across domains within a class,
    beta_p moves across classes within a domain, gamma_p flips both.
    They must sum to 1.
    """

    rho_p: float
    alpha_p: float
    beta_p: float
    gamma_p: float

    def __post_init__(self) -> None:
        _check_simplex(self.as_tuple(), (1, 1, 1, 1), "ToyKernelParams")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.rho_p, self.alpha_p, self.beta_p, self.gamma_p)

    @property
    def strictly_ordered(self) -> bool:
        r, a, b, g = self.as_tuple()
        return r > a > b > g


@dataclass(frozen=True)
class SeparationKernelParams:
    """Augmentation weights for the eight-node kernel.

    Each node has one same-pair neighbour (beta_p), two cycle neighbours
    (alpha_p) and two diagonal neighbours (gamma_p), so the row-sum
    constraint is rho_p + 2*alpha_p + beta_p + 2*gamma_p = 1.
    """

    rho_p: float
    alpha_p: float
    beta_p: float
    gamma_p: float

    def __post_init__(self) -> None:
        _check_simplex(self.as_tuple(), (1, 2, 1, 2), "SeparationKernelParams")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.rho_p, self.alpha_p, self.beta_p, self.gamma_p)


def _as_matrix(m: np.ndarray, n: int, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (n, n):
        raise ValueError(f"{what}: expected shape ({n}, {n}), got {m.shape}")
    return m


@dataclass
class AugmentationKernel:
    """Row-stochastic augmentation matrix together with node labels."""

    n_nodes: int
    labels: list[NodeLabel]
    kernel: np.ndarray
    base_weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if len(self.labels) != self.n_nodes:
            raise ValueError("labels length must equal n_nodes")
        self.kernel = _as_matrix(self.kernel, self.n_nodes, "AugmentationKernel.kernel")
        if np.any(self.kernel < -1e-15):
            raise ValueError("kernel entries must be nonnegative")
        rows = self.kernel.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > _SUM_TOL:
            raise ValueError("kernel rows must sum to 1")
        if self.base_weights is None:
            self.base_weights = np.full(self.n_nodes, 1.0 / self.n_nodes)
        self.base_weights = np.asarray(self.base_weights, dtype=np.float64)
        if self.base_weights.shape != (self.n_nodes,):
            raise ValueError("base_weights must be a length-n vector")
        if np.any(self.base_weights < 0.0):
            raise ValueError("base_weights must be nonnegative")
        if abs(self.base_weights.sum() - 1.0) > _SUM_TOL:
            raise ValueError("base_weights must sum to 1")


@dataclass
class PairGraph:
    """Symmetric positive-pair weight matrix whose entries sum to 1."""

    n_nodes: int
    labels: list[NodeLabel]
    weights: np.ndarray
    source_domain: int = 1

    def __post_init__(self) -> None:
        if len(self.labels) != self.n_nodes:
            raise ValueError("labels length must equal n_nodes")
        self.weights = _as_matrix(self.weights, self.n_nodes, "PairGraph.weights")
        if np.max(np.abs(self.weights - self.weights.T)) > _SUM_TOL:
            raise ValueError("pair weights must be symmetric")
        if np.any(self.weights < -1e-15):
            raise ValueError("pair weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"pair weights must sum to 1, got {total!r}")

    def source_nodes(self) -> np.ndarray:
        return np.flatnonzero([lab.domain_id == self.source_domain for lab in self.labels])

    def target_nodes(self) -> np.ndarray:
        return np.flatnonzero([lab.domain_id != self.source_domain for lab in self.labels])

    def to_json_dict(self) -> dict:
        return {
            "n": self.n_nodes,
            "labels": [[lab.class_id, lab.domain_id] for lab in self.labels],
            "weights": [float(v) for v in self.weights.reshape(-1)],
            "source_domain": self.source_domain,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PairGraph":
        n = int(d["n"])
        labels = [NodeLabel(int(c), int(dom)) for c, dom in d["labels"]]
        weights = np.asarray(d["weights"], dtype=np.float64).reshape(n, n)
        return cls(n, labels, weights, int(d.get("source_domain", 1)))


def toy_labels() -> list[NodeLabel]:
    """(class, domain) = (1,1), (2,1), (1,2), (2,2) in node order."""
    return [NodeLabel(1, 1), NodeLabel(2, 1), NodeLabel(1, 2), NodeLabel(2, 2)]


def build_toy_kernel(p: ToyKernelParams) -> AugmentationKernel:
    """Four-node kernel: keep rho', cross-domain alpha', cross-class beta', both gamma'."""
    labels = toy_labels()
    r, a, b, g = p.as_tuple()
    k = np.empty((4, 4))
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            same_c = li.class_id == lj.class_id
            same_d = li.domain_id == lj.domain_id
            if i == j:
                k[i, j] = r
            elif same_c and not same_d:
                k[i, j] = a
            elif same_d and not same_c:
                k[i, j] = b
            else:
                k[i, j] = g
    return AugmentationKernel(4, labels, k)


def separation_labels() -> list[NodeLabel]:
    """Odd nodes class 1, even nodes class 2; nodes 1-2 domain 1, nodes 3-8 domain 2."""
    return [NodeLabel(1 if (i + 1) % 2 == 1 else 2, 1 if i < 2 else 2) for i in range(8)]


# unordered neighbour structure of the eight-node kernel (1-based node ids)
_SEP_CYCLE = {(1, 3), (3, 5), (5, 7), (1, 7), (2, 4), (4, 6), (6, 8), (2, 8)}
_SEP_PAIR = {(1, 2), (3, 4), (5, 6), (7, 8)}
_SEP_DIAG = {(1, 4), (2, 3), (3, 6), (4, 5), (5, 8), (6, 7), (2, 7), (1, 8)}
_SEP_ANTIPODAL_SAME = {(1, 5), (3, 7), (2, 6), (4, 8)}
_SEP_ANTIPODAL_CROSS = {(1, 6), (2, 5), (3, 8), (4, 7)}


def separation_relation(i: int, j: int) -> str:
    """Structural relation of 0-based node indices in the eight-node layout."""
    if i == j:
        return "self"
    key = (min(i, j) + 1, max(i, j) + 1)
    if key in _SEP_CYCLE:
        return "cycle"
    if key in _SEP_PAIR:
        return "pair"
    if key in _SEP_DIAG:
        return "diagonal"
    if key in _SEP_ANTIPODAL_SAME:
        return "antipodal_same_class"
    if key in _SEP_ANTIPODAL_CROSS:
        return "antipodal_cross_class"
    return "none"


def build_separation_kernel(p: SeparationKernelParams) -> AugmentationKernel:
    """Eight-node kernel: self rho', cycle alpha', same-pair beta', diagonal gamma'."""
    labels = separation_labels()
    r, a, b, g = p.as_tuple()
    value = {"self": r, "cycle": a, "pair": b, "diagonal": g}
    k = np.zeros((8, 8))
    for i in range(8):
        for j in range(8):
            k[i, j] = value.get(separation_relation(i, j), 0.0)
    return AugmentationKernel(8, labels, k)


def positive_pair_graph(k: AugmentationKernel) -> PairGraph:
    """Joint augmentation-pair weights W = K^T diag(base) K."""
    w = k.kernel.T @ (k.base_weights[:, None] * k.kernel)
    w = (w + w.T) / 2.0
    return PairGraph(k.n_nodes, list(k.labels), w)


def toy_pair_params(p: ToyKernelParams) -> tuple[float, float, float, float]:
    """Closed-form entries of the four-node pair graph.

    Returns (rho, alpha, beta, gamma): the actual matrix values on the self,
    cross-domain, cross-class and double-flip positions (the 1/4 base weight
    is already included).
    """
    r, a, b, g = p.as_tuple()
    rho = (r * r + a * a + b * b + g * g) / 4.0
    alpha = (r * a + b * g) / 2.0
    beta = (r * b + a * g) / 2.0
    gamma = (r * g + a * b) / 2.0
    return (rho, alpha, beta, gamma)


def separation_pair_params(
    p: SeparationKernelParams,
) -> tuple[float, float, float, float, float]:
    """Closed-form category weights of the eight-node pair graph.

    The brute-force pair graph puts mass on six structural categories; the
    four named ones (self, cycle, pair, diagonal) carry total mass
    normalizer_C = 1 - 2*(alpha_p + gamma_p)^2, the remaining mass sits on
    antipodal positions.  Returned (rho, alpha, beta, gamma) are the category
    values divided by normalizer_C, so they describe the renormalized graph
    restricted to the named categories; multiply back by normalizer_C to
    recover raw matrix entries.
    """
    r, a, b, g = p.as_tuple()
    rho_raw = (r * r + 2 * a * a + b * b + 2 * g * g) / 8.0
    alpha_raw = (r * a + b * g) / 4.0
    beta_raw = (r * b + 2 * a * g) / 4.0
    gamma_raw = (r * g + a * b) / 4.0
    c = 1.0 - 2.0 * (a + g) ** 2
    return (rho_raw / c, alpha_raw / c, beta_raw / c, gamma_raw / c, c)


def separation_antipodal_values(p: SeparationKernelParams) -> tuple[float, float]:
    """Raw pair-graph mass on antipodal positions (same-class, cross-class)."""
    _, a, _, g = p.as_tuple()
    return ((a * a + g * g) / 4.0, (a * g) / 2.0)


def separation_pattern_matrix(
    rho: float, alpha: float, beta: float, gamma: float
) -> np.ndarray:
    """8x8 matrix with the given values on the four named categories, 0 elsewhere."""
    value = {"self": rho, "cycle": alpha, "pair": beta, "diagonal": gamma}
    m = np.zeros((8, 8))
    for i in range(8):
        for j in range(8):
            m[i, j] = value.get(separation_relation(i, j), 0.0)
    return m


def toy_pattern_matrix(rho: float, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """4x4 matrix with the given values arranged by the toy node relations."""
    labels = toy_labels()
    m = np.empty((4, 4))
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            same_c = li.class_id == lj.class_id
            same_d = li.domain_id == lj.domain_id
            if i == j:
                m[i, j] = rho
            elif same_c:
                m[i, j] = alpha
            elif same_d:
                m[i, j] = beta
            else:
                m[i, j] = gamma
    return m
