"""Spectral contrastive embeddings on augmentation graphs.

Exact, fully deterministic constructions: positive-pair graphs from
augmentation kernels, closed-form spectral embeddings, ridge probes with a
matching kernel-space route, multi-domain block models with known spectra,
exactly solved ERM and domain-adversarial baselines, and the log-ratio
connectivity regression with embedded benchmark tables.
"""

from .graph_core import (
    AugmentationKernel,
    NodeLabel,
    PairGraph,
    SeparationKernelParams,
    ToyKernelParams,
    build_separation_kernel,
    build_toy_kernel,
    positive_pair_graph,
    separation_pair_params,
    toy_pair_params,
)
from .sbm import (
    SampledGraph,
    SbmParams,
    closed_form_spectrum,
    eigengap,
    expected_adjacency,
    ideal_scaling_factor,
    ridge_shift_from_eta,
    sample_adjacency,
    theorem_eta_bound,
)
from .spectral import (
    EigenSystem,
    SpectralEmbedding,
    embed,
    embed_sampled,
    operator_norm,
    rank_k_approx,
    rank_k_perturbation_bound,
    spectral_contrastive_loss,
    symmetric_eigensystem,
)
from .probe import (
    closed_form_target_prediction,
    disentanglement_cosines,
    domain_probe,
    mean_zero_onehot,
    predict,
    ridge_fit,
    zero_one_error,
)
from .baselines import (
    contrastive_pipeline_separation,
    dann_construction,
    erm_minimizer,
    erm_objective,
)
from .experiments import (
    ConnectivityRecord,
    FitResult,
    TrialRecord,
    ablate_cross_edges,
    fit_connectivity,
    paper_table_fit,
    run_sbm_trial,
    run_separation,
    run_toy,
    sweep,
)

__version__ = "0.1.0"
