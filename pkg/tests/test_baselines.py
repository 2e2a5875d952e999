"""Baseline heads on the eight-node graph: pointwise ERM, adversarial DANN,
and the contrastive pipeline they are compared against.

Frozen numbers are recomputed by explicit loops before being asserted.
"""

import numpy as np
import pytest

from connectgraph import (
    SeparationKernelParams,
    build_separation_kernel,
    contrastive_pipeline_separation,
    dann_construction,
    erm_minimizer,
    erm_objective,
    separation_pair_params,
)
from connectgraph.baselines import dann_domain_term, separation_category_eigenvalues
from connectgraph.graph_core import AugmentationKernel, separation_pattern_matrix


def onehot(class_id):
    return np.array([1.0, 0.0]) if class_id == 1 else np.array([0.0, 1.0])


def brute_objective(kernel, scores):
    # Uniform source draw, kernel-weighted augmentation, squared loss.
    total = 0.0
    for x in (0, 1):
        for xp in range(8):
            diff = scores[xp] - onehot(kernel.labels[x].class_id)
            total += 0.5 * kernel.kernel[x, xp] * float(diff @ diff)
    return total


def random_separation_params(rng, ordered=True):
    while True:
        vals = rng.uniform(0.02, 1.0, size=4)
        if ordered:
            vals = np.sort(vals)[::-1]
        r, a, b, g = vals
        total = r + 2 * a + b + 2 * g
        p = SeparationKernelParams(r / total, a / total, b / total, g / total)
        if not ordered or (p.rho_p > p.alpha_p > p.beta_p > p.gamma_p > 0):
            return p


class TestErm:
    def test_minimizer_frozen(self):
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.2, 0.06, 0.02))
        pred = erm_minimizer(k)
        np.testing.assert_array_equal(
            pred.reachable, [True, True, True, True, False, False, True, True]
        )
        np.testing.assert_allclose(pred.scores[0], [0.5 / 0.56, 0.06 / 0.56], atol=1e-12)
        np.testing.assert_allclose(pred.scores[2], [0.2 / 0.22, 0.02 / 0.22], atol=1e-12)
        # Adversarial completion flips the class on unreachable nodes.
        np.testing.assert_allclose(pred.scores[4], [0.0, 1.0], atol=0)
        np.testing.assert_allclose(pred.scores[5], [1.0, 0.0], atol=0)
        oracle_pred = erm_minimizer(k, completion="oracle")
        np.testing.assert_allclose(oracle_pred.scores[4], [1.0, 0.0], atol=0)
        np.testing.assert_allclose(oracle_pred.scores[5], [0.0, 1.0], atol=0)
        with pytest.raises(ValueError):
            erm_minimizer(k, completion="nope")

    def test_minimizer_is_kernel_weighted_average(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            k = build_separation_kernel(random_separation_params(rng, ordered=False))
            pred = erm_minimizer(k)
            for xp in range(8):
                mass = 0.5 * k.kernel[0, xp] + 0.5 * k.kernel[1, xp]
                if mass == 0.0:
                    assert not pred.reachable[xp]
                    continue
                oracle = (
                    0.5 * k.kernel[0, xp] * onehot(k.labels[0].class_id)
                    + 0.5 * k.kernel[1, xp] * onehot(k.labels[1].class_id)
                ) / mass
                np.testing.assert_allclose(pred.scores[xp], oracle, atol=1e-12)

    def test_objective_matches_brute(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            k = build_separation_kernel(random_separation_params(rng, ordered=False))
            pred = erm_minimizer(k)
            assert abs(erm_objective(k, pred) - brute_objective(k, pred.scores)) < 1e-12

    def test_minimizer_is_minimal(self):
        rng = np.random.default_rng(7)
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.2, 0.06, 0.02))
        pred = erm_minimizer(k)
        base = erm_objective(k, pred)
        for _ in range(40):
            bump = rng.normal(size=(8, 2))
            bump[~pred.reachable] = 0.0  # unreachable rows never enter the loss
            norm = np.linalg.norm(bump)
            if norm < 1e-9:
                continue
            challenger = pred.scores + 0.1 * bump / norm
            assert erm_objective(k, challenger) > base + 1e-12

    def test_target_errors(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            k = build_separation_kernel(random_separation_params(rng))
            for completion, want in (("adversarial", 1 / 3), ("oracle", 0.0)):
                pred = erm_minimizer(k, completion=completion)
                classes = 1 + np.argmax(pred.scores, axis=1)
                wrong = [
                    classes[i] != k.labels[i].class_id
                    for i in range(8)
                    if k.labels[i].domain_id != 1
                ]
                assert abs(float(np.mean(wrong)) - want) < 1e-15


class TestDann:
    def test_construction_frozen(self):
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.2, 0.06, 0.02))
        for lam in (0.5, 1.0, 2.0):
            res = dann_construction(k, lam)
            np.testing.assert_array_equal(res.groups, [0, 1, 0, 1, 1, 0, 0, 1])
            np.testing.assert_allclose(res.optimal_head, [0.25, 0.75], atol=0)
            assert abs(res.domain_term_value - 3.0 * lam / 8.0) < 1e-15
        with pytest.raises(ValueError):
            dann_construction(k, -1.0)

    def test_domain_term_matches_brute(self):
        rng = np.random.default_rng(13)
        domains = np.array([1.0] * 2 + [0.0] * 6)  # indicator of domain 1
        for _ in range(60):
            assignment = rng.integers(0, 4, size=8)
            lam = float(rng.uniform(0.1, 2.0))
            total = 0.0
            for gid in np.unique(assignment):
                members = np.flatnonzero(assignment == gid)
                mean = domains[members].mean()
                head = np.array([mean, 1.0 - mean])
                for i in members:
                    y = np.array([domains[i], 1.0 - domains[i]])
                    total += float(np.sum((y - head) ** 2)) / 8.0
            assert abs(dann_domain_term(assignment, lam) - lam * total) < 1e-12

    def test_collapsed_groups_are_adversarially_optimal(self):
        rng = np.random.default_rng(17)
        lam = 1.0
        best = 3.0 * lam / 8.0
        assert abs(dann_domain_term([0, 1, 0, 1, 1, 0, 0, 1], lam) - best) < 1e-15
        assert abs(dann_domain_term([0] * 8, lam) - best) < 1e-15
        for _ in range(300):
            assignment = rng.integers(0, 4, size=8)
            assert dann_domain_term(assignment, lam) <= best + 1e-12
        # Partitions that reveal the domain get zero adversarial value.
        assert dann_domain_term([0, 0, 1, 1, 1, 1, 1, 1], lam) == 0.0
        assert dann_domain_term(list(range(8)), lam) == 0.0

    def test_relabelling_groups_changes_nothing(self):
        lam = 0.7
        a = dann_domain_term([0, 1, 0, 1, 1, 0, 0, 1], lam)
        b = dann_domain_term([5, 2, 5, 2, 2, 5, 5, 2], lam)
        assert a == b

    def test_predictor_target_error_is_one_third(self):
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.2, 0.06, 0.02))
        res = dann_construction(k, 1.0)
        classes = 1 + np.argmax(res.predictor.scores, axis=1)
        wrong = [
            classes[i] != k.labels[i].class_id
            for i in range(8)
            if k.labels[i].domain_id != 1
        ]
        assert abs(float(np.mean(wrong)) - 1 / 3) < 1e-15


class TestContrastivePipeline:
    def test_no_cross_draw(self):
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.25, 0.0, 0.0))
        res = contrastive_pipeline_separation(k)
        assert res.target_error == 0.0
        assert res.condition_alpha_gt_gamma_plus_beta
        assert res.tie_warning  # the middle eigenvalue cluster is degenerate

    def test_condition_flag_matches_pair_params(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            p = random_separation_params(rng)
            rho, alpha, beta, gamma, _ = separation_pair_params(p)
            res = contrastive_pipeline_separation(build_separation_kernel(p))
            assert res.condition_alpha_gt_gamma_plus_beta == (alpha > gamma + beta)

    def test_dominant_cycle_draws_recover_labels(self):
        # Family with a strong cycle weight: the pair-level condition holds
        # and the three-dimensional pipeline classifies every target node.
        rng = np.random.default_rng(29)
        for _ in range(60):
            rho = rng.uniform(0.5, 0.7)
            spare = rng.uniform(0.01, 0.05)
            p = SeparationKernelParams(rho, (1 - rho - spare) / 2, spare / 2, spare / 4)
            res = contrastive_pipeline_separation(build_separation_kernel(p))
            assert res.condition_alpha_gt_gamma_plus_beta
            assert res.target_error == 0.0

    def test_condition_flag_off_for_weak_cycle(self):
        p = SeparationKernelParams(0.5, 0.02, 0.06, 0.2)
        res = contrastive_pipeline_separation(build_separation_kernel(p))
        assert not res.condition_alpha_gt_gamma_plus_beta

    def test_rejects_tampered_kernel(self):
        k = build_separation_kernel(SeparationKernelParams(0.5, 0.2, 0.06, 0.02))
        bad = k.kernel.copy()
        bad[0, 1], bad[0, 2] = bad[0, 2], bad[0, 1]
        with pytest.raises(ValueError):
            contrastive_pipeline_separation(AugmentationKernel(8, list(k.labels), bad))

    def test_category_eigenvalues_match_dense(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            p = random_separation_params(rng, ordered=False)
            rho, alpha, beta, gamma, _ = separation_pair_params(p)
            pattern = separation_pattern_matrix(rho, alpha, beta, gamma)
            dense = np.sort(np.linalg.eigvalsh(pattern))
            got = np.sort(separation_category_eigenvalues(p))
            np.testing.assert_allclose(got, dense, atol=1e-12)
            # Closed forms from the two commuting shift operators.
            closed = np.sort(
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
            np.testing.assert_allclose(got, closed, atol=1e-12)
