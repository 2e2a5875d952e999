"""Multi-domain block-model checks: layout, spectrum, sampling, scaling law.

The closed-form spectrum is always cross-checked against a dense eigensolve
of the independently assembled expected matrix.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connectgraph import (
    SbmParams,
    closed_form_spectrum,
    eigengap,
    expected_adjacency,
    ideal_scaling_factor,
    ridge_shift_from_eta,
    run_sbm_trial,
    sample_adjacency,
    theorem_eta_bound,
)
from connectgraph.sbm import sbm_labels


def brute_expected_matrix(p: SbmParams) -> np.ndarray:
    # Oracle: assemble the expected adjacency entry by entry from labels.
    labels = sbm_labels(p)
    n = len(labels)
    a = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            same_c = labels[i].class_id == labels[j].class_id
            same_d = labels[i].domain_id == labels[j].domain_id
            if same_c and same_d:
                a[i, j] = p.rho
            elif same_c:
                a[i, j] = p.alpha
            elif same_d:
                a[i, j] = p.beta
            else:
                a[i, j] = p.gamma
    return a


def ordered_params(r, m, n, rng):
    while True:
        rho = rng.uniform(0.45, 0.9)
        gamma = rng.uniform(0.02, 0.2)
        alpha = rng.uniform(gamma + 0.08, rho - 0.03)
        beta = rng.uniform(gamma + 0.08, rho - 0.03)
        p = SbmParams(r, m, n, rho, alpha, beta, gamma)
        if p.ordering_satisfied:
            return p


class TestLayout:
    def test_labels_domain_major(self):
        p = SbmParams(2, 2, 3, 0.6, 0.4, 0.3, 0.1)
        got = [(lab.class_id, lab.domain_id) for lab in sbm_labels(p)]
        assert got == [(1, 1)] * 3 + [(2, 1)] * 3 + [(1, 2)] * 3 + [(2, 2)] * 3

    def test_expected_matrix_matches_brute(self):
        p = SbmParams(3, 2, 2, 0.7, 0.45, 0.35, 0.1)
        graph = expected_adjacency(p)
        np.testing.assert_allclose(graph.adjacency, brute_expected_matrix(p), atol=0)
        assert np.all(np.diag(graph.adjacency) == p.rho)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            SbmParams(1, 2, 3, 0.6, 0.4, 0.3, 0.1)  # r < 2
        with pytest.raises(ValueError):
            SbmParams(2, 1, 3, 0.6, 0.4, 0.3, 0.1)  # m < 2
        with pytest.raises(ValueError):
            SbmParams(2, 2, 0, 0.6, 0.4, 0.3, 0.1)  # n < 1
        with pytest.raises(ValueError):
            SbmParams(2, 2, 3, 1.2, 0.4, 0.3, 0.1)  # prob > 1


class TestSpectrum:
    def test_frozen_unit_block(self):
        p = SbmParams(2, 2, 1, 0.6, 0.4, 0.3, 0.1)
        spec = closed_form_spectrum(p)
        assert abs(spec.lambda_a - 1.4) < 1e-12
        assert abs(spec.lambda_b - 0.4) < 1e-12
        assert abs(spec.lambda_c - 0.6) < 1e-12
        assert abs(spec.lambda_d - 0.0) < 1e-12
        assert (spec.mult_a, spec.mult_b, spec.mult_c, spec.mult_d) == (1, 1, 1, 1)
        assert spec.mult_zero == 0
        assert abs(eigengap(p) - 0.4) < 1e-12

    def test_multiplicities(self):
        p = SbmParams(4, 3, 5, 0.7, 0.4, 0.35, 0.1)
        spec = closed_form_spectrum(p)
        assert spec.mult_b == 2 and spec.mult_c == 3 and spec.mult_d == 6
        assert spec.mult_zero == 60 - 12
        assert len(spec.as_sorted_array()) == 60

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(2, 4),
        st.integers(2, 3),
        st.integers(1, 4),
        st.floats(0.45, 0.9),
        st.floats(0.15, 0.42),
        st.floats(0.15, 0.42),
        st.floats(0.01, 0.12),
    )
    def test_matches_dense_eigensolve(self, r, m, n, rho, alpha, beta, gamma):
        p = SbmParams(r, m, n, rho, alpha, beta, gamma)
        dense = np.sort(np.linalg.eigvalsh(brute_expected_matrix(p)))
        closed = np.sort(closed_form_spectrum(p).as_sorted_array())
        np.testing.assert_allclose(closed, dense, atol=1e-9)

    def test_eigengap_signals(self):
        with pytest.raises(ValueError):
            eigengap(SbmParams(2, 2, 3, 0.6, 0.3, 0.4, 0.3))  # alpha == gamma
        with pytest.raises(ValueError):
            eigengap(SbmParams(2, 2, 3, 0.6, 0.4, 0.1, 0.3))  # beta < gamma
        with pytest.raises(ValueError):
            # negative interaction eigenvalue next to structural zeros
            eigengap(SbmParams(2, 2, 3, 0.5, 0.45, 0.45, 0.05))
        # Without structural zeros the same params have a valid sorted gap.
        p1 = SbmParams(2, 2, 1, 0.5, 0.45, 0.45, 0.05)
        spec = closed_form_spectrum(p1)
        sorted_vals = spec.as_sorted_array()
        assert abs(eigengap(p1) - (sorted_vals[2] - sorted_vals[3])) < 1e-12
        # Mathematically zero lambda_d must not trip the guard via rounding.
        assert abs(eigengap(SbmParams(2, 2, 3, 0.6, 0.4, 0.3, 0.1)) - 1.2) < 1e-12


class TestSampling:
    def test_pure_function_of_seed(self):
        p = SbmParams(2, 2, 20, 0.6, 0.4, 0.3, 0.1)
        a1 = sample_adjacency(p, seed=9).adjacency
        a2 = sample_adjacency(p, seed=9).adjacency
        assert np.array_equal(a1, a2)
        a3 = sample_adjacency(p, seed=10).adjacency
        assert not np.array_equal(a1, a3)
        assert np.array_equal(a1, a1.T)
        assert set(np.unique(a1)) <= {0.0, 1.0}

    def test_within_block_density(self):
        # 50 seeds of the reference draw: mean same-class same-domain density
        # lands within a percent of rho.
        p = SbmParams(2, 2, 100, 0.6, 0.4, 0.3, 0.1)
        block = slice(0, 100)
        dens = []
        for seed in range(50):
            a = sample_adjacency(p, seed=seed).adjacency[block, block]
            off = a[np.triu_indices(100, k=1)]
            dens.append(off.mean())
        assert abs(float(np.mean(dens)) - 0.6) < 0.01

    def test_edge_count(self):
        p = SbmParams(2, 2, 10, 0.6, 0.4, 0.3, 0.1)
        g = sample_adjacency(p, seed=1)
        assert g.edge_count == int(g.adjacency.sum())

    def test_json_schema_switches_on_size(self):
        small = sample_adjacency(SbmParams(2, 2, 10, 0.6, 0.4, 0.3, 0.1), seed=0)
        d_small = small.to_json_dict()
        assert "weights" in d_small and "edges" not in d_small
        big = sample_adjacency(SbmParams(2, 2, 129, 0.6, 0.4, 0.3, 0.1), seed=0)
        d_big = big.to_json_dict()
        assert "edges" in d_big and "weights" not in d_big
        # Edge list reproduces the adjacency exactly.
        n = d_big["n"]
        rebuilt = np.zeros((n, n))
        for i, j in d_big["edges"]:
            rebuilt[i, j] = 1.0
            rebuilt[j, i] = 1.0
        np.testing.assert_array_equal(rebuilt, big.adjacency)


class TestScalingLaw:
    def test_theorem_eta_bound_frozen(self):
        p = SbmParams(3, 2, 5, 0.6, 0.4, 0.4, 0.1)
        assert abs(theorem_eta_bound(p, 0.25) - 0.075 / 3.6) < 1e-15
        with pytest.raises(ValueError):
            theorem_eta_bound(p, 0.0)
        with pytest.raises(ValueError):
            theorem_eta_bound(SbmParams(3, 2, 5, 0.6, 0.1, 0.4, 0.1), 0.25)

    def test_ridge_shift_identity(self):
        p = SbmParams(2, 3, 4, 0.7, 0.4, 0.3, 0.1)
        eta = 0.03
        a = expected_adjacency(p).adjacency
        n = a.shape[0]
        n_source = sum(lab.domain_id == 1 for lab in sbm_labels(p))
        oracle = (a.sum() / (n * n)) * eta * n_source
        assert abs(ridge_shift_from_eta(p, eta) - oracle) < 1e-12

    def test_ideal_factor_frozen(self):
        p = SbmParams(3, 2, 7, 0.6, 0.4, 0.4, 0.1)
        eta = theorem_eta_bound(p, 0.25)
        factor = ideal_scaling_factor(p, ridge_shift_from_eta(p, eta))
        assert abs(factor - 12.0 / 13.0) < 1e-12

    def test_measured_factor_matches_ideal(self):
        rng = np.random.default_rng(21)
        for r, m in ((2, 2), (3, 2), (2, 3)):
            p = ordered_params(r, m, 4, rng)
            for eta in (0.0, 0.02, 0.1):
                rec = run_sbm_trial(p, eta=eta, expected=True)
                assert rec.op_norm_dev == 0.0
                assert abs(rec.scaling_factor - rec.predicted_scaling_factor) < 1e-9
                ideal = ideal_scaling_factor(p, ridge_shift_from_eta(p, eta))
                assert abs(rec.scaling_factor - ideal) < 1e-9
                assert rec.target_error == 0.0 and rec.domain_error == 0.0

    def test_guarantee_holds_at_theorem_eta(self):
        rng = np.random.default_rng(22)
        for eps in (0.1, 0.25, 0.45):
            p = ordered_params(3, 2, 3, rng)
            eta = theorem_eta_bound(p, eps)
            factor = ideal_scaling_factor(p, ridge_shift_from_eta(p, eta))
            assert factor >= 1.0 - eps - 1e-12
