"""Self-contained invariant checks runnable from the command line.

Each check is a named pure function; the runner executes them in a fixed
order with counter-derived seeds and prints one line per check, so repeated
runs (at any thread count) emit byte-identical reports.  Suites mirror the
module layout.
"""

from __future__ import annotations

import numpy as np
from threadpoolctl import threadpool_limits

from . import baselines, experiments, graph_core, probe, sbm, spectral
from .rng import hash_ints


class CheckFailure(Exception):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailure(msg)


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(hash_ints(0xC0FFEE, *key))


def _toy_draw(rng: np.random.Generator, ordered: bool = False) -> graph_core.ToyKernelParams:
    w = rng.dirichlet(np.ones(4))
    if ordered:
        w = np.sort(w)[::-1]
    return graph_core.ToyKernelParams(*[float(v) for v in w])


def _sep_draw(rng: np.random.Generator) -> graph_core.SeparationKernelParams:
    w = rng.dirichlet(np.ones(4))
    # rescale so rho + 2 alpha + beta + 2 gamma = 1
    r, a, b, g = w
    scale = r + 2 * a + b + 2 * g
    return graph_core.SeparationKernelParams(
        float(r / scale), float(a / scale), float(b / scale), float(g / scale)
    )


def _sbm_draw(rng: np.random.Generator, r: int, m: int, n: int) -> sbm.SbmParams:
    gamma = float(rng.uniform(0.01, 0.15))
    lo = gamma + 0.05
    alpha = float(rng.uniform(lo, 0.5))
    beta = float(rng.uniform(lo, 0.5))
    rho = float(rng.uniform(max(alpha, beta) + 0.05, 0.95))
    return sbm.SbmParams(r=r, m=m, n=n, rho=rho, alpha=alpha, beta=beta, gamma=gamma)


# ---------------------------------------------------------------- graph_core


def check_pair_graph_simplex() -> None:
    rng = _rng(1)
    for i in range(100):
        kern = graph_core.build_toy_kernel(_toy_draw(rng))
        if i % 2:
            base = rng.dirichlet(np.ones(4))
            kern = graph_core.AugmentationKernel(4, kern.labels, kern.kernel, base)
        g = graph_core.positive_pair_graph(kern)
        _check(abs(float(g.weights.sum()) - 1.0) < 1e-12, "pair weights must sum to 1")
        _check(float(np.max(np.abs(g.weights - g.weights.T))) < 1e-15, "asymmetric pair graph")
        _check(float(g.weights.min()) >= 0.0, "negative pair weight")
    for _ in range(100):
        g = graph_core.positive_pair_graph(graph_core.build_separation_kernel(_sep_draw(rng)))
        _check(abs(float(g.weights.sum()) - 1.0) < 1e-12, "pair weights must sum to 1")


def check_toy_params_match_brute() -> None:
    rng = _rng(2)
    for _ in range(200):
        p = _toy_draw(rng)
        g = graph_core.positive_pair_graph(graph_core.build_toy_kernel(p))
        closed = graph_core.toy_pattern_matrix(*graph_core.toy_pair_params(p))
        _check(float(np.max(np.abs(g.weights - closed))) < 1e-15, "toy closed form mismatch")


def check_separation_params_match_brute() -> None:
    rng = _rng(3)
    for _ in range(200):
        p = _sep_draw(rng)
        g = graph_core.positive_pair_graph(graph_core.build_separation_kernel(p))
        rho, alpha, beta, gamma, c = graph_core.separation_pair_params(p)
        pattern = graph_core.separation_pattern_matrix(rho * c, alpha * c, beta * c, gamma * c)
        anti_same, anti_cross = graph_core.separation_antipodal_values(p)
        for i in range(8):
            for j in range(8):
                rel = graph_core.separation_relation(i, j)
                want = {
                    "antipodal_same_class": anti_same,
                    "antipodal_cross_class": anti_cross,
                }.get(rel, pattern[i, j])
                _check(abs(g.weights[i, j] - want) < 1e-15, f"entry ({i},{j}) [{rel}] off")
        mass = float(pattern.sum())
        _check(abs(mass - c) < 1e-12, "normalizer does not equal the category mass")


def check_ordering_transfer() -> None:
    rng = _rng(4)
    for _ in range(1000):
        p = _toy_draw(rng, ordered=True)
        if not p.strictly_ordered:
            continue
        rho, alpha, beta, gamma = graph_core.toy_pair_params(p)
        _check(rho > alpha > beta > gamma, "kernel ordering must transfer to pair level")


# ----------------------------------------------------------------------- sbm


def check_spectrum_matches_dense() -> None:
    rng = _rng(5)
    for r in (2, 3):
        for m in (2, 3):
            for n in (1, 2, 5):
                for _ in range(3):
                    p = _sbm_draw(rng, r, m, n)
                    dense = np.sort(np.linalg.eigvalsh(sbm.expected_adjacency(p).matrix))[::-1]
                    closed = sbm.closed_form_spectrum(p).as_sorted_array()
                    _check(float(np.max(np.abs(dense - closed))) < 1e-9, "spectrum mismatch")


def check_sampling_pure_function() -> None:
    p = sbm.SbmParams(r=2, m=2, n=20, rho=0.6, alpha=0.4, beta=0.3, gamma=0.1)
    g1 = sbm.sample_adjacency(p, 7)
    g2 = sbm.sample_adjacency(p, 7)
    _check(np.array_equal(g1.adjacency, g2.adjacency), "same seed must reproduce the graph")
    g3 = sbm.sample_adjacency(p, 8)
    _check(not np.array_equal(g1.adjacency, g3.adjacency), "different seeds must differ")
    a = g1.adjacency
    _check(np.array_equal(a, a.T), "sampled adjacency must be symmetric")
    _check(set(np.unique(a)) <= {0.0, 1.0}, "entries must be 0/1")
    dens = float(a.sum()) / p.n_nodes**2
    mean_p = float(sbm.expected_adjacency(p).matrix.mean())
    _check(abs(dens - mean_p) < 0.05, "edge density far from expectation")


def check_eigengap_identity_and_signals() -> None:
    rng = _rng(6)
    done = 0
    while done < 50:
        p = _sbm_draw(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 4)))
        spec = sbm.closed_form_spectrum(p)
        if spec.mult_zero > 0 and spec.lambda_d < 0:
            continue
        sorted_spec = spec.as_sorted_array()
        kk = p.r + p.m - 1
        gap = sbm.eigengap(p)
        _check(abs(gap - (sorted_spec[kk - 1] - sorted_spec[kk])) < 1e-12, "gap identity")
        done += 1
    flat = sbm.SbmParams(r=2, m=2, n=3, rho=0.5, alpha=0.3, beta=0.2, gamma=0.2)
    try:
        sbm.eigengap(flat)
        raise CheckFailure("beta == gamma must signal an error")
    except ValueError:
        pass
    neg = sbm.SbmParams(r=2, m=2, n=3, rho=0.5, alpha=0.45, beta=0.45, gamma=0.05)
    try:
        sbm.eigengap(neg)
        raise CheckFailure("negative interaction eigenvalue must signal an error")
    except ValueError:
        pass


def check_scaling_and_eta_guarantee() -> None:
    rng = _rng(7)
    for _ in range(50):
        p = _sbm_draw(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 8)))
        _check(abs(sbm.ideal_scaling_factor(p, 0.0) - 1.0) < 1e-15, "factor at xi=0 must be 1")
        xs = [sbm.ideal_scaling_factor(p, xi) for xi in (0.1, 0.5, 2.0)]
        _check(xs[0] > xs[1] > xs[2] > 0, "factor must decrease in xi")
        for eps in (0.1, 0.25, 0.45):
            eta = sbm.theorem_eta_bound(p, eps)
            factor = sbm.ideal_scaling_factor(p, sbm.ridge_shift_from_eta(p, eta))
            _check(factor >= 1.0 - eps - 1e-12, "eta bound guarantee violated")


# ------------------------------------------------------------------ spectral


def check_eigensystem_contract() -> None:
    rng = _rng(8)
    for n in (3, 8, 20):
        m = rng.normal(size=(n, n))
        m = (m + m.T) / 2.0
        sys = spectral.symmetric_eigensystem(m)
        lam, u = sys.eigenvalues, sys.eigenvectors
        _check(bool(np.all(np.diff(lam) <= 1e-12)), "eigenvalues must descend")
        _check(float(np.max(np.abs(u.T @ u - np.eye(n)))) < 1e-10, "not orthonormal")
        _check(float(np.max(np.abs(m @ u - u * lam[None, :]))) < 1e-9 * max(abs(lam[0]), abs(lam[-1])), "residual too large")
        for j in range(n):
            col = u[:, j]
            nz = np.flatnonzero(np.abs(col) > 1e-8 * np.max(np.abs(col)))
            _check(col[nz[0]] > 0, "sign convention violated")
    try:
        spectral.symmetric_eigensystem(np.array([[0.0, 1.0], [0.0, 0.0]]))
        raise CheckFailure("asymmetric input must raise")
    except ValueError:
        pass


def check_reconstruction_optimality() -> None:
    rng = _rng(9)
    for _ in range(20):
        n = int(rng.integers(4, 12))
        m = rng.normal(size=(n, n))
        m = (m + m.T) / 2.0
        lam = np.sort(np.linalg.eigvalsh(m))[::-1]
        for k in (1, 2, n - 1):
            mk = spectral.rank_k_approx(m, k)
            err = float(np.sum((m - mk) ** 2))
            want = float(np.sum(lam[k:] ** 2))
            _check(abs(err - want) < 1e-9 * max(want, 1.0), "reconstruction error off")


def check_gram_and_loss_identity() -> None:
    rng = _rng(10)
    for _ in range(20):
        p = _toy_draw(rng)
        g = graph_core.positive_pair_graph(graph_core.build_toy_kernel(p))
        lam = np.linalg.eigvalsh(g.weights)
        if np.min(np.abs(np.diff(np.sort(lam)))) < 1e-6 or np.sum(lam > 1e-12) < 3:
            continue
        emb = spectral.embed(g, 3)
        gram = emb.features @ emb.features.T
        want = spectral.rank_k_approx(16.0 * g.weights, 3)
        _check(float(np.max(np.abs(gram - want))) < 1e-10, "gram identity violated")
        brute = spectral.spectral_contrastive_loss(g.weights, emb.features)
        resid = spectral.loss_from_gram_residual(g.weights, emb.features)
        _check(abs(brute - resid) < 1e-9 * max(abs(brute), 1.0), "loss identity violated")
        other = rng.normal(size=emb.features.shape)
        _check(
            brute <= spectral.spectral_contrastive_loss(g.weights, other) + 1e-12,
            "embedding must minimize the loss",
        )


def check_rotation_and_sign_determinism() -> None:
    rng = _rng(11)
    p = _toy_draw(rng)
    g = graph_core.positive_pair_graph(graph_core.build_toy_kernel(p))
    emb = spectral.embed(g, 2)
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    a = spectral.spectral_contrastive_loss(g.weights, emb.features)
    b = spectral.spectral_contrastive_loss(g.weights, emb.features @ q)
    _check(abs(a - b) < 1e-12, "loss must be rotation invariant")
    s1 = spectral.symmetric_eigensystem(g.weights)
    s2 = spectral.symmetric_eigensystem(g.weights.copy())
    _check(
        np.array_equal(s1.eigenvectors, s2.eigenvectors)
        and np.array_equal(s1.eigenvalues, s2.eigenvalues),
        "eigensystem must be bitwise deterministic",
    )


def check_perturbation_bound() -> None:
    p = sbm.SbmParams(r=2, m=2, n=40, rho=0.7, alpha=0.5, beta=0.5, gamma=0.1)
    tilde = sbm.expected_adjacency(p).matrix
    k = p.r + p.m - 1
    for seed in (1, 2, 3):
        a = sbm.sample_adjacency(p, seed).adjacency
        pb = spectral.rank_k_perturbation_bound(a, tilde, k)
        _check(pb.applicable, "bound should apply at this size")
        actual = spectral.operator_norm(spectral.rank_k_approx(a, k) - spectral.rank_k_approx(tilde, k))
        _check(actual <= pb.bound + 1e-9, "bound must dominate the truncation transfer")
    noisy = tilde + 100.0 * np.eye(tilde.shape[0])
    pb = spectral.rank_k_perturbation_bound(noisy, tilde, k)
    _check(not pb.applicable, "oversized deviation must be flagged inapplicable")


# --------------------------------------------------------------------- probe


def check_mean_zero_rows() -> None:
    for r in (2, 3, 5):
        rows = probe.label_rows(list(range(1, r + 1)), r)
        _check(float(np.max(np.abs(rows.sum(axis=1)))) < 1e-15, "rows must sum to zero")
        want = (r - 1) / r
        _check(
            float(np.max(np.abs(np.sum(rows * rows, axis=1) - want))) < 1e-15,
            "row norm must be (r-1)/r",
        )


def check_ridge_shrinkage() -> None:
    rng = _rng(12)
    f = rng.normal(size=(10, 4))
    y = probe.label_rows([1 + i % 3 for i in range(10)], 3)
    norms = [float(np.linalg.norm(probe.ridge_fit(f, y, eta).weights)) for eta in (0.0, 0.1, 1.0, 10.0)]
    _check(all(a >= b - 1e-12 for a, b in zip(norms, norms[1:])), "penalty must shrink weights")


def check_dual_path_agreement() -> None:
    rng = _rng(13)
    cases = []
    for _ in range(5):
        g = graph_core.positive_pair_graph(graph_core.build_toy_kernel(_toy_draw(rng)))
        cases.append((g.weights, g.labels, 3))
    for _ in range(5):
        g = graph_core.positive_pair_graph(graph_core.build_separation_kernel(_sep_draw(rng)))
        cases.append((g.weights, g.labels, 3))
    p = sbm.SbmParams(r=2, m=2, n=6, rho=0.6, alpha=0.4, beta=0.3, gamma=0.1)
    cases.append((sbm.expected_adjacency(p).matrix, sbm.sbm_labels(p), 3))
    cases.append((sbm.sample_adjacency(p, 5).adjacency, sbm.sbm_labels(p), 3))
    for matrix, labels, k in cases:
        _dual_path_case(matrix, labels, k, eta=0.05)


def _dual_path_case(matrix: np.ndarray, labels, k: int, eta: float) -> None:
    n = matrix.shape[0]
    total = float(matrix.sum())
    src = np.flatnonzero([lab.domain_id == 1 for lab in labels])
    tgt = np.setdiff1d(np.arange(n), src)
    r = max(lab.class_id for lab in labels)
    lam, u, _ = spectral.canonical_truncation(matrix, k, labels)
    if np.sum(lam > 1e-12 * max(abs(lam[0]), abs(lam[-1]))) < k:
        return
    feats = u[:, :k] * np.sqrt((n * n) * lam[:k] / total)[None, :]
    pw = probe.ridge_fit(feats[src], probe.label_rows([labels[i].class_id for i in src], r), eta)
    via_features = feats[tgt] @ pw.weights
    direct = probe.closed_form_target_prediction(matrix, k, eta, src, labels)
    _check(float(np.max(np.abs(via_features - direct))) < 1e-8, "probe routes disagree")


def check_domain_probe_expected() -> None:
    p = sbm.SbmParams(r=2, m=3, n=5, rho=0.7, alpha=0.4, beta=0.3, gamma=0.1)
    g = sbm.expected_adjacency(p)
    emb = spectral.embed_sampled(g, p.r + p.m - 1)
    dom = probe.domain_probe(emb, g.labels, 0.01)
    _check(dom.domain_error == 0.0, "expected-graph domain probe must be exact")
    _check(dom.extended, "three domains must set the extension flag")
    bad_labels = [graph_core.NodeLabel(2, lab.domain_id) if lab.domain_id == 2 and lab.class_id == 1 else lab for lab in g.labels]
    try:
        probe.domain_probe(emb, bad_labels, 0.01)
        raise CheckFailure("missing class-1 node in a domain must raise")
    except ValueError:
        pass


def check_cosine_contract() -> None:
    p = sbm.SbmParams(r=3, m=2, n=4, rho=0.7, alpha=0.4, beta=0.3, gamma=0.1)
    rec = experiments.run_sbm_trial(p, eta=0.01, expected=True)
    _check(rec.cos_src_tgt > 0.99, "source and target class probes must align")
    _check(abs(rec.cos_src_dom) < 1e-8, "class and domain probes must be orthogonal")
    _check(abs(rec.cos_tgt_vs_dom) < 1e-8, "class and domain probes must be orthogonal")


# ----------------------------------------------------------------- baselines


def check_erm_minimizer_properties() -> None:
    rng = _rng(14)
    p = _sep_draw(rng)
    kern = graph_core.build_separation_kernel(p)
    pred = baselines.erm_minimizer(kern)
    _check(
        np.array_equal(np.flatnonzero(pred.reachable), np.array([0, 1, 2, 3, 6, 7])),
        "reachable set must be {1,2,3,4,7,8}",
    )
    base = baselines.erm_objective(kern, pred)
    for _ in range(200):
        bump = np.zeros_like(pred.scores)
        node = int(rng.integers(0, 8))
        if not pred.reachable[node]:
            continue
        v = rng.normal(size=2)
        bump[node] = 0.1 * v / np.linalg.norm(v)
        _check(
            baselines.erm_objective(kern, pred.scores + bump) > base + 1e-15,
            "perturbing a reachable score must increase the objective",
        )


def check_erm_error_values() -> None:
    rng = _rng(15)
    for _ in range(30):
        p = _sep_draw(rng)
        if p.alpha_p <= p.gamma_p:
            continue
        kern = graph_core.build_separation_kernel(p)
        labels = kern.labels
        tgt = np.arange(2, 8)
        adv = baselines.erm_minimizer(kern, completion="adversarial")
        orc = baselines.erm_minimizer(kern, completion="oracle")
        _check(probe.zero_one_error(adv.classes, labels, tgt) == 1.0 / 3.0, "adversarial ERM error must be 1/3")
        _check(probe.zero_one_error(orc.classes, labels, tgt) == 0.0, "oracle ERM error must be 0")


def check_dann_term() -> None:
    rng = _rng(16)
    kern = graph_core.build_separation_kernel(
        graph_core.SeparationKernelParams(0.4, 0.2, 0.1, 0.05)
    )
    for lam in (0.0, 0.5, 1.0, 3.7):
        res = baselines.dann_construction(kern, lam)
        _check(abs(res.domain_term_value - 3.0 * lam / 8.0) < 1e-12, "domain term must be 3*lam/8")
        for _ in range(25):
            codes = rng.integers(0, int(rng.integers(1, 9)), size=8)
            _check(
                baselines.dann_domain_term(codes, lam) <= res.domain_term_value + 1e-12,
                "no encoder may beat the constructed confusion value",
            )
        relabeled = np.array([10 + c * 17 for c in res.groups])
        _check(
            abs(baselines.dann_domain_term(relabeled, lam) - res.domain_term_value) < 1e-15,
            "domain term must not depend on code values",
        )
    res = baselines.dann_construction(kern, 1.0)
    err = probe.zero_one_error(res.predictor.classes, kern.labels, np.arange(2, 8))
    _check(err == 1.0 / 3.0, "constructed predictor target error must be 1/3")


def check_separation_ordering_and_pipeline() -> None:
    rng = _rng(17)
    done = 0
    while done < 500:
        p = _sep_draw(rng)
        rho, alpha, beta, gamma, _ = graph_core.separation_pair_params(p)
        if alpha <= gamma + beta:
            continue
        lam = baselines.separation_category_eigenvalues(p)
        _check(lam[0] > lam[7] > lam[1] - 1e-15 and abs(lam[1] - lam[2]) < 1e-15, "ordering head")
        _check(lam[1] > lam[5] and lam[7] > lam[3] - 1e-15 and abs(lam[3] - lam[4]) < 1e-15, "ordering tail")
        done += 1
    for _ in range(25):
        p = _sep_draw(rng)
        rho, alpha, beta, gamma, _ = graph_core.separation_pair_params(p)
        if alpha <= gamma + beta:
            continue
        res = baselines.contrastive_pipeline_separation(graph_core.build_separation_kernel(p), 3, 0.05)
        _check(res.target_error == 0.0, "pipeline must solve the target domain")
        kern = graph_core.build_separation_kernel(p)
        g = graph_core.positive_pair_graph(kern)
        emb = res.embedding
        diff = (emb.features @ res.probe_weights.weights)[:, 0] - (emb.features @ res.probe_weights.weights)[:, 1]
        parity = np.array([1.0 if lab.class_id == 1 else -1.0 for lab in g.labels])
        resid = diff - (float(diff @ parity) / 8.0) * parity
        _check(float(np.linalg.norm(resid)) < 1e-8 * max(float(np.linalg.norm(diff)), 1e-30), "scores must align with class parity")


# --------------------------------------------------------------- experiments


def check_sweep_deterministic() -> None:
    p = sbm.SbmParams(r=2, m=2, n=8, rho=0.6, alpha=0.4, beta=0.3, gamma=0.1)
    rows1 = experiments.sweep(p, "alpha", [0.2, 0.4], 2, base_seed=3, eta=0.01, threads=1)
    rows2 = experiments.sweep(p, "alpha", [0.2, 0.4], 2, base_seed=3, eta=0.01, threads=2)
    _check(
        experiments.sweep_csv(rows1) == experiments.sweep_csv(rows2),
        "thread count must not change sweep output",
    )


def check_trial_record_schema() -> None:
    p = sbm.SbmParams(r=2, m=2, n=6, rho=0.6, alpha=0.4, beta=0.3, gamma=0.1)
    rec = experiments.run_sbm_trial(p, eta=0.01, expected=True)
    _check(rec.target_error == 0.0, "expected-graph trial must have zero target error")
    _check(
        abs(rec.scaling_factor - rec.predicted_scaling_factor) < 1e-8,
        "measured shrinkage must match the closed form on the expected graph",
    )
    row = experiments.SweepRow("alpha", 0.4, 0, 0, rec)
    _check(len(row.csv_values()) == len(experiments.SWEEP_CSV_HEADER), "csv row arity")


def check_ablation_behavior() -> None:
    p = sbm.SbmParams(r=2, m=2, n=10, rho=0.6, alpha=0.4, beta=0.3, gamma=0.1)
    g = sbm.sample_adjacency(p, 11)
    same = experiments.ablate_cross_edges(g, 0.0, 5)
    _check(np.array_equal(same.adjacency, g.adjacency), "fraction 0 must be the identity")
    dom = np.array([lab.domain_id for lab in g.labels])
    cross_mask = dom[:, None] != dom[None, :]
    gone = experiments.ablate_cross_edges(g, 1.0, 5)
    _check(float(gone.adjacency[cross_mask].sum()) == 0.0, "fraction 1 must remove all cross edges")
    _check(
        np.array_equal(gone.adjacency[~cross_mask], g.adjacency[~cross_mask]),
        "within-domain edges must be untouched",
    )
    counts = [
        experiments.ablate_cross_edges(g, f, 5).edge_count for f in (0.0, 0.25, 0.5, 0.75, 1.0)
    ]
    _check(all(a >= b for a, b in zip(counts, counts[1:])), "edge count must decrease")


def check_fit_and_tables() -> None:
    rng = _rng(18)
    records = []
    for i in range(12):
        alpha = float(rng.uniform(2.0, 12.0))
        beta = float(rng.uniform(2.0, 12.0))
        gamma = float(rng.uniform(0.5, 2.0))
        acc = 14.9 * np.log(alpha / gamma) + 2.7 * np.log(beta / gamma)
        records.append(experiments.ConnectivityRecord(f"p{i}", float(acc), alpha, beta, gamma))
    fit = experiments.fit_connectivity(records)
    _check(abs(fit.w_alpha - 14.9) < 1e-9 and abs(fit.w_beta - 2.7) < 1e-9, "noiseless recovery")
    _check(abs(fit.r_squared - 1.0) < 1e-12, "noiseless R^2 must be 1")
    collinear = [
        experiments.ConnectivityRecord(f"c{i}", float(i), float(np.exp(i + 1)), float(np.exp(i + 1)), 1.0)
        for i in range(4)
    ]
    try:
        experiments.fit_connectivity(collinear)
        raise CheckFailure("collinear design must raise")
    except ValueError:
        pass
    report = experiments.paper_table_fit()
    _check(set(report["conventions"]) == {"source", "target", "average"}, "three conventions")
    for conv in report["conventions"].values():
        _check(np.isfinite(conv["w_alpha"]) and np.isfinite(conv["w_beta"]), "finite weights")
        _check(conv["r_squared"] <= 1.0 and conv["n_records"] == 12, "fit shape")
    _check(report["published"] == dict(experiments.PUBLISHED_FIT), "published reference echoed")


CHECKS: list[tuple[str, str, callable]] = [
    ("graph_core", "pair_graph_simplex", check_pair_graph_simplex),
    ("graph_core", "toy_params_match_brute", check_toy_params_match_brute),
    ("graph_core", "separation_params_match_brute", check_separation_params_match_brute),
    ("graph_core", "ordering_transfer", check_ordering_transfer),
    ("sbm", "spectrum_matches_dense", check_spectrum_matches_dense),
    ("sbm", "sampling_pure_function", check_sampling_pure_function),
    ("sbm", "eigengap_identity_and_signals", check_eigengap_identity_and_signals),
    ("sbm", "scaling_and_eta_guarantee", check_scaling_and_eta_guarantee),
    ("spectral", "eigensystem_contract", check_eigensystem_contract),
    ("spectral", "reconstruction_optimality", check_reconstruction_optimality),
    ("spectral", "gram_and_loss_identity", check_gram_and_loss_identity),
    ("spectral", "rotation_and_sign_determinism", check_rotation_and_sign_determinism),
    ("spectral", "perturbation_bound", check_perturbation_bound),
    ("probe", "mean_zero_rows", check_mean_zero_rows),
    ("probe", "ridge_shrinkage", check_ridge_shrinkage),
    ("probe", "dual_path_agreement", check_dual_path_agreement),
    ("probe", "domain_probe_expected", check_domain_probe_expected),
    ("probe", "cosine_contract", check_cosine_contract),
    ("baselines", "erm_minimizer_properties", check_erm_minimizer_properties),
    ("baselines", "erm_error_values", check_erm_error_values),
    ("baselines", "dann_term", check_dann_term),
    ("baselines", "separation_ordering_and_pipeline", check_separation_ordering_and_pipeline),
    ("experiments", "sweep_deterministic", check_sweep_deterministic),
    ("experiments", "trial_record_schema", check_trial_record_schema),
    ("experiments", "ablation_behavior", check_ablation_behavior),
    ("experiments", "fit_and_tables", check_fit_and_tables),
]

SUITES = tuple(dict.fromkeys(suite for suite, _, _ in CHECKS))


def run_verify(suites: list[str] | None = None, threads: int = 1) -> tuple[int, int, str]:
    """Run the registered checks; returns (passed, failed, report text)."""
    if suites:
        unknown = set(suites) - set(SUITES)
        if unknown:
            raise ValueError(f"unknown suite(s) {sorted(unknown)}; available: {list(SUITES)}")
        selected = [c for c in CHECKS if c[0] in set(suites)]
    else:
        selected = list(CHECKS)
    lines = []
    passed = failed = 0
    with threadpool_limits(limits=1):
        for suite, name, fn in selected:
            try:
                fn()
            except Exception as exc:  # report and keep going
                failed += 1
                lines.append(f"FAIL {suite}.{name}: {exc}")
            else:
                passed += 1
                lines.append(f"ok {suite}.{name}")
    lines.append(f"verify: {passed} passed, {failed} failed")
    return passed, failed, "\n".join(lines) + "\n"
