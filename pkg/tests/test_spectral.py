import numpy as np
import pytest
import scipy.linalg

from ringmotion.model import ModelParams
from ringmotion.spectral import (
    ImaginaryResidueTooLarge,
    analyze,
    classify_damping,
    expm_tB,
    realify,
    slowest_decay_rate,
)


def make_params(n, alpha, beta):
    return ModelParams(n_agents=n, ring_length=float(10 * n), alpha=alpha,
                       beta=beta, sigma=1.0)


def random_nondegenerate(rng, n_low=3, n_high=30):
    while True:
        n = int(rng.integers(n_low, n_high + 1))
        p = make_params(n, float(rng.uniform(0.2, 2.5)), float(rng.uniform(0.2, 2.5)))
        data = analyze(p)
        if data.diagonalizable and data.min_gap > 1e-3:
            return p, data


class TestModeQuantities:
    def test_mu_n4(self):
        data = analyze(make_params(4, 1.0, 1.0))
        assert data.mu[1] == pytest.approx(2.0, abs=1e-14)

    def test_mu_identity(self):
        data = analyze(make_params(17, 0.5, 1.0))
        j = np.arange(17)
        assert np.allclose(data.mu, 4 * np.sin(np.pi * j / 17) ** 2, atol=1e-12)
        assert np.allclose(data.kappa_j * np.conj(data.kappa_j), data.mu, atol=1e-12)

    def test_fourier_vectors_orthonormal(self):
        data = analyze(make_params(12, 0.7, 1.3))
        v = data.fourier_vectors
        assert np.allclose(v.conj().T @ v, np.eye(12), atol=1e-12)

    def test_eigenvectors_of_difference_matrix(self):
        p = make_params(9, 0.7, 1.3)
        data = analyze(p)
        from ringmotion.model import build_matrices
        A = build_matrices(p).A
        for j in range(9):
            vj = data.fourier_vectors[:, j]
            assert np.allclose(A @ vj, data.kappa_j[j] * vj, atol=1e-12)
            assert np.allclose(A.T @ vj, np.conj(data.kappa_j[j]) * vj, atol=1e-12)


class TestEigenvalues:
    def test_frozen_overdamped_example(self):
        # Oracle: numpy.roots on z^2 + mu_1 z + alpha^2 mu_1 for N=20,
        # beta=1, alpha=0.1; both roots real negative.
        data = analyze(make_params(20, 0.1, 1.0))
        assert data.mu[1] == pytest.approx(0.09788696740969294, abs=1e-15)
        assert data.lambdas[1, 0] == pytest.approx(-0.0865811636, abs=1e-9)
        assert data.lambdas[1, 1] == pytest.approx(-0.0113058038, abs=1e-9)
        assert np.all(np.abs(data.lambdas[1:].imag) == 0.0)

    def test_degenerate_mode_detected(self):
        data = analyze(make_params(20, 1.0, 1.0))
        assert data.degenerate_modes == {10}
        assert not data.diagonalizable
        assert data.W is None and data.W_inv is None
        assert data.lambdas[10, 0] == pytest.approx(-2.0)
        assert data.lambdas[10, 1] == pytest.approx(-2.0)

    def test_vieta_relations(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            p, data = random_nondegenerate(rng)
            prod = data.lambdas[:, 0] * data.lambdas[:, 1]
            total = data.lambdas[:, 0] + data.lambdas[:, 1]
            assert np.allclose(prod, p.alpha**2 * data.mu, atol=1e-10)
            assert np.allclose(total, -p.beta * data.mu, atol=1e-10)

    def test_zero_mode_and_stability(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            _, data = random_nondegenerate(rng)
            assert data.lambdas[0, 0] == 0 and data.lambdas[0, 1] == 0
            assert np.all(data.lambdas[1:].real < 0)

    def test_reflection_symmetry_and_count(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            p, data = random_nondegenerate(rng)
            n = p.n_agents
            for j in range(1, n):
                assert np.allclose(data.lambdas[j], data.lambdas[n - j], atol=1e-13)
            distinct = np.unique(np.round(data.lambdas.ravel(), 10))
            assert distinct.size == 1 + 2 * (n // 2)

    def test_underdamped_conjugate_pairs(self):
        p = make_params(10, 2.0, 0.5)  # beta < alpha, N even: all underdamped
        data = analyze(p)
        labels = classify_damping(data, p)
        assert labels[0] == "zero"
        assert all(lbl == "underdamped" for lbl in labels[1:])
        for j in range(1, 10):
            l1, l2 = data.lambdas[j]
            assert l1 == pytest.approx(np.conj(l2))
            assert l1.real == pytest.approx(-0.5 * p.beta * data.mu[j], abs=1e-12)


class TestClassifyDamping:
    def test_scenario_one_all_overdamped(self):
        p = make_params(20, 0.1, 1.0)
        labels = classify_damping(analyze(p), p)
        assert labels[0] == "zero"
        assert all(lbl == "overdamped" for lbl in labels[1:])

    def test_critical_mode(self):
        p = make_params(20, 1.0, 1.0)
        labels = classify_damping(analyze(p), p)
        assert labels[10] == "critical"
        assert all(lbl == "underdamped" for lbl in labels[1:10])


class TestEigenbasis:
    def test_factorisation_and_inverse(self):
        rng = np.random.default_rng(10)
        for _ in range(15):
            p, data = random_nondegenerate(rng)
            n = p.n_agents
            lam = data.eigenvalue_order
            resid = np.max(np.abs(data.B @ data.W - data.W * lam))
            assert resid <= 1e-10 * np.max(np.abs(data.B))
            assert np.max(np.abs(data.W @ data.W_inv - np.eye(2 * n))) <= 1e-10

    def test_min_gap_diagnostic(self):
        data = analyze(make_params(20, 0.1, 1.0))
        gaps = np.abs(data.lambdas[1:, 0] - data.lambdas[1:, 1])
        assert data.min_gap == pytest.approx(gaps.min())


class TestMatrixExponential:
    def test_identity_at_zero(self):
        data = analyze(make_params(8, 0.9, 1.1))
        assert np.allclose(expm_tB(data, 0.0), np.eye(16), atol=1e-12)

    def test_against_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            p, data = random_nondegenerate(rng, n_high=15)
            t = float(rng.uniform(0.1, 3.0))
            dense = scipy.linalg.expm(t * data.B)
            assert np.max(np.abs(expm_tB(data, t) - dense)) <= 1e-8

    def test_semigroup(self):
        data = analyze(make_params(9, 1.4, 0.8))
        e1 = expm_tB(data, 0.6)
        e2 = expm_tB(data, 1.1)
        assert np.max(np.abs(expm_tB(data, 1.7) - e1 @ e2)) <= 1e-8

    def test_zero_mode_directions_fixed(self):
        data = analyze(make_params(7, 1.2, 0.9))
        n = 7
        w01 = np.concatenate([np.ones(n), np.zeros(n)]) / np.sqrt(n)
        w02 = np.concatenate([np.zeros(n), np.ones(n)]) / np.sqrt(n)
        e = expm_tB(data, 2.5)
        assert np.allclose(e @ w01, w01, atol=1e-10)
        assert np.allclose(e @ w02, w02, atol=1e-10)

    def test_degenerate_falls_back_to_dense(self):
        p = make_params(4, 0.8, 0.8)  # j=2 has mu=4: beta^2 mu = 4 alpha^2
        data = analyze(p)
        assert data.degenerate_modes == {2}
        t = 0.9
        assert np.allclose(expm_tB(data, t), scipy.linalg.expm(t * data.B), atol=1e-14)

    def test_negative_time_rejected(self):
        data = analyze(make_params(5, 1.0, 1.0))
        with pytest.raises(ValueError):
            expm_tB(data, -0.1)

    def test_realify_guards_imaginary_residue(self):
        with pytest.raises(ImaginaryResidueTooLarge):
            realify(np.array([[1.0 + 1e-6j]]), "test")
        out = realify(np.array([[1.0 + 1e-12j]]), "test")
        assert out.dtype == float


def test_slowest_decay_rate_overdamped():
    # For strongly overdamped modes lambda_{j,2} tends to -alpha^2/beta from
    # below as mu grows, so the slowest rate sits at the largest mu (j = N/2):
    # (beta mu - sqrt(beta^2 mu^2 - 4 alpha^2 mu)) / 2 with mu = 4.
    p = make_params(20, 0.1, 1.0)
    data = analyze(p)
    expected = (4.0 - np.sqrt(16.0 - 4 * 0.01 * 4.0)) / 2.0
    assert slowest_decay_rate(data) == pytest.approx(expected, abs=1e-12)


def test_slowest_decay_rate_underdamped():
    p = make_params(20, 1.0, 1.0)
    data = analyze(p)
    mu1 = 2 - 2 * np.cos(np.pi / 10)
    assert slowest_decay_rate(data) == pytest.approx(mu1 / 2, abs=1e-12)
