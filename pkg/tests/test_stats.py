import numpy as np
import pytest

from ringmotion.analytic import NotPSD, k_closed_form
from ringmotion.model import ModelParams, State, uniform_state
from ringmotion.stats import (
    DegenerateSeries,
    StatSeries,
    acf,
    burn_in_time,
    ks_critical_value,
    ks_two_sample,
    mc_chi_squared,
    observables,
    write_acf_csv,
    write_histogram_csv,
    write_samples_csv,
    write_series_csv,
)


@pytest.fixture
def params():
    return ModelParams(n_agents=20, ring_length=501.0, alpha=1.0, beta=1.0, sigma=1.0)


class TestObservables:
    def test_uniform_state(self, params):
        obs = observables(uniform_state(params, 0.7), params)
        assert obs.p_bar == pytest.approx(0.7)
        assert obs.v_p == pytest.approx(0.0, abs=1e-25)
        assert obs.v_q == pytest.approx(0.0, abs=1e-25)
        assert np.allclose(obs.d, 0.0)

    def test_two_agent_disturbance(self, params):
        p_vec = np.zeros(20)
        p_vec[0], p_vec[1] = 1.0, -1.0
        obs = observables(State(uniform_state(params).q, p_vec), params)
        assert obs.p_bar == 0.0
        assert obs.v_p == pytest.approx(0.1)

    def test_deviation_equals_centering(self, params):
        from ringmotion.model import distances

        rng = np.random.default_rng(0)
        for _ in range(10):
            st = State(np.sort(rng.uniform(0, 501, 20)), rng.normal(size=20))
            obs = observables(st, params)
            # E = Q - (L/N) 1 coincides with the centering projection of Q
            # because the distances sum to L identically.
            Q = distances(st.q, 501.0)
            assert np.allclose(obs.e, Q - Q.mean(), atol=1e-9)
            # two-path velocity variance
            explicit = np.sum((st.p - st.p.mean()) ** 2) / 20
            assert obs.v_p == pytest.approx(explicit, abs=1e-12)


class TestStatSeries:
    def test_label_checked(self):
        with pytest.raises(ValueError):
            StatSeries(np.ones(3), 0.1, "bogus")

    def test_nonnegative_labels_checked(self):
        with pytest.raises(ValueError):
            StatSeries(np.array([0.1, -0.2]), 0.1, "V_p")

    def test_times(self):
        s = StatSeries(np.ones(4), 0.5, "mean_velocity")
        assert np.allclose(s.times, [0.0, 0.5, 1.0, 1.5])


class TestAcf:
    def test_lag_zero_is_one(self):
        rng = np.random.default_rng(1)
        rho = acf(rng.normal(size=500), 10)
        assert rho[0] == pytest.approx(1.0)

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateSeries):
            acf(np.full(100, 2.5), 3)

    def test_alternating_series(self):
        rho = acf(np.tile([1.0, -1.0], 400), 1)
        assert rho[1] == pytest.approx(-1.0, abs=2e-3)

    def test_matches_direct_estimator(self):
        # FFT evaluation against the direct O(n h) definition.
        rng = np.random.default_rng(2)
        x = np.cumsum(rng.normal(size=300))
        rho = acf(x, 20)
        xc = x - x.mean()
        direct = np.array([np.dot(xc[: 300 - h], xc[h:]) / 300 for h in range(21)])
        assert np.allclose(rho, direct / direct[0], atol=1e-10)

    def test_accepts_stat_series(self):
        series = StatSeries(np.sin(np.arange(200) * 0.3), 0.1, "mean_velocity")
        rho = acf(series, 5)
        assert rho.shape == (6,)

    def test_max_lag_bounds(self):
        with pytest.raises(ValueError):
            acf(np.ones(10), 10)


class TestMcChiSquared:
    def test_zero_covariance(self):
        samples = mc_chi_squared(np.zeros((5, 5)), 100, seed=0)
        assert np.all(samples == 0.0)

    def test_identity_covariance_mean_one(self):
        samples = mc_chi_squared(np.eye(20), 50_000, seed=1)
        se = samples.std() / np.sqrt(samples.size)
        assert abs(samples.mean() - 1.0) <= 3 * se

    def test_singular_reference_mean(self):
        # cov = sigma^2 K / (2 beta) for the built-in scenario: mean 0.83125.
        samples = mc_chi_squared(k_closed_form(20) / 2.0, 100_000, seed=2)
        se = samples.std() / np.sqrt(samples.size)
        assert abs(samples.mean() - 0.83125) <= 3 * se

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            mc_chi_squared(np.diag([1.0, -0.5]), 10, seed=0)

    def test_permutation_invariance(self):
        cov = k_closed_form(12) / 2.0
        rot = np.roll(np.eye(12), 3, axis=0)
        a = mc_chi_squared(cov, 50_000, seed=3)
        b = mc_chi_squared(rot.T @ cov @ rot, 50_000, seed=4)
        se = np.hypot(a.std() / np.sqrt(a.size), b.std() / np.sqrt(b.size))
        assert abs(a.mean() - b.mean()) <= 3 * se

    def test_reproducible(self):
        assert np.array_equal(mc_chi_squared(np.eye(3), 50, seed=9),
                              mc_chi_squared(np.eye(3), 50, seed=9))


class TestKs:
    def test_identical_samples(self):
        x = np.random.default_rng(0).normal(size=100)
        stat, p = ks_two_sample(x, x)
        assert stat == 0.0 and p == pytest.approx(1.0)

    def test_separated_normals(self):
        rng = np.random.default_rng(1)
        stat, p = ks_two_sample(rng.normal(size=10_000), rng.normal(3.0, 1.0, 10_000))
        assert stat > 0.5
        assert p < 1e-10

    def test_same_law_stays_below_critical(self):
        # Twenty seeded draws of the same chi-squared-type law against the
        # 1% critical value: at a true exceedance rate of 1% more than one
        # failure in twenty is already a 1.7%-probability event.
        cov = k_closed_form(10) / 2.0
        crit = ks_critical_value(0.01, 4000, 4000)
        failures = 0
        for seed in range(20):
            a = mc_chi_squared(cov, 4000, seed=100 + seed)
            b = mc_chi_squared(cov, 4000, seed=200 + seed)
            stat, _ = ks_two_sample(a, b)
            failures += stat >= crit
        assert failures <= 1

    def test_critical_value_reference(self):
        assert ks_critical_value(0.01, 4000, 4000) == pytest.approx(
            1.6276 * np.sqrt(2 / 4000), rel=1e-3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_two_sample(np.array([]), np.ones(3))


class TestCsvWriters:
    def test_series_round_trip(self, tmp_path):
        series = StatSeries(np.linspace(0, 1, 5), 0.25, "V_p")
        path = tmp_path / "series.csv"
        write_series_csv(series, path, meta={"seed": 3})
        lines = path.read_text().splitlines()
        assert "# label=V_p" in lines
        assert "# seed=3" in lines
        data = np.loadtxt(path, delimiter=",", skiprows=4)
        assert np.allclose(data[:, 1], series.values)

    def test_acf_csv(self, tmp_path):
        path = tmp_path / "acf.csv"
        write_acf_csv(np.array([1.0, 0.5, 0.2]), 0.1, path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(data[:, 0], [0.0, 0.1, 0.2])

    def test_histogram_counts(self, tmp_path):
        path = tmp_path / "hist.csv"
        write_histogram_csv(np.arange(100.0), path, bins=10)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (10, 3)
        assert data[:, 2].sum() == 100

    def test_samples_csv(self, tmp_path):
        path = tmp_path / "samples.csv"
        write_samples_csv(np.array([1.5, 2.5]), path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(data, [1.5, 2.5])


def test_burn_in_time_scenario(params):
    mu1 = 2 - 2 * np.cos(np.pi / 10)
    assert burn_in_time(params) == pytest.approx(10 / mu1)
