import numpy as np
import pytest

from ringmotion.model import ModelParams, State, hamiltonian, uniform_state
from ringmotion.sde import (
    NOISE_BLOCK_STEPS,
    NonFiniteState,
    SimConfig,
    load_checkpoint,
    noise_block,
    save_checkpoint,
    simulate,
    simulate_ensemble,
    step,
    trajectory_to_csv,
)


@pytest.fixture
def params():
    return ModelParams(n_agents=20, ring_length=501.0, alpha=1.0, beta=1.0, sigma=1.0)


class TestSimConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(n_steps=0), dict(n_steps=10, dt=0.0), dict(n_steps=10, thinning=0),
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)


class TestNoiseAddressing:
    def test_reproducible(self):
        a = noise_block(123, 0, 5, 20)
        b = noise_block(123, 0, 5, 20)
        assert np.array_equal(a, b)
        assert a.shape == (NOISE_BLOCK_STEPS, 20)

    def test_distinct_streams(self):
        base = noise_block(123, 0, 0, 20)
        assert not np.array_equal(base, noise_block(124, 0, 0, 20))
        assert not np.array_equal(base, noise_block(123, 1, 0, 20))
        assert not np.array_equal(base, noise_block(123, 0, 1, 20))

    def test_standard_normal_moments(self):
        draws = np.concatenate([noise_block(9, 0, b, 64).ravel() for b in range(40)])
        assert abs(draws.mean()) < 4 / np.sqrt(draws.size)
        assert abs(draws.var() - 1.0) < 0.02


class TestStep:
    def test_noise_only_update_at_equilibrium(self):
        # L/N dyadic, so the uniform state is exactly representable and the
        # drift cancels exactly: the velocity update is purely the noise.
        p = ModelParams(8, 64.0, 1.3, 0.9, 0.7)
        st = uniform_state(p)
        xi = noise_block(5, 0, 0, 8)[0]
        out = step(st, p, 1e-3, xi)
        assert np.array_equal(out.p, 0.7 * np.sqrt(1e-3) * xi)
        assert np.array_equal(out.q, st.q + 1e-3 * out.p)

    def test_uniform_translation_noise_free(self):
        p = ModelParams(8, 64.0, 1.0, 1.0, 0.0)
        st = uniform_state(p, mean_velocity=2.0)
        out = step(st, p, 1e-2, np.zeros(8))
        assert np.allclose(out.p, 2.0)
        assert np.allclose(out.q, st.q + 1e-2 * 2.0)

    def test_mean_velocity_telescoping(self, params):
        rng = np.random.default_rng(0)
        for kappa in (2.0, 4.0):
            p = ModelParams(20, 501.0, 1.0, 1.0, 1.0, kappa=kappa)
            st = State(np.sort(rng.uniform(0, 501, 20)), rng.normal(size=20))
            xi = rng.normal(size=20)
            out = step(st, p, 1e-3, xi)
            expected = st.p.mean() + p.sigma * np.sqrt(1e-3) * xi.mean()
            assert out.p.mean() == pytest.approx(expected, abs=1e-13)

    def test_noise_shape_checked(self, params):
        with pytest.raises(ValueError):
            step(uniform_state(params), params, 1e-3, np.zeros(3))


class TestSimulate:
    def test_bit_identical_repeats(self, params):
        cfg = SimConfig(n_steps=1500, seed=42, thinning=10)
        a = simulate(params, cfg)
        b = simulate(params, cfg)
        assert np.array_equal(a.q, b.q) and np.array_equal(a.p, b.p)

    def test_distance_sum_conserved(self, params):
        cfg = SimConfig(n_steps=5000, seed=3, thinning=100)
        traj = simulate(params, cfg)
        sums = traj.distances.sum(axis=1)
        assert np.max(np.abs(sums - 501.0)) <= 1e-6 * 501.0

    def test_thinning_does_not_change_the_path(self, params):
        cfg_all = SimConfig(n_steps=400, seed=11, thinning=1)
        cfg_thin = SimConfig(n_steps=400, seed=11, thinning=40)
        dense = simulate(params, cfg_all)
        thin = simulate(params, cfg_thin)
        assert np.array_equal(thin.q, dense.q[::40])
        assert np.array_equal(thin.p, dense.p[::40])

    def test_records_and_times(self, params):
        cfg = SimConfig(n_steps=100, seed=0, thinning=10)
        traj = simulate(params, cfg)
        assert traj.times.shape == (11,)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(0.1)

    def test_blow_up_reports_step(self):
        p = ModelParams(5, 5.0, 20.0, 0.1, 0.0, kappa=8.0)
        rng = np.random.default_rng(1)
        bad = State(np.cumsum(rng.uniform(0.1, 2.0, 5)), np.zeros(5))
        with pytest.raises(NonFiniteState) as err:
            simulate(p, SimConfig(n_steps=20000, dt=0.5, seed=0, thinning=100),
                     initial=bad)
        assert 0 <= err.value.step_index < 20000

    def test_deterministic_energy_decay_and_relaxation(self):
        # sigma = 0, kappa = 2: the energy is non-increasing along the path
        # and the state relaxes to the uniform configuration.
        p = ModelParams(6, 48.0, 1.5, 1.2, 0.0)
        rng = np.random.default_rng(7)
        q0 = np.arange(6) * 8.0 + rng.normal(scale=0.4, size=6)
        p0 = rng.normal(scale=0.4, size=6)
        init = State(q0, p0)
        traj = simulate(p, SimConfig(n_steps=60_000, seed=0, thinning=200),
                        initial=init)
        energies = np.array([hamiltonian(traj.state(i), p)
                             for i in range(traj.times.size)])
        assert np.all(np.diff(energies) <= 1e-9)
        final = traj.state(-1)
        assert np.max(np.abs(traj.distances[-1] - 8.0)) < 1e-6
        assert np.max(np.abs(final.p - p0.mean())) < 1e-6


class TestEnsemble:
    def test_matches_single_runs(self, params):
        cfg = SimConfig(n_steps=700, seed=5, thinning=70)
        ens = simulate_ensemble(params, cfg, n_replicas=3)
        for r in range(3):
            tr = simulate(params, cfg, replica=r)
            assert np.array_equal(ens.p_final[r], tr.p[-1])
            assert np.array_equal(ens.v_p[:, r], tr.p.var(axis=1))
            assert np.array_equal(ens.v_q[:, r], tr.distances.var(axis=1))

    def test_first_replica_offset(self, params):
        cfg = SimConfig(n_steps=300, seed=5, thinning=300)
        shifted = simulate_ensemble(params, cfg, n_replicas=2, first_replica=7)
        direct = simulate(params, cfg, replica=8)
        assert np.array_equal(shifted.p_final[1], direct.p[-1])

    def test_mean_velocity_brownian_law(self):
        # Sample variance of the mean velocity at t = 1 matches sigma^2 t / N
        # within three standard errors, for both exponents.
        for kappa, seed in ((2.0, 1), (4.0, 2)):
            p = ModelParams(20, 501.0, 1.0, 1.0, 1.0, kappa=kappa)
            cfg = SimConfig(n_steps=1000, dt=1e-3, seed=seed, thinning=1000)
            ens = simulate_ensemble(p, cfg, n_replicas=600)
            sample_var = ens.p_bar[-1].var(ddof=1)
            target = 1.0 / 20
            tol = 3 * target * np.sqrt(2 / 599)
            assert abs(sample_var - target) <= tol

    def test_weak_error_within_monte_carlo_bars(self):
        # E[z(t)] from replicas matches the exact mean within 3 standard
        # errors at both step sizes (gentle spectrum, so the integrator bias
        # stays below the Monte-Carlo resolution).
        from ringmotion.analytic import moments_Z
        from ringmotion.model import distances, state_to_z
        from ringmotion.spectral import analyze

        p = ModelParams(5, 25.0, 0.3, 0.5, 0.5)
        rng = np.random.default_rng(3)
        q0 = np.arange(5) * 5.0 + rng.normal(scale=0.2, size=5)
        p0 = rng.normal(scale=0.2, size=5)
        init = State(q0, p0)
        exact = moments_Z(p, analyze(p), state_to_z(init, p), 1.0).mean
        replicas = 4000
        for dt, seed in ((1e-2, 11), (1e-3, 12)):
            steps = int(round(1.0 / dt))
            cfg = SimConfig(n_steps=steps, dt=dt, seed=seed, thinning=steps,
                            initial=init)
            ens = simulate_ensemble(p, cfg, n_replicas=replicas)
            Q = distances(ens.q_final, p.ring_length)
            se_q = Q.std(axis=0, ddof=1) / np.sqrt(replicas)
            se_p = ens.p_final.std(axis=0, ddof=1) / np.sqrt(replicas)
            assert np.all(np.abs(Q.mean(axis=0) - exact[:5]) <= 3 * se_q)
            assert np.all(np.abs(ens.p_final.mean(axis=0) - exact[5:]) <= 3 * se_p)


class TestPersistence:
    def test_trajectory_csv_deterministic(self, params, tmp_path):
        cfg = SimConfig(n_steps=200, seed=9, thinning=20)
        traj = simulate(params, cfg)
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        trajectory_to_csv(traj, f1)
        trajectory_to_csv(traj, f2)
        assert f1.read_bytes() == f2.read_bytes()
        lines = f1.read_text().splitlines()
        assert lines[0] == "# seed=9"
        header_row = next(l for l in lines if not l.startswith("#"))
        assert header_row.split(",")[:2] == ["t", "q_1"]
        assert header_row.split(",")[21] == "p_1"

    def test_wrapped_positions_in_range(self, params, tmp_path):
        cfg = SimConfig(n_steps=200, seed=9, thinning=20)
        traj = simulate(params, cfg)
        out = tmp_path / "w.csv"
        trajectory_to_csv(traj, out, wrapped=True)
        rows = np.loadtxt(out, delimiter=",", skiprows=12)
        assert rows[:, 1:21].min() >= 0.0
        assert rows[:, 1:21].max() < 501.0

    def test_checkpoint_round_trip_and_resume(self, params, tmp_path):
        cfg = SimConfig(n_steps=600, seed=21, thinning=100)
        full = simulate(params, cfg)
        half = simulate(params, SimConfig(n_steps=300, seed=21, thinning=100))
        ckpt = tmp_path / "state.npz"
        save_checkpoint(ckpt, params, cfg, 300, half.state(-1))
        params2, cfg2, k0, state2 = load_checkpoint(ckpt)
        assert params2 == params and cfg2 == cfg and k0 == 300
        resumed = simulate(params2, cfg2, from_step=k0, initial=state2)
        assert np.array_equal(resumed.q[-1], full.q[-1])
        assert np.array_equal(resumed.p[-1], full.p[-1])
