"""Seeded Euler-Maruyama integration of the ring dynamics.

One step advances the velocities explicitly from the current state and then
the positions with the freshly updated velocities:

    p+ = p + [U'(Q_n) - U'(Q_{n-1})] dt + beta [p_{n+1} - 2 p_n + p_{n-1}] dt
           + sigma xi sqrt(dt)
    q+ = q + dt p+

The position update telescopes around the ring, so the total neighbour
distance is conserved exactly (up to rounding) by every step.

Noise is counter-addressed: the draw for (seed, replica, step, agent) comes
from a Philox stream keyed by (seed, replica) with the block counter set
from the step index. Thinning, checkpoint restarts, and running replicas
side by side therefore never perturb the noise sequence, and an ensemble
run is bit-identical to the stack of the corresponding single runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, State, distances, uniform_state

__all__ = [
    "NonFiniteState",
    "SimConfig",
    "Trajectory",
    "EnsembleSeries",
    "noise_block",
    "step",
    "simulate",
    "simulate_ensemble",
    "trajectory_to_csv",
    "save_checkpoint",
    "load_checkpoint",
]

# Steps per Philox counter block. Fixed so the noise value at a given
# (seed, replica, step, agent) never depends on how a run is segmented.
NOISE_BLOCK_STEPS = 256

_U64 = 2**64


class NonFiniteState(RuntimeError):
    """The integrator produced a non-finite value (step size blow-up)."""

    def __init__(self, step_index: int):
        super().__init__(f"non-finite state after step {step_index}; "
                         "reduce dt or the potential exponent")
        self.step_index = step_index


@dataclass(frozen=True)
class SimConfig:
    """Integration settings for one run.

    dt        time step
    n_steps   number of steps to take
    seed      top-level seed; all noise derives from (seed, replica, step)
    thinning  record every k-th step (the initial state is always recorded)
    initial   starting state; None means the uniform zero-velocity start
    """

    n_steps: int
    dt: float = 1e-3
    seed: int = 0
    thinning: int = 1
    initial: State | None = None

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.thinning < 1:
            raise ValueError(f"thinning must be >= 1, got {self.thinning}")


@dataclass(frozen=True)
class Trajectory:
    """Thinned record of one simulated path."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    params: ModelParams
    config: SimConfig
    replica: int = 0

    @property
    def distances(self) -> np.ndarray:
        return distances(self.q, self.params.ring_length)

    def state(self, index: int = -1) -> State:
        return State(self.q[index], self.p[index])


@dataclass(frozen=True)
class EnsembleSeries:
    """Per-replica observable series recorded during an ensemble run.

    Arrays are shaped (n_records, n_replicas) except the final states,
    which are (n_replicas, n_agents). Replica r reproduces bit-identically
    the single run with the same seed and replica index r.
    """

    times: np.ndarray
    p_bar: np.ndarray
    v_p: np.ndarray
    v_q: np.ndarray
    q_final: np.ndarray
    p_final: np.ndarray
    params: ModelParams
    config: SimConfig
    replicas: tuple[int, ...] = ()


def noise_block(seed: int, replica: int, block: int, n_agents: int) -> np.ndarray:
    """Standard-normal block of shape (NOISE_BLOCK_STEPS, n_agents).

    Row r holds the agent noises for step block * NOISE_BLOCK_STEPS + r.
    """
    bg = np.random.Philox(key=[seed % _U64, replica % _U64],
                          counter=[0, 0, 0, block % _U64])
    return np.random.Generator(bg).standard_normal((NOISE_BLOCK_STEPS, n_agents))


class _Stepper:
    """Precomputed one-step update; vectorised over leading (replica) axes.

    Keeps the cyclic neighbour index arrays and all dt-scaled scalars out of
    the hot loop. ``advance`` implements the literal scheme for any kappa.
    """

    def __init__(self, params: ModelParams, dt: float):
        n = params.n_agents
        self.ip1 = np.concatenate([np.arange(1, n), [0]])
        self.im1 = np.concatenate([[n - 1], np.arange(n - 1)])
        self.dt = dt
        self.dt_beta = dt * params.beta
        self.noise_scale = params.sigma * np.sqrt(dt)
        self.ring_length = params.ring_length
        self.quadratic = params.kappa == 2.0
        self.a2_dt = params.alpha**2 * dt
        self.stiff_dt = params.alpha**params.kappa * dt
        self.expo = params.kappa - 1.0

    def advance(self, q: np.ndarray, p: np.ndarray,
                xi: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
        Q = q[..., self.ip1] - q
        Q[..., -1] += self.ring_length
        if self.quadratic:
            force_dt = self.a2_dt * (Q - Q[..., self.im1])
        else:
            du = np.sign(Q) * self.stiff_dt * np.abs(Q) ** self.expo
            force_dt = du - du[..., self.im1]
        lap = p[..., self.ip1] + p[..., self.im1] - 2.0 * p
        p_new = p + force_dt + self.dt_beta * lap
        if xi is not None and self.noise_scale != 0.0:
            p_new += self.noise_scale * xi
        q_new = q + self.dt * p_new
        return q_new, p_new


def step(state: State, params: ModelParams, dt: float, noise: np.ndarray) -> State:
    """Advance one state by one step with externally supplied noise draws."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape != state.q.shape:
        raise ValueError(f"noise must have shape {state.q.shape}, got {noise.shape}")
    q, p = _Stepper(params, dt).advance(state.q, state.p, noise)
    if not np.isfinite(np.sum(p) + np.sum(q)):
        raise NonFiniteState(0)
    return State(q, p)


def _initial_arrays(params: ModelParams, config: SimConfig,
                    initial: State | None) -> tuple[np.ndarray, np.ndarray]:
    state = initial if initial is not None else config.initial
    if state is None:
        state = uniform_state(params)
    if state.n_agents != params.n_agents:
        raise ValueError(f"initial state has {state.n_agents} agents, "
                         f"params expect {params.n_agents}")
    return state.q.copy(), state.p.copy()


def simulate(params: ModelParams, config: SimConfig, replica: int = 0,
             from_step: int = 0, initial: State | None = None) -> Trajectory:
    """Integrate a single path; deterministic in (params, config, replica).

    ``from_step``/``initial`` resume a checkpointed run: because the noise
    is addressed by absolute step index, the resumed path is bit-identical
    to the uninterrupted one.
    """
    n = params.n_agents
    q, p = _initial_arrays(params, config, initial)
    dt, thin, seed = config.dt, config.thinning, config.seed
    stepper = _Stepper(params, dt)
    draw_noise = params.sigma != 0.0
    times = [from_step * dt]
    qs = [q.copy()]
    ps = [p.copy()]
    block_index = -1
    block = None
    # Overflow is how blow-up manifests; it is detected and raised, so the
    # intermediate warnings are noise.
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(from_step, config.n_steps):
            xi = None
            if draw_noise:
                b, r = divmod(k, NOISE_BLOCK_STEPS)
                if b != block_index:
                    block = noise_block(seed, replica, b, n)
                    block_index = b
                xi = block[r]
            q, p = stepper.advance(q, p, xi)
            if not np.isfinite(np.sum(p)):
                raise NonFiniteState(k)
            if (k + 1) % thin == 0:
                times.append((k + 1) * dt)
                qs.append(q.copy())
                ps.append(p.copy())
    return Trajectory(times=np.array(times), q=np.array(qs), p=np.array(ps),
                      params=params, config=config, replica=replica)


def simulate_ensemble(params: ModelParams, config: SimConfig, n_replicas: int,
                      first_replica: int = 0) -> EnsembleSeries:
    """Advance ``n_replicas`` independent paths in lockstep.

    All replicas share the initial state and the top-level seed; replica r
    draws the noise stream (seed, first_replica + r). Only the ensemble
    observables (mean velocity, velocity variance, distance variance) are
    recorded at the thinning interval, so long runs stay memory-bounded.
    """
    n = params.n_agents
    q1, p1 = _initial_arrays(params, config, None)
    q = np.tile(q1, (n_replicas, 1))
    p = np.tile(p1, (n_replicas, 1))
    dt, thin, seed = config.dt, config.thinning, config.seed
    replicas = tuple(range(first_replica, first_replica + n_replicas))

    times = [0.0]
    p_bar = [p.mean(axis=1)]
    v_p = [p.var(axis=1)]
    v_q = [distances(q, params.ring_length).var(axis=1)]

    stepper = _Stepper(params, dt)
    draw_noise = params.sigma != 0.0
    block_index = -1
    block = None
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(config.n_steps):
            xi = None
            if draw_noise:
                b, r = divmod(k, NOISE_BLOCK_STEPS)
                if b != block_index:
                    block = np.stack([noise_block(seed, rep, b, n)
                                      for rep in replicas], axis=1)
                    block_index = b
                xi = block[r]
            q, p = stepper.advance(q, p, xi)
            if not np.isfinite(np.sum(p)):
                raise NonFiniteState(k)
            if (k + 1) % thin == 0:
                times.append((k + 1) * dt)
                p_bar.append(p.mean(axis=1))
                v_p.append(p.var(axis=1))
                v_q.append(distances(q, params.ring_length).var(axis=1))
    return EnsembleSeries(times=np.array(times), p_bar=np.array(p_bar),
                          v_p=np.array(v_p), v_q=np.array(v_q),
                          q_final=q, p_final=p, params=params, config=config,
                          replicas=replicas)


def trajectory_to_csv(traj: Trajectory, path, wrapped: bool = False) -> None:
    """Write a trajectory as CSV: header t, q_1..q_N, p_1..p_N.

    Leading comment rows record the seed and the model parameters so the
    file is self-describing. ``wrapped`` folds positions onto [0, L).
    """
    n = traj.params.n_agents
    q = np.mod(traj.q, traj.params.ring_length) if wrapped else traj.q
    data = np.column_stack([traj.times, q, traj.p])
    header_cols = (["t"] + [f"q_{i + 1}" for i in range(n)]
                   + [f"p_{i + 1}" for i in range(n)])
    meta = {
        "seed": traj.config.seed,
        "replica": traj.replica,
        "n_agents": n,
        "ring_length": traj.params.ring_length,
        "alpha": traj.params.alpha,
        "beta": traj.params.beta,
        "sigma": traj.params.sigma,
        "kappa": traj.params.kappa,
        "dt": traj.config.dt,
        "thinning": traj.config.thinning,
        "wrapped": int(wrapped),
    }
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header_cols) + "\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def save_checkpoint(path, params: ModelParams, config: SimConfig,
                    step_index: int, state: State) -> None:
    """Binary checkpoint: parameters, config, absolute step index, state, seed."""
    np.savez(
        path,
        params=np.array([params.n_agents, params.ring_length, params.alpha,
                         params.beta, params.sigma, params.kappa]),
        config=np.array([config.dt, config.n_steps, config.seed, config.thinning]),
        step_index=np.array(step_index),
        q=state.q,
        p=state.p,
    )


def load_checkpoint(path) -> tuple[ModelParams, SimConfig, int, State]:
    with np.load(path) as data:
        pv = data["params"]
        cv = data["config"]
        params = ModelParams(n_agents=int(pv[0]), ring_length=pv[1], alpha=pv[2],
                             beta=pv[3], sigma=pv[4], kappa=pv[5])
        config = SimConfig(dt=float(cv[0]), n_steps=int(cv[1]), seed=int(cv[2]),
                           thinning=int(cv[3]))
        step_index = int(data["step_index"])
        state = State(data["q"], data["p"])
    return params, config, step_index, state
