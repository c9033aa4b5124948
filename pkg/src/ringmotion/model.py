"""Ring model: parameters, state, structural matrices, drift, and energy.

N agents move on a ring of circumference L. Agent n accelerates on the
velocity differences to its two neighbours (rate beta) and on the distances
to them through a convex interaction potential

    U(x) = (alpha |x|)**kappa / kappa,

and is driven by agent-individual white noise of volatility sigma. The
neighbour distances Q (with the wrap-around distance closing the ring) and
the velocities p form the natural coordinates: stacked as z = (Q, p), the
drift splits into a skew-symmetric coupling J, a positive-semidefinite
dissipation R, and a noise injection G acting on the velocity block. For
kappa = 2 the drift is the linear map B and z is an Ornstein-Uhlenbeck
process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ValidationError",
    "ModelParams",
    "State",
    "StructuralMatrices",
    "build_matrices",
    "distances",
    "uniform_state",
    "wrap_positions",
    "potential",
    "potential_derivative",
    "drift",
    "hamiltonian",
    "hamiltonian_gradient",
    "state_to_z",
]


class ValidationError(ValueError):
    """A parameter or configuration value is outside its admissible range."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the ring system.

    n_agents    number of agents N, at least 3
    ring_length circumference L > 0 of the periodic domain
    alpha       interaction stiffness > 0 of the distance potential
    beta        dissipation rate > 0 of the velocity coupling
    sigma       noise volatility >= 0
    kappa       potential exponent > 1; kappa = 2 gives the linear model
    """

    n_agents: int
    ring_length: float
    alpha: float
    beta: float
    sigma: float
    kappa: float = 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_agents", int(self.n_agents))
        for name in ("ring_length", "alpha", "beta", "sigma", "kappa"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require(self.n_agents >= 3, f"n_agents must be >= 3, got {self.n_agents}")
        _require(self.ring_length > 0, f"ring_length must be > 0, got {self.ring_length}")
        _require(self.alpha > 0, f"alpha must be > 0, got {self.alpha}")
        _require(self.beta > 0, f"beta must be > 0, got {self.beta}")
        _require(self.sigma >= 0, f"sigma must be >= 0, got {self.sigma}")
        _require(self.kappa > 1, f"kappa must be > 1, got {self.kappa}")

    @property
    def is_quadratic(self) -> bool:
        return self.kappa == 2.0


@dataclass(frozen=True)
class State:
    """Absolute unwrapped positions q and velocities p of all agents.

    Positions are stored unwrapped so trajectories stay continuous; wrapping
    onto [0, L) is a display concern (see :func:`wrap_positions`). Because q
    is absolute, the derived neighbour distances sum to the ring length
    identically.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        q = np.ascontiguousarray(self.q, dtype=float)
        p = np.ascontiguousarray(self.p, dtype=float)
        _require(q.ndim == 1 and p.shape == q.shape,
                 f"q and p must be 1-d arrays of equal length, got {q.shape} and {p.shape}")
        _require(q.size >= 3, f"need at least 3 agents, got {q.size}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n_agents(self) -> int:
        return self.q.size


def distances(q: np.ndarray, ring_length: float) -> np.ndarray:
    """Neighbour distances Q_n = q_{n+1} - q_n, with Q_N closing the ring.

    Vectorised over leading axes; the agent index is the last axis. The
    entries sum to ``ring_length`` exactly (up to rounding) for any q.
    """
    q = np.asarray(q, dtype=float)
    out = np.roll(q, -1, axis=-1) - q
    out[..., -1] += ring_length
    return out


def uniform_state(params: ModelParams, mean_velocity: float = 0.0) -> State:
    """Equidistant configuration Q_n = L/N with all velocities equal."""
    n = params.n_agents
    q = np.arange(n) * (params.ring_length / n)
    p = np.full(n, float(mean_velocity))
    return State(q, p)


def wrap_positions(q: np.ndarray, ring_length: float) -> np.ndarray:
    """Positions folded onto [0, L) for display."""
    return np.mod(q, ring_length)


@dataclass(frozen=True)
class StructuralMatrices:
    """Constant matrices of the ring dynamics in z = (Q, p) coordinates.

    A  N x N cyclic forward difference (rows sum to zero)
    M  N x N centering projector I - (1/N) 11^T
    B  2N x 2N drift matrix of the linear (kappa = 2) system
    J  2N x 2N skew-symmetric coupling block matrix
    R  2N x 2N symmetric psd dissipation block matrix
    G  2N x N noise injection, sigma * I into the velocity block
    """

    A: np.ndarray
    M: np.ndarray
    B: np.ndarray
    J: np.ndarray
    R: np.ndarray
    G: np.ndarray


def build_matrices(params: ModelParams) -> StructuralMatrices:
    """Assemble A, M, B, J, R, G for the given parameters."""
    n = params.n_agents
    A = -np.eye(n) + np.eye(n, k=1)
    A[n - 1, 0] = 1.0
    M = np.eye(n) - np.full((n, n), 1.0 / n)
    AtA = A.T @ A
    zero = np.zeros((n, n))
    B = np.block([[zero, A], [-params.alpha**2 * A.T, -params.beta * AtA]])
    J = np.block([[zero, A], [-A.T, zero]])
    R = np.block([[zero, zero], [zero, params.beta * AtA]])
    G = np.vstack([zero, params.sigma * np.eye(n)])
    return StructuralMatrices(A=A, M=M, B=B, J=J, R=R, G=G)


def potential(x: np.ndarray | float, params: ModelParams) -> np.ndarray | float:
    """Interaction potential U(x) = (alpha |x|)**kappa / kappa."""
    return (params.alpha * np.abs(x)) ** params.kappa / params.kappa


def potential_derivative(x: np.ndarray | float, params: ModelParams) -> np.ndarray | float:
    """U'(x) = sign(x) alpha**kappa |x|**(kappa-1); alpha**2 x for kappa = 2."""
    if params.kappa == 2.0:
        return params.alpha**2 * np.asarray(x, dtype=float)
    return np.sign(x) * params.alpha**params.kappa * np.abs(x) ** (params.kappa - 1.0)


def drift(state: State, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic drift (dQ, dp) of the distance and velocity vectors.

    dQ_n = p_{n+1} - p_n and
    dp_n = U'(Q_n) - U'(Q_{n-1}) + beta (p_{n+1} - 2 p_n + p_{n-1}),
    with cyclic neighbour indices. The drift of the positions themselves is
    simply p.
    """
    p = state.p
    Q = distances(state.q, params.ring_length)
    du = potential_derivative(Q, params)
    dQ = np.roll(p, -1) - p
    dp = du - np.roll(du, 1) + params.beta * (np.roll(p, -1) - 2.0 * p + np.roll(p, 1))
    return dQ, dp


def hamiltonian(state: State, params: ModelParams) -> float:
    """Total energy: kinetic part plus the summed distance potential."""
    Q = distances(state.q, params.ring_length)
    return 0.5 * float(state.p @ state.p) + float(np.sum(potential(Q, params)))


def hamiltonian_gradient(state: State, params: ModelParams) -> np.ndarray:
    """Gradient of the energy in z = (Q, p) coordinates: (U'(Q), p)."""
    Q = distances(state.q, params.ring_length)
    return np.concatenate([potential_derivative(Q, params), state.p])


def state_to_z(state: State, params: ModelParams) -> np.ndarray:
    """Stack the derived distances and the velocities into z = (Q, p)."""
    return np.concatenate([distances(state.q, params.ring_length), state.p])
