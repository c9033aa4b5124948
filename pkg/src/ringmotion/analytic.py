"""Closed-form Gaussian laws of the linear (kappa = 2) ring system.

With a quadratic interaction potential the stacked distance/velocity vector
z = (Q, p) is an Ornstein-Uhlenbeck process, so z(t) is Gaussian with mean
exp(tB) z0 and covariance int_0^t exp(sB) G G^T exp(sB^T) ds. Both are
available in closed form through the Fourier eigenstructure of B: the mean
via the spectral matrix exponential, the covariance mode by mode through
the scalar coefficient functions a_j, b_j, c_j below.

The centred process x = (Q, Mp) (velocities measured against the ensemble
mean) has the same Gaussian structure minus the divergent mean-velocity
direction, and converges to a limit law whose covariance is built from the
singular circulant matrix

    K_{l,m} = [ (l-m)^2 - N |l-m| + (N^2 - 1) / 6 ] / (2N),

equal to sum_j v_j v_j^* / mu_j over the nonzero Fourier modes. The
closed form and the spectral sum are implemented independently; one is the
oracle for the other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .model import ModelParams, build_matrices
from .spectral import SpectralData, expm_tB, realify

__all__ = [
    "QuadraticOnly",
    "NotPSD",
    "GaussianMoments",
    "k_closed_form",
    "k_spectral",
    "moments_Z",
    "moments_X",
    "limit_distribution",
    "lyapunov_residual",
    "expected_stationary_variances",
    "psd_sqrt",
]


class QuadraticOnly(ValueError):
    """The requested quantity is only defined for the kappa = 2 model."""


class NotPSD(ValueError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


def _require_quadratic(params: ModelParams, what: str) -> None:
    if not params.is_quadratic:
        raise QuadraticOnly(f"{what} requires kappa = 2, got kappa = {params.kappa}")


@dataclass(frozen=True)
class GaussianMoments:
    """Mean vector and covariance matrix of a 2N-dimensional Gaussian law.

    ``time`` is the instant the law refers to; math.inf denotes the limit
    distribution.
    """

    mean: np.ndarray
    cov: np.ndarray
    time: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "cov": self.cov.ravel().tolist(),
            "time": "inf" if math.isinf(self.time) else self.time,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianMoments":
        mean = np.asarray(doc["mean"], dtype=float)
        dim = mean.size
        cov = np.asarray(doc["cov"], dtype=float).reshape(dim, dim)
        time = math.inf if doc["time"] == "inf" else float(doc["time"])
        return cls(mean=mean, cov=cov, time=time)

    @classmethod
    def from_json(cls, text: str) -> "GaussianMoments":
        return cls.from_dict(json.loads(text))


def k_closed_form(n: int) -> np.ndarray:
    """Closed form of the circulant kernel K.

    K_{l,m} = [(l-m)^2 - N|l-m| + (N^2-1)/6] / (2N); symmetric, singular
    (rows sum to zero), with diagonal (N^2-1)/(12N).
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    idx = np.arange(n, dtype=float)
    d = idx[:, None] - idx[None, :]
    return (d**2 - n * np.abs(d) + (n * n - 1) / 6.0) / (2.0 * n)


def k_spectral(n: int) -> np.ndarray:
    """Independent spectral evaluation of K as sum_j v_j v_j^* / mu_j.

    Assembled in complex arithmetic over the nonzero Fourier modes and
    verified real; serves as the oracle for :func:`k_closed_form`.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    j = np.arange(1, n)
    mu = 2.0 - 2.0 * np.cos(2.0 * np.pi * j / n)
    v = np.exp(2j * np.pi * np.outer(np.arange(n), j) / n) / np.sqrt(n)
    out = (v / mu) @ v.conj().T
    # Cancellation residue scales with the entry magnitude ~ N/12.
    out = realify(out, "spectral kernel K",
                  tol=1e-12 * max(1.0, (n * n - 1) / (12.0 * n)))
    return (out + out.T) / 2.0


def _mode_coefficients(params: ModelParams, modes: SpectralData, t: float):
    """Per-mode covariance coefficients a_j(t), b_j(t), c_j(t) for j >= 1.

    These are the time-dependent parts of int_0^t of the mode-j integrand;
    the time-independent parts are the 1/(2 alpha^2 beta mu_j) and
    1/(2 beta mu_j) terms that sum to the K blocks.
    """
    a2 = params.alpha**2
    beta = params.beta
    mu = modes.mu[1:]
    l1 = modes.lambdas[1:, 0]
    l2 = modes.lambdas[1:, 1]
    kbar = np.conj(modes.kappa_j[1:])
    e1 = np.exp(2.0 * t * l1)
    e2 = np.exp(2.0 * t * l2)
    e0 = np.exp(-t * beta * mu)
    gap_factor = beta**2 * mu - 4.0 * a2
    a = (beta * l1 * e2 + 4.0 * a2 * e0 + beta * l2 * e1) / (2.0 * a2 * beta * mu * gap_factor)
    c = (beta * l2 * e2 + 4.0 * a2 * e0 + beta * l1 * e1) / (2.0 * beta * mu * gap_factor)
    b = (beta * mu * (e2 + e1) + 2.0 * (l1 + l2) * e0) * kbar / (2.0 * beta * mu**2 * gap_factor)
    return a, b, c


def _cov_closed(params: ModelParams, modes: SpectralData, t: float,
                divergent_term: bool) -> np.ndarray:
    """Closed-form covariance of z(t) (or of x(t) when divergent_term=False)."""
    n = params.n_agents
    s2 = params.sigma**2
    a, b, c = _mode_coefficients(params, modes, t)
    v1 = modes.fourier_vectors[:, 1:]

    def mode_sum(coef: np.ndarray) -> np.ndarray:
        return (v1 * coef) @ v1.conj().T

    K = k_closed_form(n)
    top_left = K / (2.0 * params.alpha**2 * params.beta) + mode_sum(a)
    top_right = mode_sum(np.conj(b))
    bottom_left = mode_sum(b)
    bottom_right = K / (2.0 * params.beta) + mode_sum(c)
    if divergent_term:
        bottom_right = bottom_right + t * np.full((n, n), 1.0 / n)
    cov = s2 * np.block([[top_left, top_right], [bottom_left, bottom_right]])
    cov = realify(cov, "closed-form covariance")
    return (cov + cov.T) / 2.0


def _cov_quadrature(params: ModelParams, t: float, rtol: float = 1e-8) -> np.ndarray:
    """Adaptive quadrature of int_0^t exp(sB) G G^T exp(sB^T) ds.

    Fallback for critically damped modes, where the closed-form mode
    coefficients divide by zero. Uses dense scaling-and-squaring
    exponentials inside the integrand, so it is independent of the spectral
    factorisation.
    """
    mats = build_matrices(params)
    ggt = mats.G @ mats.G.T
    b = mats.B

    def integrand(s: float) -> np.ndarray:
        e = scipy.linalg.expm(s * b)
        return e @ ggt @ e.T

    out, _ = scipy.integrate.quad_vec(
        integrand, 0.0, t, epsabs=1e-12 * max(1.0, params.sigma**2 * t),
        epsrel=rtol, norm="max")
    return (out + out.T) / 2.0


def moments_Z(params: ModelParams, modes: SpectralData, z0: np.ndarray,
              t: float) -> GaussianMoments:
    """Exact mean and covariance of z(t) = (Q(t), p(t)) from z(0) = z0.

    The velocity-velocity block carries the divergent sigma^2 t / N term in
    the mean-velocity direction. With critically damped modes the mean uses
    the dense exponential and the covariance adaptive quadrature.
    """
    _require_quadratic(params, "moments_Z")
    if not (np.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    z0 = np.asarray(z0, dtype=float)
    n = params.n_agents
    if z0.shape != (2 * n,):
        raise ValueError(f"z0 must have shape ({2 * n},), got {z0.shape}")
    mean = expm_tB(modes, t) @ z0
    if params.sigma == 0.0 or t == 0.0:
        cov = np.zeros((2 * n, 2 * n))
    elif modes.diagonalizable:
        cov = _cov_closed(params, modes, t, divergent_term=True)
    else:
        cov = _cov_quadrature(params, t)
    return GaussianMoments(mean=mean, cov=cov, time=float(t))


def moments_X(params: ModelParams, modes: SpectralData, z0: np.ndarray,
              t: float) -> GaussianMoments:
    """Exact mean and covariance of x(t) = (Q(t), M p(t)).

    Centring the velocities removes the divergent mean-velocity direction:
    the velocity mean block is projected to zero total and the sigma^2 t
    term is absent from the covariance.
    """
    zm = moments_Z(params, modes, z0, t)
    n = params.n_agents
    mean = zm.mean.copy()
    mean[n:] -= mean[n:].mean()
    if params.sigma == 0.0 or t == 0.0:
        cov = zm.cov
    elif modes.diagonalizable:
        cov = _cov_closed(params, modes, t, divergent_term=False)
    else:
        proj = np.eye(2 * n)
        proj[n:, n:] = build_matrices(params).M
        cov = proj @ zm.cov @ proj.T
        cov = (cov + cov.T) / 2.0
    return GaussianMoments(mean=mean, cov=cov, time=float(t))


def limit_distribution(params: ModelParams) -> GaussianMoments:
    """Limit law of x(t) = (Q, Mp) as t grows without bound.

    Mean (L/N, ..., L/N, 0, ..., 0); covariance block-diagonal with distance
    block sigma^2 K / (2 alpha^2 beta) and velocity-deviation block
    sigma^2 K / (2 beta). Valid for any degeneracy pattern.
    """
    _require_quadratic(params, "limit_distribution")
    n = params.n_agents
    mean = np.concatenate([np.full(n, params.ring_length / n), np.zeros(n)])
    K = k_closed_form(n)
    s2 = params.sigma**2
    cov = np.zeros((2 * n, 2 * n))
    cov[:n, :n] = s2 / (2.0 * params.alpha**2 * params.beta) * K
    cov[n:, n:] = s2 / (2.0 * params.beta) * K
    return GaussianMoments(mean=mean, cov=cov, time=math.inf)


def lyapunov_residual(params: ModelParams, cov: np.ndarray) -> float:
    """Max-norm residual of the stationary covariance equation.

    Returns || B cov + cov B^T + sigma^2 [0; M][0, M^T] ||_max, which is
    ~1e-16-level for the limit-distribution covariance and grows linearly
    in any perturbation of it.
    """
    _require_quadratic(params, "lyapunov_residual")
    mats = build_matrices(params)
    n = params.n_agents
    forcing = np.zeros((2 * n, 2 * n))
    forcing[n:, n:] = params.sigma**2 * (mats.M @ mats.M.T)
    residual = mats.B @ cov + cov @ mats.B.T + forcing
    return float(np.max(np.abs(residual)))


def expected_stationary_variances(params: ModelParams) -> tuple[float, float]:
    """Stationary expectations of the ensemble variances (V_p, V_Q).

    E V_p = sigma^2 (N^2 - 1) / (24 N beta) and E V_Q = E V_p / alpha^2,
    the trace of the respective limit covariance block over N.
    """
    _require_quadratic(params, "expected_stationary_variances")
    n = params.n_agents
    e_vp = params.sigma**2 * (n * n - 1) / (24.0 * n * params.beta)
    return e_vp, e_vp / params.alpha**2


def psd_sqrt(cov: np.ndarray, clip: float = 1e-12, neg_tol: float = 1e-8) -> np.ndarray:
    """Symmetric-eigendecomposition square root C with C C^T = cov.

    Handles the rank-deficient covariances produced here (K annihilates the
    constant vector, so plain Cholesky would fail): eigenvalues below
    ``clip`` times the largest are set to zero. Raises :class:`NotPSD` for
    eigenvalues below ``-neg_tol`` times the largest magnitude.
    """
    cov = np.asarray(cov, dtype=float)
    w, v = np.linalg.eigh((cov + cov.T) / 2.0)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale == 0.0:
        return np.zeros_like(cov)
    if float(w.min()) < -neg_tol * scale:
        raise NotPSD(f"eigenvalue {w.min():.3e} below -{neg_tol:.1e} * {scale:.3e}")
    w = np.where(w < clip * scale, 0.0, w)
    return v * np.sqrt(w)
