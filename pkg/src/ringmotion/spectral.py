"""Complex eigenstructure of the linear ring dynamics.

The cyclic difference matrix A is circulant, so the discrete Fourier vectors
v_j diagonalise it with eigenvalues kappa_j = omega**j - 1, where omega is
the primitive N-th root of unity. Each Fourier mode j >= 1 turns the 2N x 2N
drift matrix B into a damped 2 x 2 oscillator whose eigenvalues lambda_{j,k}
solve z**2 + beta mu_j z + alpha**2 mu_j = 0 with mu_j = |kappa_j|**2. The
mode-0 pair of zero eigenvalues reflects conservation of the total distance
and the free drift of the mean velocity.

Stacking the per-mode eigenvectors gives an explicit eigenbasis W of B with
a closed-form inverse, valid whenever no mode is critically damped
(beta**2 mu_j != 4 alpha**2 for all j >= 1). Critically damped modes make B
non-diagonalisable; they are detected and recorded, and the matrix
exponential then falls back to dense scaling-and-squaring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ModelParams, build_matrices

__all__ = [
    "ImaginaryResidueTooLarge",
    "SpectralData",
    "analyze",
    "classify_damping",
    "expm_tB",
    "realify",
    "slowest_decay_rate",
    "DEGENERACY_RTOL",
]

# Relative tolerance on |beta^2 mu_j - 4 alpha^2| below which a mode counts
# as critically damped (exact equality is a measure-zero event analytically
# but hit exactly by round parameter choices such as alpha = beta, even N).
DEGENERACY_RTOL = 1e-9

_IMAG_TOL = 1e-8


class ImaginaryResidueTooLarge(RuntimeError):
    """A spectrally assembled real quantity came out with |Im| above tolerance."""


def realify(array: np.ndarray, what: str, tol: float = _IMAG_TOL) -> np.ndarray:
    """Verify a complex assembly is real up to ``tol`` and drop the imaginary part."""
    residue = float(np.max(np.abs(array.imag))) if np.iscomplexobj(array) else 0.0
    if residue > tol:
        raise ImaginaryResidueTooLarge(
            f"{what}: imaginary residue {residue:.3e} exceeds {tol:.1e}")
    return np.ascontiguousarray(array.real)


@dataclass(frozen=True)
class SpectralData:
    """Eigenstructure of the drift matrix B for one parameter set.

    omega            primitive N-th root of unity exp(2 pi i / N)
    mu               mode gaps mu_j = 2 - 2 cos(2 pi j / N), shape (N,)
    kappa_j          eigenvalues of A, omega**j - 1, shape (N,)
    fourier_vectors  unit-norm Fourier basis, column j is v_j, shape (N, N)
    lambdas          eigenvalues of B, lambdas[j, k-1] = lambda_{j,k}, shape (N, 2)
    W                eigenvector matrix of B, columns ordered
                     (w_{0,1}, ..., w_{N-1,1}, w_{0,2}, ..., w_{N-1,2});
                     None when a mode is critically damped
    W_inv            closed-form inverse of W; None when degenerate
    degenerate_modes indices j >= 1 with beta^2 mu_j = 4 alpha^2 (within tolerance)
    min_gap          smallest |lambda_{j,1} - lambda_{j,2}| over j >= 1, a
                     conditioning diagnostic near (but not at) degeneracy
    B                the real 2N x 2N drift matrix itself
    params           parameters the analysis was built from
    """

    omega: complex
    mu: np.ndarray
    kappa_j: np.ndarray
    fourier_vectors: np.ndarray
    lambdas: np.ndarray
    W: np.ndarray | None
    W_inv: np.ndarray | None
    degenerate_modes: frozenset[int]
    min_gap: float
    B: np.ndarray
    params: ModelParams

    @property
    def diagonalizable(self) -> bool:
        return not self.degenerate_modes

    @property
    def eigenvalue_order(self) -> np.ndarray:
        """Diagonal of Lambda in the column order of W."""
        return np.concatenate([self.lambdas[:, 0], self.lambdas[:, 1]])


def _degenerate_modes(mu: np.ndarray, params: ModelParams) -> frozenset[int]:
    crit = params.beta**2 * mu - 4.0 * params.alpha**2
    tol = DEGENERACY_RTOL * np.maximum(1.0, params.beta**2 * mu)
    hits = np.nonzero(np.abs(crit) <= tol)[0]
    return frozenset(int(j) for j in hits if j >= 1)


def analyze(params: ModelParams) -> SpectralData:
    """Full eigenanalysis of B; the potential exponent kappa is ignored.

    Critically damped modes are not an error: they are recorded in
    ``degenerate_modes`` and W / W_inv are set to None, which makes
    downstream consumers switch to dense fallbacks.
    """
    n = params.n_agents
    j = np.arange(n)
    theta = 2.0 * np.pi * j / n
    omega = np.exp(2j * np.pi / n)
    mu = 2.0 - 2.0 * np.cos(theta)
    kappa_j = np.exp(1j * theta) - 1.0
    # Unit-norm Fourier vectors; column j has entries omega**(m j) / sqrt(N).
    fourier = np.exp(1j * np.outer(theta, j)) / np.sqrt(n)

    disc = (params.beta**2 * mu - 4.0 * params.alpha**2) * mu
    root = np.sqrt(disc.astype(complex))
    lam = np.empty((n, 2), dtype=complex)
    lam[:, 0] = 0.5 * (-params.beta * mu - root)
    lam[:, 1] = 0.5 * (-params.beta * mu + root)

    degenerate = _degenerate_modes(mu, params)
    min_gap = float(np.min(np.abs(root[1:]))) if n > 1 else np.inf

    if degenerate:
        W = W_inv = None
    else:
        W = np.empty((2 * n, 2 * n), dtype=complex)
        W[:n, :n] = fourier * kappa_j
        W[n:, :n] = fourier * lam[:, 0]
        W[:n, n:] = fourier * kappa_j
        W[n:, n:] = fourier * lam[:, 1]
        # Mode 0 contributes the pure distance and pure velocity directions.
        W[:n, 0] = fourier[:, 0]
        W[n:, 0] = 0.0
        W[:n, n] = 0.0
        W[n:, n] = fourier[:, 0]

        # Dual basis: rows of W_inv are conjugate transposes of the vectors
        # u_{j,k}; with gap = lambda_{j,1} - lambda_{j,2},
        #   u_{j,1} = [ -conj(lambda_{j,2} / (kappa_j gap)) v_j ;  conj(1/gap) v_j ]
        #   u_{j,2} = [  conj(lambda_{j,1} / (kappa_j gap)) v_j ; -conj(1/gap) v_j ]
        gap = lam[:, 0] - lam[:, 1]
        gap[0] = 1.0  # dummy; mode-0 columns are overwritten below
        safe_kappa = kappa_j.copy()
        safe_kappa[0] = 1.0
        top1 = np.conj(-lam[:, 1] / (safe_kappa * gap))
        top2 = np.conj(lam[:, 0] / (safe_kappa * gap))
        bot1 = np.conj(1.0 / gap)
        bot2 = np.conj(-1.0 / gap)
        U = np.empty((2 * n, 2 * n), dtype=complex)
        U[:n, :n] = fourier * top1
        U[n:, :n] = fourier * bot1
        U[:n, n:] = fourier * top2
        U[n:, n:] = fourier * bot2
        U[:n, 0] = fourier[:, 0]
        U[n:, 0] = 0.0
        U[:n, n] = 0.0
        U[n:, n] = fourier[:, 0]
        W_inv = U.conj().T

    return SpectralData(
        omega=complex(omega),
        mu=mu,
        kappa_j=kappa_j,
        fourier_vectors=fourier,
        lambdas=lam,
        W=W,
        W_inv=W_inv,
        degenerate_modes=degenerate,
        min_gap=min_gap,
        B=build_matrices(params).B,
        params=params,
    )


def classify_damping(data: SpectralData, params: ModelParams) -> list[str]:
    """Per-mode damping label, index j = 0..N-1.

    Mode 0 is the zero mode (no restoring force). A mode j >= 1 is
    underdamped (oscillatory eigenvalue pair) iff beta^2 mu_j < 4 alpha^2,
    critical within the degeneracy tolerance, and overdamped otherwise.
    """
    labels = ["zero"]
    crit = params.beta**2 * data.mu - 4.0 * params.alpha**2
    tol = DEGENERACY_RTOL * np.maximum(1.0, params.beta**2 * data.mu)
    for j in range(1, params.n_agents):
        if abs(crit[j]) <= tol[j]:
            labels.append("critical")
        elif crit[j] < 0:
            labels.append("underdamped")
        else:
            labels.append("overdamped")
    return labels


def expm_tB(data: SpectralData, t: float) -> np.ndarray:
    """Real matrix exponential exp(t B) for t >= 0.

    Uses the spectral factorisation W exp(t Lambda) W^-1 and verifies the
    result is real; with critically damped modes present it transparently
    delegates to dense scaling-and-squaring.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if not data.diagonalizable:
        return scipy.linalg.expm(t * data.B)
    phases = np.exp(t * data.eigenvalue_order)
    out = (data.W * phases) @ data.W_inv
    return realify(out, "spectral exp(tB)")


def slowest_decay_rate(data: SpectralData) -> float:
    """Smallest |Re lambda| over the damped modes j >= 1.

    This is the relaxation rate of the slowest mode; its reciprocal sets
    burn-in and decorrelation scales for stationary sampling.
    """
    return float(np.min(np.abs(data.lambdas[1:, :].real)))
