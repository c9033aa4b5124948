"""Stochastic agents on a ring: simulation, exact Gaussian laws, validation.

The package splits into:

- :mod:`ringmotion.model`    parameters, state, structural matrices, drift
- :mod:`ringmotion.spectral` Fourier eigenstructure of the linear dynamics
- :mod:`ringmotion.analytic` closed-form moments, limit law, K matrix
- :mod:`ringmotion.sde`      seeded Euler-Maruyama integration
- :mod:`ringmotion.stats`    ensemble observables, ACF, chi-squared MC, KS
- :mod:`ringmotion.cli`      scenarios, config files, validation runner
"""

from .analytic import (
    GaussianMoments,
    NotPSD,
    QuadraticOnly,
    expected_stationary_variances,
    k_closed_form,
    k_spectral,
    limit_distribution,
    lyapunov_residual,
    moments_X,
    moments_Z,
    psd_sqrt,
)
from .model import (
    ModelParams,
    State,
    StructuralMatrices,
    ValidationError,
    build_matrices,
    distances,
    drift,
    hamiltonian,
    potential,
    potential_derivative,
    uniform_state,
    wrap_positions,
)
from .sde import (
    EnsembleSeries,
    NonFiniteState,
    SimConfig,
    Trajectory,
    simulate,
    simulate_ensemble,
    step,
)
from .spectral import (
    ImaginaryResidueTooLarge,
    SpectralData,
    analyze,
    classify_damping,
    expm_tB,
    slowest_decay_rate,
)
from .stats import (
    DegenerateSeries,
    StatSeries,
    acf,
    ks_critical_value,
    ks_two_sample,
    mc_chi_squared,
    observables,
)

__version__ = "0.1.0"
