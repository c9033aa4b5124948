"""Ensemble observables, autocorrelation, and distribution checks.

The coordination of the agents is measured by the ensemble variances

    V_p = ||M p||^2 / N   (velocities around their mean),
    V_Q = ||M Q||^2 / N   (distances around L/N),

together with the mean velocity p_bar and the deviation processes D = M p
and E = Q - (L/N) 1. In the stationary regime of the linear model, N V_p
and N V_Q are generalized chi-squared variables ||C U||^2 with C a square
root of the respective limit covariance block; their law is estimated here
by Monte Carlo and compared to simulation output with a two-sample
Kolmogorov-Smirnov test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.special

from .analytic import psd_sqrt
from .model import ModelParams, State, distances

__all__ = [
    "DegenerateSeries",
    "SERIES_LABELS",
    "StatSeries",
    "Observables",
    "observables",
    "series_from_values",
    "acf",
    "mc_chi_squared",
    "ks_two_sample",
    "ks_critical_value",
    "burn_in_time",
    "write_series_csv",
    "write_acf_csv",
    "write_histogram_csv",
    "write_samples_csv",
]

SERIES_LABELS = ("mean_velocity", "V_p", "V_Q", "first_agent_velocity",
                 "first_agent_distance_dev")

_NONNEGATIVE_LABELS = frozenset({"V_p", "V_Q"})


class DegenerateSeries(ValueError):
    """The series has zero empirical variance; its ACF is undefined."""


@dataclass(frozen=True)
class StatSeries:
    """A scalar observable sampled at a fixed interval."""

    values: np.ndarray
    dt_between_samples: float
    label: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if self.label not in SERIES_LABELS:
            raise ValueError(f"unknown label {self.label!r}; expected one of {SERIES_LABELS}")
        if self.label in _NONNEGATIVE_LABELS and values.size and values.min() < 0:
            raise ValueError(f"{self.label} series must be nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt_between_samples


class Observables(NamedTuple):
    p_bar: float
    v_p: float
    v_q: float
    d: np.ndarray
    e: np.ndarray


def observables(state: State, params: ModelParams) -> Observables:
    """Mean velocity, ensemble variances, and the centred deviation vectors."""
    p = state.p
    p_bar = float(p.mean())
    d = p - p_bar
    Q = distances(state.q, params.ring_length)
    e = Q - params.ring_length / params.n_agents
    return Observables(p_bar=p_bar,
                       v_p=float(d @ d) / params.n_agents,
                       v_q=float(e @ e) / params.n_agents,
                       d=d, e=e)


def series_from_values(values: np.ndarray, dt_between_samples: float,
                       label: str) -> StatSeries:
    return StatSeries(values=values, dt_between_samples=dt_between_samples, label=label)


def acf(series, max_lag: int) -> np.ndarray:
    """Empirical autocorrelation rho(0..max_lag) with the biased estimator.

    c(h) = (1/n) sum_k (x_k - xbar)(x_{k+h} - xbar); rho = c / c(0). The 1/n
    normalisation keeps the estimated autocovariance sequence positive
    semidefinite. Accepts a StatSeries or a plain array.
    """
    values = np.asarray(getattr(series, "values", series), dtype=float)
    n = values.size
    if not 1 <= max_lag < n:
        raise ValueError(f"need 1 <= max_lag < {n}, got {max_lag}")
    x = values - values.mean()
    nfft = int(2 ** np.ceil(np.log2(2 * n)))
    spectrum = np.abs(np.fft.rfft(x, nfft)) ** 2
    autocov = np.fft.irfft(spectrum, nfft)[: max_lag + 1] / n
    if autocov[0] <= 0.0:
        raise DegenerateSeries("constant series: zero autocovariance at lag 0")
    return autocov / autocov[0]


_MC_STREAM = 0x6D63  # Philox stream tag separating MC draws from SDE noise


def mc_chi_squared(cov: np.ndarray, n_samples: int, seed: int) -> np.ndarray:
    """Monte-Carlo sample of V = ||C U||^2 / N with C C^T = cov, U standard normal.

    The square root handles singular covariances (see :func:`psd_sqrt`);
    negative eigenvalues beyond tolerance raise NotPSD. The sample mean
    converges to trace(cov) / N.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    c = psd_sqrt(cov)
    bg = np.random.Philox(key=[seed % 2**64, _MC_STREAM])
    draws = np.random.Generator(bg).standard_normal((int(n_samples), n))
    y = draws @ c.T
    return np.einsum("ij,ij->i", y, y) / n


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value bound."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    statistic = float(np.max(np.abs(cdf_a - cdf_b)))
    effective = np.sqrt(a.size * b.size / (a.size + b.size))
    p_bound = float(scipy.special.kolmogorov(effective * statistic))
    return statistic, p_bound


def ks_critical_value(alpha: float, n: int, m: int) -> float:
    """Asymptotic two-sample KS rejection threshold at level ``alpha``."""
    return float(scipy.special.kolmogi(alpha)) * np.sqrt((n + m) / (n * m))


def burn_in_time(params: ModelParams) -> float:
    """Transient to discard before stationary sampling: 10 relaxation times
    of the slowest Fourier mode."""
    mu1 = 2.0 - 2.0 * np.cos(2.0 * np.pi / params.n_agents)
    return 10.0 / (params.beta * mu1)


def _write_csv(path, header_cols: list[str], rows: np.ndarray,
               meta: dict | None) -> None:
    with open(path, "w") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header_cols) + "\n")
        np.savetxt(fh, np.atleast_2d(rows), delimiter=",", fmt="%.17g")


def write_series_csv(series: StatSeries, path, meta: dict | None = None) -> None:
    """Series CSV with columns t,value and `# key=value` metadata rows."""
    full_meta = {"label": series.label,
                 "dt_between_samples": series.dt_between_samples}
    full_meta.update(meta or {})
    _write_csv(path, ["t", "value"],
               np.column_stack([series.times, series.values]), full_meta)


def write_acf_csv(rho: np.ndarray, dt_between_samples: float, path,
                  meta: dict | None = None) -> None:
    """ACF CSV with columns lag,rho; the lag is in time units."""
    lags = np.arange(rho.size) * dt_between_samples
    _write_csv(path, ["lag", "rho"], np.column_stack([lags, rho]), meta)


def write_histogram_csv(values: np.ndarray, path, bins: int = 60,
                        meta: dict | None = None) -> None:
    """Histogram CSV with columns bin_left,bin_right,count."""
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins)
    rows = np.column_stack([edges[:-1], edges[1:], counts])
    _write_csv(path, ["bin_left", "bin_right", "count"], rows, meta)


def write_samples_csv(values: np.ndarray, path, meta: dict | None = None) -> None:
    """Single-column CSV of raw sample values."""
    _write_csv(path, ["value"], np.asarray(values, dtype=float)[:, None], meta)
