"""Tour of the analytic layer: the coupling kernel and the exact Gaussian laws.

The stationary covariance of the centred system is built from one circulant
kernel K with a two-line closed form; the script derives it both ways,
prints the exact time-t moments against numerical quadrature, and verifies
the limit covariance through its Lyapunov equation.
"""

import math

import numpy as np

from ringmotion import (
    ModelParams,
    analyze,
    expected_stationary_variances,
    k_closed_form,
    k_spectral,
    limit_distribution,
    lyapunov_residual,
    moments_X,
    moments_Z,
)
from ringmotion.model import state_to_z, uniform_state

n = 20
print("kernel row (closed form), k = 1..10:")
print(np.round(k_closed_form(n)[0, :10], 4))
print("max |closed - spectral sum| over all entries:",
      f"{np.max(np.abs(k_closed_form(n) - k_spectral(n))):.2e}")
print(f"diagonal entry (N^2-1)/(12N) = {(n * n - 1) / (12 * n):.4f}; "
      f"most negative at offset N/2: {k_closed_form(n)[0, n // 2]:.4f}")

params = ModelParams(n_agents=n, ring_length=501.0, alpha=0.5, beta=1.0, sigma=1.0)
data = analyze(params)
z0 = state_to_z(uniform_state(params), params)

for t in (1.0, 10.0, 100.0):
    mz = moments_Z(params, data, z0, t)
    mx = moments_X(params, data, z0, t)
    lim = limit_distribution(params)
    print(f"t={t:6.1f}: V_p expectation trace(cov_p)/N = "
          f"{np.trace(mx.cov[n:, n:]) / n:8.5f}   "
          f"distance-block distance to limit: "
          f"{np.max(np.abs(mx.cov[:n, :n] - lim.cov[:n, :n])):.2e}")

lim = limit_distribution(params)
print("\nlimit law: mean distance", lim.mean[0], "| time =", lim.time)
print("Lyapunov residual of the limit covariance:",
      f"{lyapunov_residual(params, lim.cov):.2e}")

e_vp, e_vq = expected_stationary_variances(params)
print(f"stationary expectations: E V_p = {e_vp:.5f}, E V_Q = {e_vq:.5f} "
      f"(ratio 1/alpha^2 = {1 / params.alpha**2:.1f})")
assert math.isinf(lim.time)
