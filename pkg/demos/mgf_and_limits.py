# Moment generating functions three ways: adaptive quadrature of the general
# formula, the exponential-claims closed form, and the empirical average of
# exp(u * Z) from simulation.
#
#   python3 demos/mgf_and_limits.py

import numpy as np

from dcrm import (
    ConstantIntensity,
    DcrmScenario,
    Exponential,
    empirical_mgf,
    mgf_exponential_closed,
    mgf_nhpp,
    simulate_discounted_loss,
)

claim = Exponential(mean=1.0)
rate, delta, horizon = 1.0, 1.0, 1.0

print("u      quadrature      closed form     |rel err|")
for u in (0.1, 0.2, 0.3, 0.4, 0.5):
    quad_value = mgf_nhpp(claim, rate, delta, horizon, u)
    closed = mgf_exponential_closed(claim.mean, rate, delta, horizon, u)
    print(f"{u:.1f}  {quad_value:.12f}  {closed:.12f}  "
          f"{abs(quad_value - closed) / closed:.2e}")

# The empirical route: average exp(u*Z) across a million simulated paths.
scenario = DcrmScenario(claim=claim, counting=ConstantIntensity(rate),
                        delta=delta, horizon=horizon)
result = simulate_discounted_loss(scenario, n_paths=1_000_000, seed=99)
u = 0.4
estimate, stderr = empirical_mgf(result, u)
closed = mgf_exponential_closed(claim.mean, rate, delta, horizon, u)
print(f"\nempirical m.g.f. at u={u}: {estimate:.6f} +/- {stderr:.6f} "
      f"(exact {closed:.6f}, z={(estimate - closed) / stderr:+.2f})")

# Derivatives of the m.g.f. at zero recover the moments.
h = 1e-6
derivative = (mgf_nhpp(claim, rate, delta, horizon, h)
              - mgf_nhpp(claim, rate, delta, horizon, -h)) / (2 * h)
print(f"\nd/du at 0 by finite difference: {derivative:.8f} "
      f"(expected discounted loss {rate / delta * (1 - np.exp(-delta)):.8f})")

# Limit behavior: tiny discounting approaches the undiscounted compound form,
# and long horizons approach the perpetuity form.
u = 0.5
undiscounted = np.exp(rate * horizon * u / (1 - u))
print(f"\ndelta=1e-8 : {mgf_exponential_closed(1.0, rate, 1e-8, horizon, u):.10f}")
print(f"delta->0   : {undiscounted:.10f}")

u = 0.3
perpetuity = (1 - u) ** (-rate / delta)
print(f"t=1000     : {mgf_exponential_closed(1.0, rate, delta, 1000.0, u):.10f}")
print(f"t->infinity: {perpetuity:.10f}")
