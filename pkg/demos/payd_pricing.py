# Pay-as-you-drive pricing: net premiums that scale with distance driven,
# with the discount for investment income between premium and claim.
#
#   python3 demos/payd_pricing.py

from dcrm import (
    AlternatingRenewal,
    ConstantSpeed,
    Exponential,
    MileageAffineIntensity,
    PaydPolicy,
    price_payd,
    validate_cox_premium,
)

claim = Exponential(mean=4000.0)  # average claim severity in currency units
intensity = MileageAffineIntensity(base_rate=0.002, per_mile=8e-6)
delta, horizon = 0.04, 1.0

# Three driver profiles with identical risk parameters, different mileage.
profiles = {
    "low mileage (5k mi/yr)": ConstantSpeed(5_000.0),
    "average (12k mi/yr)": ConstantSpeed(12_000.0),
    "high mileage (30k mi/yr)": ConstantSpeed(30_000.0),
}
print("profile                      premium    per expected mile")
for name, mileage in profiles.items():
    policy = PaydPolicy(claim=claim, intensity=intensity, mileage=mileage,
                        delta=delta, horizon=horizon)
    quote = price_payd(policy)
    print(f"{name:<28} {quote.net_premium:8.2f}    {quote.per_expected_mile:.6f}")
print("(deterministic mileage prices exactly: zero standard error)")

# A stochastic commuter: the premium becomes an expectation over mileage
# paths, estimated by outer Monte Carlo with an exact inner integral.
commuter = AlternatingRenewal(mean_drive=0.0008, mean_idle=0.0032, speed=60_000.0)
policy = PaydPolicy(claim=claim, intensity=intensity, mileage=commuter,
                    delta=delta, horizon=horizon)
quote = price_payd(policy, n_outer=20_000, seed=1)
print(f"\nstochastic commuter: premium {quote.net_premium:.2f} "
      f"+/- {quote.standard_error:.2f}")
print(f"expected mileage {quote.expected_miles:.0f}, "
      f"per-mile rate {quote.per_expected_mile:.6f}")

# Cross-check the conditional-expectation premium against a full end-to-end
# simulation of discounted losses (arrivals, claims, discounting).
report = validate_cox_premium(policy, n_outer=10_000, n_full=50_000, seed=2)
print("\n" + report.format_text())

# Retrospective view: per-path realized premium integrals support billing on
# the mileage actually driven rather than the prospective expectation.
quote = price_payd(policy, n_outer=20_000, seed=1, keep_path_values=True)
lo, hi = quote.path_values.min(), quote.path_values.max()
print(f"\nrealized per-path expected losses span [{lo:.2f}, {hi:.2f}] "
      "across mileage paths")
