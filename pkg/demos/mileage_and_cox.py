# Mileage processes and the Cox counting model: claim hazard that follows how
# much (and how fast) the insured actually drives.
#
#   python3 demos/mileage_and_cox.py

import io

import numpy as np

from dcrm import (
    AlternatingRenewal,
    MileageAffineIntensity,
    TripLogMileage,
    ingest_trip_log,
    intensity_integral,
    simulate_cox,
)

# A week of GPS trip records: start time, end time (days), miles covered.
trip_csv = """start,end,miles
0.02,0.05,22
0.33,0.36,20
1.02,1.06,25
2.30,2.41,71
4.01,4.04,18
5.50,5.70,130
"""
log = ingest_trip_log(io.StringIO(trip_csv))
mileage = TripLogMileage(log)
path = mileage.realize(horizon=7.0)
print(f"logged {len(log)} trips, {log.total_miles:.0f} miles over 7 days")
for s in (1.0, 3.0, 7.0):
    print(f"  miles by day {s:.0f}: {path.cumulative(s):7.1f}   "
          f"speed at {s:.0f}: {path.speed_at(s):6.1f} mi/day")

# Hazard affine in instantaneous speed: a small parked-car rate plus a
# per-mile loading.  On a realized path this induces a piecewise-constant
# claim intensity that the thinning simulator consumes directly.
intensity = MileageAffineIntensity(base_rate=0.001, per_mile=0.0005)
induced = intensity.on_path(path)
expected_claims = intensity_integral(induced, 0.0, 7.0)
print(f"\nexpected claims over the week: {expected_claims:.4f}")

rng = np.random.default_rng(11)
counts = np.array([len(simulate_cox(intensity, mileage, 7.0, rng=rng)[1])
                   for _ in range(200_000)])
print(f"simulated mean claim count : {counts.mean():.4f} "
      f"+/- {counts.std(ddof=1) / np.sqrt(len(counts)):.4f}")

# A genuinely stochastic driver: exponential idle/drive sojourns.  Each call
# realizes a fresh path, so the counting process is doubly stochastic.  With a
# heavier per-mile loading the random mileage leaves a visible fingerprint:
# count variance above the mean, which no Poisson process can produce.
per_mile_heavy = MileageAffineIntensity(base_rate=0.001, per_mile=0.004)
driver = AlternatingRenewal(mean_drive=0.1, mean_idle=0.9, speed=300.0)
rng = np.random.default_rng(5)
totals, claim_counts = [], []
for _ in range(20_000):
    realized, arrivals = simulate_cox(per_mile_heavy, driver, 7.0, rng=rng)
    totals.append(realized.total_miles)
    claim_counts.append(len(arrivals))
totals = np.array(totals)
claim_counts = np.array(claim_counts)
print(f"\nrenewal driver over one week: {totals.mean():.0f} miles on average "
      f"(sd {totals.std(ddof=1):.0f})")
print(f"mean claim count {claim_counts.mean():.4f}, "
      f"count variance {claim_counts.var(ddof=1):.4f} "
      f"(ratio {claim_counts.var(ddof=1) / claim_counts.mean():.3f} > 1: "
      "the overdispersion signature of a Cox process)")
