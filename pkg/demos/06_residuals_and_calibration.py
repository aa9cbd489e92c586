"""Model validation and range calibration.

First: is the fitted model adequate? If so the residuals are white and
their autocorrelation stays inside the 99% bounds at almost every lag; a
wrong template leaves structure that the test catches immediately.

Second: mapping mean RTT to range with a fifth-order polynomial, the way a
bench calibration against a reference ruler would.
"""

import numpy as np

from rttsync import (
    ClockTruth,
    LinkTruth,
    NoiseSpec,
    SPEED_OF_LIGHT,
    SampleSchedule,
    apply_calibration,
    calibrate_range,
    generate_series,
    residual_acf,
    uls_estimate,
)
import dataclasses

clock = ClockTruth(f_m=1e8, f_d=-33.0, phi=2.0)
link = LinkTruth(rho=2.0, delta0=5e-6)
noise = NoiseSpec.from_snr(40.0, 40.0, clock.T_m)
series = generate_series(SampleSchedule(0.0, 1e-3, 1000), clock, link, noise, seed=8)

est = uls_estimate(series, clock.T_m, link.delta0)
good = residual_acf(series, est, max_lag=50, T_m=clock.T_m, delta0=link.delta0)
print(f"fitted template:  {100 * good.fraction_inside:.0f}% of ACF lags inside "
      f"+/-{good.bound:.3f}  -> {'pass' if good.passes else 'fail'}")

wrong = dataclasses.replace(est, f_d_hat=2.0 * est.f_d_hat)
bad = residual_acf(series, wrong, max_lag=50, T_m=clock.T_m, delta0=link.delta0)
print(f"2x wrong f_d:     {100 * bad.fraction_inside:.0f}% inside "
      f"-> {'pass' if bad.passes else 'fail'}")

# calibration: measured mean RTT at 12 known ranges, slightly noisy
rng = np.random.default_rng(1)
ranges = np.linspace(0.5, 25.0, 12)
rtts = 5e-6 + 0.5e-8 + 2.0 * ranges / SPEED_OF_LIGHT + 2e-11 * rng.standard_normal(12)
curve = calibrate_range(np.column_stack([ranges, rtts]))

print(f"\ncalibration domain: [{curve.domain_lo:.6e}, {curve.domain_hi:.6e}] s")
worst = max(abs(apply_calibration(curve, r) - g) for g, r in zip(ranges, rtts))
print(f"worst in-sample range error: {worst:.4f} m")
probe = 0.5 * (curve.domain_lo + curve.domain_hi)
print(f"range at mid-domain RTT: {apply_calibration(curve, probe):.3f} m")
