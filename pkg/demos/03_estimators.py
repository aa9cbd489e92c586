"""The three joint estimators on one noisy record.

All three recover (f_d, phi, rho) from the same N = 200 samples:
  ULS  unwraps the normalized record and fits a line;
  PCP  picks the periodogram peak, then the correlation peak over phase;
  WLS  grid-searches the concentrated weighted least-squares cost.
"""

from rttsync import (
    ClockTruth,
    LinkTruth,
    NoiseSpec,
    SampleSchedule,
    SearchGrids,
    generate_series,
    pcp_estimate,
    phase_error,
    phase_error_seconds,
    uls_estimate,
    wls_estimate,
)

clock = ClockTruth(f_m=1e8, f_d=-32.0, phi=2.0)
link = LinkTruth(rho=2.0, delta0=5e-6)
schedule = SampleSchedule(0.0, 1e-3, 200)
noise = NoiseSpec.from_snr(30.0, 30.0, clock.T_m)

series = generate_series(schedule, clock, link, noise, seed=11)
grids = SearchGrids.for_schedule(schedule.N, schedule.Ts)
print(f"truth: f_d = {clock.f_d} Hz, phi = {clock.phi} rad, rho = {link.rho} m")
print(f"search grids: {grids.F.size} frequencies (step {grids.f_step} Hz), "
      f"{grids.Phi.size} phases\n")

estimates = [
    uls_estimate(series, clock.T_m, link.delta0),
    pcp_estimate(series, clock.T_m, link.delta0, grids),
    wls_estimate(series, clock.T_m, link.delta0, grids),
]
print(f"{'':4s} {'f_d [Hz]':>12s} {'phi err [ps]':>12s} {'rho [m]':>10s}")
for est in estimates:
    dphi_ps = 1e12 * phase_error_seconds(est.phi_hat, clock.phi, clock.T_m)
    print(f"{est.method:4s} {est.f_d_hat:12.4f} {dphi_ps:12.2f} {est.rho_hat:10.4f}")

# the WLS phase error in radians, for reference
wls = estimates[-1]
print(f"\nWLS phase error = {phase_error(wls.phi_hat, clock.phi):+.2e} rad "
      f"(grid step after refinement: {wls.phi_grid_step:.2e} rad)")
