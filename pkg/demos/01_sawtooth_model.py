"""What an RTT record looks like when two free-running clocks disagree.

The round-trip time of a PING/RESPOND exchange is not constant: the slave
replies on its own clock edge, so the sub-period wait between the PING
arrival and the next slave edge drifts with the frequency difference and
wraps every time it exceeds one clock period. The record is a sawtooth of
amplitude T_m riding on a large constant offset.
"""

import numpy as np

from rttsync import (
    ClockTruth,
    LinkTruth,
    NoiseSpec,
    SampleSchedule,
    generate_series,
)

clock = ClockTruth(f_m=1e8, f_d=-32.0, phi=2.0)  # 100 MHz master, -32 Hz beat
link = LinkTruth(rho=2.0, delta0=5e-6)           # 2 m range, 5 us slave delay
schedule = SampleSchedule(t0=0.0, Ts=1e-3, N=1000)

clean = generate_series(schedule, clock, link)
print(f"master period T_m = {clock.T_m:.1e} s, flight time = {link.flight_time:.3e} s")
print(f"offset floor delta0 + 2*rho/c = {link.delta0 + 2 * link.rho / 299792458.0:.6e} s")
print(f"record span: min {clean.values.min():.6e} s, max {clean.values.max():.6e} s")
print(f"  -> sawtooth swing {clean.values.max() - clean.values.min():.2e} s (~T_m)")

wraps = np.flatnonzero(np.abs(np.diff(clean.values)) > 0.5 * clock.T_m)
period = np.mean(np.diff(wraps)) * schedule.Ts
print(f"{wraps.size} wraps in {schedule.N * schedule.Ts:.1f} s, "
      f"mean spacing {period * 1e3:.2f} ms (1/|f_d| = {1e3 / 32:.2f} ms)")

# same record with channel noise and clock jitter at 30 dB each
noise = NoiseSpec.from_snr(snr_c_db=30.0, snr_j_db=30.0, T_m=clock.T_m)
noisy = generate_series(schedule, clock, link, noise, seed=0)
print(f"\nwith SNR_c = SNR_j = 30 dB: sigma_n = {noise.sigma_n:.1e} s, "
      f"sigma_v = {noise.sigma_v:.3f} rad")
print(f"rms(noisy - clean) = {np.std(noisy.values - clean.values):.2e} s")
