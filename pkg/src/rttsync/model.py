"""Forward measurement model for two-way RTT sampling of a remote clock.

The round-trip time seen at the master is a sawtooth riding on a constant
offset: a periodic sub-cycle remainder (set by the relative clock frequency
difference and phase) plus the clocked slave delay and the two-way flight
time. This module generates that waveform, optionally with clock jitter and
channel noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, fixed

TWO_PI = 2.0 * math.pi

# |f_d|/f_m above this voids the small-frequency-difference approximation
# used for the clocked delay; we warn but do not forbid.
_FD_RATIO_WARN = 1e-3


@dataclass(frozen=True)
class ClockTruth:
    """Ground-truth clock pair parameters.

    f_m : master clock frequency, Hz.
    f_d : frequency difference master minus slave, Hz (signed).
    phi : relative clock offset, radians in [0, 2pi).
    """

    f_m: float
    f_d: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.f_m > 0.0:
            raise ValueError("f_m must be positive")
        if abs(self.f_d) >= self.f_m:
            raise ValueError("|f_d| must be below f_m")
        if not 0.0 <= self.phi < TWO_PI:
            raise ValueError("phi must lie in [0, 2pi)")
        if abs(self.f_d) / self.f_m > _FD_RATIO_WARN:
            warnings.warn(
                "|f_d|/f_m = %.3g exceeds 1e-3; the constant-delay "
                "approximation degrades" % (abs(self.f_d) / self.f_m),
                stacklevel=2,
            )

    @property
    def T_m(self) -> float:
        """Master clock period, seconds."""
        return 1.0 / self.f_m

    @property
    def f_s(self) -> float:
        """Slave clock frequency, Hz."""
        return self.f_m - self.f_d


@dataclass(frozen=True)
class LinkTruth:
    """Ground-truth link parameters: range and nominal slave delay."""

    rho: float
    delta0: float
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.rho < 0.0:
            raise ValueError("rho must be nonnegative")
        if not self.delta0 > 0.0:
            raise ValueError("delta0 must be positive")

    @property
    def flight_time(self) -> float:
        """Two-way propagation time 2*rho/c, seconds."""
        return 2.0 * self.rho / self.c


@dataclass(frozen=True)
class SampleSchedule:
    """Uniform measurement schedule t_i = t0 + i*Ts for i = 0..N-1."""

    t0: float
    Ts: float
    N: int

    def __post_init__(self):
        if not self.Ts > 0.0:
            raise ValueError("Ts must be positive")
        if self.N < 2:
            raise ValueError("N must be at least 2")

    def times(self) -> np.ndarray:
        return self.t0 + self.Ts * np.arange(self.N)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise levels: clock jitter (radians) and channel noise (seconds).

    Both are zero-mean Gaussian. Levels may equivalently be given as
    SNR values, see :func:`snr_to_sigma`.
    """

    sigma_v: float = 0.0
    sigma_n: float = 0.0

    def __post_init__(self):
        if self.sigma_v < 0.0 or self.sigma_n < 0.0:
            raise ValueError("noise standard deviations must be nonnegative")

    @classmethod
    def from_snr(cls, snr_c_db: float, snr_j_db: float, T_m: float) -> "NoiseSpec":
        sigma_n, sigma_v = snr_to_sigma(snr_c_db, snr_j_db, T_m)
        return cls(sigma_v=sigma_v, sigma_n=sigma_n)

    def snr_c_db(self, T_m: float) -> float:
        """Channel SNR in dB implied by sigma_n for a given clock period."""
        return 20.0 * math.log10(T_m / self.sigma_n)

    def snr_j_db(self) -> float:
        """Jitter SNR in dB implied by sigma_v."""
        return 20.0 * math.log10(TWO_PI / self.sigma_v)


@dataclass(frozen=True)
class RttSeries:
    """Paired sample times and RTT values, both in seconds."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or values.ndim != 1:
            raise ValueError("times and values must be 1-D")
        if times.shape != values.shape:
            raise ValueError("times and values must have equal length")
        if times.size and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")

    def __len__(self) -> int:
        return self.times.size

    def with_values(self, values: np.ndarray) -> "RttSeries":
        return RttSeries(self.times, values)


def snr_to_sigma(snr_c_db: float, snr_j_db: float, T_m: float) -> tuple[float, float]:
    """Convert (SNR_c, SNR_j) in dB to (sigma_n seconds, sigma_v radians).

    SNR_c = 10*log10(T_m^2 / sigma_n^2), SNR_j = 10*log10((2pi)^2 / sigma_v^2).
    """
    sigma_n = T_m * 10.0 ** (-snr_c_db / 20.0)
    sigma_v = TWO_PI * 10.0 ** (-snr_j_db / 20.0)
    return sigma_n, sigma_v


def sigma_to_snr(sigma_n: float, sigma_v: float, T_m: float) -> tuple[float, float]:
    """Inverse of :func:`snr_to_sigma`; returns (SNR_c, SNR_j) in dB."""
    snr_c = 20.0 * math.log10(T_m / sigma_n)
    snr_j = 20.0 * math.log10(TWO_PI / sigma_v)
    return snr_c, snr_j


def remainder_h(t, clock: ClockTruth, v=0.0):
    """Sawtooth remainder (T_m/2pi) * mod_2pi(2pi*f_d*t + phi + v), seconds.

    The waveform has period 1/|f_d| and amplitude T_m. Accepts scalars or
    arrays for t and v.
    """
    arg = TWO_PI * clock.f_d * np.asarray(t, dtype=float) + clock.phi + np.asarray(v)
    return (clock.T_m / TWO_PI) * np.mod(arg, TWO_PI)


def nominal_delay(Cs_span: float, clock: ClockTruth) -> float:
    """Clocked slave delay, small-f_d approximation floor(span*f_m)/f_m."""
    if not Cs_span > 0.0:
        raise ValueError("Cs_span must be positive")
    return math.floor(Cs_span * clock.f_m) / clock.f_m


def nominal_delay_exact(Cs_span: float, clock: ClockTruth) -> float:
    """Clocked slave delay without the small-f_d approximation."""
    if not Cs_span > 0.0:
        raise ValueError("Cs_span must be positive")
    f_s = clock.f_s
    return math.floor(Cs_span * f_s) / f_s


def rtt_sample(t, clock: ClockTruth, link: LinkTruth, v=0.0, n=0.0):
    """Single RTT measurement: remainder + delta0 + 2*rho/c + n, seconds."""
    return remainder_h(t, clock, v) + link.delta0 + link.flight_time + np.asarray(n)


def generate_series(
    schedule: SampleSchedule,
    clock: ClockTruth,
    link: LinkTruth,
    noise: NoiseSpec = NoiseSpec(),
    seed=None,
) -> RttSeries:
    """Generate an RTT series over the schedule; deterministic for fixed seed."""
    if link.flight_time >= schedule.Ts:
        raise ValueError("two-way flight time must be below the update period")
    t = schedule.times()
    rng = np.random.default_rng(seed)
    v = rng.normal(0.0, noise.sigma_v, schedule.N) if noise.sigma_v else 0.0
    n = rng.normal(0.0, noise.sigma_n, schedule.N) if noise.sigma_n else 0.0
    y = rtt_sample(t, clock, link, v, n)
    return RttSeries(t, np.asarray(y, dtype=float))
