"""Joint estimators of (frequency difference, phase offset, range) from an
RTT series: unwrapped least squares (ULS), periodogram + correlation peaks
(PCP), and robust weighted least squares (WLS), plus the median/nMAD outlier
weighting and pre-processing filter they rely on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import SPEED_OF_LIGHT, TWO_PI, RttSeries

# Scale factor making the median absolute deviation consistent with the
# standard deviation of a Gaussian.
NMAD_FACTOR = 1.483

_DEFAULT_N_PHI = 512
_REFINE_FACTOR = 10
_REFINE_POINTS = 21
_REFINE_LEVELS = 2
_MAX_PHI_POINTS = 8192


def wrap_to_2pi(x):
    """Map angles to [0, 2pi)."""
    return np.mod(x, TWO_PI)


def wrap_to_pm_pi(x):
    """Map angles to (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(x), TWO_PI)


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative per-sample weights; at least one must be nonzero."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if w.ndim != 1:
            raise ValueError("weights must be 1-D")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if not np.any(w > 0.0):
            raise ValueError("all weights are zero")

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.ones(n))

    @property
    def n_used(self) -> int:
        return int(np.count_nonzero(self.w))

    @property
    def n_downweighted(self) -> int:
        return self.w.size - self.n_used


@dataclass(frozen=True)
class SearchGrids:
    """Uniform frequency and phase grids for the grid-search estimators."""

    F: np.ndarray
    Phi: np.ndarray
    f_max: float

    def __post_init__(self):
        object.__setattr__(self, "F", np.asarray(self.F, dtype=float))
        object.__setattr__(self, "Phi", np.asarray(self.Phi, dtype=float))
        if self.F.size < 2 or self.Phi.size < 2:
            raise ValueError("grids need at least two points")

    @property
    def f_step(self) -> float:
        return float(self.F[1] - self.F[0])

    @property
    def phi_step(self) -> float:
        return float(self.Phi[1] - self.Phi[0])

    @classmethod
    def for_schedule(
        cls,
        N: int,
        Ts: float,
        f_max: float | None = None,
        n_phi: int = _DEFAULT_N_PHI,
    ) -> "SearchGrids":
        """Default grids: frequency spacing a quarter of the Fourier
        resolution 1/(N*Ts), f_max at the Nyquist rate of the schedule."""
        nyquist = 1.0 / (2.0 * Ts)
        if f_max is None:
            f_max = nyquist
        elif f_max > nyquist:
            raise ValueError("f_max exceeds the schedule's Nyquist frequency")
        df = 1.0 / (4.0 * N * Ts)
        n_half = int(round(f_max / df))
        F = df * np.arange(-n_half, n_half + 1)
        Phi = (TWO_PI / n_phi) * np.arange(n_phi)
        return cls(F=F, Phi=Phi, f_max=f_max)


@dataclass(frozen=True)
class Estimate:
    """Joint estimate of frequency difference (Hz), phase (rad) and range (m)."""

    f_d_hat: float
    phi_hat: float
    rho_hat: float
    method: str
    residuals: np.ndarray | None = None
    weights: WeightVector | None = None
    f_grid_step: float | None = None
    phi_grid_step: float | None = None
    degenerate: bool = False

    def to_record(self) -> dict:
        n = self.residuals.size if self.residuals is not None else 0
        n_down = self.weights.n_downweighted if self.weights is not None else 0
        return {
            "method": self.method,
            "f_d_hat_hz": self.f_d_hat,
            "phi_hat_rad": self.phi_hat,
            "rho_hat_m": self.rho_hat,
            "n_used": n - n_down,
            "n_downweighted": n_down,
        }


def sawtooth_template(t, f_d: float, phi: float, T_m: float):
    """Noiseless remainder waveform (T_m/2pi)*mod_2pi(2pi*f_d*t + phi)."""
    return (T_m / TWO_PI) * np.mod(TWO_PI * f_d * np.asarray(t) + phi, TWO_PI)


def _outlier_mask(y: np.ndarray):
    """Deviation-from-median test; returns (mask of outliers, degenerate flag)."""
    med = np.median(y)
    dev = np.abs(y - med)
    sigma_mad = NMAD_FACTOR * np.median(dev)
    if sigma_mad == 0.0:
        if np.any(dev > 0.0):
            return np.zeros(y.size, dtype=bool), True
        return np.zeros(y.size, dtype=bool), False
    return dev > 3.0 * sigma_mad, False


def robust_weights(series: RttSeries) -> WeightVector:
    """0/1 weights: zero where the sample deviates from the median by more
    than three normalized MADs.

    Falls back to uniform weights (with a warning) when the MAD collapses to
    zero while deviations remain, e.g. a majority of identical samples.
    """
    if len(series) < 3:
        raise ValueError("need at least 3 samples")
    mask, degenerate = _outlier_mask(series.values)
    if degenerate:
        warnings.warn("zero MAD with nonzero deviations; using uniform weights")
        return WeightVector.uniform(len(series))
    return WeightVector(np.where(mask, 0.0, 1.0))


def preprocess_outliers(series: RttSeries) -> RttSeries:
    """Replace detected outliers: isolated ones by the mean of their two
    neighbors, runs (and boundary hits) by the median of the whole record."""
    if len(series) < 3:
        raise ValueError("need at least 3 samples")
    y = series.values
    mask, _ = _outlier_mask(y)
    if not mask.any():
        return series
    out = y.copy()
    med = np.median(y)
    idx = np.flatnonzero(mask)
    for i in idx:
        isolated = 0 < i < y.size - 1 and not mask[i - 1] and not mask[i + 1]
        out[i] = 0.5 * (y[i - 1] + y[i + 1]) if isolated else med
    return series.with_values(out)


def unwrap(z: np.ndarray) -> np.ndarray:
    """Phase unwrapping: first element kept, consecutive differences mapped
    into (-pi, pi], output congruent to the input modulo 2pi."""
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        raise ValueError("empty input")
    d = np.diff(z)
    d_wrapped = math.pi - np.mod(math.pi - d, TWO_PI)
    out = np.empty_like(z)
    out[0] = z[0]
    out[1:] = z[0] + np.cumsum(d_wrapped)
    return out


def phase_error(phi_hat: float, phi_true: float) -> float:
    """Signed wrapped phase error in radians, in (-pi, pi]."""
    return float(wrap_to_pm_pi(phi_true - phi_hat))


def phase_error_seconds(phi_hat: float, phi_true: float, T_m: float) -> float:
    """Phase error expressed as seconds of clock period."""
    return phase_error(phi_hat, phi_true) * T_m / TWO_PI


def _residuals(series, f_d, phi, rho, T_m, delta0):
    h = sawtooth_template(series.times, f_d, phi, T_m)
    return series.values - h - delta0 - 2.0 * rho / SPEED_OF_LIGHT


def uls_estimate(series: RttSeries, T_m: float, delta0: float) -> Estimate:
    """Three-step unwrapped least squares.

    Range comes from the sample mean assuming the sawtooth averages to
    T_m/2; frequency and phase come from a line fit to the unwrapped,
    mean-centered phase. The T_m/2 assumption biases the range by up to
    c*T_m/4 on short or degenerate (constant) records.
    """
    if len(series) < 2:
        raise ValueError("need at least 2 samples")
    y = series.values
    t = series.times
    y_bar = float(np.mean(y))
    rho_hat = 0.5 * SPEED_OF_LIGHT * (y_bar - 0.5 * T_m - delta0)
    z = (TWO_PI / T_m) * (y - y_bar)
    u = unwrap(z)
    slope, intercept = np.polyfit(t, u, 1)
    f_d_hat = slope / TWO_PI
    # centering by y_bar removed the sawtooth mean (~pi); add it back
    phi_hat = float(wrap_to_2pi(intercept + math.pi))
    return Estimate(
        f_d_hat=float(f_d_hat),
        phi_hat=phi_hat,
        rho_hat=float(rho_hat),
        method="ULS",
        residuals=_residuals(series, f_d_hat, phi_hat, rho_hat, T_m, delta0),
    )


def _periodogram(y: np.ndarray, t: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    """|sum_i y_i exp(-2j pi f t_i)|^2 by direct summation (any sampling)."""
    phase = np.exp(-2j * math.pi * np.outer(freqs, t))
    return np.abs(phase @ y) ** 2


def pcp_estimate(
    series: RttSeries,
    T_m: float,
    delta0: float,
    grids: SearchGrids,
    refine: bool = True,
) -> Estimate:
    """Periodogram + correlation peaks.

    Frequency magnitude from the periodogram peak of the mean-removed data,
    sign and phase from the correlation peak against candidate sawtooths,
    range from a direct least-squares fit of the leftover constant.
    """
    if len(series) < 4:
        raise ValueError("need at least 4 samples")
    y = series.values
    t = series.times
    n = y.size
    y0 = y - np.mean(y)

    f_grid = grids.F[grids.F > 0.0]  # periodogram half-grid, DC excluded
    f_step = grids.f_step
    if not np.any(np.abs(y0) > 1e-15 * max(1.0, np.abs(y).max())):
        # constant series carries no frequency information
        rho_hat = 0.5 * SPEED_OF_LIGHT * float(np.mean(y - delta0))
        return Estimate(
            f_d_hat=0.0,
            phi_hat=0.0,
            rho_hat=rho_hat,
            method="PCP",
            residuals=_residuals(series, 0.0, 0.0, rho_hat, T_m, delta0),
            degenerate=True,
        )

    power = _periodogram(y0, t, f_grid)
    f_mag = float(f_grid[int(np.argmax(power))])
    if refine:
        for _ in range(_REFINE_LEVELS):
            local = f_mag + np.linspace(-f_step, f_step, _REFINE_POINTS)
            local = local[local > 0.0]
            power = _periodogram(y0, t, local)
            f_mag = float(local[int(np.argmax(power))])
            f_step = f_step / _REFINE_FACTOR

    def correlation(phis: np.ndarray, sign: float) -> np.ndarray:
        p = np.mod(TWO_PI * sign * f_mag * t[:, None] + phis[None, :], TWO_PI)
        p0 = p - p.mean(axis=0)
        return y0 @ p0

    # correlate mean-removed data against mean-removed templates, keeping the
    # sign of the correlation: the raw constant offset (delta0 + flight time)
    # would swamp the peak, and centered sawtooths of opposite slope are
    # mirror images, so only the signed peak separates the two slopes
    scores = np.stack([correlation(grids.Phi, s) for s in (-1.0, 1.0)])
    s_idx, p_idx = np.unravel_index(int(np.argmax(scores)), scores.shape)
    sign = (-1.0, 1.0)[s_idx]
    phi_hat = float(grids.Phi[p_idx])
    phi_step = grids.phi_step
    if refine:
        for _ in range(_REFINE_LEVELS):
            local_phi = wrap_to_2pi(
                phi_hat + np.linspace(-phi_step, phi_step, _REFINE_POINTS)
            )
            scores = correlation(local_phi, sign)
            phi_hat = float(local_phi[int(np.argmax(scores))])
            phi_step = phi_step / _REFINE_FACTOR

    f_d_hat = sign * f_mag
    p_best = np.mod(TWO_PI * f_d_hat * t + phi_hat, TWO_PI)
    rho_hat = (
        0.5 * SPEED_OF_LIGHT / n * float(np.sum(y - (T_m / TWO_PI) * p_best - delta0))
    )
    return Estimate(
        f_d_hat=f_d_hat,
        phi_hat=phi_hat,
        rho_hat=rho_hat,
        method="PCP",
        residuals=_residuals(series, f_d_hat, phi_hat, rho_hat, T_m, delta0),
        f_grid_step=f_step,
        phi_grid_step=phi_step,
    )


def wls_cost(
    f_d: float,
    phi: float,
    series: RttSeries,
    T_m: float,
    delta0: float,
    w: WeightVector,
) -> float:
    """Concentrated weighted squared-error cost with the range profiled out."""
    r = series.values - sawtooth_template(series.times, f_d, phi, T_m) - delta0
    wv = w.w
    s = float(np.sum(wv))
    return float(np.sum(wv * r * r) - np.dot(wv, r) ** 2 / s)


def _is_canonical_circle(Phi: np.ndarray) -> bool:
    P = Phi.size
    return bool(np.allclose(Phi, (TWO_PI / P) * np.arange(P), rtol=0.0, atol=1e-12))


def _wls_search_fft(b, t, wv, F, P, T_m):
    """Grid search over F x (2pi*j/P for j in 0..P-1), exact via FFT.

    Between wraps the sawtooth is linear in phase, and shifting phase by one
    grid step permutes the wrap pattern circularly, so each cost term is an
    exact circular correlation of per-sample masses (binned by the integer
    part of the template argument) with ramp kernels. The fractional parts
    only add phase-independent constants.
    """
    s = float(np.sum(wv))
    wb = wv * b
    const = float(np.sum(wv * b * b))
    wtb = float(np.sum(wb))
    amp = T_m / P  # template value is amp * ((j + q_i) mod P + g_i)

    ramp = np.arange(P, dtype=float)
    R1 = np.fft.rfft(ramp)
    R2 = np.fft.rfft(ramp * ramp)

    best = (math.inf, 0, 0)
    chunk = max(1, int(8e6 / P))
    for start in range(0, F.size, chunk):
        f_blk = F[start : start + chunk]
        nf = f_blk.size
        cycles = np.outer(f_blk, t)
        frac = cycles - np.floor(cycles)
        q = np.minimum((frac * P).astype(np.int64), P - 1)
        g = frac * P - q

        m_wb = np.zeros((nf, P))
        m_w = np.zeros((nf, P))
        m_wg = np.zeros((nf, P))
        rows = np.repeat(np.arange(nf), t.size)
        np.add.at(m_wb, (rows, q.ravel()), np.tile(wb, nf))
        np.add.at(m_w, (rows, q.ravel()), np.tile(wv, nf))
        np.add.at(m_wg, (rows, q.ravel()), (wv * g).reshape(nf, -1).ravel())

        g_wb = wb @ g.T  # per-f sums over samples
        g_w = wv @ g.T
        g_w2 = wv @ (g * g).T

        F_wb = np.conj(np.fft.rfft(m_wb, axis=1))
        F_w = np.conj(np.fft.rfft(m_w, axis=1))
        F_wg = np.conj(np.fft.rfft(m_wg, axis=1))

        cross = amp * (np.fft.irfft(F_wb * R1, n=P, axis=1) + g_wb[:, None])
        wh = amp * (np.fft.irfft(F_w * R1, n=P, axis=1) + g_w[:, None])
        wh2 = amp * amp * (
            np.fft.irfft(F_w * R2 + 2.0 * F_wg * R1, n=P, axis=1) + g_w2[:, None]
        )
        cost = (const - 2.0 * cross + wh2) - (wtb - wh) ** 2 / s
        k = int(np.argmin(cost))
        fi, pi = divmod(k, P)
        if cost[fi, pi] < best[0]:
            best = (float(cost[fi, pi]), start + fi, pi)
    _, fi, pi = best
    return float(F[fi]), TWO_PI * pi / P, best[0]


def _wls_search(b, t, wv, F, Phi, T_m):
    """Grid search of the concentrated cost; returns (f, phi, min cost).

    Ties resolve to the lowest frequency index, then lowest phase index.
    """
    s = float(np.sum(wv))
    wb = wv * b
    const = float(np.sum(wv * b * b))
    wtb = float(np.sum(wb))
    amp = T_m / TWO_PI

    best = (math.inf, 0, 0)
    # chunk the frequency axis to bound the (f, sample, phi) work array
    chunk = max(1, int(4e6 / (t.size * Phi.size)))
    for start in range(0, F.size, chunk):
        f_blk = F[start : start + chunk]
        theta = (
            TWO_PI * f_blk[:, None, None] * t[None, :, None] + Phi[None, None, :]
        )
        H = amp * np.mod(theta, TWO_PI)
        cross = np.einsum("i,fip->fp", wb, H)
        wh = np.einsum("i,fip->fp", wv, H)
        wh2 = np.einsum("i,fip->fp", wv, H * H)
        cost = (const - 2.0 * cross + wh2) - (wtb - wh) ** 2 / s
        k = int(np.argmin(cost))
        fi, pi = divmod(k, Phi.size)
        if cost[fi, pi] < best[0]:
            best = (float(cost[fi, pi]), start + fi, pi)
    _, fi, pi = best
    return float(F[fi]), float(Phi[pi]), best[0]


def wls_estimate(
    series: RttSeries,
    T_m: float,
    delta0: float,
    grids: SearchGrids,
    w: WeightVector | None = None,
    refine: bool = True,
) -> Estimate:
    """Two-dimensional grid search of the concentrated WLS cost, followed by
    the closed-form weighted range estimate. With refine=True a second local
    search shrinks both grid steps tenfold around the coarse minimum."""
    if w is None:
        w = WeightVector.uniform(len(series))
    if w.w.size != len(series):
        raise ValueError("weight length mismatch")
    t = series.times
    b = series.values - delta0
    f_step, phi_step = grids.f_step, grids.phi_step
    if _is_canonical_circle(grids.Phi):
        P = grids.Phi.size
        f_hat, phi_hat, _ = _wls_search_fft(b, t, w.w, grids.F, P, T_m)
        if refine:
            # each level shrinks the frequency step tenfold; the phase search
            # stays over the full circle (so the f-phi valley is always
            # covered). One tenfold phase refinement suffices: phase accuracy
            # is limited by the wrap-position lattice (~2pi/N), not the grid
            for level in range(_REFINE_LEVELS):
                F_local = f_hat + np.linspace(-f_step, f_step, _REFINE_POINTS)
                F_local = F_local[np.abs(F_local) <= grids.f_max]
                if level == 0:
                    P *= _REFINE_FACTOR
                    phi_step /= _REFINE_FACTOR
                f_hat, phi_hat, _ = _wls_search_fft(b, t, w.w, F_local, P, T_m)
                f_step /= _REFINE_FACTOR
    else:
        f_hat, phi_hat, _ = _wls_search(b, t, w.w, grids.F, grids.Phi, T_m)
        if refine:
            t_span = max(float(np.abs(t).max()), 1e-12)
            for _ in range(_REFINE_LEVELS):
                F_local = f_hat + np.linspace(-f_step, f_step, _REFINE_POINTS)
                F_local = F_local[np.abs(F_local) <= grids.f_max]
                # a frequency shift df moves the matching phase by
                # ~2*pi*df*t, so the window must cover the whole valley
                phi_half = TWO_PI * f_step * t_span + 2.0 * phi_step
                dphi = phi_step / _REFINE_FACTOR
                n_phi = min(int(math.ceil(phi_half / dphi)), _MAX_PHI_POINTS // 2)
                Phi_local = wrap_to_2pi(phi_hat + dphi * np.arange(-n_phi, n_phi + 1))
                f_hat, phi_hat, _ = _wls_search(b, t, w.w, F_local, Phi_local, T_m)
                f_step /= _REFINE_FACTOR
                phi_step /= _REFINE_FACTOR

    r = b - sawtooth_template(t, f_hat, phi_hat, T_m)
    rho_hat = 0.5 * SPEED_OF_LIGHT * float(np.dot(w.w, r) / np.sum(w.w))
    return Estimate(
        f_d_hat=f_hat,
        phi_hat=float(wrap_to_2pi(phi_hat)),
        rho_hat=rho_hat,
        method="WLS",
        residuals=_residuals(series, f_hat, phi_hat, rho_hat, T_m, delta0),
        weights=w,
        f_grid_step=f_step,
        phi_grid_step=phi_step,
    )
