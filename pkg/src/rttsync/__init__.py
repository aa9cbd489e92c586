"""Two-way RTT clock sampling: simulation and joint estimation of range,
clock frequency difference, and clock phase."""

from .model import (
    SPEED_OF_LIGHT,
    ClockTruth,
    LinkTruth,
    NoiseSpec,
    RttSeries,
    SampleSchedule,
    generate_series,
    nominal_delay,
    nominal_delay_exact,
    remainder_h,
    rtt_sample,
    sigma_to_snr,
    snr_to_sigma,
)
from .edge_sim import (
    ExchangeConfig,
    Oscillator,
    equivalent_clock_truth,
    next_edge,
    simulate_campaign,
    simulate_exchange,
)
from .estimators import (
    Estimate,
    SearchGrids,
    WeightVector,
    pcp_estimate,
    phase_error,
    phase_error_seconds,
    preprocess_outliers,
    robust_weights,
    uls_estimate,
    unwrap,
    wls_cost,
    wls_estimate,
)
from .montecarlo import (
    ExperimentConfig,
    OutlierSpec,
    SweepReport,
    inject_outliers,
    run_sweep,
    run_trial,
)
from .analysis import (
    AcfReport,
    CalibrationCurve,
    apply_calibration,
    calibrate_range,
    residual_acf,
)

__version__ = "0.1.0"
