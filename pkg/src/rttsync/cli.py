"""Command-line interface: simulate, estimate, sweep, residuals, calibrate."""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys

from . import analysis, edge_sim, estimators, io, model, montecarlo


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rttsync",
        description="Two-way RTT simulation and joint clock/range estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate an RTT series CSV")
    sim.add_argument("--generator", choices=("model", "edge"), default="model")
    sim.add_argument("--f-m", type=float, default=1e8, help="master clock frequency, Hz")
    sim.add_argument("--f-d", type=float, default=-32.0, help="frequency difference, Hz")
    sim.add_argument("--phi", type=float, default=0.0, help="clock offset, rad (model)")
    sim.add_argument("--rho", type=float, default=2.0, help="range, m")
    sim.add_argument("--delta0", type=float, default=5e-6, help="slave delay, s (model)")
    sim.add_argument("--k", type=int, default=500, help="delay cycles (edge)")
    sim.add_argument("--master-varphi", type=float, default=0.0)
    sim.add_argument("--slave-varphi", type=float, default=0.0)
    sim.add_argument("--t0", type=float, default=0.0)
    sim.add_argument("--ts", type=float, default=1e-3)
    sim.add_argument("-n", "--samples", type=int, default=100)
    sim.add_argument("--snr-c-db", type=float, default=None)
    sim.add_argument("--snr-j-db", type=float, default=None)
    sim.add_argument("--sigma-n", type=float, default=0.0)
    sim.add_argument("--sigma-v", type=float, default=0.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("-o", "--output", required=True)

    est = sub.add_parser("estimate", help="estimate parameters from a series CSV")
    est.add_argument("input")
    est.add_argument("--method", choices=("uls", "pcp", "wls"), required=True)
    est.add_argument("--t-m", type=float, default=1e-8, help="master clock period, s")
    est.add_argument("--delta0", type=float, default=5e-6)
    est.add_argument("--f-max", type=float, default=None)
    est.add_argument("--n-phi", type=int, default=512)
    est.add_argument("--no-refine", action="store_true")
    est.add_argument("-o", "--output", default=None, help="default: stdout")

    swp = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    swp.add_argument("--config", required=True)
    swp.add_argument("-o", "--output", required=True)

    res = sub.add_parser("residuals", help="residual autocorrelation report")
    res.add_argument("input")
    res.add_argument("--method", choices=("uls", "pcp", "wls"), default="wls")
    res.add_argument("--f-d", type=float, default=None, help="use fixed parameters")
    res.add_argument("--phi", type=float, default=0.0)
    res.add_argument("--rho", type=float, default=0.0)
    res.add_argument("--t-m", type=float, default=1e-8)
    res.add_argument("--delta0", type=float, default=5e-6)
    res.add_argument("--max-lag", type=int, default=50)
    res.add_argument("-o", "--output", required=True)

    cal = sub.add_parser("calibrate", help="fit a range calibration curve")
    cal.add_argument("pairs", help="CSV with header range_m,rtt_seconds")
    cal.add_argument("-o", "--output", required=True, help="curve JSON file")
    return parser


def _grids_for(series, args):
    ts = float(series.times[1] - series.times[0])
    return estimators.SearchGrids.for_schedule(
        len(series), ts, f_max=args.f_max, n_phi=args.n_phi
    )


def _estimate(series, method: str, args) -> estimators.Estimate:
    if method == "uls":
        return estimators.uls_estimate(series, args.t_m, args.delta0)
    grids = _grids_for(series, args)
    refine = not getattr(args, "no_refine", False)
    if method == "pcp":
        series = estimators.preprocess_outliers(series)
        return estimators.pcp_estimate(series, args.t_m, args.delta0, grids, refine=refine)
    w = estimators.robust_weights(series)
    return estimators.wls_estimate(series, args.t_m, args.delta0, grids, w, refine=refine)


def _cmd_simulate(args) -> int:
    schedule = model.SampleSchedule(t0=args.t0, Ts=args.ts, N=args.samples)
    if args.generator == "model":
        clock = model.ClockTruth(f_m=args.f_m, f_d=args.f_d, phi=args.phi)
        link = model.LinkTruth(rho=args.rho, delta0=args.delta0)
        if args.snr_c_db is not None or args.snr_j_db is not None:
            if args.snr_c_db is None or args.snr_j_db is None:
                raise ValueError("--snr-c-db and --snr-j-db must be given together")
            noise = model.NoiseSpec.from_snr(args.snr_c_db, args.snr_j_db, clock.T_m)
        else:
            noise = model.NoiseSpec(sigma_v=args.sigma_v, sigma_n=args.sigma_n)
        series = model.generate_series(schedule, clock, link, noise, seed=args.seed)
    else:
        master = edge_sim.Oscillator(f0=args.f_m, varphi=args.master_varphi)
        slave = edge_sim.Oscillator.from_frequency(
            f0=args.f_m, f=args.f_m - args.f_d, varphi=args.slave_varphi
        )
        cfg = edge_sim.ExchangeConfig(K=args.k, rho=args.rho)
        series = edge_sim.simulate_campaign(master, slave, cfg, schedule)
    io.write_series(args.output, series)
    return 0


def _cmd_estimate(args) -> int:
    series = io.read_series(args.input)
    est = _estimate(series, args.method, args)
    text = io.estimate_to_csv(est)
    if args.output is None:
        sys.stdout.write(text)
    else:
        io.atomic_write_text(args.output, text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = io.read_experiment_config(args.config)
    report = montecarlo.run_sweep(cfg)
    io.write_report(args.output, report)
    return 0


def _cmd_residuals(args) -> int:
    series = io.read_series(args.input)
    if args.f_d is not None:
        est = estimators.Estimate(
            f_d_hat=args.f_d, phi_hat=args.phi, rho_hat=args.rho, method="FIXED"
        )
    else:
        est = _estimate(series, args.method, args)
    report = analysis.residual_acf(series, est, args.max_lag, args.t_m, args.delta0)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lag", "acf", "bound"])
    for lag, value in zip(report.lags, report.acf):
        writer.writerow([int(lag), repr(float(value)), repr(report.bound)])
    io.atomic_write_text(args.output, buf.getvalue())
    sys.stdout.write(f"fraction_inside={report.fraction_inside!r}\n")
    return 0


def _cmd_calibrate(args) -> int:
    pairs = io.read_calibration_pairs(args.pairs)
    curve = analysis.calibrate_range(pairs)
    io.atomic_write_text(args.output, io.curve_to_json(curve))
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "residuals": _cmd_residuals,
    "calibrate": _cmd_calibrate,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"rttsync: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
