"""Command-line front end.

Subcommands mirror the library pipelines: ``simulate`` integrates and stores
a trace, ``g2``/``acf``/``spectrum`` compute statistics from a stored trace,
``counts``/``hbt`` run the photon-counting emulation, ``sweep`` and
``figure`` drive the grid pipelines.

Dimensioned values always carry a unit suffix (``--record 10us``,
``--kappa 50ns-1``); bare numbers are rejected.  Every run prints the fully
resolved configuration before computing, so any artifact can be reproduced
from its own log; ``--dry-run`` stops after that printout.  Exit codes:
0 success, 1 runtime failure, 2 configuration or usage error.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .counting import (DetectorConfig, bose_einstein_pmf,
                       calibrate_attenuation, distribution_distance,
                       hbt_coincidence_g2, pnd_from_counts, poisson_pmf,
                       sample_counts, write_pnd_csv)
from .experiment import SweepSpec, reproduce_figure, run_sweep, write_sweep_csv
from .integrator import SimConfig, integrate
from .counting import DegenerateTraceError as CountingDegenerateError
from .metrics import DegenerateTraceError as MetricsDegenerateError
from .metrics import (autocorrelation, bandwidth_80, echo_height,
                      g2_from_intensity, power_spectrum, write_acf_csv,
                      write_g2_csv, write_spectrum_csv)
from .params import (DEFAULT_CALIBRATION, ParamError, configs_from_dict,
                     eta_to_kappa, parse_param_file)
from .trace_io import TraceFormatError, read_trace, trace_to_csv, write_trace
from .units import UnitError, parse_rate, parse_time

_ENV_OUT = "LKCHAOS_OUT"


class CliConfigError(Exception):
    """Configuration-phase failure; maps to exit status 2."""


def _default_out(args, fallback):
    if args.out:
        return args.out
    base = os.environ.get(_ENV_OUT, ".")
    return os.path.join(base, fallback)


def _resolve_configs(args):
    """Merge parameter file and command-line overrides into config records."""
    values = parse_param_file(args.config) if args.config else {}
    if getattr(args, "rho", None) is not None:
        values["rho"] = args.rho
    if getattr(args, "kappa", None) is not None:
        if getattr(args, "eta", None) is not None:
            raise CliConfigError("give --kappa or --eta, not both")
        values.pop("eta_percent", None)
        values["kappa_per_ns"] = parse_rate(args.kappa) / 1e9
    elif getattr(args, "eta", None) is not None:
        values.pop("kappa_per_ns", None)
        values["eta_percent"] = args.eta
    if getattr(args, "tau_ext", None) is not None:
        values["tau_ext_ns"] = parse_time(args.tau_ext) * 1e9
    if getattr(args, "phase_c", None) is not None:
        values["phase_c_rad"] = args.phase_c
    return configs_from_dict(values)


def _print_resolved(pairs):
    for key, value in pairs:
        print(f"{key} = {value}")


def _resolved_pairs(laser, feedback, drive, sim=None):
    pairs = [
        ("alpha", laser.alpha),
        ("tau_p_ps", laser.tau_p * 1e12),
        ("tau_n_ns", laser.tau_n * 1e9),
        ("g_n_per_ps", laser.g_n / 1e12),
        ("n0", laser.n0),
        ("epsilon", laser.epsilon),
        ("lambda_um", laser.lambda_m * 1e6),
        ("kappa_per_ns", feedback.kappa / 1e9),
        ("tau_ext_ns", feedback.tau_ext * 1e9),
        ("phase_c_rad", feedback.phase_c),
        ("rho", drive.rho),
    ]
    if sim is not None:
        pairs += [
            ("step_ps", sim.step_h * 1e12),
            ("transient_us", sim.t_transient * 1e6),
            ("record_us", sim.t_record * 1e6),
            ("record_stride", sim.record_stride),
            ("channels", sim.record),
            ("seed", sim.seed),
        ]
    return pairs


def cmd_simulate(args):
    laser, feedback, drive = _resolve_configs(args)
    sim = SimConfig(
        step_h=parse_time(args.step) if args.step else 2e-12,
        t_transient=parse_time(args.transient) if args.transient else 2e-6,
        t_record=parse_time(args.record) if args.record else 10e-6,
        record_stride=args.stride,
        record=args.channels,
        seed=args.seed,
    )
    _print_resolved(_resolved_pairs(laser, feedback, drive, sim))
    if args.dry_run:
        return 0
    trace = integrate(laser, feedback, drive, sim)
    out = _default_out(args, "trace.lktr")
    write_trace(out, trace)
    if args.csv:
        trace_to_csv(args.csv, trace)
    mean = trace.intensity.mean()
    sigma = trace.intensity.std()
    print(f"simulate: wrote {out}  samples={trace.intensity.size}  "
          f"mean_I={mean:.6g}  sigma_I/mean_I={sigma / mean:.4f}  "
          f"clamp_fraction={trace.meta['clamp_fraction_recorded']:.3g}")
    return 0


def _load_trace(args):
    try:
        return read_trace(args.input)
    except FileNotFoundError as err:
        raise CliConfigError(str(err)) from err


def cmd_g2(args):
    max_lag = parse_time(args.max_lag)
    if args.dry_run:
        print(f"input = {args.input}")
        print(f"max_lag_ns = {max_lag * 1e9}")
        return 0
    trace = _load_trace(args)
    curve = g2_from_intensity(trace, max_lag, lag_stride=args.lag_stride,
                              side=args.side)
    out = _default_out(args, "g2.csv")
    write_g2_csv(out, curve, meta={"input": args.input,
                                   "max_lag_ns": max_lag * 1e9})
    print(f"g2: wrote {out}  g2(0)={curve.zero_lag:.3f}  "
          f"mean_I={curve.mean_intensity:.6g}")
    return 0


def cmd_acf(args):
    max_lag = parse_time(args.max_lag)
    tau_ext = parse_time(args.tau_ext)
    if args.dry_run:
        print(f"input = {args.input}")
        print(f"max_lag_ns = {max_lag * 1e9}")
        print(f"tau_ext_ns = {tau_ext * 1e9}")
        return 0
    trace = _load_trace(args)
    acf = autocorrelation(trace, max_lag)
    out = _default_out(args, "acf.csv")
    write_acf_csv(out, acf, meta={"input": args.input})
    summary = f"acf: wrote {out}  C(0)={acf.values[0]:.3f}"
    if acf.lags[-1] >= tau_ext + 2e-9:
        rep = echo_height(acf, tau_ext)
        summary += f"  echo_h={rep.h:.4f}  tau_peak_ns={rep.tau_peak * 1e9:.3f}"
    print(summary)
    return 0


def cmd_spectrum(args):
    if args.dry_run:
        print(f"input = {args.input}")
        print(f"segment = {args.segment}")
        print(f"overlap = {args.overlap}")
        return 0
    trace = _load_trace(args)
    sp = power_spectrum(trace, segment_len=args.segment, overlap=args.overlap)
    out = _default_out(args, "spectrum.csv")
    write_spectrum_csv(out, sp, meta={"input": args.input})
    print(f"spectrum: wrote {out}  bandwidth80={bandwidth_80(sp) / 1e9:.3f}GHz  "
          f"rbw={sp.rbw / 1e6:.3f}MHz")
    return 0


def cmd_counts(args):
    window = parse_time(args.window)
    dead = parse_time(args.dead_time) if args.dead_time else 0.0
    if args.dry_run:
        print(f"input = {args.input}")
        print(f"window_ps = {window * 1e12}")
        print(f"dead_time_ps = {dead * 1e12}")
        print(f"target_mean = {args.mean}")
        return 0
    trace = _load_trace(args)
    det = DetectorConfig(window_t=window, dead_time=dead, seed=args.seed,
                         atten=args.atten)
    if args.mean is not None:
        det = calibrate_attenuation(trace, det, args.mean)
    pnd = pnd_from_counts(sample_counts(trace, det))
    out = _default_out(args, "pnd.csv")
    write_pnd_csv(out, pnd, meta={"input": args.input,
                                  "window_ps": window * 1e12,
                                  "dead_time_ps": dead * 1e12,
                                  "atten": det.atten, "seed": args.seed})
    tv_be = distribution_distance(pnd, lambda n: bose_einstein_pmf(pnd.mean, n))
    tv_po = distribution_distance(pnd, lambda n: poisson_pmf(pnd.mean, n))
    print(f"counts: wrote {out}  mean={pnd.mean:.4f}  g2(0)={pnd.g2_zero:.3f}  "
          f"tv_be={tv_be:.4f}  tv_poisson={tv_po:.4f}")
    return 0


def cmd_hbt(args):
    max_lag = parse_time(args.max_lag)
    if args.dry_run:
        print(f"input = {args.input}")
        print(f"max_lag_ns = {max_lag * 1e9}")
        print(f"atten = {args.atten}")
        return 0
    trace = _load_trace(args)
    det = DetectorConfig(atten=args.atten, seed=args.seed)
    curve = hbt_coincidence_g2(trace, det, max_lag)
    out = _default_out(args, "hbt_g2.csv")
    write_g2_csv(out, curve, meta={"input": args.input, "atten": args.atten,
                                   "timing_res_ps": det.timing_res * 1e12})
    print(f"hbt: wrote {out}  g2(0)={curve.zero_lag:.3f}")
    return 0


def _parse_list(text, parser):
    return tuple(parser(part) for part in text.split(",") if part)


def cmd_sweep(args):
    if args.kappas:
        kappas = _parse_list(args.kappas, parse_rate)
    elif args.etas:
        kappas = _parse_list(
            args.etas,
            lambda s: eta_to_kappa(DEFAULT_CALIBRATION, float(s) / 100.0))
    else:
        raise CliConfigError("sweep needs --kappas or --etas")
    spec = SweepSpec(
        rhos=_parse_list(args.rhos, float),
        kappas=kappas,
        metrics=tuple(args.metrics.split(",")),
        ensemble_size=args.ensemble,
        seed=args.seed,
        sim=SimConfig(
            t_transient=parse_time(args.transient) if args.transient else 4e-6,
            t_record=parse_time(args.record) if args.record else 10e-6,
            seed=args.seed,
        ),
    )
    print(f"grid_points = {len(spec.grid())}")
    print(f"metrics = {','.join(spec.metrics)}")
    print(f"ensemble_size = {spec.ensemble_size}")
    print(f"seed = {spec.seed}")
    if args.dry_run:
        return 0
    result = run_sweep(spec, jobs=args.jobs)
    out = _default_out(args, "sweep.csv")
    columns = ["rho", "kappa", "phase_c"] + [m for m in spec.metrics]
    write_sweep_csv(out, result, columns)
    print(f"sweep: wrote {out}  points={len(result.records)}  "
          f"failed={result.any_failed}")
    return 1 if result.any_failed else 0


def cmd_figure(args):
    out_dir = args.out or os.environ.get(_ENV_OUT, ".")
    print(f"tag = {args.tag}")
    print(f"out_dir = {out_dir}")
    print(f"seed = {args.seed}")
    print(f"jobs = {args.jobs}")
    if args.dry_run:
        return 0
    manifest = reproduce_figure(args.tag, out_dir, seed=args.seed,
                                jobs=args.jobs)
    print(f"figure {args.tag}: wrote {len(manifest['files'])} files to "
          f"{out_dir}")
    return 1 if manifest.get("failed") else 0


def _add_common(sub, out_default_help):
    sub.add_argument("--out", help=out_default_help)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--dry-run", action="store_true",
                     help="validate and print resolved configuration only")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lkchaos",
        description="Chaotic laser dynamics and photon statistics")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="integrate and store a trace")
    sim.add_argument("--config", help="flat key=value parameter file")
    sim.add_argument("--rho", type=float)
    sim.add_argument("--kappa", help="feedback rate, e.g. 50ns-1")
    sim.add_argument("--eta", type=float, help="feedback power percent")
    sim.add_argument("--tau-ext", help="external delay, e.g. 99.85ns")
    sim.add_argument("--phase-c", type=float)
    sim.add_argument("--step", help="integration step, e.g. 2ps")
    sim.add_argument("--transient", help="warm-up to discard, e.g. 2us")
    sim.add_argument("--record", help="recorded duration, e.g. 10us")
    sim.add_argument("--stride", type=int, default=1)
    sim.add_argument("--channels", choices=("intensity", "full"),
                     default="intensity")
    sim.add_argument("--csv", help="also export the trace as CSV")
    _add_common(sim, "output trace path (.lktr)")
    sim.set_defaults(func=cmd_simulate)

    g2p = subs.add_parser("g2", help="second-order coherence from a trace")
    g2p.add_argument("--input", required=True)
    g2p.add_argument("--max-lag", required=True, help="e.g. 5ns")
    g2p.add_argument("--lag-stride", type=int, default=1)
    g2p.add_argument("--side", choices=("one", "both"), default="one")
    _add_common(g2p, "output CSV path")
    g2p.set_defaults(func=cmd_g2)

    acf = subs.add_parser("acf", help="normalized autocorrelation and echo")
    acf.add_argument("--input", required=True)
    acf.add_argument("--max-lag", required=True, help="e.g. 105ns")
    acf.add_argument("--tau-ext", default="99.85ns")
    _add_common(acf, "output CSV path")
    acf.set_defaults(func=cmd_acf)

    spec = subs.add_parser("spectrum", help="averaged periodogram and bandwidth")
    spec.add_argument("--input", required=True)
    spec.add_argument("--segment", type=int, default=1 << 17)
    spec.add_argument("--overlap", type=float, default=0.5)
    _add_common(spec, "output CSV path")
    spec.set_defaults(func=cmd_spectrum)

    cnt = subs.add_parser("counts", help="photon counts per window and Pnd")
    cnt.add_argument("--input", required=True)
    cnt.add_argument("--window", required=True, help="e.g. 100ps")
    cnt.add_argument("--mean", type=float,
                     help="calibrate attenuation to this mean count")
    cnt.add_argument("--atten", type=float, default=1.0)
    cnt.add_argument("--dead-time", help="e.g. 60ps (default off)")
    _add_common(cnt, "output CSV path")
    cnt.set_defaults(func=cmd_counts)

    hbt = subs.add_parser("hbt", help="two-detector coincidence g2")
    hbt.add_argument("--input", required=True)
    hbt.add_argument("--max-lag", required=True, help="e.g. 5ns")
    hbt.add_argument("--atten", type=float, default=1.0)
    _add_common(hbt, "output CSV path")
    hbt.set_defaults(func=cmd_hbt)

    swp = subs.add_parser("sweep", help="metric grid over rho and kappa")
    swp.add_argument("--rhos", required=True, help="e.g. 1.07,1.2,1.5")
    swp.add_argument("--kappas", help="e.g. 5.5ns-1,11ns-1")
    swp.add_argument("--etas", help="feedback percents, e.g. 3.1,12.5")
    swp.add_argument("--metrics", default="g2_0")
    swp.add_argument("--ensemble", type=int, default=1)
    swp.add_argument("--record", help="per-point recorded duration")
    swp.add_argument("--transient", help="per-point warm-up")
    swp.add_argument("--jobs", type=int, default=1)
    _add_common(swp, "output CSV path")
    swp.set_defaults(func=cmd_sweep)

    fig = subs.add_parser("figure", help="reproduce a standard dataset")
    fig.add_argument("tag", choices=("fig2", "fig4", "fig5", "fig7"))
    fig.add_argument("--jobs", type=int, default=1)
    _add_common(fig, "output directory")
    fig.set_defaults(func=cmd_figure)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MetricsDegenerateError, CountingDegenerateError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (CliConfigError, ParamError, UnitError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (RuntimeError, TraceFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
