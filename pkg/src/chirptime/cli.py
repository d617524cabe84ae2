"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data/config error, 4 runtime
numerical error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import sigio
from .config import bundled_scenarios, load_scenario
from .css import ChirpParams, ComplexSignal, detect_peak, downconvert, fine_demod, make_symbol, upconvert
from .errors import ChirpTimeError, RunError
from .harness import run_scenario, sweep, write_csv
from .noise import NoiseModel, clip, estimate_n90, sample_alpha_stable

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


def _m_arg(text):
    return None if text.lower() in ("none", "off") else float(text)


def _add_chirp_flags(p, s_default):
    p.add_argument("--sf", type=int, default=10, help="spreading factor SF (samples per base chirp = 2^SF)")
    p.add_argument("--bandwidth", type=float, default=100e3, help="LoRa bandwidth B [Hz]")
    p.add_argument("--s", type=int, default=s_default, help="oversampling factor s (fine steps per base period)")
    p.add_argument("--energy", type=float, default=1.0, help="symbol energy Es [dimensionless]")
    p.add_argument("--carrier", type=float, default=0.0, help="carrier frequency f_c [Hz], 0 = baseband")


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="chirptime", description=__doc__, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chirp", help="write an oversampled chirp symbol", formatter_class=fmt)
    _add_chirp_flags(p, 100)
    p.add_argument("--k", type=int, default=0, help="cyclic symbol index k in [0, 2^SF)")
    p.add_argument("--out", default="chirp.csig", help="output file (.csv for CSV, otherwise CSIG)")

    p = sub.add_parser("demod", help="fine-demodulate one window of a signal file", formatter_class=fmt)
    p.add_argument("--in", dest="infile", required=True, help="input CSIG or CSV signal file")
    _add_chirp_flags(p, 100)
    p.add_argument("--mode", choices=["global_max", "first_arrival"], default="global_max", help="peak rule")
    p.add_argument("--rho", type=float, default=0.5, help="first_arrival threshold as a fraction of the maximum")
    p.add_argument("--offset", type=int, default=0, help="window start [samples at s*B]")
    p.add_argument("--sample-rate", type=float, default=None,
                   help="sample rate [Hz] for CSV input; unset = s*B")
    p.add_argument("--profile-out", default=None, help="write the profile as CSV (index,lag_s,magnitude)")

    p = sub.add_parser("noise", help="draw alpha-stable noise and report statistics", formatter_class=fmt)
    p.add_argument("--alpha", type=float, default=2.0, help="stability index alpha in (0, 2]")
    p.add_argument("--beta", type=float, default=0.0, help="skewness beta in [-1, 1]")
    p.add_argument("--gamma", type=float, default=1.0, help="scale (dispersion) gamma [signal units]")
    p.add_argument("--delta", type=float, default=0.0, help="location delta [signal units]")
    p.add_argument("--n", type=int, default=100_000, help="number of samples")
    p.add_argument("--m", type=_m_arg, default=None, help="clip multiple M of n90, or 'none'")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", default=None, help="also write the samples as a real-valued CSIG/CSV file")

    for name, text in (("simulate", "run one noise condition"), ("sweep", "run every noise condition")):
        p = sub.add_parser(name, help=text, formatter_class=fmt)
        p.add_argument("--config", default="desk_default",
                       help=f"scenario file or bundled name ({', '.join(bundled_scenarios())})")
        p.add_argument("--out", default="results", help="output directory for chirps.csv and aggregates.csv")
        p.add_argument("--seed", type=int, default=None, help="master seed override; unset = seed from config")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        if name == "simulate":
            p.add_argument("--snr", type=float, default=None, help="SNR_D [dB]; unset = first in config")
            p.add_argument("--alpha", type=float, default=None, help="alpha; unset = first in config")
            p.add_argument("--m", default=None,
                           help="clip multiple M or 'none'; unset = first in config")
    return parser


def _params(args):
    return ChirpParams(args.sf, args.bandwidth, args.s, args.energy, args.carrier)


def cmd_chirp(args):
    params = _params(args)
    sig = make_symbol(params, args.k, params.oversampling)
    if params.carrier_frequency:
        sig = upconvert(sig, params.carrier_frequency)
    sigio.write_signal(sig, args.out)
    print(f"wrote {len(sig)} samples at {sig.sample_rate:.17g} Hz to {args.out}")


def cmd_demod(args):
    params = _params(args)
    sig = sigio.read_signal(args.infile, args.sample_rate or params.fine_rate)
    if params.carrier_frequency:
        sig = downconvert(sig, params.carrier_frequency)
    profile = fine_demod(sig, params, args.offset)
    res = detect_peak(profile, args.mode, args.rho)
    if args.profile_out:
        with open(args.profile_out, "w") as fh:
            fh.write("index,lag_s,magnitude\n")
            for i, v in enumerate(profile.magnitudes):
                fh.write(f"{i},{i * profile.resolution:.17g},{v:.17g}\n")
    print(f"peak_index={res.peak_index}")
    print(f"peak_magnitude={res.peak_magnitude:.17g}")
    print(f"delay_s={res.delay:.17g}")
    print(f"resolution_s={profile.resolution:.17g}")
    print(f"profile_length={len(profile)}")


def cmd_noise(args):
    model = NoiseModel(args.alpha, args.beta, args.gamma, args.delta, clip_multiple=args.m, seed=args.seed)
    x = sample_alpha_stable(model, args.n, np.random.default_rng(args.seed))
    n90 = estimate_n90(x)
    threshold = None
    if args.m is not None:
        threshold = n90 * args.m
        x = clip(x, threshold)
    if args.out:
        sigio.write_signal(ComplexSignal(x.astype(complex), 1.0), args.out)
    mean = float(np.mean(x))
    var = float(np.var(x))
    kurt = float(np.mean((x - mean) ** 4) / var**2) if var > 0 else float("nan")
    print(f"n={x.size}")
    print(f"alpha={args.alpha:.17g}")
    print(f"gamma={args.gamma:.17g}")
    print(f"mean={mean:.17g}")
    print(f"variance={var:.17g}")
    print(f"kurtosis={kurt:.17g}")
    print(f"n90={n90:.17g}")
    print(f"threshold={'none' if threshold is None else format(threshold, '.17g')}")
    print(f"max_abs={float(np.max(np.abs(x))):.17g}")


def _scenario(args):
    config = load_scenario(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def cmd_simulate(args):
    config = _scenario(args)
    cond = (
        config.snr_d_list[0] if args.snr is None else args.snr,
        config.alpha_list[0] if args.alpha is None else args.alpha,
        config.m_list[0] if args.m is None else _m_arg(args.m),
    )
    stats = [run_scenario(config, cond, 0)]
    _report(stats, write_csv(stats, args.out))


def cmd_sweep(args):
    config = _scenario(args)
    stats = sweep(config, args.jobs)
    _report(stats, write_csv(stats, args.out))
    if any(s.error for s in stats):
        for s in stats:
            if s.error:
                print(f"condition {s.condition_id} failed: {s.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _report(stats, files):
    for s in stats:
        a = s.aggregates
        c = s.condition
        print(f"[{s.condition_id}] snr_d={c.snr_d_db:g} dB alpha={c.alpha:g} m={c.m} "
              f"n={a['n']} mean={a['mean_s']:.4g} s std={a['std_s']:.4g} s")
    print("wrote " + ", ".join(str(f) for f in files))


COMMANDS = {
    "chirp": cmd_chirp,
    "demod": cmd_demod,
    "noise": cmd_noise,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args) or EXIT_OK
    except (RunError, FloatingPointError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ChirpTimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
