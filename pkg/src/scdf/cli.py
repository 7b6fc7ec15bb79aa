"""Command-line experiment runner.

Every failure prints one line ``error code=<CODE> ...`` on stderr and exits
with 2 (config), 3 (numerical) or 4 (unsupported combination).
"""

import argparse
import sys
from contextlib import contextmanager
from dataclasses import replace

import yaml

from .channel import asymmetric_preset, config_from_dict, config_to_dict, symmetric_preset
from .errors import ConfigError, ScdfError
from .experiments import (
    POWER_COLUMNS,
    SWEEP_COLUMNS,
    VALIDATION_COLUMNS,
    SweepSpec,
    run_antenna_comparison,
    run_power_comparison,
    run_sweep,
    run_validation,
    snr_grid,
    write_csv,
)

PRESETS = ("symmetric", "asymmetric", "asymmetric-rayleigh")


def load_config(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", "--config") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}".replace("\n", " "), "--config") from None
    return config_from_dict(data)


def resolve_config(args):
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both", "--preset")
    if args.config:
        cfg = load_config(args.config)
        if args.relays is not None:
            if args.relays > cfg.K:
                raise ConfigError("--relays cannot exceed the relays listed in the config file", "--relays")
            cfg = replace(cfg, relays=cfg.relays[: args.relays])
    else:
        preset = args.preset or "symmetric"
        antennas = args.antennas or 2
        if preset == "symmetric":
            kw = {} if args.m is None else {"m": args.m}
            cfg = symmetric_preset(K=3 if args.relays is None else args.relays, antennas=antennas, **kw)
        else:
            if args.relays not in (None, 3):
                raise ConfigError(f"the {preset} preset has exactly 3 relays", "--relays")
            cfg = asymmetric_preset(antennas=antennas, rayleigh=preset.endswith("rayleigh"))
    if args.antennas is not None and args.antennas != cfg.antennas:
        relays = cfg.relays
        if args.antennas == 1:
            relays = tuple(replace(b, s_to_relay_ant2=None) for b in relays)
        cfg = replace(cfg, antennas=args.antennas, relays=relays)
    if args.gamma_th is not None:
        cfg = replace(cfg, gamma_th=args.gamma_th)
    if args.modulation is not None:
        cfg = replace(cfg, modulation_order=args.modulation)
    if (args.preset or "symmetric") != "symmetric" and args.m is not None and not args.config:
        raise ConfigError("--m only applies to the symmetric preset", "--m")
    config_from_dict(config_to_dict(cfg))
    return cfg


def grid_from(args):
    return snr_grid(args.snr_start, args.snr_stop, args.snr_step)


@contextmanager
def output(args):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def cmd_sweep(args):
    cfg = resolve_config(args)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    spec = SweepSpec(args.quantity, tuple(grid_from(args)), cfg, methods, args.mc_samples, args.seed)
    rows = run_sweep(spec)
    with output(args) as fh:
        write_csv(rows, SWEEP_COLUMNS, fh)
    return 0


def cmd_power_compare(args):
    cfg = resolve_config(args)
    res = run_power_comparison(cfg, grid_from(args))
    with output(args) as fh:
        write_csv(res.rows, POWER_COLUMNS, fh)
    print(f"max numeric-vs-equal saving: {res.max_saving_db:.3f} dB", file=sys.stderr)
    for note in res.notes:
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_antenna_compare(args):
    cfg = resolve_config(args) if (args.config or args.preset or args.m) else None
    res = run_antenna_comparison(args.p_tot, grid_from(args), template=cfg)
    columns = ["snr_db"] + [k for k in res.rows[0] if k != "snr_db"]
    with output(args) as fh:
        write_csv(res.rows, columns, fh)
    ranges = ", ".join(f"[{a:g}, {b:g}] dB" for a, b in res.beats_ranges) or "none"
    print(f"(4 relays, 2 antennas) beats (5 relays, 1 antenna) on: {ranges}", file=sys.stderr)
    return 0


def cmd_validate(args):
    if args.config or args.preset:
        cases = [(args.preset or "config", resolve_config(args))]
    else:
        cases = [("symmetric", symmetric_preset()), ("asymmetric", asymmetric_preset())]
    quantities = (args.quantity,) if args.quantity else ("outage", "sep", "capacity")
    rows = run_validation(cases, grid_from(args), args.mc_samples, args.seed, quantities)
    with output(args) as fh:
        write_csv(rows, VALIDATION_COLUMNS, fh)
    failed = [r for r in rows if not r["pass"]]
    if failed:
        print(f"error code=CONSISTENCY_FAILURE failed={len(failed)} of {len(rows)}", file=sys.stderr)
        return 3
    return 0


def cmd_show_config(args):
    cfg = resolve_config(args)
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    with output(args) as fh:
        fh.write(text)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=PRESETS)
    common.add_argument("--config", metavar="PATH", help="YAML config file")
    common.add_argument("--relays", type=int, metavar="K")
    common.add_argument("--antennas", type=int, choices=(1, 2))
    common.add_argument("--m", type=int, help="Nakagami shape for the symmetric preset")
    common.add_argument("--gamma-th", type=float)
    common.add_argument("--modulation", type=int, metavar="M")
    common.add_argument("--snr-start", type=float, default=0.0)
    common.add_argument("--snr-stop", type=float, default=20.0)
    common.add_argument("--snr-step", type=float, default=2.0)
    common.add_argument("--mc-samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog="scdf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="analytic and/or Monte-Carlo sweep over SNR")
    p.add_argument("--quantity", choices=("outage", "sep", "capacity"), default="outage")
    p.add_argument("--methods", default="analytic,montecarlo")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("power-compare", parents=[common], help="outage under each power split vs total power (dB)")
    p.set_defaults(func=cmd_power_compare)

    p = sub.add_parser("antenna-compare", parents=[common], help="outage for (K, antennas) pairs")
    p.add_argument("--p-tot", type=float, default=2.0)
    p.set_defaults(func=cmd_antenna_compare)

    p = sub.add_parser("validate", parents=[common], help="analytic-vs-Monte-Carlo consistency suite")
    p.add_argument("--quantity", choices=("outage", "sep", "capacity"))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("show-config", parents=[common], help="print the resolved configuration")
    p.set_defaults(func=cmd_show_config)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScdfError as exc:
        field = getattr(exc, "field", None)
        where = f" field={field}" if field else ""
        msg = str(exc).replace("\n", " ")
        print(f"error code={exc.code}{where} message={msg}", file=sys.stderr)
        return exc.exit_status
    except (ValueError, OverflowError) as exc:
        print(f"error code={ConfigError.code} message={exc}", file=sys.stderr)
        return ConfigError.exit_status
    except ArithmeticError as exc:
        print(f"error code=NUMERICAL_FAILURE message={exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
