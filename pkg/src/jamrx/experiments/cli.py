"""Command-line front end.

Exit codes: 0 on success, 1 on configuration errors, 2 when validation fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from ..model import InvalidParameterError
from ..rate import McConfig
from .config import (ConfigError, ExperimentConfig, SweepAxis, antenna_sweep_config, env_seed,
                     jamming_sweep_config, load_config, parse_filters)
from .output import emit, write_plot_script
from .sweeps import run_sweep_antennas, run_sweep_jamming
from .validation import run_validation

log = logging.getLogger("jamrx")

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--seed", type=int, help="master seed (overrides $JAMRX_SEED and the config)")
    p.add_argument("--inner-samples", type=int, help="channel draws per jamming sequence")
    p.add_argument("--outer-samples", type=int, help="jamming-sequence draws")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jamrx", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("sweep-antennas", "achievable rate versus antenna count"),
                           ("sweep-jamming", "achievable rate versus jamming power q_t = q_d")):
        sp = sub.add_parser(name, help=helptext)
        _add_common(sp)
        sp.add_argument("--sweep", help="grid as start:stop:points[:scale]")
        sp.add_argument("--filters", help="comma-separated subset of mrc,mmse,zf")
        sp.add_argument("--plot", action="store_true", help="render a PNG figure next to the output")
        sp.add_argument("--plot-script", action="store_true",
                        help="write a standalone script that plots the CSV")
    vp = sub.add_parser("validate", help="run the self-check suite")
    _add_common(vp)
    vp.add_argument("--fast", action="store_true", help="1e3 instead of 1e4 random instances per identity")
    vp.add_argument("--debug-sigma-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return ap


def resolve_config(args, base: ExperimentConfig) -> ExperimentConfig:
    """Defaults, then $JAMRX_SEED, then the config file, then command-line flags."""
    cfg = base.with_(mc=replace(base.mc, master_seed=env_seed(base.mc.master_seed)))
    if args.config:
        cfg = load_config(args.config, cfg)
    mc_changes = {}
    if args.seed is not None:
        mc_changes["master_seed"] = args.seed
    if args.inner_samples is not None:
        mc_changes["inner_samples"] = args.inner_samples
    if args.outer_samples is not None:
        mc_changes["outer_samples"] = args.outer_samples
    if args.workers is not None:
        mc_changes["workers"] = args.workers
    if mc_changes:
        try:
            cfg = cfg.with_(mc=McConfig(**{**cfg.mc.__dict__, **mc_changes}))
        except InvalidParameterError as exc:
            raise ConfigError(f"command line: {exc}") from None
    if args.out:
        cfg = cfg.with_(out=args.out)
    if args.format:
        cfg = cfg.with_(fmt=args.format)
    if getattr(args, "sweep", None):
        cfg = cfg.with_(axis=SweepAxis.parse(args.sweep, cfg.axis.variable, cfg.axis.scale))
    if getattr(args, "filters", None):
        cfg = cfg.with_(filters=parse_filters(args.filters))
    return cfg


def _run_sweep(args, cfg) -> int:
    runner = run_sweep_antennas if args.command == "sweep-antennas" else run_sweep_jamming
    result = runner(cfg)
    out = cfg.out or f"{args.command.replace('-', '_')}.{cfg.fmt}"
    written = emit(result, out, cfg.fmt)
    stem = os.path.splitext(out)[0]
    if args.plot:
        from ..plotting import plot_sweep
        written.append(plot_sweep(result, stem + ".png"))
    if args.plot_script:
        if cfg.fmt != "csv":
            raise ConfigError("--plot-script: the generated script reads CSV output")
        written.append(write_plot_script(out, stem + "_plot.py"))
    for row in result.rows:
        cf = "" if row.rate_closed_form is None else f"  closed_form={row.rate_closed_form:.4f}"
        print(f"{row.axis_name}={row.axis_value:<8g} {row.filter:<5s} "
              f"R={row.rate_sim:.4f} +/- {row.rate_sim_stderr:.4f}{cf}")
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    base = {"sweep-antennas": antenna_sweep_config,
            "sweep-jamming": jamming_sweep_config}.get(args.command, ExperimentConfig)()
    try:
        cfg = resolve_config(args, base)
        if args.command == "validate":
            report = run_validation(cfg, sigma_scale=args.debug_sigma_scale, fast=args.fast)
            text = report.text()
            if cfg.out:
                with open(cfg.out, "w") as fh:
                    fh.write(text)
            sys.stdout.write(text)
            return EXIT_OK if report.passed else EXIT_VALIDATION
        return _run_sweep(args, cfg)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
