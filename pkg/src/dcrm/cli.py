"""Command-line surface: run simulations, price PAYD policies, and execute the
statistical validation suite from scenario config files.

Exit codes: 0 success, 1 invalid config, 2 I/O failure, 3 failed statistical
check (validate only).  Every command is deterministic given (config, seed);
`--threads` affects speed only, never results.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_scenario
from .payd import PaydPolicy, price_payd
from .processes import MileageAffineIntensity
from .validation import ValidationSettings, run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_CHECK_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcrm",
        description="Discounted collective risk models and PAYD premium pricing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate discounted losses from a config")
    sim.add_argument("--config", required=True, help="scenario config file (TOML)")
    sim.add_argument("--out", required=True,
                     help="per-path CSV output; summary goes to <out stem>_summary<ext>")
    _common_overrides(sim)
    sim.set_defaults(func=_cmd_simulate)

    price = sub.add_parser("price", help="price a PAYD policy from a config")
    price.add_argument("--config", required=True, help="scenario config file (TOML)")
    price.add_argument("--out", required=True, help="premium quote CSV output")
    _common_overrides(price)
    price.set_defaults(func=_cmd_price)

    val = sub.add_parser("validate", help="run the statistical validation suite")
    val.add_argument("--config", help="optional config supplying paths/seed defaults")
    val.add_argument("--perturb-mean", type=float, default=0.0,
                     help="fault-injection hook: scale the analytic mean used by "
                          "the mean and martingale checks by (1 + X)")
    _common_overrides(val)
    val.set_defaults(func=_cmd_validate)
    return parser


def _common_overrides(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--seed", type=int, help="override the config seed")
    cmd.add_argument("--paths", type=int, help="override the config path count")
    cmd.add_argument("--threads", type=int, default=1,
                     help="worker threads (performance only; results identical)")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def _cmd_simulate(args) -> int:
    from .core import simulate_discounted_loss

    cfg = load_scenario(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    n_paths = args.paths if args.paths is not None else cfg.paths
    if n_paths < 1:
        raise ConfigError("simulation.paths", "must be >= 1")
    result = simulate_discounted_loss(
        cfg.scenario, n_paths, seed,
        full_trace=cfg.full_trace, n_threads=max(1, args.threads),
    )
    out = Path(args.out)
    summary = out.with_name(f"{out.stem}_summary{out.suffix}")
    _atomic_write(out, result.to_csv)
    _atomic_write(summary, result.summary_to_csv)
    print(f"wrote {out} and {summary} ({n_paths} paths, seed {seed})")
    return EXIT_OK


def _cmd_price(args) -> int:
    cfg = load_scenario(args.config)
    scenario = cfg.scenario
    if not isinstance(scenario.counting, MileageAffineIntensity):
        raise ConfigError("counting.kind",
                          "pricing requires an 'affine' (mileage-based) intensity")
    if scenario.mileage is None:
        raise ConfigError("mileage", "pricing requires a mileage section")
    policy = PaydPolicy(
        claim=scenario.claim,
        intensity=scenario.counting,
        mileage=scenario.mileage,
        delta=scenario.delta,
        horizon=scenario.horizon,
    )
    seed = args.seed if args.seed is not None else cfg.seed
    n_outer = args.paths if args.paths is not None else cfg.paths
    if n_outer < 1:
        raise ConfigError("simulation.paths", "must be >= 1")
    quote = price_payd(policy, n_outer, seed)
    _atomic_write(Path(args.out), quote.to_csv)
    print(quote.format_text())
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    settings = ValidationSettings()
    if args.config:
        cfg = load_scenario(args.config)
        settings = settings.scaled(cfg.paths)
        settings = replace(settings, seed=cfg.seed)
    if args.paths is not None:
        if args.paths < 1:
            raise ConfigError("simulation.paths", "must be >= 1")
        settings = settings.scaled(args.paths)
    if args.seed is not None:
        settings = replace(settings, seed=args.seed)
    settings = replace(settings, threads=max(1, args.threads),
                       perturb_mean=args.perturb_mean)
    report = run_validation(settings)
    print(report.format_table())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _atomic_write(path: Path, writer) -> None:
    """Write via a sibling temp file and rename, so failures never leave a
    partial output file behind."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
