"""Command-line driver.

Exit codes: 0 success, 2 config error, 3 regression failure, 4 truncation not converged.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .analytics import hom_visibility, simulate_hom
from .config import ConfigError, ExperimentConfig, load_config, preset
from .harness import SweepSpec, convergence_gaps, emit, regression_check, run_sweep
from .protocols import TruncationError, corrected_channel
from .rates import operation_rates

EXIT_OK, EXIT_CONFIG, EXIT_REGRESSION, EXIT_CONVERGENCE = 0, 2, 3, 4
CONVERGENCE_TOL = 1e-3

log = logging.getLogger("channel_correction")


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else preset(args.preset)
    if args.config and args.preset != "custom":
        # explicit preset on the command line wins over the file's
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "preset": args.preset})
    if args.nmax is not None:
        cfg = cfg.with_(nmax=args.nmax)
    if getattr(args, "loss", None) is not None:
        cfg = cfg.with_(loss=args.loss)
    if getattr(args, "eta", None) is not None:
        cfg = cfg.with_(eta=args.eta)
    if cfg.nmax < 4:
        raise ConfigError(f"nmax={cfg.nmax} is below the minimum of 4")
    return cfg


def _sweep(args) -> int:
    cfg = _config(args)
    spec = SweepSpec(
        losses=tuple(args.losses) if args.losses else SweepSpec.losses,
        etas=tuple(args.etas) if args.etas else SweepSpec.etas,
        config=cfg,
    )
    rows = run_sweep(spec, jobs=args.jobs)
    for path in emit(rows, args.out, args.format):
        print(path)
    if args.convergence:
        worst = 0.0
        for row, gap in convergence_gaps(spec, cfg.nmax, cfg.nmax + 2, jobs=args.jobs):
            worst = max(worst, gap)
            if gap >= CONVERGENCE_TOL:
                print(f"not converged: {row.kind} L={row.loss} eta={row.eta} dC={gap:.3g}", file=sys.stderr)
        print(f"largest concurrence change nmax {cfg.nmax} -> {cfg.nmax + 2}: {worst:.3g}")
        if worst >= CONVERGENCE_TOL:
            return EXIT_CONVERGENCE
    return EXIT_OK


def _check(args) -> int:
    fixtures = None
    if args.fixtures:
        try:
            with open(args.fixtures) as fh:
                fixtures = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read fixtures {args.fixtures}: {exc}") from exc
    report = regression_check(fixtures)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_REGRESSION


def _hom(args) -> int:
    cfg = _config(args)
    for name, xi in (("amplifier", cfg.xi_ha), ("swap", cfg.xi_es)):
        dip, base = simulate_hom(xi)
        print(f"{name}: xi={xi:.4f} coincidence={dip:.6f} baseline={base:.6f} V={hom_visibility(dip, base):.6f}")
    return EXIT_OK


def _rates(args) -> int:
    cfg = _config(args)
    r = operation_rates(cfg, args.rate, corrected_channel(cfg))
    out = {
        "loss": cfg.loss,
        "eta": cfg.eta,
        "p_channel_ready": r.p_channel_ready,
        "p_state_sent": r.p_state_sent,
        "p_direct": r.p_direct,
        "channel_ready_hz": r.channel_ready_rate,
        "state_sent_hz": r.state_sent_rate,
        "direct_hz": r.direct_rate,
        "operation_rate_ratio": r.operation_rate_ratio,
    }
    for k, v in out.items():
        print(f"{k:22s} {v:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config")
    common.add_argument("--preset", choices=("ideal", "measured", "custom"), default="custom")
    common.add_argument("--nmax", type=int, default=None, help="photon cap per source (>= 4)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="channel-correction", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", parents=[common], help="sweep loss and eta, write result files")
    s.add_argument("--out", default="results", metavar="DIR")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--losses", type=float, nargs="+")
    s.add_argument("--etas", type=float, nargs="+")
    s.add_argument("--convergence", action="store_true", help="rerun at nmax+2 and fail if concurrences move")
    s.set_defaults(func=_sweep)

    c = sub.add_parser("check", parents=[common], help="regression against the tabulated density matrices")
    c.add_argument("--fixtures", metavar="PATH", help="alternative fixture JSON")
    c.set_defaults(func=_check)

    h = sub.add_parser("hom", parents=[common], help="HOM dip for the configured indistinguishabilities")
    h.set_defaults(func=_hom)

    r = sub.add_parser("rates", parents=[common], help="herald probabilities and rates at one point")
    r.add_argument("--loss", type=float)
    r.add_argument("--eta", type=float)
    r.add_argument("--rate", type=float, default=81e6, help="pump repetition rate in Hz")
    r.set_defaults(func=_rates)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, TruncationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # invalid sweep values are configuration problems too
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
