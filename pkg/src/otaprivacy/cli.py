"""Command-line front end.

    otaprivacy account sweep --config CFG [--rates 1,0.5,0.01] --out sweep.csv
    otaprivacy simulate --config CFG --out traj.csv
    otaprivacy rdp eval --rate 0.01 --noise 4 --alpha 2

Exit status: 0 on success, 1 on usage or config errors, 2 on domain errors
raised by the computation itself.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import __version__
from .accountant import DEFAULT_SAMPLING_RATES, act_sweep, sweep
from .config import ConfigError, load_config
from .sampled import SampledGmSpec, sgm_rdp_numeric, thm1_conditions
from .simulator import run

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2

SWEEP_COLUMNS = ("sampling_rate", "t", "alpha_star", "epsilon", "delta", "noise_multiplier", "method")
SIMULATE_COLUMNS = ("round", "loss", "epsilon", "delta", "a_t", "b_t", "seed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x) -> str:
    """Serialise a float with 17 significant digits so it parses back exactly."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _atomic_write(path: Path, write) -> None:
    """Write via a temp file in the target directory; nothing is left behind on failure."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_rates(text: str) -> list[float]:
    try:
        rates = sorted({float(r) for r in text.split(",") if r.strip()})
    except ValueError:
        raise UsageError(f"--rates must be a comma-separated list of numbers, got {text!r}") from None
    if not rates:
        raise UsageError("--rates is empty")
    bad = [r for r in rates if not 0.0 <= r <= 1.0]
    if bad:
        raise UsageError(f"sampling rates must lie in [0, 1], got {bad}")
    return rates


def sweep_rows(base, rates):
    rows = []
    for rate in sorted(rates):
        cfg = replace(base, sampling_rate=rate)
        curves = [sweep(cfg)]
        if rate == 1.0:
            curves.append(act_sweep(cfg))
        for curve in sorted(curves, key=lambda c: c.method):
            for r in curve.rows:
                rows.append((rate, r.t, r.alpha_star, r.epsilon, cfg.delta, cfg.noise_multiplier, curve.method))
    return rows


def cmd_account_sweep(args) -> int:
    run_cfg = load_config(args.config)
    if run_cfg.accountant is None:
        raise ConfigError("config has no 'accountant' block")
    if args.rates is not None:
        rates = parse_rates(args.rates)
    elif "sampling_rate" in run_cfg.document["accountant"]:
        rates = [run_cfg.accountant.sampling_rate]
    else:
        rates = sorted(DEFAULT_SAMPLING_RATES)
    out = _output_path(args.out, run_cfg)
    rows = sweep_rows(run_cfg.accountant, rates)

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])

    _atomic_write(out, write)
    return EXIT_OK


def _output_path(out, run_cfg) -> Path:
    if out is None:
        out = run_cfg.output
    if out is None:
        raise UsageError("no output path: pass --out or set 'output' in the config")
    return Path(out)


def metadata_path(out: Path) -> Path:
    return Path(out).with_suffix(".meta.json")


def cmd_simulate(args) -> int:
    run_cfg = load_config(args.config)
    if run_cfg.system is None or run_cfg.task is None:
        raise ConfigError("simulate needs both 'system' and 'task' blocks")
    out = _output_path(args.out, run_cfg)
    system, task = run_cfg.system, run_cfg.task
    traj = run(system, task)

    def write_csv(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIMULATE_COLUMNS)
        for r in traj.rows:
            w.writerow([r.round, fmt(r.loss), fmt(r.budget.epsilon), fmt(r.budget.delta), r.a, r.b_total, system.seed])

    meta = {
        "schema_version": 1,
        "version": __version__,
        "system": system.to_dict(),
        "task": task.to_dict(),
        "accounting_mode": system.accounting_mode,
        "noise_multiplier": traj.noise_multiplier,
        "sampling_rate": system.sampling_rate,
    }

    def write_meta(fh):
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

    _atomic_write(out, write_csv)
    try:
        _atomic_write(metadata_path(out), write_meta)
    except BaseException:
        out.unlink(missing_ok=True)
        raise
    return EXIT_OK


def cmd_rdp_eval(args) -> int:
    alpha = args.alpha
    if not float(alpha).is_integer() or alpha < 2:
        raise ValueError(f"alpha must be an integer >= 2 (alpha = 1 is not on the grid), got {alpha}")
    alpha = int(alpha)
    spec = SampledGmSpec(args.rate, args.noise)
    result = {
        "sampling_rate": spec.sampling_rate,
        "noise_multiplier": spec.noise_multiplier,
        "alpha": alpha,
        "epsilon": sgm_rdp_numeric(spec, alpha),
        "conditions": None,
        "bound": None,
    }
    if spec.sampling_rate > 0:
        conds = thm1_conditions(spec, alpha)
        result["conditions"] = {
            "rate_ok": conds.rate_ok,
            "noise_ok": conds.noise_ok,
            "cond1_ok": conds.cond1_ok,
            "cond2_ok": conds.cond2_ok,
        }
        if conds.all():
            result["bound"] = 2.0 * spec.sampling_rate**2 * alpha / spec.noise_multiplier**2
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="otaprivacy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    account = sub.add_parser("account", help="privacy accounting")
    account_sub = account.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sw = account_sub.add_parser("sweep", help="composite epsilon over iterations for several sampling rates")
    sw.add_argument("--config", required=True)
    sw.add_argument("--rates", help="comma-separated sampling rates, e.g. 1,0.5,0.01")
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_account_sweep)

    sim = sub.add_parser("simulate", help="run the over-the-air FL simulation")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out")
    sim.set_defaults(func=cmd_simulate)

    rdp = sub.add_parser("rdp", help="single RDP evaluations")
    rdp_sub = rdp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = rdp_sub.add_parser("eval", help="RDP of the subsampled Gaussian mechanism at one order")
    ev.add_argument("--rate", type=float, required=True)
    ev.add_argument("--noise", type=float, required=True)
    ev.add_argument("--alpha", type=float, required=True)
    ev.set_defaults(func=cmd_rdp_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
