"""
Command-line interface.

    greengap fit AUDIT.csv            fit a calibration from audit records
    greengap simulate                 implementation rates per decision level
    greengap policy                   tax / subsidy sweeps and matched pairs
    greengap sensitivity              one-at-a-time sweeps or implicit inversion
    greengap shift                    level-shifting path

Every command writes its outputs into ``--out-dir`` and finishes by writing
``manifest.json`` there; a manifest therefore marks a completed run.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .audit import calibrate, filter_outliers, load_csv, scale_to_median, summary_rows
from .config import DEFAULT_SEED, CalibrationConfig, load_config, save_config
from .engine import Level, histogram, results_to_json, simulate_all
from .errors import GreenGapError, InversionError
from .policy import PolicySpec, equivalent_subsidy_for_tax, policy_impact, policy_sweep, shift_sweep, write_sweep_csv
from .sensitivity import SweepSpec, implicit_parameter, run_sweep
from .sensitivity import write_sweep_csv as write_sensitivity_csv

log = logging.getLogger("greengap")

ALL_LEVELS = "L0,L1,L2,L3,Ensemble"


def parse_grid(text):
    """``start:stop:step`` (inclusive) or a comma list of numbers."""
    text = text.strip()
    if ":" in text:
        try:
            start, stop, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected start:stop:step") from None
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}; need step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected comma-separated numbers") from None


def parse_levels(text):
    try:
        return [Level.parse(x) for x in text.split(",") if x.strip()]
    except GreenGapError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class Run:
    """Collects output paths and writes the manifest last."""

    def __init__(self, args, config):
        self.args = args
        self.config = config
        self.out_dir = Path(args.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs = []

    def path(self, name):
        p = self.out_dir / name
        self.outputs.append(str(p))
        return p

    def write_manifest(self):
        for p in self.outputs:
            if not Path(p).is_file():
                raise GreenGapError(f"expected output {p} was not written")
        manifest = {
            "command": self.args.command,
            "config_path": getattr(self.args, "config", None),
            "seed": self.config.seed if self.config is not None else None,
            "output_paths": self.outputs,
            "tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with open(self.out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")


def resolve_config(args):
    config = load_config(args.config) if args.config else CalibrationConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    return dataclasses.replace(config, **changes) if changes else config


def cmd_fit(args):
    report = []
    records = load_csv(args.audit_csv, report=report)
    run = Run(args, None)
    if report:
        for line in report:
            print(f"warning: {line}", file=sys.stderr)
        if args.strict:
            raise GreenGapError(f"{len(report)} malformed row(s) in {args.audit_csv}")
        (run.path("fit_errors.txt")).write_text("\n".join(report) + "\n", encoding="utf-8")
    kept = filter_outliers(records, args.min_cost, args.max_payback)
    dataset = scale_to_median(kept)
    config = calibrate(dataset, seed=DEFAULT_SEED if args.seed is None else args.seed)
    run.config = config
    save_config(config, run.path(args.out_config))
    with open(run.path("data_summary.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["column", "mean", "median", "min", "p95", "max", "std"])
        for row in summary_rows(dataset):
            w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
    print(f"records read: {len(records)}, kept after filtering: {len(kept)}")
    print(f"observed implementation rate: {dataset.observed_rate:.4f}")
    return run


def cmd_simulate(args):
    config = resolve_config(args)
    run = Run(args, config)
    retain = args.retain_values or args.bins is not None or None
    results = simulate_all(config, args.levels, retain_values=retain)
    results_to_json(list(results.values()), run.path("results.json"))
    for level, res in results.items():
        print(f"{level.value:>8}: rate {res.implementation_rate:.4f}  mean {res.stats.mean:,.0f}")
        if args.retain_values:
            res.write_values_csv(run.path(f"values_{level.value}.csv"))
    if args.bins is not None:
        with open(run.path("histogram.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["level", "bin_lower", "bin_upper", "count"])
            for level, res in results.items():
                for lo, hi, count in histogram(res, args.bins):
                    w.writerow([level.value, repr(lo), repr(hi), count])
    return run


def cmd_policy(args):
    if args.tax_grid is None and args.subsidy_grid is None and args.match_tax is None:
        raise GreenGapError("policy needs --tax-grid, --subsidy-grid or --match-tax")
    config = resolve_config(args)
    run = Run(args, config)
    payload = {}
    if args.tax_grid is not None or args.subsidy_grid is not None:
        for rate in (args.tax_grid or []):
            PolicySpec(tax_rate=rate)
        for rate in (args.subsidy_grid or []):
            PolicySpec(subsidy_rate=rate)
        rows = policy_sweep(config, args.tax_grid or [], args.subsidy_grid or [], args.levels)
        write_sweep_csv(rows, run.path("policy_sweep.csv"))
        payload["sweep_rows"] = len(rows)
    if args.match_tax is not None:
        s = equivalent_subsidy_for_tax(config, args.match_tax)
        print(f"equivalent subsidy for a {args.match_tax:g} tax: {s:.4f}")
        impacts = []
        for level in args.levels:
            for spec in (PolicySpec(tax_rate=args.match_tax), PolicySpec(subsidy_rate=s)):
                imp = policy_impact(config, spec, level)
                impacts.append(
                    {
                        "level": level.value,
                        "tax_rate": spec.tax_rate,
                        "subsidy_rate": spec.subsidy_rate,
                        "baseline_rate": imp.baseline_rate,
                        "policy_rate": imp.policy_rate,
                        "delta_pp": imp.delta_pp,
                        "delta_mean_value": imp.delta_mean_value,
                        "avg_transfer": imp.avg_transfer,
                    }
                )
        payload["match"] = {"tax_rate": args.match_tax, "equivalent_subsidy": s, "impacts": impacts}
    with open(run.path("policy_impact.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return run


def cmd_sensitivity(args):
    if (args.grid is None) == (args.invert is None):
        raise GreenGapError("sensitivity needs exactly one of --grid or --invert")
    config = resolve_config(args)
    run = Run(args, config)
    if args.grid is not None:
        levels = [args.level] if args.level is not None else [Level.L1, Level.L2, Level.L3]
        rows = run_sweep(config, SweepSpec(args.parameter, args.grid, levels))
        write_sensitivity_csv(args.parameter, rows, run.path("sensitivity_sweep.csv"))
        for value, level, rate in rows:
            print(f"{args.parameter}={value:g} {level.value}: {rate:.4f}")
    else:
        result = implicit_parameter(config, args.parameter, args.invert, args.level or Level.L1)
        run.path("inversion.json").write_text(result.to_json(), encoding="utf-8")
        print(f"implicit {args.parameter}: {result.solution:.6g} (rate {result.achieved_rate:.4f})")
    return run


def cmd_shift(args):
    config = resolve_config(args)
    run = Run(args, config)
    path = shift_sweep(config, args.steps)
    with open(run.path("shift.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["position", "ensemble_rate"])
        for pos, rate in path:
            w.writerow([repr(pos), repr(rate)])
    return run


def build_parser():
    parser = argparse.ArgumentParser(prog="greengap", description=__doc__.splitlines()[1].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, simulation=True):
        p.add_argument("--out-dir", default=".", help="directory for outputs and manifest.json")
        p.add_argument("--seed", type=int, help="overrides the config file seed")
        if simulation:
            p.add_argument("--config", help="calibration JSON (default: built-in motor calibration)")
            p.add_argument("--trials", type=int, help="overrides the config file trial count")

    p = sub.add_parser("fit", help="fit a calibration from an audit CSV")
    p.add_argument("audit_csv")
    p.add_argument("--out-config", default="calibration.json")
    p.add_argument("--min-cost", type=float, default=1.0)
    p.add_argument("--max-payback", type=float, default=20.0)
    p.add_argument("--strict", action="store_true", help="fail on any malformed row")
    common(p, simulation=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="simulate implementation rates")
    p.add_argument("--levels", type=parse_levels, default=parse_levels(ALL_LEVELS))
    p.add_argument("--retain-values", action="store_true", help="write per-firm values CSVs")
    p.add_argument("--bins", type=int, help="also write a histogram CSV with this many bins")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("policy", help="tax / subsidy effectiveness")
    p.add_argument("--tax-grid", type=parse_grid)
    p.add_argument("--subsidy-grid", type=parse_grid)
    p.add_argument("--match-tax", type=float, help="also compare this tax with its equal-transfer subsidy")
    p.add_argument("--levels", type=parse_levels, default=parse_levels("L1,L2,L3"))
    common(p)
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("sensitivity", help="parameter sweeps and implicit inversion")
    p.add_argument("--parameter", required=True, choices=["price", "delta_q", "delta_c", "b", "r", "n", "gamma"])
    p.add_argument("--grid", type=parse_grid)
    p.add_argument("--invert", type=float, metavar="TARGET_RATE")
    p.add_argument("--level", type=Level.parse)
    common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("shift", help="shift firms from level 3 to 2 to 1")
    p.add_argument("--steps", type=int, default=21)
    common(p)
    p.set_defaults(func=cmd_shift)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        run = args.func(args)
        run.write_manifest()
    except InversionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"bracket {exc.bracket} -> rates {exc.bracket_rates}", file=sys.stderr)
        return 3
    except (GreenGapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
