"""Command line entry point.

    robust-wald run (--config PATH | --preset NAME) [--trials T] [--seed S] [--out PATH]
    robust-wald psd --preset NAME --out PATH
    robust-wald check

``run`` writes one CSV row per (N, SNR) cell plus a JSON summary next to it
(same stem, ``.json`` suffix).  Exit codes: 0 success, 1 hard error, 2 results
written but some cell's degenerate-statistic rate exceeded the warning
threshold.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_checks
from .config import SCENARIOS, ConfigError, build_scenario, load_config
from .disturbance import ArSpec, ar_psd
from .montecarlo import derive_seed, run_trials

log = logging.getLogger("robust_wald")

CSV_HEADER = [
    "scenario", "n", "nu", "snr_db", "trials", "detections", "degenerates",
    "p_hat", "ci_low", "ci_high", "ks_chi2", "pd_theory", "seed",
]
DEGENERATE_RATE_WARN = 1e-3
PSD_POINTS = 1024

EXIT_OK, EXIT_ERROR, EXIT_DEGENERATE = 0, 1, 2


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cell_seed(seed, n, snr_index):
    """Seed of one (N, SNR) cell; H0 cells use ``snr_index = 0``."""
    return derive_seed(derive_seed(seed, n), snr_index)


def run_experiments(config):
    """Run every (N, SNR) cell and return the list of ExperimentResults."""
    snrs = list(config.snr_db_list) or [None]
    results = []
    for n in config.n_grid:
        for k, snr in enumerate(snrs):
            scenario = config.scenario.with_(snr_db=snr)
            seed = cell_seed(config.seed, n, k)
            log.info("cell n=%d snr=%s trials=%d", n, snr, config.trials)
            results.append(run_trials(scenario, n, config.trials, seed, config.workers))
    return results


def results_csv(results, emit_theory_curve):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        pd_theory = r.predicted.pd if (emit_theory_curve and r.predicted) else None
        writer.writerow([_fmt(x) for x in (
            r.scenario, r.n, r.nu, r.snr_db, r.trials, r.detections, r.degenerates,
            r.p_hat, r.ci_low, r.ci_high, r.ks_to_chi2, pd_theory, r.seed,
        )])
    return buf.getvalue()


def summary_path(output_path):
    return Path(output_path).with_suffix(".json")


def run_command(config):
    """Execute a validated RunConfig; returns the process exit code."""
    results = run_experiments(config)
    out = Path(config.output_path)
    worst = max(r.degenerates / r.trials for r in results)
    warnings = []
    if worst > DEGENERATE_RATE_WARN:
        warnings.append(
            f"degenerate statistic rate {worst:.3g} exceeds {DEGENERATE_RATE_WARN:g}"
        )
    summary = {
        "version": __version__,
        "config": config.document,
        "max_degenerate_rate": worst,
        "warnings": warnings,
        "results": [
            {
                "n": r.n,
                "snr_db": r.snr_db,
                "seed": r.seed,
                "detections": r.detections,
                "degenerates": r.degenerates,
                "p_hat": r.p_hat,
                "ci": [r.ci_low, r.ci_high],
                "ks_chi2": r.ks_to_chi2,
                "predicted": None if r.predicted is None else {
                    "pfa": r.predicted.pfa,
                    "pd": r.predicted.pd,
                    "varsigma": r.predicted.varsigma,
                    "threshold": r.predicted.threshold,
                },
            }
            for r in results
        ],
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(results_csv(results, config.emit_theory_curve), encoding="utf-8")
    summary_path(out).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    for w in warnings:
        log.warning(w)
    return EXIT_DEGENERATE if warnings else EXIT_OK


def psd_table(clutter, points=PSD_POINTS):
    """``(nu, S(nu))`` on ``points`` frequencies covering [-0.5, 0.5)."""
    spec = clutter.speckle if not isinstance(clutter, ArSpec) else clutter
    nu = -0.5 + np.arange(points) / points
    return nu, ar_psd(spec, nu)


def psd_command(preset, out, points=PSD_POINTS):
    scenario = build_scenario(preset, 0.5)
    nu, psd = psd_table(scenario.clutter, points)
    lines = ["nu,psd"] + [f"{a!r},{b!r}" for a, b in zip(nu.tolist(), psd.tolist())]
    Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def check_command():
    failed = 0
    for name, ok, detail in run_checks():
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        failed += not ok
    return EXIT_OK if not failed else EXIT_ERROR


def build_parser():
    parser = argparse.ArgumentParser(
        prog="robust-wald",
        description="Robust Wald detector: Monte Carlo runs, clutter PSD export and self-checks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON configuration file")
    src.add_argument("--preset", help="built-in configuration name")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", dest="output_path")
    run.add_argument("--workers", type=int)

    psd = sub.add_parser("psd", help="export the clutter PSD on a 1024-point grid")
    psd.add_argument("--preset", required=True, choices=sorted(SCENARIOS))
    psd.add_argument("--out", required=True)

    sub.add_parser("check", help="run the fast invariant checks")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "run":
            overrides = {
                "trials": args.trials,
                "seed": args.seed,
                "output_path": args.output_path,
                "workers": args.workers,
            }
            config = load_config(args.config or args.preset, overrides)
            return run_command(config)
        if args.command == "psd":
            return psd_command(args.preset, args.out)
        return check_command()
    except (ConfigError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
