"""Command-line front end.

Subcommands compose into a campaign: `simulate` writes synthetic telemetry,
`fit` turns telemetry into surface checkpoints and trim functions, `sweep`
turns checkpoints into frequency/damping tables, `query` inspects one
condition, `report` compares a sweep against the shipped flight-test
fixture, and `verify` runs the numerical property suites.

Exit codes: 0 success, 1 usage error, 2 data/configuration error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import atmosphere as atmo
from .dynsim import TruthModel, fly, fly_trim_shots
from .errors import AerosidError, ConfigError, DataError, NumericError
from .flightdata import export_csv
from .gpr import load_checkpoint
from .lineardyn import short_period_with_mq_substitution
from .pipeline import (
    compare_to_fixture,
    forward_process,
    gather_extra_shots,
    gather_records,
    inverse_process,
    load_run_config,
    load_trim_functions,
    read_sweep_csv,
    save_trim_functions,
    stability_derivatives_at,
    sweep_short_period,
)
from .aeromean import load_prior
from .trimfit import write_trim_shots_csv
from .verify import run_all as run_verify_suites

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aerosid",
        description="Flight-data system identification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", required=True, help="run config JSON path")
        p.add_argument("--seed", type=int, default=None,
                       help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")

    p_sim = sub.add_parser("simulate",
                           help="fly configured maneuvers, write telemetry CSVs")
    add_config_args(p_sim)

    p_fit = sub.add_parser("fit",
                           help="fit surfaces and trim functions from data")
    add_config_args(p_fit)

    p_query = sub.add_parser("query",
                             help="derivatives and short period at one condition")
    p_query.add_argument("--out", required=True,
                         help="run directory holding checkpoints")
    p_query.add_argument("--qbar", type=float, required=True,
                         help="dynamic pressure, Pa")
    p_query.add_argument("--mach", type=float, required=True)

    p_sweep = sub.add_parser("sweep",
                             help="frequency/damping tables from checkpoints")
    p_sweep.add_argument("--out", required=True,
                         help="run directory holding checkpoints")
    p_sweep.add_argument("--points", type=int, default=None,
                         help="override the number of qbar grid points")

    p_verify = sub.add_parser("verify", help="run numerical property suites")
    p_verify.add_argument("--seed", type=int, default=0)

    p_report = sub.add_parser("report",
                              help="compare a sweep with the shipped fixture")
    p_report.add_argument("--out", required=True,
                          help="run directory holding sweep.csv")
    return parser


def _load_run_dir(out_dir: str):
    """Checkpoints, trim functions, config, and geometry from a run dir."""
    out = Path(out_dir)
    for name in ("cm.gpz", "cz.gpz", "trim_functions.json", "config.json"):
        if not (out / name).exists():
            raise DataError(f"run directory {out} is missing {name}")
    gp_cm = load_checkpoint(out / "cm.gpz")
    gp_cz = load_checkpoint(out / "cz.gpz")
    tfs = load_trim_functions(out / "trim_functions.json")
    with open(out / "config.json") as fh:
        raw = json.load(fh)
    if "prior" not in raw:
        raise DataError(f"{out}/config.json does not name a prior")
    geom = load_prior(raw["prior"]).geometry
    return gp_cm, gp_cz, tfs, raw, geom


def _cmd_simulate(args) -> int:
    config, _ = load_run_config(args.config, out_dir=args.out, seed=args.seed)
    if not config.simulation_mode:
        raise ConfigError("simulate needs a simulation-mode config "
                          "(truth_prior set)")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    truth_entry = load_prior(config.truth_prior_path)
    truth = TruthModel(truth_entry.models)
    geom = truth_entry.geometry
    written = []
    for i, spec in enumerate(config.maneuvers):
        record = fly(truth, geom, spec, noise=config.noise_spec(config.seed + i))
        label = spec.label or f"{spec.kind}_{i}"
        path = out / f"{label}.csv"
        export_csv(record, path)
        written.append(path)
    if config.trim_shot_conditions:
        conditions = [(m, atmo.altitude_for_qbar_mach(q, m))
                      for m, q in config.trim_shot_conditions]
        shots = fly_trim_shots(truth, geom, conditions,
                               noise=config.noise_spec(config.seed + 1000))
        path = out / "trim_shots.csv"
        write_trim_shots_csv(path, shots)
        written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_fit(args) -> int:
    config, echo = load_run_config(args.config, out_dir=args.out,
                                   seed=args.seed)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prepared = forward_process(config)
    t0 = time.perf_counter()
    records = gather_records(config)
    inverse = inverse_process(config, prepared, records,
                              extra_shots=gather_extra_shots(config))
    wall = time.perf_counter() - t0
    inverse.cm.save(out / "cm.gpz")
    inverse.cz.save(out / "cz.gpz")
    save_trim_functions(out / "trim_functions.json", inverse.trim_functions)
    with open(out / "config.json", "w") as fh:
        json.dump({**echo, "out_dir": config.out_dir, "seed": config.seed},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"fitted {inverse.n_samples_per_channel} samples per channel from "
          f"{inverse.n_records} records, {inverse.n_trim_shots} trim shots "
          f"({wall:.2f}s)")
    print(out / "cm.gpz")
    print(out / "cz.gpz")
    print(out / "trim_functions.json")
    return EXIT_OK


def _query_rows(gp_cm, gp_cz, tfs, geom, qbar: float, mach: float):
    bucket = None
    for tf in tfs:
        lo, hi = tf.mach_bucket
        if lo <= mach <= hi:
            bucket = tf
            break
    if bucket is None:
        raise DataError(f"no fitted Mach bucket covers mach={mach}")
    rho = atmo.density(atmo.altitude_for_qbar_mach(qbar, mach))
    est = stability_derivatives_at(gp_cm, gp_cz, bucket, qbar, rho, geom)
    sp = short_period_with_mq_substitution(est.dim)
    return est, sp


def _cmd_query(args) -> int:
    gp_cm, gp_cz, tfs, _, geom = _load_run_dir(args.out)
    est, sp = _query_rows(gp_cm, gp_cz, tfs, geom, args.qbar, args.mach)
    print(f"qbar_pa {args.qbar:.17g}")
    print(f"mach {args.mach:.17g}")
    if sp.oscillatory:
        print(f"omega_sp_rad_s {sp.omega_sp:.17g}")
        print(f"zeta_sp {sp.zeta_sp:.17g}")
    else:
        print("omega_sp_rad_s non_oscillatory")
        print("zeta_sp non_oscillatory")
    print(f"cm_alpha {est.coeff.cm_alpha:.17g}")
    print(f"cm_q_nd {est.coeff.cm_q_nd:.17g}")
    print(f"cm_delta_e {est.coeff.cm_delta_e:.17g}")
    print(f"cz_alpha {est.coeff.cz_alpha:.17g}")
    print(f"sigma_cm {est.sigma_cm:.17g}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    gp_cm, gp_cz, tfs, raw, geom = _load_run_dir(args.out)
    if "sweep" not in raw:
        raise DataError(f"{args.out}/config.json has no sweep section")
    grid = raw["sweep"]
    machs = [float(m) for m in grid["machs"]]
    if args.points is not None:
        if args.points < 1:
            raise ConfigError("--points must be at least 1")
        qbars = np.linspace(float(grid["qbar_min_pa"]),
                            float(grid["qbar_max_pa"]), args.points)
    else:
        step = float(grid["qbar_step_pa"])
        qbars = np.arange(float(grid["qbar_min_pa"]),
                          float(grid["qbar_max_pa"]) + 0.5 * step, step)
    sweep = sweep_short_period(gp_cm, gp_cz, tfs, geom, qbars, machs)
    path = Path(args.out) / "sweep.csv"
    sweep.to_csv(path)
    print(path)
    print(f"{len(sweep.rows)} rows, {len(sweep.ok_rows())} clean")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_verify_suites(args.seed)
    failed = False
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        print(f"{tag} {r.name}: {r.n_checks} checks, max error "
              f"{r.max_error:.3e} (tolerance {r.tolerance:.0e})")
        failed = failed or not r.passed
    return EXIT_NUMERIC if failed else EXIT_OK


def _cmd_report(args) -> int:
    sweep_path = Path(args.out) / "sweep.csv"
    if not sweep_path.exists():
        raise DataError(f"{sweep_path} not found; run sweep first")
    sweep = read_sweep_csv(sweep_path)
    report = compare_to_fixture(sweep)
    path = Path(args.out) / "report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "query": _cmd_query,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage problems
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AerosidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
