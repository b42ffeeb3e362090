"""
Command-line entry point for the ellipsoidal-cavity simulator.

Runs a scenario (preset, config file and flags merged) with the photon-path
sum, the Laplace-domain oracle, or both, and writes the amplitudes as CSV
with a JSON sidecar holding the scenario echo and the run diagnostics.

Exit status: 0 success, 2 invalid configuration, 3 numerical accuracy failure.
"""

import argparse
import json
import logging
import sys
import time
from datetime import datetime
from pathlib import Path

import numpy as np

from cavity_config import DEFAULTS, list_presets, load_config_file, merge_scenario, \
    parse_sweep, validate_scenario
from errors import AccuracyError, ConfigurationError, DomainError, HorizonError, \
    IndexSetError, PathExplosionError
from geometry import make_cavity
from models import AmplitudeState, json_default
from oracle import simulate_laplace
from pathsum import Truncation, simulate
from quantization import build_weight_table
from run_manager import RunManager

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ACCURACY = 3
EXIT_INTERRUPTED = 130

# flag name -> scenario key
FLAG_KEYS = {
    "eps": "eps",
    "kappa_eg": "kappa_eg",
    "gamma_tau": "gamma_tau",
    "phase_d": "phase_d",
    "phase_f": "phase_f",
    "tmax": "t_max",
    "points": "points",
    "method": "method",
    "delay_cutoff": "delay_cutoff",
    "weight_floor": "weight_floor",
    "init": "init",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ellipseqed",
        description="Two two-level atoms at the foci of a prolate-ellipsoidal cavity")
    parser.add_argument("--mode", choices=["run", "presets", "weights"], default="run",
                        help="run a scenario, list presets, or dump the weight table (default: run)")
    parser.add_argument("--preset", help="named scenario (see --mode presets)")
    parser.add_argument("--config", help="scenario file, JSON or key=value lines")
    parser.add_argument("--eps", help="eccentricity d/(d+2f), in (0, 1)")
    parser.add_argument("--kappa-eg", dest="kappa_eg", help="ω_eg·d/(2c₀); accepts e.g. '20pi'")
    parser.add_argument("--gamma-tau", dest="gamma_tau", help="Γτ")
    parser.add_argument("--phase-d", dest="phase_d", help="ω_eg·d/c₀ mod 2π (phase per unit of 2N1)")
    parser.add_argument("--phase-f", dest="phase_f", help="φ_f = 2ω_eg f/c₀ mod 2π")
    parser.add_argument("--tmax", help="end of the time grid in units of τ")
    parser.add_argument("--points", help="number of grid points")
    parser.add_argument("--method", choices=["pathsum", "laplace", "both"])
    parser.add_argument("--delay-cutoff", dest="delay_cutoff", help="largest hop delay in units of τ")
    parser.add_argument("--weight-floor", dest="weight_floor", help="smallest kept |A|/Γ")
    parser.add_argument("--init", help="initial state 're1,im1,re2,im2' (normalized on input)")
    parser.add_argument("--isolated", action="store_true", help="disable all couplings")
    parser.add_argument("--sweep", help="scan one cavity parameter, 'key=a:b:n'")
    parser.add_argument("--out", help="output CSV path (default: timestamped name)")
    parser.add_argument("--verbose", action="store_true", help="debug logging from the library")
    parser.add_argument("--quiet", action="store_true", help="no status output")
    return parser


def configure_logging(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")


def scenario_from_args(args):
    """Merge preset, config file and flags into one validated scenario."""
    file_values = load_config_file(args.config) if args.config else {}
    flags = {key: getattr(args, name) for name, key in FLAG_KEYS.items()}
    if args.isolated:
        flags["isolated"] = True
    return merge_scenario(args.preset, file_values, flags)


def default_stem(scenario, mode):
    label = scenario.get("preset") or "custom"
    return f"ellipseqed_{mode}_{label}_{datetime.now().strftime('%Y%m%d_%H%M%S')}"


def output_stem(args, scenario, mode):
    if args.out:
        path = Path(args.out)
        return path.with_suffix("") if path.suffix else path
    return Path(default_stem(scenario, mode))


def cavity_from_scenario(scenario):
    return make_cavity(scenario["eps"], scenario["kappa_eg"], scenario["gamma_tau"],
                       scenario["phase_d"], scenario["phase_f"])


def run_methods(scenario, manager):
    """
    Solve one scenario with the requested method(s).

    Returns:
        dict: method name -> TimeSeries
    """
    cfg = cavity_from_scenario(scenario)
    manager.diagnostics["cavity"] = cfg.to_dict()
    if cfg.f_over_lambda <= 1.0:
        manager.status(f"⚠️ f/λ = {cfg.f_over_lambda:.3g}: dropped Poisson terms may not be small")
    initial = AmplitudeState.from_components(*scenario["init"])
    grid = np.linspace(0.0, scenario["t_max"], scenario["points"])
    methods = ["pathsum", "laplace"] if scenario["method"] == "both" else [scenario["method"]]

    results = {}
    for method in methods:
        started = time.perf_counter()
        if method == "pathsum":
            truncation = Truncation(scenario["delay_cutoff"], scenario["weight_floor"])
            series = simulate(cfg, initial, grid, truncation, isolated=scenario["isolated"])
        else:
            series = simulate_laplace(cfg, initial, grid, scenario["weight_floor"],
                                      isolated=scenario["isolated"])
        manager.log_method(series, time.perf_counter() - started)
        results[method] = series
    return results


def write_sidecar(path, manager, results):
    payload = {
        "generated": datetime.now().isoformat(),
        "run": manager.to_dict(),
        "series": {method: series.to_dict() for method, series in results.items()},
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, default=json_default)
    return path


def write_results(stem, results, manager):
    """Write one CSV per method (suffixed when there are two)."""
    for method, series in results.items():
        suffix = f"_{method}" if len(results) > 1 else ""
        path = Path(f"{stem}{suffix}.csv")
        series.to_csv(path)
        manager.log_output(path)


def agreement_ok(results, manager):
    """Compare pathsum and laplace when both ran; False when they disagree."""
    if len(results) < 2:
        return True
    discrepancy = results["pathsum"].max_discrepancy(results["laplace"])
    tolerance = DEFAULTS["agreement_tolerance"]
    manager.log_discrepancy(discrepancy, tolerance)
    return discrepancy["max"] <= tolerance


def run_single(args, scenario, manager):
    stem = output_stem(args, scenario, "run")
    results = run_methods(scenario, manager)
    write_results(stem, results, manager)
    ok = agreement_ok(results, manager)
    if not ok:
        manager.log_error("pathsum and laplace disagree beyond the agreement tolerance",
                          manager.diagnostics.get("max_discrepancy"))
    manager.end_run()
    sidecar = Path(f"{stem}.json")
    manager.log_output(sidecar)
    write_sidecar(sidecar, manager, results)
    return EXIT_OK if ok else EXIT_ACCURACY


def run_sweep(args, scenario, manager):
    key, values = parse_sweep(args.sweep)
    stem = output_stem(args, scenario, "sweep")
    status = EXIT_OK
    sweep_log = []
    for index, value in enumerate(values):
        point = dict(scenario)
        point[key] = value
        point = validate_scenario(point)
        manager.status(f"🔄 {key} = {value:.6g} ({index + 1}/{len(values)})")
        results = run_methods(point, manager)
        point_stem = f"{stem}_{key}{index:03d}"
        write_results(point_stem, results, manager)
        entry = {key: value, "outputs": manager.outputs[-len(results):]}
        if not agreement_ok(results, manager):
            status = EXIT_ACCURACY
        if "max_discrepancy" in manager.diagnostics:
            entry["max_discrepancy"] = manager.diagnostics["max_discrepancy"]
        sweep_log.append(entry)
    manager.diagnostics["sweep"] = sweep_log
    manager.end_run()
    sidecar = Path(f"{stem}.json")
    manager.log_output(sidecar)
    write_sidecar(sidecar, manager, {})
    return status


def run_weights(args, scenario, manager):
    cfg = cavity_from_scenario(scenario)
    table = build_weight_table(cfg, scenario["delay_cutoff"], scenario["weight_floor"])
    manager.counters["table_entries"] = len(table)
    manager.diagnostics["dropped_mass"] = table.dropped_mass
    stem = output_stem(args, scenario, "weights")
    path = Path(f"{stem}.csv")
    table.to_csv(path)
    manager.log_output(path)
    manager.end_run()
    return EXIT_OK


def print_presets():
    print("📋 Available presets")
    print("=" * 60)
    for name, description in list_presets():
        print(f"  {name:18s} {description}")


def main(argv=None):
    """
    Parse arguments and run the requested mode.

    Returns:
        int: exit status (0, 2 or 3)
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    if args.mode == "presets":
        print_presets()
        return EXIT_OK

    try:
        scenario = scenario_from_args(args)
    except ConfigurationError as e:
        print(f"❌ Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    manager = RunManager(scenario, mode=args.mode, quiet=args.quiet)
    manager.start_run()
    try:
        if args.mode == "weights":
            status = run_weights(args, scenario, manager)
        elif args.sweep:
            status = run_sweep(args, scenario, manager)
        else:
            status = run_single(args, scenario, manager)
    except (ConfigurationError, HorizonError, DomainError, IndexSetError) as e:
        manager.log_error(e, e.to_dict())
        print(f"❌ Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, PathExplosionError) as e:
        manager.log_error(e, e.to_dict())
        print(f"❌ Numerical accuracy failure: {e}", file=sys.stderr)
        return EXIT_ACCURACY
    except KeyboardInterrupt:
        print("\n⏹️ Run interrupted by user")
        return EXIT_INTERRUPTED

    manager.print_run_summary()
    return status


if __name__ == "__main__":
    sys.exit(main())
