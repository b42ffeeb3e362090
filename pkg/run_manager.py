"""
Run manager for tracking one simulation run.

This module keeps the bookkeeping of a single CLI run: timing, counters for
the work done (table entries, path classes, grid points, frequency samples),
numerical diagnostics, and an error log. The collected record becomes the
body of the JSON sidecar written next to the CSV output.
"""

import time
from collections import Counter
from datetime import datetime, timezone


class RunManager:
    """
    Tracks a single simulation run for the summary and the JSON sidecar.

    Collects what each method produced and how well it converged so the
    numbers can be inspected after the run.
    """

    def __init__(self, scenario, mode="run", quiet=False):
        """
        Initialize a new run record.

        Args:
            scenario (dict): Validated scenario being run
            mode (str): CLI mode ("run", "weights", ...)
            quiet (bool): Suppress status lines
        """
        self.scenario = dict(scenario)
        self.mode = mode
        self.quiet = quiet

        # Time tracking
        self.start_time = None
        self.end_time = None
        self._clock = None
        self.method_seconds = {}

        # Work counters (counter name -> count)
        self.counters = Counter()

        # Numerical diagnostics (tail bounds, doubling deltas, discrepancies)
        self.diagnostics = {}

        # Files written during the run
        self.outputs = []

        self.errors = []

    def status(self, message):
        """Print a status line unless running quietly."""
        if not self.quiet:
            print(message)

    def start_run(self):
        """Mark the start of the run."""
        self.start_time = datetime.now(timezone.utc)
        self._clock = time.perf_counter()
        label = self.scenario.get("preset") or "custom scenario"
        self.status(f"📊 Starting {self.mode} for {label} (method: {self.scenario.get('method')})")

    def log_method(self, series, seconds):
        """
        Record the result of one solution method.

        Args:
            series (TimeSeries): Output of pathsum or laplace
            seconds (float): Wall time spent
        """
        method = series.method
        self.method_seconds[method] = seconds
        self.counters["grid_points"] = int(series.t.size)
        meta = series.metadata
        table = meta.get("table", {})
        self.counters[f"{method}_table_entries"] = (table.get("diagonal_entries", 0)
                                                   + table.get("cross_entries", 0))
        if "path_classes" in meta:
            self.counters["path_classes"] = meta["path_classes"]
        if "samples" in meta:
            self.counters["frequency_samples"] = meta["samples"]
        for key in ("tail_bound_amplitude", "tail_bound_probability", "doubling_delta",
                    "spectral_truncation_bound"):
            if key in meta:
                self.diagnostics[f"{method}_{key}"] = meta[key]
        self.diagnostics[f"{method}_max_P1_plus_P2"] = 1.0 + series.probability_excess()
        self.status(f"✅ {method}: {series.t.size} points in {seconds:.2f} s")

    def log_discrepancy(self, discrepancy, tolerance):
        """Record the pathsum/laplace disagreement for method=both."""
        self.diagnostics["max_discrepancy"] = discrepancy
        self.diagnostics["agreement_tolerance"] = tolerance
        marker = "✅" if discrepancy["max"] <= tolerance else "⚠️"
        self.status(f"{marker} max |ΔP| between methods: {discrepancy['max']:.3e}")

    def log_output(self, path):
        """Record a file written by this run."""
        self.outputs.append(str(path))
        self.status(f"💾 Wrote {path}")

    def log_error(self, error_message, context=None):
        """
        Log an error that occurred during the run.

        Args:
            error_message (str): Description of the error
            context (dict): Field, estimates or other details
        """
        error_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "message": str(error_message),
            "context": context or {},
        }
        self.errors.append(error_entry)
        self.status(f"❌ Error: {error_message}")

    def end_run(self):
        """Mark the end of the run."""
        self.end_time = datetime.now(timezone.utc)

    @property
    def duration(self):
        if self._clock is None:
            return 0.0
        return time.perf_counter() - self._clock

    def to_dict(self):
        """Run record for the JSON sidecar."""
        scenario = dict(self.scenario)
        if scenario.get("init") is not None:
            scenario["init"] = list(scenario["init"])
        return {
            "mode": self.mode,
            "start_time": self.start_time.isoformat() if self.start_time else None,
            "end_time": self.end_time.isoformat() if self.end_time else None,
            "duration_seconds": self.duration,
            "method_seconds": dict(self.method_seconds),
            "scenario": scenario,
            "counters": dict(self.counters),
            "diagnostics": dict(self.diagnostics),
            "outputs": list(self.outputs),
            "error_count": len(self.errors),
            "errors": list(self.errors),
        }

    def print_run_summary(self):
        """
        Print a summary of the run.

        Shows the scenario, the work counters, the convergence diagnostics
        and the most recent errors.
        """
        if self.quiet:
            return
        if not self.end_time:
            self.end_run()

        print(f"\n📊 RUN SUMMARY")
        print(f"=" * 50)
        print(f"Preset: {self.scenario.get('preset') or '-'}")
        print(f"Method: {self.scenario.get('method')}")
        print(f"Duration: {self.duration:.2f} seconds")
        print(f"ε={self.scenario.get('eps')}  κ_eg={self.scenario.get('kappa_eg'):.6g}  "
              f"Γτ={self.scenario.get('gamma_tau'):.6g}")
        print()

        if self.counters:
            print(f"🔢 COUNTERS:")
            for name, count in sorted(self.counters.items()):
                print(f"  {name}: {count}")
            print()

        if self.diagnostics:
            print(f"📈 DIAGNOSTICS:")
            for name, value in sorted(self.diagnostics.items()):
                if isinstance(value, float):
                    print(f"  {name}: {value:.3e}")
                elif isinstance(value, dict):
                    print(f"  {name}: " + ", ".join(
                        f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in value.items()))
                else:
                    print(f"  {name}: {value}")
            print()

        if self.errors:
            print(f"⚠️ ERRORS: {len(self.errors)} total")
            # last three are enough to see what went wrong
            for error in self.errors[-3:]:
                print(f"  {error['message']}")
            print()
