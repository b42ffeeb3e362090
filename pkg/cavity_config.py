"""
Configuration file for ellipsoidal-cavity simulation scenarios.

This file defines the named scenario presets, the numerical defaults used
across the modules, and the helpers that turn config files, command-line
flags and environment variables into one validated scenario dictionary.
"""

import json
import math
import os

from errors import ConfigurationError

# Environment variable capping data-parallel evaluation
THREADS_ENV_VAR = "ELLIPSEQED_THREADS"

# Smallest accepted Γτ; zero means no dynamics at all
MIN_GAMMA_TAU = 1e-6

# Vacuum Rabi frequency of the single-mode comparison, in units of 1/τ
FIG3_OMEGA_TAU = 4 * math.pi / 15

METHODS = ("pathsum", "laplace", "both")

# Numerical defaults shared by the library modules
DEFAULTS = {
    # spheroidal ODE and σ-map integration
    "ode_rtol": 1e-12,
    "ode_atol": 1e-14,
    "sigma_rtol": 1e-11,
    "sigma_atol": 1e-13,
    # adaptive quadrature
    "quad_epsabs": 1e-12,
    "quad_epsrel": 1e-12,
    "quad_limit": 1000,
    # confluent hypergeometric crossovers (|z|)
    "taylor_limit": 10.0,
    "asymptotic_limit": 30.0,
    "series_maxiter": 4000,
    "series_tol": 1e-17,
    # photon paths
    "weight_floor": 1e-8,
    "path_cap": 200000,
    "class_cap": 2000000,
    # Bromwich inversion
    "window_factor": 500.0,
    "window_floor": 4 * math.pi,
    "alias_margin": 20.0,
    "spectral_tolerance": 1e-3,
    "doubling_tolerance": 1e-4,
    # cross-method agreement gate
    "agreement_tolerance": 1e-3,
}

# Scenario defaults; any preset or flag overrides these
SCENARIO_DEFAULTS = {
    "eps": 0.5,
    "kappa_eg": 1e4 * math.pi,
    "gamma_tau": 16.0,
    "phase_d": 0.0,
    "phase_f": 0.0,
    "t_max": 3.0,
    "points": 301,
    "method": "pathsum",
    "delay_cutoff": None,
    "weight_floor": DEFAULTS["weight_floor"],
    "init": (1.0, 0.0, 0.0, 0.0),
    "isolated": False,
}

# Named scenarios; descriptions show up in --mode presets
PRESETS = {
    "fig2a": {
        "description": "Γτ=16, ε=1/10, short wavelength: nearly spherical, strong atom-atom coupling",
        "eps": 0.1,
        "kappa_eg": 1e4 * math.pi,
        "gamma_tau": 16.0,
        "t_max": 6.0,
        "points": 601,
    },
    "fig2b": {
        "description": "Γτ=16, ε=1/2, short wavelength: elongated cavity, reduced coupling",
        "eps": 0.5,
        "kappa_eg": 1e4 * math.pi,
        "gamma_tau": 16.0,
        "t_max": 6.0,
        "points": 601,
    },
    "fig2c": {
        "description": "Γτ=16, ε=1/2, d/λ=20, f/λ=10: diffraction paths present",
        "eps": 0.5,
        "kappa_eg": 20 * math.pi,
        "gamma_tau": 16.0,
        "t_max": 6.0,
        "points": 601,
    },
    "fig3": {
        "description": "single-mode comparison, τ=4π/(15Ω₀), Γ=τΩ₀²/2, e^{2iτω_eg}=1",
        "eps": 1e-3,
        "kappa_eg": 1e4 * math.pi,
        "gamma_tau": FIG3_OMEGA_TAU ** 2 / 2,
        "phase_d": 0.0,
        "phase_f": math.pi,
        "t_max": 4 * math.sqrt(2) * math.pi / FIG3_OMEGA_TAU,
        "points": 401,
        "method": "laplace",
        "weight_floor": 1e-6,
    },
    "parabolic-limit": {
        "description": "ε=0.95 proxy for d→∞: cross terms suppressed (qualitative only)",
        "eps": 0.95,
        "kappa_eg": 1e4 * math.pi,
        "gamma_tau": 16.0,
        "t_max": 3.0,
        "points": 301,
    },
    "single-atom-decay": {
        "description": "couplings disabled: pure exponential decay e^{-Γt} baseline",
        "eps": 0.5,
        "kappa_eg": 1e4 * math.pi,
        "gamma_tau": 1.0,
        "t_max": 5.0,
        "points": 201,
        "isolated": True,
    },
}

# Accepted spellings for scenario keys (config files and flags)
KEY_ALIASES = {
    "epsilon": "eps",
    "kappa": "kappa_eg",
    "tmax": "t_max",
    "gamma": "gamma_tau",
    "floor": "weight_floor",
    "cutoff": "delay_cutoff",
}

SWEEPABLE_KEYS = ("eps", "kappa_eg", "gamma_tau", "phase_d", "phase_f")


def list_presets():
    """
    Get all preset names with their one-line descriptions.

    Returns:
        list: (name, description) tuples in registry order
    """
    return [(name, preset["description"]) for name, preset in PRESETS.items()]


def get_preset(name):
    """
    Look up a preset scenario by name.

    Args:
        name (str): Preset name, e.g. "fig2b"

    Returns:
        dict: Copy of the preset values (without the description)
    """
    if name not in PRESETS:
        known = ", ".join(PRESETS)
        raise ConfigurationError(f"unknown preset '{name}' (known: {known})", field="preset")
    values = dict(PRESETS[name])
    values.pop("description", None)
    return values


def get_thread_count():
    """
    Read the parallelism cap from ELLIPSEQED_THREADS.

    Returns:
        int: Number of worker threads, 1 when the variable is unset
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigurationError(f"must be a positive integer, got '{raw}'", field=THREADS_ENV_VAR)
    if threads < 1:
        raise ConfigurationError(f"must be a positive integer, got {threads}", field=THREADS_ENV_VAR)
    return threads


def normalize_key(key):
    """Map flag/config spellings (kappa-eg, tmax, ...) onto scenario keys."""
    key = key.strip().lower().replace("-", "_")
    return KEY_ALIASES.get(key, key)


def parse_number(text, field=None):
    """
    Parse a real number, allowing a trailing π multiplier.

    "20pi", "20*pi", "1e4 pi" and "pi" are all accepted.

    Args:
        text (str or float): Value to parse
        field (str): Field name for error messages

    Returns:
        float: Parsed value
    """
    if isinstance(text, (int, float)):
        return float(text)
    cleaned = str(text).strip().lower().replace(" ", "")
    factor = 1.0
    for suffix in ("*pi", "pi", "π"):
        if cleaned.endswith(suffix):
            factor = math.pi
            cleaned = cleaned[: -len(suffix)] or "1"
            break
    try:
        return float(cleaned) * factor
    except ValueError:
        raise ConfigurationError(f"not a number: '{text}'", field=field)


def parse_init(value):
    """
    Parse an initial state "re1,im1,re2,im2" into a 4-tuple of floats.

    Args:
        value (str, list or tuple): Four components

    Returns:
        tuple: (re1, im1, re2, im2)
    """
    if isinstance(value, str):
        parts = [p for p in value.replace(";", ",").split(",") if p.strip()]
    else:
        parts = list(value)
    if len(parts) != 4:
        raise ConfigurationError(f"expected 're1,im1,re2,im2', got {value!r}", field="init")
    return tuple(parse_number(p, field="init") for p in parts)


def _coerce(key, value):
    """Convert a raw config value to the type its key expects."""
    if value is None:
        return None
    if key == "init":
        return parse_init(value)
    if key in ("points",):
        try:
            return int(float(value))
        except (TypeError, ValueError):
            raise ConfigurationError(f"not an integer: {value!r}", field=key)
    if key in ("method", "preset", "out"):
        return str(value).strip()
    if key == "isolated":
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if key == "delay_cutoff" and str(value).strip().lower() in ("", "none", "auto"):
        return None
    return parse_number(value, field=key)


def parse_config_text(text):
    """
    Parse a scenario config given as JSON or as flat key=value lines.

    Args:
        text (str): File contents

    Returns:
        dict: Scenario values keyed by normalized names
    """
    stripped = text.strip()
    if not stripped:
        return {}
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"invalid JSON config: {e}", field="config")
        if not isinstance(raw, dict):
            raise ConfigurationError("JSON config must be an object", field="config")
        items = raw.items()
    else:
        items = []
        for lineno, line in enumerate(stripped.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"line {lineno}: expected key=value, got '{line}'", field="config")
            key, value = line.split("=", 1)
            items.append((key, value.strip()))
    return {normalize_key(k): _coerce(normalize_key(k), v) for k, v in items}


def load_config_file(path):
    """
    Read and parse a scenario config file.

    Args:
        path (str): Path to a JSON or key=value file

    Returns:
        dict: Parsed scenario values
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_config_text(handle.read())
    except OSError as e:
        raise ConfigurationError(f"cannot read config file '{path}': {e}", field="config")


def parse_sweep(text):
    """
    Parse a sweep helper "key=a:b:n" into (key, values).

    Args:
        text (str): e.g. "eps=0.1:0.9:5"

    Returns:
        tuple: (scenario key, list of n evenly spaced values from a to b)
    """
    if "=" not in text:
        raise ConfigurationError(f"expected key=a:b:n, got '{text}'", field="sweep")
    key, rng = text.split("=", 1)
    key = normalize_key(key)
    if key not in SWEEPABLE_KEYS:
        raise ConfigurationError(f"cannot sweep '{key}' (sweepable: {', '.join(SWEEPABLE_KEYS)})", field="sweep")
    parts = rng.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"expected a:b:n, got '{rng}'", field="sweep")
    start = parse_number(parts[0], field="sweep")
    stop = parse_number(parts[1], field="sweep")
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigurationError(f"count must be an integer, got '{parts[2]}'", field="sweep")
    if count < 1:
        raise ConfigurationError("count must be at least 1", field="sweep")
    if count == 1:
        return key, [start]
    step = (stop - start) / (count - 1)
    return key, [start + i * step for i in range(count)]


def validate_scenario(scenario):
    """
    Check every scenario field and fill in derived defaults.

    Args:
        scenario (dict): Merged scenario values

    Returns:
        dict: The validated scenario (delay_cutoff resolved)
    """
    eps = scenario["eps"]
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"must lie in (0, 1), got {eps}", field="eps")
    if not scenario["kappa_eg"] > 0.5:
        raise ConfigurationError(f"must exceed 1/2, got {scenario['kappa_eg']}", field="kappa_eg")
    if not scenario["gamma_tau"] >= MIN_GAMMA_TAU:
        raise ConfigurationError(f"must be at least {MIN_GAMMA_TAU}, got {scenario['gamma_tau']}", field="gamma_tau")
    if not scenario["t_max"] > 0.0:
        raise ConfigurationError(f"must be positive, got {scenario['t_max']}", field="t_max")
    if scenario["points"] < 2:
        raise ConfigurationError(f"need at least 2 grid points, got {scenario['points']}", field="points")
    if scenario["method"] not in METHODS:
        raise ConfigurationError(f"must be one of {', '.join(METHODS)}, got '{scenario['method']}'", field="method")
    if scenario["weight_floor"] < 0.0:
        raise ConfigurationError(f"must be non-negative, got {scenario['weight_floor']}", field="weight_floor")

    cutoff = scenario.get("delay_cutoff")
    if cutoff is None:
        cutoff = scenario["t_max"]
    if cutoff <= 0.0:
        raise ConfigurationError(f"must be positive, got {cutoff}", field="delay_cutoff")
    if scenario["method"] in ("pathsum", "both") and scenario["t_max"] > cutoff:
        raise ConfigurationError(
            f"t_max={scenario['t_max']} exceeds delay_cutoff={cutoff}; raise --delay-cutoff",
            field="delay_cutoff")
    scenario["delay_cutoff"] = cutoff

    init = scenario["init"]
    if sum(c * c for c in init) == 0.0:
        raise ConfigurationError("initial state must not be the zero vector", field="init")
    return scenario


def merge_scenario(preset=None, file_values=None, flag_values=None):
    """
    Build a scenario with precedence flags > config file > preset > defaults.

    Args:
        preset (str): Optional preset name
        file_values (dict): Values parsed from a config file
        flag_values (dict): Values given on the command line (None entries ignored)

    Returns:
        dict: Validated scenario
    """
    scenario = dict(SCENARIO_DEFAULTS)
    file_values = dict(file_values or {})
    preset = preset or file_values.pop("preset", None)
    if preset:
        scenario.update(get_preset(preset))
        scenario["preset"] = preset
    else:
        scenario["preset"] = None

    for source in (file_values, flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            key = normalize_key(key)
            if key not in SCENARIO_DEFAULTS and key not in ("preset",):
                raise ConfigurationError(f"unknown scenario key '{key}'", field=key)
            scenario[key] = _coerce(key, value)

    return validate_scenario(scenario)


# Example usage and testing
if __name__ == "__main__":
    print("Available presets")
    print("=" * 40)
    for name, description in list_presets():
        print(f"  {name:18s} {description}")

    print("\nMerged fig2b scenario with a flag override:")
    merged = merge_scenario("fig2b", flag_values={"t_max": 3.0})
    for key, value in merged.items():
        print(f"  {key}: {value}")
