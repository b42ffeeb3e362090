"""
Photon-path expansion of the atomic amplitudes.

Expanding the resolvent in a Neumann series turns the atomic amplitudes
into a sum over hop sequences. A path with n hops, total delay τ_p,
weight product ∏A and relative phase Φ contributes

    Θ(t−τ_p) (−1)ⁿ ∏A (t−τ_p)ⁿ/n! e^{−Γ(t−τ_p)/2} e^{iΦ}

to the amplitude of the atom it ends on. Paths with equal order, equal
Σ2N1 and equal ΣN2 share delay, phase and time dependence, so simulate()
sums their weight products first (path classes) and evaluates each class
once per grid point. enumerate_paths() is the explicit version.
"""

import math
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from cavity_config import DEFAULTS, get_thread_count
from errors import ConfigurationError, DomainError, HorizonError, PathExplosionError
from models import TimeSeries
from quantization import PathWeightTable, build_weight_table

logger = logging.getLogger(__name__)

HORIZON_SLACK = 1e-12


@dataclass(frozen=True)
class Hop:
    """One emission-propagation-absorption step; k1 = 2·N1."""

    from_atom: int
    to_atom: int
    k1: int
    n2: int

    @property
    def n1(self):
        return self.k1 / 2.0


@dataclass(frozen=True)
class PhotonPath:
    """
    Chained hop sequence starting on `start_atom`.

    amplitude_factor is ∏A in units of Γⁿ (i.e. ∏ A/Γ).
    """

    start_atom: int
    hops: Tuple[Hop, ...]
    total_delay: float
    amplitude_factor: float
    phase: float

    @property
    def order(self):
        return len(self.hops)

    @property
    def end_atom(self):
        return self.hops[-1].to_atom if self.hops else self.start_atom

    def sort_key(self):
        return (self.total_delay, self.order, tuple((h.k1, h.n2, h.to_atom) for h in self.hops))


@dataclass(frozen=True)
class Truncation:
    """Truncation controls for the path expansion."""

    delay_cutoff: float
    weight_floor: float = DEFAULTS["weight_floor"]
    path_cap: int = DEFAULTS["path_cap"]
    class_cap: int = DEFAULTS["class_cap"]

    def to_dict(self):
        return {
            'delay_cutoff': self.delay_cutoff,
            'weight_floor': self.weight_floor,
            'path_cap': self.path_cap,
            'class_cap': self.class_cap,
        }


def _other(atom):
    return 2 if atom == 1 else 1


def _term_magnitude_bound(order, factor, y_max):
    """max over 0 ≤ y ≤ y_max of |factor|·yⁿ e^{−y/2}/n!."""
    if factor == 0.0:
        return 0.0
    if order == 0:
        return abs(factor)
    y = min(2.0 * order, y_max)
    if y <= 0.0:
        return 0.0
    return abs(factor) * math.exp(order * math.log(y) - 0.5 * y - gammaln(order + 1))


def enumerate_paths(start_atom, table, t_max, weight_floor=None, cap=None):
    """
    Depth-first enumeration of every hop sequence within the delay budget.

    Args:
        start_atom (int): 1 or 2
        table (PathWeightTable): hop weights, complete up to t_max
        t_max (float): delay budget in units of τ
        weight_floor (float): keep paths with |∏A/Γ| ≥ floor
        cap (int): largest number of paths before giving up

    Returns:
        list: PhotonPath objects ordered by (delay, order, hops), the
        zero-hop path first
    """
    if start_atom not in (1, 2):
        raise DomainError(f"start_atom must be 1 or 2, got {start_atom}")
    if t_max > table.delay_cutoff * (1.0 + HORIZON_SLACK):
        raise HorizonError(f"t_max={t_max} exceeds the weight-table delay cutoff "
                           f"{table.delay_cutoff}; rebuild with a larger --delay-cutoff")
    floor = table.weight_floor if weight_floor is None else weight_floor
    floor = 0.0 if math.isinf(floor) else floor
    cap = cap or DEFAULTS["path_cap"]
    limit = t_max * (1.0 + HORIZON_SLACK)
    cfg = table.cfg

    paths = []
    pruned_bound = 0.0
    stack = [(start_atom, (), 0.0, 1.0, 0, 0)]
    while stack:
        atom, hops, delay, factor, k_sum, n_sum = stack.pop()
        paths.append(PhotonPath(start_atom, hops, delay, factor,
                                (k_sum * cfg.phase_d + n_sum * cfg.phase_f) % (2.0 * math.pi)))
        if len(paths) > cap:
            raise PathExplosionError(
                f"more than {cap} photon paths within t_max={t_max}; raise the weight floor",
                cap=cap, tail_bound=pruned_bound)
        for entry in reversed(table.entries):
            new_delay = delay + entry.delay
            if new_delay > limit:
                continue
            new_factor = factor * entry.weight_over_gamma
            if abs(new_factor) < floor:
                pruned_bound += abs(new_factor)
                continue
            target = _other(atom) if entry.is_cross else atom
            hop = Hop(atom, target, entry.k1, entry.n2)
            stack.append((target, hops + (hop,), new_delay, new_factor,
                          k_sum + entry.k1, n_sum + entry.n2))

    paths.sort(key=PhotonPath.sort_key)
    logger.debug("enumerated %d paths from atom %d up to t=%g", len(paths), start_atom, t_max)
    return paths


def path_term(t, path, gamma, phase=None):
    """
    Time-domain contribution of one path (or path class).

    Args:
        t: time(s) in units of τ
        path (PhotonPath): the path; its amplitude_factor is ∏A/Γ
        gamma (float): Γτ
        phase (float): overrides path.phase

    Returns:
        complex array (or scalar) of contributions, exactly zero for t ≤ τ_p
        when the path has at least one hop
    """
    phase = path.phase if phase is None else phase
    return _class_term(np.asarray(t, dtype=float), path.order, path.total_delay,
                       path.amplitude_factor, phase, gamma)


def _class_term(t, order, delay, factor, phase, gamma):
    t_arr = np.atleast_1d(t)
    out = np.zeros(t_arr.shape, dtype=complex)
    if factor == 0.0:
        return complex(out[0]) if np.ndim(t) == 0 else out
    x = t_arr - delay
    if order == 0:
        active = x >= 0.0
        log_mag = -0.5 * gamma * x[active] + math.log(abs(factor))
    else:
        active = x > 0.0
        y = gamma * x[active]
        log_mag = math.log(abs(factor)) + order * np.log(y) - gammaln(order + 1) - 0.5 * y
    sign = math.copysign(1.0, factor) * (-1.0 if order % 2 else 1.0)
    out[active] = sign * np.exp(log_mag) * complex(math.cos(phase), math.sin(phase))
    return complex(out[0]) if np.ndim(t) == 0 else out


@dataclass
class PathClasses:
    """
    Aggregated path classes from atom 1 (atom 2 follows by symmetry).

    classes maps (order, Σk1, ΣN2) to the summed ∏A/Γ; odd Σk1 ends on the
    partner atom.
    """

    classes: dict
    pruned_bound: float
    kept_bound: float
    t_max: float

    def __len__(self):
        return len(self.classes)

    def ordered(self, cfg):
        """Classes sorted by (delay, order, Σk1, ΣN2)."""
        items = [(cfg.hop_delay(k, n), order, k, n, value)
                 for (order, k, n), value in self.classes.items()]
        items.sort(key=lambda item: item[:4])
        return items


def aggregate_paths(table, t_max, weight_floor=None, class_cap=None):
    """
    Sum hop-sequence weight products into path classes, order by order.

    Classes whose summed |∏A/Γ| falls below the floor are dropped; their
    largest possible contribution on [0, t_max] is accumulated into the
    heuristic tail bound.

    Returns:
        PathClasses
    """
    if t_max > table.delay_cutoff * (1.0 + HORIZON_SLACK):
        raise HorizonError(f"t_max={t_max} exceeds the weight-table delay cutoff "
                           f"{table.delay_cutoff}; raise --delay-cutoff")
    floor = table.weight_floor if weight_floor is None else weight_floor
    floor = 0.0 if math.isinf(floor) else floor
    class_cap = class_cap or DEFAULTS["class_cap"]
    cfg = table.cfg
    gamma = cfg.gamma
    limit = t_max * (1.0 + HORIZON_SLACK)
    entries = table.entries

    classes = {(0, 0, 0): 1.0}
    frontier = {(0, 0): 1.0}
    pruned = 0.0
    order = 0
    while frontier:
        order += 1
        following = defaultdict(float)
        for (k_sum, n_sum), value in frontier.items():
            base = cfg.hop_delay(k_sum, n_sum)
            for entry in entries:
                if base + entry.delay > limit:
                    continue
                following[(k_sum + entry.k1, n_sum + entry.n2)] += value * entry.weight_over_gamma
        frontier = {}
        for key in sorted(following):
            value = following[key]
            if abs(value) < floor or value == 0.0:
                delay = cfg.hop_delay(*key)
                pruned += _term_magnitude_bound(order, value, gamma * (t_max - delay))
                continue
            frontier[key] = value
            classes[(order,) + key] = value
        if len(classes) > class_cap:
            raise PathExplosionError(f"more than {class_cap} path classes within t_max={t_max}",
                                     cap=class_cap, tail_bound=pruned)

    # hops dropped from the table could extend every kept class once more
    kept = 0.0
    if table.dropped_mass > 0.0:
        for (n, k, m), value in classes.items():
            kept += _term_magnitude_bound(n + 1, value * table.dropped_mass,
                                          gamma * (t_max - cfg.hop_delay(k, m)))
    logger.debug("aggregated %d path classes up to order %d", len(classes), order - 1)
    return PathClasses(classes, pruned, kept, t_max)


def _evaluate_chunk(t_chunk, items, gamma, phase_d, phase_f):
    same = np.zeros(t_chunk.shape, dtype=complex)
    other = np.zeros(t_chunk.shape, dtype=complex)
    for delay, order, k_sum, n_sum, value in items:
        if delay > t_chunk[-1]:
            continue
        term = _class_term(t_chunk, order, delay, value,
                           k_sum * phase_d + n_sum * phase_f, gamma)
        if k_sum % 2:
            other += term
        else:
            same += term
    return same, other


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigurationError("time grid must be a non-empty 1-D array", field="points")
    if np.any(grid < 0.0) or np.any(np.diff(grid) < 0.0):
        raise ConfigurationError("time grid must be sorted and non-negative", field="points")
    return grid


def propagators(cfg, grid, classes, threads=None):
    """
    Same-atom and partner-atom propagators S(t) on the grid.

    b¹(t) = b¹(0)S_same + b²(0)S_other and b²(t) = b²(0)S_same + b¹(0)S_other.
    Grid chunks are evaluated in parallel and joined in grid order.
    """
    grid = _check_grid(grid)
    items = classes.ordered(cfg)
    threads = threads or get_thread_count()
    chunks = [c for c in np.array_split(grid, max(1, min(threads, grid.size))) if c.size]
    if threads == 1 or len(chunks) == 1:
        results = [_evaluate_chunk(c, items, cfg.gamma, cfg.phase_d, cfg.phase_f) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda c: _evaluate_chunk(c, items, cfg.gamma, cfg.phase_d, cfg.phase_f), chunks))
    same = np.concatenate([r[0] for r in results])
    other = np.concatenate([r[1] for r in results])
    return same, other


def sum_paths(paths, grid, gamma):
    """Explicit path sum per end atom: returns (S_same, S_other) for the start atom."""
    grid = _check_grid(grid)
    same = np.zeros(grid.shape, dtype=complex)
    other = np.zeros(grid.shape, dtype=complex)
    for path in paths:
        term = path_term(grid, path, gamma)
        if path.end_atom == path.start_atom:
            same += term
        else:
            other += term
    return same, other


def simulate(cfg, initial, grid, truncation=None, table=None, isolated=False, threads=None):
    """
    Atomic amplitudes from the aggregated photon-path sum.

    Args:
        cfg (CavityConfig): cavity parameters
        initial (AmplitudeState): b(0)
        grid: sorted times in units of τ
        truncation (Truncation): delay cutoff and weight floor
        table (PathWeightTable): prebuilt table (built from truncation otherwise)
        isolated (bool): drop every coupling (pure decay)
        threads (int): worker threads for the grid evaluation

    Returns:
        TimeSeries tagged method="pathsum"
    """
    grid = _check_grid(grid)
    t_max = float(grid[-1])
    if truncation is None:
        cutoff = table.delay_cutoff if table is not None else t_max
        truncation = Truncation(cutoff)
    if t_max > truncation.delay_cutoff * (1.0 + HORIZON_SLACK):
        raise HorizonError(f"grid reaches t={t_max} but the delay cutoff is "
                           f"{truncation.delay_cutoff}; raise --delay-cutoff")
    if table is None:
        if isolated:
            table = PathWeightTable.isolated(cfg, truncation.delay_cutoff)
        else:
            table = build_weight_table(cfg, truncation.delay_cutoff, truncation.weight_floor)

    classes = aggregate_paths(table, t_max, truncation.weight_floor if not isolated else 0.0,
                              truncation.class_cap)
    same, other = propagators(cfg, grid, classes, threads)
    b1 = initial.b1 * same + initial.b2 * other
    b2 = initial.b2 * same + initial.b1 * other

    amplitude_tail = classes.pruned_bound + classes.kept_bound
    metadata = {
        'truncation': truncation.to_dict(),
        'table': table.summary(),
        'path_classes': len(classes),
        'tail_bound_amplitude': amplitude_tail,
        'tail_bound_probability': 2.0 * amplitude_tail + amplitude_tail ** 2,
        'tail_bound_kind': 'heuristic',
    }
    logger.debug("pathsum: %d classes, tail bound %.3g", len(classes), amplitude_tail)
    return TimeSeries(grid, b1, b2, "pathsum", metadata)
