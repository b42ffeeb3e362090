"""
Tests for the photon-path expansion: causality, path enumeration versus
class aggregation, pure decay, probability bound and truncation errors.
"""

import math
import sys

import numpy as np
import pytest

from errors import ConfigurationError, HorizonError, PathExplosionError
from geometry import make_cavity
from models import AmplitudeState
from pathsum import (Hop, PhotonPath, Truncation, aggregate_paths, enumerate_paths,
                     path_term, propagators, simulate, sum_paths)
from quantization import build_weight_table


def _cavity(eps=0.3, gamma_tau=2.0, phase_d=0.0, phase_f=0.0):
    return make_cavity(eps, 20 * math.pi, gamma_tau, phase_d, phase_f)


def test_partner_stays_dark_until_first_arrival():
    cfg = _cavity(eps=0.5)
    grid = np.linspace(0.0, 3.0, 301)
    series = simulate(cfg, AmplitudeState.excited(1), grid, Truncation(3.0))
    early = grid <= cfg.eps
    assert np.all(series.P2[early] == 0.0)
    assert np.any(series.P2[grid > cfg.eps] > 0.0)


def test_pure_decay_before_first_return():
    cfg = _cavity(eps=0.3)
    grid = np.linspace(0.0, 2.0, 201)
    series = simulate(cfg, AmplitudeState.excited(1), grid, Truncation(2.0))
    table = build_weight_table(cfg, 2.0)
    # two cross hops also bring the excitation home
    first_return = min(min(e.delay for e in table.diagonal), 2 * min(e.delay for e in table.cross))
    assert first_return == pytest.approx(0.6)
    early = grid <= first_return
    assert np.allclose(series.P1[early], np.exp(-cfg.gamma * grid[early]), rtol=1e-14, atol=0)


def test_single_hop_window_matches_closed_form():
    cfg = _cavity(eps=0.3, phase_d=0.7, phase_f=2.1)
    table = build_weight_table(cfg, 2.0)
    entry = table.lookup(0.5, 0)
    grid = np.linspace(0.0, 2.0, 401)
    series = simulate(cfg, AmplitudeState.excited(1), grid, table=table)
    window = (grid > 0.3) & (grid < 0.85)
    x = cfg.gamma * (grid[window] - entry.delay)
    expected = -entry.weight_over_gamma * x * np.exp(-0.5 * x) * np.exp(1j * entry.phase)
    assert np.allclose(series.b2[window], expected, rtol=1e-12, atol=1e-16)


def test_isolated_atom_decays_exponentially():
    cfg = _cavity(eps=0.5, gamma_tau=1.5)
    grid = np.linspace(0.0, 5.0, 501)
    series = simulate(cfg, AmplitudeState.excited(1), grid, isolated=True)
    assert np.allclose(series.P1, np.exp(-1.5 * grid), rtol=1e-14, atol=0)
    assert np.all(series.P2 == 0.0)
    assert series.metadata["path_classes"] == 1


def test_enumerated_paths_match_aggregated_classes():
    cfg = _cavity(eps=0.5, gamma_tau=1.0, phase_d=0.4, phase_f=1.3)
    table = build_weight_table(cfg, 2.5, weight_floor=0.0)
    grid = np.linspace(0.0, 2.5, 251)

    paths = enumerate_paths(1, table, 2.5, weight_floor=0.0)
    assert paths[0].order == 0
    assert all(p.total_delay <= 2.5 + 1e-12 for p in paths)
    explicit_same, explicit_other = sum_paths(paths, grid, cfg.gamma)

    classes = aggregate_paths(table, 2.5, weight_floor=0.0)
    same, other = propagators(cfg, grid, classes, threads=1)
    assert np.max(np.abs(same - explicit_same)) < 1e-12
    assert np.max(np.abs(other - explicit_other)) < 1e-12


def test_enumeration_ends_on_correct_atom():
    cfg = _cavity(eps=0.5)
    table = build_weight_table(cfg, 1.5, weight_floor=0.0)
    for path in enumerate_paths(2, table, 1.5, weight_floor=0.0):
        crossings = sum(hop.k1 % 2 for hop in path.hops)
        assert path.end_atom == (2 if crossings % 2 == 0 else 1)
        for first, second in zip(path.hops, path.hops[1:]):
            assert first.to_atom == second.from_atom


def test_threaded_propagators_join_in_grid_order():
    cfg = _cavity(eps=0.3, phase_d=1.0)
    table = build_weight_table(cfg, 3.0)
    classes = aggregate_paths(table, 3.0)
    grid = np.linspace(0.0, 3.0, 997)
    serial = propagators(cfg, grid, classes, threads=1)
    parallel = propagators(cfg, grid, classes, threads=4)
    assert np.allclose(serial[0], parallel[0], rtol=0, atol=1e-15)
    assert np.allclose(serial[1], parallel[1], rtol=0, atol=1e-15)


def test_probability_bound_on_random_cavities():
    rng = np.random.default_rng(2024)
    grid = np.linspace(0.0, 2.0, 201)
    for _ in range(100):
        cfg = make_cavity(rng.uniform(0.2, 0.8), rng.uniform(20.0, 200.0), rng.uniform(0.1, 4.0),
                          rng.uniform(0.0, 2 * math.pi), rng.uniform(0.0, 2 * math.pi))
        theta = rng.uniform(0.0, 2 * math.pi, 3)
        initial = AmplitudeState.from_components(math.cos(theta[0]), 0.0,
                                                 math.sin(theta[0]) * math.cos(theta[1]),
                                                 math.sin(theta[0]) * math.sin(theta[1]))
        series = simulate(cfg, initial, grid, Truncation(2.0))
        assert series.probability_excess() <= 1e-9


def test_tighter_floor_stays_within_tail_bound():
    cfg = _cavity(eps=0.5, gamma_tau=2.0, phase_d=0.4, phase_f=1.1)
    grid = np.linspace(0.0, 2.5, 251)
    initial = AmplitudeState.excited(1)
    coarse = simulate(cfg, initial, grid, Truncation(2.5, weight_floor=1e-8))
    fine = simulate(cfg, initial, grid, Truncation(2.5, weight_floor=1e-9))
    change = coarse.max_discrepancy(fine)
    assert max(change["P1"], change["P2"]) <= coarse.metadata["tail_bound_probability"]


def test_label_swap_symmetry():
    cfg = _cavity(eps=0.4, gamma_tau=3.0, phase_d=0.3, phase_f=2.2)
    grid = np.linspace(0.0, 2.5, 126)
    initial = AmplitudeState.from_components(0.8, 0.1, 0.3, -0.5)
    forward = simulate(cfg, initial, grid, Truncation(2.5))
    swapped = simulate(cfg, initial.swapped(), grid, Truncation(2.5))
    assert np.allclose(forward.b1, swapped.b2, rtol=0, atol=1e-15)
    assert np.allclose(forward.b2, swapped.b1, rtol=0, atol=1e-15)


def test_path_term_formula():
    path = PhotonPath(1, (Hop(1, 1, 2, 0), Hop(1, 1, 0, 1)), 1.0, 0.3, 0.5)
    assert path_term(1.0, path, 2.0) == 0.0
    assert path_term(0.2, path, 2.0) == 0.0
    expected = 0.3 * 2.0 ** 2 / 2.0 * math.exp(-1.0) * complex(math.cos(0.5), math.sin(0.5))
    assert path_term(2.0, path, 2.0) == pytest.approx(expected, rel=1e-14)
    odd = PhotonPath(1, (Hop(1, 2, 1, 0),), 0.5, 0.3, 0.0)
    assert path_term(1.5, odd, 2.0) == pytest.approx(-0.3 * 2.0 * math.exp(-1.0), rel=1e-14)


def test_too_many_classes_raise():
    cfg = _cavity(eps=0.3)
    grid = np.linspace(0.0, 3.0, 31)
    with pytest.raises(PathExplosionError) as info:
        simulate(cfg, AmplitudeState.excited(1), grid, Truncation(3.0, weight_floor=0.0, class_cap=10))
    assert info.value.cap == 10
    assert info.value.to_dict()["context"]["cap"] == 10


def test_too_many_paths_raise():
    table = build_weight_table(_cavity(eps=0.3), 3.0, weight_floor=0.0)
    with pytest.raises(PathExplosionError):
        enumerate_paths(1, table, 3.0, weight_floor=0.0, cap=50)


def test_horizon_beyond_cutoff_raises():
    cfg = _cavity()
    grid = np.linspace(0.0, 3.0, 31)
    with pytest.raises(HorizonError):
        simulate(cfg, AmplitudeState.excited(1), grid, Truncation(2.0))
    table = build_weight_table(cfg, 2.0)
    with pytest.raises(HorizonError):
        enumerate_paths(1, table, 2.5)
    with pytest.raises(HorizonError):
        aggregate_paths(table, 2.5)


def test_bad_grids_are_configuration_errors():
    cfg = _cavity()
    with pytest.raises(ConfigurationError):
        simulate(cfg, AmplitudeState.excited(1), np.array([0.0, 1.0, 0.5]), Truncation(2.0))
    with pytest.raises(ConfigurationError):
        simulate(cfg, AmplitudeState.excited(1), np.array([-0.1, 1.0]), Truncation(2.0))


def test_metadata_records_truncation():
    cfg = _cavity()
    series = simulate(cfg, AmplitudeState.excited(1), np.linspace(0.0, 2.0, 21), Truncation(2.0))
    assert series.method == "pathsum"
    assert series.metadata["truncation"]["delay_cutoff"] == 2.0
    assert series.metadata["tail_bound_kind"] == "heuristic"
    assert series.metadata["table"]["cross_entries"] > 0


if __name__ == "__main__":
    print("🧪 Testing the photon-path sum")
    print("=" * 50)
    failures = 0
    for name, test in list(globals().items()):
        if not name.startswith("test_") or not callable(test):
            continue
        try:
            test()
            print(f"   ✅ {name}")
        except Exception as e:
            failures += 1
            print(f"   ❌ {name}: {e}")
    sys.exit(1 if failures else 0)
