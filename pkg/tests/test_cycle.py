"""Otto cycle assembly: first law, bounds, ratios, sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_otto.cycle import (
    adiabatic_cycle,
    default_vf_grid,
    efficiency_at_max_power,
    performance_ratios,
    sqhe_config,
    sweep_depths,
    sweep_filling,
)
from lattice_otto.oracles import ratio_approximation
from lattice_otto.spectral import SystemConfig


def test_no_compression_no_work():
    cfg = SystemConfig(5, 5)
    rec = adiabatic_cycle(cfg, 10.0, 10.0, 0.0, 5.0)
    assert rec.w_c == pytest.approx(0.0, abs=1e-12)
    assert rec.w_h == pytest.approx(0.0, abs=1e-12)
    assert not rec.engine


def test_equal_temperatures_no_engine():
    # a single bath cannot power the cycle
    cfg = SystemConfig(5, 5)
    rec = adiabatic_cycle(cfg, 0.0, 10.0, 3.0, 3.0)
    assert rec.w_ext <= 1e-12
    assert not rec.engine


def test_temperature_inversion_rejected():
    cfg = SystemConfig(5, 5)
    with pytest.raises(ValueError):
        adiabatic_cycle(cfg, 0.0, 10.0, 5.0, 1.0)


def test_first_law_identity():
    cfg = SystemConfig(8, 8)
    rec = adiabatic_cycle(cfg, 1.0, 20.0, 0.5, 6.0)
    assert rec.w_c + rec.q_h + rec.w_h + rec.q_c == pytest.approx(0.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_first_law_and_carnot_random(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 20))
    n = int(rng.integers(1, m + 1))
    v = np.sort(rng.uniform(0.0, 100.0, size=2))
    t = np.sort(rng.uniform(0.01, 20.0, size=2))
    cfg = SystemConfig.for_depth(m, n, v[1])
    rec = adiabatic_cycle(cfg, v[0], v[1], t[0], t[1])
    assert rec.w_c + rec.q_h + rec.w_h + rec.q_c == pytest.approx(0.0, abs=1e-10)
    if rec.engine:
        assert rec.eta <= 1.0 - t[0] / t[1] + 1e-10


def test_self_ratio_is_unity():
    cfg = sqhe_config(12)
    rec = adiabatic_cycle(cfg, 0.0, 20.0, 0.0, 4.0)
    ratio = performance_ratios(rec, rec, 1)
    assert ratio.eta_star == pytest.approx(1.0)
    assert ratio.p_star == pytest.approx(1.0)
    assert ratio.defined


def test_ratio_requires_matching_cycles():
    cfg = SystemConfig(5, 5, basis_size=60)
    many = adiabatic_cycle(cfg, 0.0, 20.0, 0.0, 4.0)
    single = adiabatic_cycle(sqhe_config(12), 0.0, 21.0, 0.0, 4.0)
    with pytest.raises(ValueError):
        performance_ratios(many, single, 5)
    bad_bench = adiabatic_cycle(cfg, 0.0, 20.0, 0.0, 4.0)
    with pytest.raises(ValueError):
        performance_ratios(many, bad_bench, 5)


def test_ratio_flagged_when_benchmark_extracts_no_work():
    cfg = SystemConfig(5, 5, basis_size=60)
    many = adiabatic_cycle(cfg, 20.0, 0.0, 0.0, 4.0)  # inverted depths
    single = adiabatic_cycle(sqhe_config(12), 20.0, 0.0, 0.0, 4.0)
    ratio = performance_ratios(many, single, 5)
    assert not ratio.defined
    assert math.isnan(ratio.eta_star)


def test_p_star_equals_work_ratio_for_shared_tau():
    n = 20
    cfg = SystemConfig.for_depth(n, n, 200.0)
    mult = cfg.basis_size // n
    many = adiabatic_cycle(cfg, 0.0, 200.0, 0.0, 5.0)
    single = adiabatic_cycle(sqhe_config(mult), 0.0, 200.0, 0.0, 5.0)
    ratio = performance_ratios(many, single, n)
    assert ratio.p_star == pytest.approx(many.w_ext / (n * single.w_ext), rel=1e-12)


def test_eta_star_matches_closed_form_deep_lattice():
    n = 40
    cfg = SystemConfig.for_depth(n, n, 200.0)
    many = adiabatic_cycle(cfg, 0.0, 200.0, 0.0, 5.0)
    single = adiabatic_cycle(sqhe_config(cfg.basis_size // n), 0.0, 200.0, 0.0, 5.0)
    ratio = performance_ratios(many, single, n)
    want = ratio_approximation(n, 200.0, 5.0)
    assert abs(ratio.eta_star - want) / want < 0.01
    assert abs(ratio.p_star - want) / want < 0.01


def test_filling_sweep_peaks_at_unit_filling():
    cfg = SystemConfig.for_depth(40, 40, 50.0)
    recs = sweep_filling(cfg, 0.0, 50.0, 0.0, 5.0, range(10, 51, 2))
    ns = np.array([r.particles for r in recs])
    eta = np.array([r.eta for r in recs])
    wpp = np.array([r.w_ext / r.particles for r in recs])
    assert ns[np.argmax(eta)] == 40
    assert ns[np.argmax(wpp)] == 40


def test_filling_sweep_initial_depth_ordering():
    cfg = SystemConfig.for_depth(20, 20, 50.0)
    eta0 = adiabatic_cycle(cfg, 0.0, 50.0, 0.0, 5.0).eta
    eta10 = adiabatic_cycle(cfg, 10.0, 50.0, 0.0, 5.0).eta
    assert eta0 > eta10


def test_depth_grid_flags_and_regions():
    cfg = SystemConfig.for_depth(20, 20, 40.0)
    vi_grid = [0.0, 2.0, 35.0]
    vf_grid = [1.0, 8.0, 40.0]
    recs = sweep_depths(cfg, vi_grid, vf_grid, 0.0, 5.0)
    assert len(recs) == 9
    table = {(r.v_i, r.v_f): r for r in recs}
    assert not table[(2.0, 1.0)].defined          # grey cell: V_i > V_f
    assert not table[(35.0, 8.0)].defined
    assert table[(0.0, 8.0)].eta_star > 1.0       # weak-weak boost
    assert table[(35.0, 40.0)].eta_star == pytest.approx(1.0, abs=0.05)  # deep pair


def test_deep_pair_equivalence():
    cfg = SystemConfig.for_depth(30, 30, 60.0)
    many = adiabatic_cycle(cfg, 30.0, 60.0, 0.0, 5.0)
    single = adiabatic_cycle(sqhe_config(cfg.basis_size // 30), 30.0, 60.0, 0.0, 5.0)
    ratio = performance_ratios(many, single, 30)
    assert ratio.eta_star == pytest.approx(1.0, abs=0.02)


def test_work_monotone_in_hot_temperature():
    cfg = SystemConfig.for_depth(10, 10, 25.0)
    works = [adiabatic_cycle(cfg, 0.0, 25.0, 0.0, th).w_ext
             for th in (1.0, 2.0, 4.0, 8.0, 16.0)]
    assert np.all(np.diff(works) > 0)


def test_curzon_ahlborn_reference():
    res = efficiency_at_max_power(SystemConfig(8, 8), 1.0, 4.0,
                                  vf_grid=default_vf_grid(0.5, 200.0, 60))
    assert res.eta_ca == pytest.approx(0.5)
    assert res.p_max > 0
    assert 0.5 <= res.v_f_opt <= 200.0


def test_efficiency_at_max_power_quantum_regime():
    # cold deep in the quantum regime: the many-body engine approaches the
    # Curzon-Ahlborn benchmark at small T_C/T_H and beats the one-well engine
    grid = default_vf_grid(0.02, 500.0, 100)
    m = efficiency_at_max_power(SystemConfig(20, 20), 0.01, 5.0, grid)
    s = efficiency_at_max_power(SystemConfig(1, 1), 0.01, 5.0, grid)
    assert abs(m.eta_at_pmax - m.eta_ca) / m.eta_ca < 0.25
    assert m.eta_at_pmax > s.eta_at_pmax
    assert abs(m.eta_at_pmax - m.eta_ca) < abs(s.eta_at_pmax - s.eta_ca)


def test_efficiency_at_max_power_washed_out_at_higher_tc():
    # at warmer cold strokes the one-well engine wins
    grid = default_vf_grid(0.02, 500.0, 100)
    m = efficiency_at_max_power(SystemConfig(20, 20), 0.1, 5.0, grid)
    s = efficiency_at_max_power(SystemConfig(1, 1), 0.1, 5.0, grid)
    assert m.eta_at_pmax < s.eta_at_pmax


def test_efficiency_at_max_power_empty_region():
    with pytest.raises(ValueError):
        efficiency_at_max_power(SystemConfig(5, 5), 2.0, 2.0,
                                vf_grid=[1.0, 2.0])
