"""Occupation statistics: root finding, limits, entropy, transport."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_otto.spectral import SystemConfig, spectrum
from lattice_otto.thermo import (
    adiabatic_energy,
    chemical_potential,
    ensemble_energy,
    entropy,
    occupations,
    thermal_ensemble,
)


def test_two_level_particle_hole_symmetry():
    # one particle on {0, gap}: mu sits mid-gap at any temperature
    for t in (0.1, 1.0, 7.0):
        mu = chemical_potential(np.array([0.0, 3.0]), 1, t)
        assert mu == pytest.approx(1.5, abs=1e-10)


def test_fermi_factor_at_mu_is_half():
    f = occupations(np.array([2.0]), 2.0, 0.7)
    assert f[0] == pytest.approx(0.5, abs=1e-14)


def test_grid_scan_oracle_free_box():
    # independent check: dense scan of sum f over a mu grid brackets the root
    cfg = SystemConfig(100, 100)
    energies = spectrum(cfg, 0.0, vectors=False).energies
    mu = chemical_potential(energies, 100, 5.0)
    grid = np.linspace(energies[0] - 50.0, energies[-1] + 50.0, 200001)
    counts = np.array([np.sum(occupations(energies, m, 5.0)) for m in
                       (grid[np.searchsorted(grid, mu) - 1], mu,
                        grid[np.searchsorted(grid, mu)])])
    assert counts[0] <= 100.0 <= counts[2]
    assert counts[1] == pytest.approx(100.0, abs=1e-12)


def test_chemical_potential_errors():
    with pytest.raises(ValueError):
        chemical_potential(np.array([1.0, 2.0]), 3, 1.0)
    with pytest.raises(ValueError):
        chemical_potential(np.array([1.0, 2.0]), 1, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=30),
       st.floats(min_value=0.05, max_value=20.0),
       st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_particle_number_closes_on_random_spectra(n, t, seed):
    rng = np.random.default_rng(seed)
    energies = np.sort(rng.uniform(-5.0, 40.0, size=40))
    mu = chemical_potential(energies, n, t)
    f = occupations(energies, mu, t)
    assert abs(float(np.sum(f)) - n) <= 1e-10
    assert np.all(f >= 0) and np.all(f <= 1)
    assert np.all(np.diff(f) <= 1e-15)  # non-increasing in energy


def test_mu_strictly_increasing_in_n():
    rng = np.random.default_rng(7)
    energies = np.sort(rng.uniform(0.0, 30.0, size=50))
    mus = [chemical_potential(energies, n, 2.5) for n in range(1, 49)]
    assert np.all(np.diff(mus) > 0)


def test_zero_temperature_step():
    energies = np.linspace(0.0, 9.0, 10)
    ens = thermal_ensemble(energies, 4, 0.0)
    assert np.array_equal(ens.occupations, np.r_[np.ones(4), np.zeros(6)])
    assert energies[3] < ens.chemical_potential < energies[4]


def test_low_temperature_matches_step_away_from_mu():
    energies = np.linspace(0.0, 9.0, 10)
    cold = thermal_ensemble(energies, 4, 1e-6)
    step = thermal_ensemble(energies, 4, 0.0)
    away = np.abs(energies - cold.chemical_potential) > 10 * 1e-6
    assert np.allclose(cold.occupations[away], step.occupations[away], atol=1e-6)


def test_occupations_step_function_with_mu_between_levels():
    energies = np.arange(5.0)
    f = occupations(energies, 2.5, 0.0)
    assert np.array_equal(f, np.array([1.0, 1.0, 1.0, 0.0, 0.0]))


def test_ensemble_energy_closed_forms():
    # unit filling in a free box
    for n in (1, 5, 100):
        cfg = SystemConfig(n, n)
        energies = spectrum(cfg, 0.0, vectors=False).energies
        ens = thermal_ensemble(energies, n, 0.0)
        want = (n + 1) * (2 * n + 1) / (6.0 * n)
        assert ensemble_energy(energies, ens.occupations) == pytest.approx(want, rel=1e-12)


def test_ensemble_energy_constant_spectrum():
    energies = np.full(8, 3.25)
    f = np.full(8, 0.5)
    assert ensemble_energy(energies, f) == pytest.approx(4 * 3.25)
    with pytest.raises(ValueError):
        ensemble_energy(energies, f[:4])


def test_adiabatic_energy_identity_and_deep_lattice():
    cfg = SystemConfig(100, 100, basis_size=2000)
    e0 = spectrum(cfg, 0.0, vectors=False).energies
    ens = thermal_ensemble(e0, 100, 0.0)
    assert adiabatic_energy(ens.occupations, e0) == pytest.approx(
        ensemble_energy(e0, ens.occupations))
    for v_f in (200.0,):
        ef = spectrum(cfg, v_f, vectors=False).energies
        got = adiabatic_energy(ens.occupations, ef)
        want = 100 * (math.sqrt(v_f) - 0.25)
        assert abs(got - want) / want < 0.01


def test_entropy_limits():
    assert entropy(np.array([0.0, 1.0, 1.0, 0.0])) == 0.0
    assert entropy(np.array([0.5])) == pytest.approx(math.log(2.0), rel=1e-14)
    with pytest.raises(ValueError):
        entropy(np.array([1.5]))


def test_entropy_grows_with_temperature():
    energies = np.linspace(0.0, 5.0, 30)
    hot = thermal_ensemble(energies, 10, 5.0)
    cold = thermal_ensemble(energies, 10, 0.01)
    assert entropy(hot.occupations) > entropy(cold.occupations)


def test_entropy_invariant_under_transport():
    # rank transport reuses the same occupation vector by construction
    cfg = SystemConfig(10, 10)
    e0 = spectrum(cfg, 0.0, vectors=False).energies
    ens = thermal_ensemble(e0, 10, 2.0)
    s_before = entropy(ens.occupations)
    adiabatic_energy(ens.occupations, spectrum(cfg, 30.0, vectors=False).energies)
    assert entropy(ens.occupations) == s_before
