"""Spectral core: selection rules, exact limits, convergence, invariants."""

import math

import numpy as np
import pytest

from lattice_otto.spectral import (
    ConvergenceReport,
    SystemConfig,
    band_gap,
    basis_mult_for_depth,
    chain_decomposition,
    convergence_report,
    diagonalize,
    hamiltonian,
    kinetic_energies,
    position_squared_matrix,
    potential_matrix,
    spectrum,
)

from conftest import quadrature_operator_matrix


def test_config_validation():
    with pytest.raises(ValueError):
        SystemConfig(0, 1)
    with pytest.raises(ValueError):
        SystemConfig(5, 0)
    with pytest.raises(ValueError):
        SystemConfig(5, 5, basis_size=10)  # below 4*M
    cfg = SystemConfig(5, 5)
    assert cfg.basis_size == 40
    assert cfg.phase == math.pi / 2
    assert SystemConfig(4, 4).phase == 0.0
    assert cfg.box_length == 5 * math.pi


def test_potential_matrix_selection_rule():
    cfg = SystemConfig(3, 3, basis_size=16)
    P = potential_matrix(cfg)
    M = 3
    for m in range(1, 17):
        for n in range(1, 17):
            want = 0.0
            if m == n:
                want += 0.5
            if abs(m - n) == 2 * M:
                want += 0.25
            if m + n == 2 * M:
                want -= 0.25
            assert P[m - 1, n - 1] == pytest.approx(want, abs=1e-15)
    # diagonal special point m = n = M
    assert P[M - 1, M - 1] == pytest.approx(0.25)


@pytest.mark.parametrize("wells", [1, 2, 3, 10])
def test_potential_matrix_against_quadrature(wells, gauss_nodes):
    cfg = SystemConfig(wells, 1, basis_size=64)
    P = potential_matrix(cfg)
    Pq = quadrature_operator_matrix(cfg, lambda x: np.cos(x + cfg.phase) ** 2,
                                    gauss_nodes)
    assert np.max(np.abs(P - Pq)) < 1e-10


@pytest.mark.parametrize("wells", [1, 3, 8])
def test_position_squared_against_quadrature(wells, gauss_nodes):
    cfg = SystemConfig(wells, 1, basis_size=48)
    X2 = position_squared_matrix(cfg)
    X2q = quadrature_operator_matrix(cfg, lambda x: x ** 2, gauss_nodes)
    assert np.max(np.abs(X2 - X2q)) < 1e-10


def test_hamiltonian_symmetric_and_rejects_negative_depth():
    cfg = SystemConfig(4, 4)
    H = hamiltonian(cfg, 7.5)
    assert np.array_equal(H, H.T)
    with pytest.raises(ValueError):
        hamiltonian(cfg, -1.0)
    with pytest.raises(ValueError):
        spectrum(cfg, -0.5)


def test_free_spectrum_single_well():
    cfg = SystemConfig(1, 1, basis_size=8)
    s = spectrum(cfg, 0.0)
    assert np.allclose(s.energies, np.arange(1, 9) ** 2, rtol=0, atol=1e-12)


def test_free_spectrum_hundred_wells():
    cfg = SystemConfig(100, 100)
    s = spectrum(cfg, 0.0, vectors=False)
    n = np.arange(1, cfg.basis_size + 1)
    assert np.allclose(s.energies, (n / 100.0) ** 2, rtol=0, atol=1e-12)
    assert s.energies[0] == pytest.approx(1e-4, abs=1e-15)


def test_free_spectrum_unit_vectors():
    cfg = SystemConfig(3, 3, basis_size=12)
    s = spectrum(cfg, 0.0)
    assert np.allclose(s.vectors, np.eye(12), atol=1e-12)


def test_diagonalize_identity():
    s = diagonalize(np.eye(6))
    assert np.allclose(s.energies, 1.0)
    assert np.allclose(s.vectors.T @ s.vectors, np.eye(6), atol=1e-12)


def test_diagonalize_input_validation():
    with pytest.raises(ValueError):
        diagonalize(np.zeros((3, 4)))
    A = np.arange(9.0).reshape(3, 3)
    with pytest.raises(ValueError):
        diagonalize(A)  # not symmetric


def test_chain_and_dense_spectra_agree():
    for M, v0 in ((3, 25.0), (10, 5.0), (12, 60.0)):
        cfg = SystemConfig(M, M, basis_size=12 * M)
        s_chain = spectrum(cfg, v0)
        s_dense = diagonalize(hamiltonian(cfg, v0), depth=v0)
        assert np.max(np.abs(s_chain.energies - s_dense.energies)) < 1e-10
        # same states up to sign already fixed identically
        overlap = np.abs(np.sum(s_chain.vectors * s_dense.vectors, axis=0))
        assert np.min(overlap) > 1.0 - 1e-9


def test_orthonormality_and_sorting():
    cfg = SystemConfig(10, 10, basis_size=120)
    s = spectrum(cfg, 33.3)
    U = s.vectors
    assert np.max(np.abs(U.T @ U - np.eye(len(U)))) <= 1e-10
    assert np.all(np.diff(s.energies) >= 0)


def test_sign_convention_leading_coefficient_positive():
    cfg = SystemConfig(6, 6, basis_size=60)
    s = spectrum(cfg, 12.0)
    for j in range(len(s.energies)):
        col = s.vectors[:, j]
        lead = col[np.abs(col) > 1e-8][0]
        assert lead > 0


def test_chain_decomposition_partitions_basis():
    for M, K in ((1, 8), (5, 40), (7, 84)):
        chains = chain_decomposition(M, K)
        seen = sorted(m for c in chains for m in c.modes)
        assert seen == list(range(1, K + 1))


def test_variational_monotonicity_in_depth():
    cfg = SystemConfig(5, 5, basis_size=50)
    v_lo, v_hi = 3.0, 8.0
    e_lo = spectrum(cfg, v_lo, vectors=False).energies
    e_hi = spectrum(cfg, v_hi, vectors=False).energies
    assert np.all(e_lo <= e_hi + 1e-10)
    assert np.all(e_hi <= e_lo + (v_hi - v_lo) + 1e-10)


def test_band_gap_free_limit():
    M = 50
    cfg = SystemConfig(M, M)
    g = band_gap(spectrum(cfg, 0.0, vectors=False), M)
    assert g == pytest.approx(((M + 1) ** 2 - M ** 2) / M ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        band_gap(spectrum(SystemConfig(2, 2, basis_size=8), 0.0, n_states=2), 2)


@pytest.mark.parametrize("v0,ref,tol", [
    (25.0, 9.0, 0.10),
    (50.0, 2 * math.sqrt(50) - 1, 0.10),
    (200.0, 2 * math.sqrt(200) - 1, 0.10),
])
def test_band_gap_deep_lattice(v0, ref, tol):
    cfg = SystemConfig.for_depth(100, 100, v0)
    g = band_gap(spectrum(cfg, v0, vectors=False), 100)
    assert abs(g - ref) / ref < tol


@pytest.mark.parametrize("v0", [0.5, 1.0])
def test_band_gap_shallow_lattice(v0):
    cfg = SystemConfig.for_depth(100, 100, v0)
    g = band_gap(spectrum(cfg, v0, vectors=False), 100)
    assert abs(g - v0 / 2) / (v0 / 2) < 0.25


def test_convergence_report_exact_at_zero_depth():
    rep = convergence_report(SystemConfig(6, 6), 0.0)
    assert isinstance(rep, ConvergenceReport)
    assert rep.max_rel_change == 0.0


def test_convergence_report_depth_aware_basis():
    # moderately deep lattice: the 12M basis is already tight
    rep = convergence_report(SystemConfig(10, 10, basis_size=120), 25.0)
    assert rep.max_rel_change < 1e-8
    # very deep lattice needs the larger auto multiplier
    cfg = SystemConfig.for_depth(10, 10, 200.0)
    assert cfg.basis_size >= 180
    rep = convergence_report(cfg, 200.0)
    assert rep.max_rel_change < 1e-6


def test_basis_mult_for_depth_monotone_and_even():
    depths = [0.0, 1.0, 5.0, 25.0, 100.0, 200.0, 500.0]
    mults = [basis_mult_for_depth(v) for v in depths]
    assert mults == sorted(mults)
    assert all(m % 2 == 0 for m in mults)
    assert mults[0] == 8


def test_kinetic_energies():
    cfg = SystemConfig(4, 4, basis_size=16)
    k = kinetic_energies(cfg)
    assert k[0] == pytest.approx(1 / 16)
    assert k[-1] == pytest.approx(16.0)
