"""Fermi-Dirac statistics for the mapped hard-core gas.

The energetics of the strongly repulsive 1D gas coincide with those of
free spinless fermions filling the single-particle levels, so thermal
states are fully described by occupation factors
f_n = 1 / (exp((E_n - mu)/T) + 1) with the chemical potential mu fixed
by sum(f) = N. Work strokes that change the lattice depth slowly carry
the occupations unchanged across the spectrum (rank transport), which
is what adiabatic_energy implements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, xlogy

MU_BRACKET_WIDTH = 50.0  # bracket is [E_min - 50 T, E_max + 50 T]
OCCUPATION_TOL = 1e-12


@dataclass(frozen=True)
class Ensemble:
    """Occupation-number description of a (possibly transported) state."""

    temperature: float
    chemical_potential: float
    occupations: np.ndarray
    particle_number: int


def occupations(energies: np.ndarray, mu: float, temperature: float) -> np.ndarray:
    """Fermi-Dirac factors; the T = 0 limit is an exact step at mu."""
    energies = np.asarray(energies, dtype=float)
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        f = np.where(energies < mu, 1.0, 0.0)
        f[energies == mu] = 0.5
        return f
    # expit(-x) = 1/(1+e^x) is overflow-safe for any |x|
    return expit(-(energies - mu) / temperature)


def chemical_potential(energies: np.ndarray, n_particles: int,
                       temperature: float) -> float:
    """Root of sum(f(mu)) = N on the given spectrum.

    The particle count is strictly increasing in mu, so a bracketed
    search on [E_0 - 50T, E_max + 50T] is guaranteed to converge; the
    root is polished until |sum(f) - N| <= 1e-12.
    """
    energies = np.asarray(energies, dtype=float)
    if temperature <= 0:
        raise ValueError("chemical_potential requires T > 0 (use a step filling at T = 0)")
    if n_particles > len(energies):
        raise ValueError(
            f"cannot hold {n_particles} particles in {len(energies)} basis states")
    lo = energies[0] - MU_BRACKET_WIDTH * temperature
    hi = energies[-1] + MU_BRACKET_WIDTH * temperature

    def excess(mu):
        return float(np.sum(occupations(energies, mu, temperature))) - n_particles

    if excess(lo) > 0 or excess(hi) < 0:
        raise RuntimeError("chemical-potential bracket failed; spectrum too small for N")
    mu = brentq(excess, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    # Newton polish: d(sum f)/d(mu) = sum f(1-f)/T
    for _ in range(3):
        res = excess(mu)
        if abs(res) <= OCCUPATION_TOL:
            break
        f = occupations(energies, mu, temperature)
        slope = float(np.sum(f * (1.0 - f))) / temperature
        if slope <= 0:
            break
        mu -= res / slope
    if abs(excess(mu)) > OCCUPATION_TOL:
        raise RuntimeError("chemical potential did not reach |sum f - N| <= 1e-12")
    return float(mu)


def thermal_ensemble(energies: np.ndarray, n_particles: int,
                     temperature: float) -> Ensemble:
    """Equilibrium ensemble on a spectrum; exact step filling at T = 0."""
    energies = np.asarray(energies, dtype=float)
    if n_particles > len(energies):
        raise ValueError(
            f"cannot hold {n_particles} particles in {len(energies)} basis states")
    if temperature == 0:
        f = np.zeros(len(energies))
        f[:n_particles] = 1.0
        if n_particles < len(energies):
            mu = 0.5 * (energies[n_particles - 1] + energies[n_particles])
        else:
            mu = energies[-1]
        return Ensemble(0.0, float(mu), f, n_particles)
    mu = chemical_potential(energies, n_particles, temperature)
    return Ensemble(float(temperature), mu,
                    occupations(energies, mu, temperature), n_particles)


def ensemble_energy(energies: np.ndarray, occ: np.ndarray) -> float:
    """Total energy sum_n f_n E_n."""
    energies = np.asarray(energies, dtype=float)
    occ = np.asarray(occ, dtype=float)
    if energies.shape != occ.shape:
        raise ValueError("energies and occupations must have equal length")
    return float(np.dot(occ, energies))


def adiabatic_energy(occ_source: np.ndarray, energies_target: np.ndarray) -> float:
    """Energy after carrying occupations to another spectrum by energy rank.

    Monotone lattice ramps produce no level crossings here, so the
    n-th occupied level maps to the n-th target level.
    """
    return ensemble_energy(energies_target, occ_source)


def entropy(occ: np.ndarray) -> float:
    """Mixing entropy -sum[f ln f + (1-f) ln(1-f)], with 0 ln 0 = 0."""
    f = np.asarray(occ, dtype=float)
    if np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
        raise ValueError("occupations must lie in [0, 1]")
    f = np.clip(f, 0.0, 1.0)
    return float(-np.sum(xlogy(f, f) + xlogy(1.0 - f, 1.0 - f)))
