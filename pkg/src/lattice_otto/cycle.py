"""Adiabatic Otto cycles on the box + lattice spectrum, and parameter sweeps.

A cycle runs between lattice depths V_i < V_f and bath temperatures
T_C < T_H: thermalize at (T_C, V_i), carry the occupations up to V_f
(compression), thermalize at (T_H, V_f), carry back down (expansion).
Work and heat follow from the four ensemble energies alone:

    W_C = <H_Tc(V_f)> - <H_Tc(V_i)>      Q_H = <H_Th(V_f)> - <H_Tc(V_f)>
    W_H = <H_Th(V_i)> - <H_Th(V_f)>      Q_C = <H_Tc(V_i)> - <H_Th(V_i)>

with W_ext = -(W_C + W_H) and eta = W_ext / Q_H. The many-body engine is
benchmarked against N independent single-well engines (one particle in a
one-well box with the same depths and temperatures) through the ratios
eta* = eta(N)/eta(1) and P* = P(N)/(N P(1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import SystemConfig, spectrum
from .thermo import adiabatic_energy, ensemble_energy, thermal_ensemble

#: shared nominal stroke time for quasistatic records; every reported ratio
#: divides it out, so its value is arbitrary but must be common to both engines
DEFAULT_TAU = 1.0


@dataclass(frozen=True)
class CycleRecord:
    """Work, heat and performance of one Otto cycle."""

    wells: int
    particles: int
    v_i: float
    v_f: float
    t_c: float
    t_h: float
    w_c: float
    w_h: float
    q_c: float
    q_h: float
    tau: float
    mode: str

    @property
    def w_ext(self) -> float:
        return -(self.w_c + self.w_h)

    @property
    def eta(self) -> float:
        if self.q_h == 0:
            return math.nan
        return self.w_ext / self.q_h

    @property
    def power(self) -> float:
        return self.w_ext / self.tau

    @property
    def engine(self) -> bool:
        return self.w_ext > 0 and self.q_h > 0


@dataclass(frozen=True)
class RatioRecord:
    """Many-body vs single-particle performance at one parameter point."""

    particles: int
    wells: int
    v_i: float
    v_f: float
    t_c: float
    t_h: float
    eta_star: float
    p_star: float
    defined: bool


def sqhe_config(basis_mult: int = 8) -> SystemConfig:
    """One particle in a one-well box: the single-particle benchmark engine."""
    return SystemConfig(wells=1, particles=1, basis_size=basis_mult)


def adiabatic_cycle(config: SystemConfig, v_i: float, v_f: float,
                    t_c: float, t_h: float, tau: float = DEFAULT_TAU,
                    n_particles: int | None = None) -> CycleRecord:
    """Quasistatic cycle record from exact spectra and occupations.

    Records are computed for any depth ordering; cells with V_i > V_f
    simply come out flagged as non-engines. Only a temperature
    inversion T_H < T_C is rejected.
    """
    if t_h < t_c:
        raise ValueError("hot bath must not be colder than the cold bath")
    N = config.particles if n_particles is None else n_particles
    e_i = spectrum(config, v_i, vectors=False).energies
    e_f = spectrum(config, v_f, vectors=False).energies
    return _cycle_from_energies(config.wells, N, v_i, v_f, t_c, t_h, e_i, e_f, tau)


def _cycle_from_energies(wells, n_particles, v_i, v_f, t_c, t_h,
                         energies_i, energies_f, tau,
                         mode: str = "adiabatic") -> CycleRecord:
    cold = thermal_ensemble(energies_i, n_particles, t_c)
    hot = thermal_ensemble(energies_f, n_particles, t_h)
    e1 = ensemble_energy(energies_i, cold.occupations)
    e2 = adiabatic_energy(cold.occupations, energies_f)
    e3 = ensemble_energy(energies_f, hot.occupations)
    e4 = adiabatic_energy(hot.occupations, energies_i)
    return CycleRecord(wells=wells, particles=n_particles,
                       v_i=float(v_i), v_f=float(v_f), t_c=float(t_c), t_h=float(t_h),
                       w_c=e2 - e1, w_h=e4 - e3, q_c=e1 - e4, q_h=e3 - e2,
                       tau=float(tau), mode=mode)


def performance_ratios(many: CycleRecord, single: CycleRecord,
                       n_particles: int) -> RatioRecord:
    """Ratios eta(N)/eta(1) and P(N)/(N P(1)) for matched cycles."""
    for field in ("v_i", "v_f", "t_c", "t_h"):
        if getattr(many, field) != getattr(single, field):
            raise ValueError(f"cycles disagree on {field}")
    if single.wells != 1 or single.particles != 1:
        raise ValueError("the benchmark record must be a one-well, one-particle cycle")
    if many.tau != single.tau:
        raise ValueError("cycles must share a stroke duration for power ratios")
    defined = many.engine and single.engine
    if not defined:
        eta_star = p_star = math.nan
    else:
        eta_star = many.eta / single.eta
        p_star = many.power / (n_particles * single.power)
    return RatioRecord(particles=n_particles, wells=many.wells,
                       v_i=many.v_i, v_f=many.v_f, t_c=many.t_c, t_h=many.t_h,
                       eta_star=eta_star, p_star=p_star, defined=defined)


def sweep_filling(config: SystemConfig, v_i: float, v_f: float,
                  t_c: float, t_h: float, n_range) -> list[CycleRecord]:
    """One cycle record per particle number, on shared spectra."""
    e_i = spectrum(config, v_i, vectors=False).energies
    e_f = spectrum(config, v_f, vectors=False).energies
    records = []
    for n in n_range:
        records.append(_cycle_from_energies(config.wells, int(n), v_i, v_f,
                                            t_c, t_h, e_i, e_f, DEFAULT_TAU))
    return records


def sweep_depths(config: SystemConfig, vi_grid, vf_grid,
                 t_c: float, t_h: float,
                 basis_mult_single: int | None = None) -> list[RatioRecord]:
    """Ratio records over a (V_i, V_f) grid; V_i > V_f cells stay flagged.

    Output is ordered by grid index (V_i outer, V_f inner) regardless of
    evaluation order.
    """
    single_cfg = sqhe_config(basis_mult_single or config.basis_size // config.wells)
    many_cache: dict[float, np.ndarray] = {}
    single_cache: dict[float, np.ndarray] = {}

    def many_energies(v):
        if v not in many_cache:
            many_cache[v] = spectrum(config, v, vectors=False).energies
        return many_cache[v]

    def single_energies(v):
        if v not in single_cache:
            single_cache[v] = spectrum(single_cfg, v, vectors=False).energies
        return single_cache[v]

    records = []
    for v_i in vi_grid:
        for v_f in vf_grid:
            if v_i > v_f:
                records.append(RatioRecord(config.particles, config.wells,
                                           float(v_i), float(v_f), t_c, t_h,
                                           math.nan, math.nan, defined=False))
                continue
            many = _cycle_from_energies(config.wells, config.particles, v_i, v_f,
                                        t_c, t_h, many_energies(v_i), many_energies(v_f),
                                        DEFAULT_TAU)
            single = _cycle_from_energies(1, 1, v_i, v_f, t_c, t_h,
                                          single_energies(v_i), single_energies(v_f),
                                          DEFAULT_TAU)
            records.append(performance_ratios(many, single, config.particles))
    return records


@dataclass(frozen=True)
class MaxPowerResult:
    eta_at_pmax: float
    v_f_opt: float
    eta_ca: float
    p_max: float
    grid: tuple


def default_vf_grid(lo: float = 0.5, hi: float = 500.0, num: int = 200) -> np.ndarray:
    """Logarithmic final-depth grid used for power maximization."""
    return np.geomspace(lo, hi, num)


def efficiency_at_max_power(config: SystemConfig, t_c: float, t_h: float,
                            vf_grid=None, v_i: float = 0.0) -> MaxPowerResult:
    """Maximize quasistatic power over V_f; report eta there and eta_CA.

    The basis grows with depth across the grid, so each cell is
    diagonalized with a multiplier adequate for its own V_f.
    """
    if vf_grid is None:
        vf_grid = default_vf_grid()
    vf_grid = np.asarray(vf_grid, dtype=float)
    best = None
    for v_f in vf_grid:
        cfg = SystemConfig.for_depth(config.wells, config.particles, max(v_i, v_f))
        rec = adiabatic_cycle(cfg, v_i, v_f, t_c, t_h)
        if not rec.engine:
            continue
        if best is None or rec.power > best.power:
            best = rec
    if best is None:
        raise ValueError("no engine operation anywhere on the V_f grid")
    eta_ca = 1.0 - math.sqrt(t_c / t_h)
    return MaxPowerResult(eta_at_pmax=best.eta, v_f_opt=best.v_f, eta_ca=eta_ca,
                          p_max=best.power, grid=(float(vf_grid[0]), float(vf_grid[-1]),
                                                  len(vf_grid), "log"))
