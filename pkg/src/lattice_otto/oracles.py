"""Closed-form deep-lattice energetics used as independent cross-checks.

In the deep-lattice (V_f >> 1), low-temperature (theta = sqrt(V_f)/T_H > 1)
regime the cycle energies admit analytic forms: each well is a weakly
anharmonic oscillator with level spacing 2 sqrt(V_f), the partition sum
is the harmonic one Z = csch(theta)/2, and the free-box side is summed
band by band. Assembling a cycle from these forms collapses to a single
expression for the many-body/single-particle performance ratio, which
the numerical pipeline must reproduce in its regime of validity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEEP_LATTICE_MIN = 25.0  # validity threshold for the V_f >> 1 flag


@dataclass(frozen=True)
class DeepLatticeParams:
    """Reduced variables of the closed forms, with regime flags."""

    v_f: float
    t_h: float
    n_particles: int

    @property
    def theta(self) -> float:
        return math.sqrt(self.v_f) / self.t_h

    @property
    def gap(self) -> float:
        return 2.0 * math.sqrt(self.v_f) - 1.0

    @property
    def deep_lattice(self) -> bool:
        return self.v_f >= DEEP_LATTICE_MIN

    @property
    def low_temperature(self) -> bool:
        return self.theta > 1.0


def site_energy(n: int, v_f: float) -> float:
    """Level n of one deep well: harmonic ladder plus quartic correction.

    eps_n = (n + 1/2) 2 sqrt(V_f) + (2(n+1) - 2(n+1)^2 - 1)/4.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    if v_f <= 0:
        raise ValueError("site_energy needs a positive lattice depth")
    harm = (n + 0.5) * 2.0 * math.sqrt(v_f)
    anharm = 0.25 * (2.0 * (n + 1) - 2.0 * (n + 1) ** 2 - 1.0)
    return harm + anharm


@dataclass(frozen=True)
class CycleEnergies:
    """The four ensemble energies entering one Otto cycle."""

    cold_start: float   # <H_Tc(V_i)> at the cold end, V_i = 0
    cold_end: float     # <H_Tc(V_f)> after compression
    hot_start: float    # <H_Th(V_f)> after heating
    hot_end: float      # <H_Th(V_i)> after expansion


def mb_energies(n_particles: int, v_f: float, t_h: float) -> CycleEnergies:
    """Closed-form N-particle cycle energies (T_C = 0, V_i = 0).

    cold_start = (N+1)(2N+1)/(6N)          filled free box
    cold_end   = N (sqrt(V_f) - 1/4)       filled lowest band
    hot_start  = N (sqrt(V_f) coth(theta) - coth(theta)^2/4)
    hot_end    = (1 + 2N^2 + 3N coth(theta) + 3N^2 csch(theta)^2)/(6N)
    """
    N = n_particles
    if N < 1:
        raise ValueError("need at least one particle")
    cold_start = (N + 1) * (2 * N + 1) / (6.0 * N)
    cold_end = N * (math.sqrt(v_f) - 0.25)
    th = math.sqrt(v_f) / t_h
    coth = 1.0 / math.tanh(th)
    csch2 = coth * coth - 1.0
    hot_start = N * (math.sqrt(v_f) * coth - 0.25 * coth * coth)
    hot_end = (1.0 + 2.0 * N * N + 3.0 * N * coth + 3.0 * N * N * csch2) / (6.0 * N)
    return CycleEnergies(cold_start, cold_end, hot_start, hot_end)


def sqhe_energies(v_f: float, t_h: float) -> CycleEnergies:
    """Closed-form single-particle cycle energies (one well in a one-well box)."""
    th = math.sqrt(v_f) / t_h
    coth = 1.0 / math.tanh(th)
    cold_start = 1.0
    cold_end = math.sqrt(v_f) - 0.25
    hot_start = math.sqrt(v_f) * coth - 0.25 * coth * coth
    hot_end = 0.5 * coth * (1.0 + coth)
    return CycleEnergies(cold_start, cold_end, hot_start, hot_end)


def _cycle_performance(e: CycleEnergies) -> tuple[float, float]:
    """(work output, hot heat) of a cycle assembled from four energies."""
    w_c = e.cold_end - e.cold_start
    w_h = e.hot_end - e.hot_start
    q_h = e.hot_start - e.cold_end
    return -(w_c + w_h), q_h


def closed_form_ratios(n_particles: int, v_f: float, t_h: float) -> tuple[float, float]:
    """(eta*, P*) from the closed-form cycle energies.

    Algebraically both ratios reduce to ratio_approximation; keeping the
    long route here lets tests confirm the identity numerically. Deep in
    the frozen regime (theta beyond ~7) the work terms cancel below
    double precision and the assembled ratios become meaningless, so
    such points come back as NaN; use ratio_approximation there.
    """
    w_many, q_many = _cycle_performance(mb_energies(n_particles, v_f, t_h))
    w_one, q_one = _cycle_performance(sqhe_energies(v_f, t_h))
    scale = n_particles * math.sqrt(v_f)
    if abs(w_one) * n_particles < 1e-12 * scale or q_many == 0 or q_one == 0:
        return math.nan, math.nan
    eta_star = (w_many / q_many) / (w_one / q_one)
    p_star = w_many / (n_particles * w_one)
    return eta_star, p_star


def ratio_approximation(n_particles: int, v_f: float, t_h: float) -> float:
    """Deep-lattice performance boost 1 + (1 - 1/N)/(gap - 3(coth(theta)+1)/2).

    Returns NaN when the denominator is non-positive (outside the
    regime of validity); callers should consult DeepLatticeParams flags.
    """
    p = DeepLatticeParams(v_f, t_h, n_particles)
    coth = 1.0 / math.tanh(p.theta)
    denom = p.gap - 1.5 * (coth + 1.0)
    if denom <= 0:
        return math.nan
    return 1.0 + (1.0 - 1.0 / n_particles) / denom


def double_filling_ratio(v_f: float) -> float:
    """Efficiency ratio limit at two particles per well (theta, M -> infinity).

    (1 - 4/(gap - 1)) / (1 - 3/gap), valid for gap > 3; anharmonicity
    shrinks the higher-level spacing, so this never exceeds one for
    depths above one recoil.
    """
    gap = 2.0 * math.sqrt(v_f) - 1.0
    if gap <= 3.0:
        raise ValueError("double-filling limit needs a gap above 3 recoils")
    return (1.0 - 4.0 / (gap - 1.0)) / (1.0 - 3.0 / gap)


def alt_partition_correction(v_f: float, t_h: float) -> float:
    """Anharmonic partition function csch(t)/2 + t coth(t)^2 csch(t)/(8 sqrt(V_f))."""
    if v_f <= 0 or t_h <= 0:
        raise ValueError("depth and temperature must be positive")
    th = math.sqrt(v_f) / t_h
    csch = 1.0 / math.sinh(th)
    coth = 1.0 / math.tanh(th)
    return 0.5 * csch + th * coth * coth * csch / (8.0 * math.sqrt(v_f))


def harmonic_partition_function(v_f: float, t_h: float) -> float:
    """Leading-order single-well partition function csch(theta)/2."""
    if v_f <= 0 or t_h <= 0:
        raise ValueError("depth and temperature must be positive")
    return 0.5 / math.sinh(math.sqrt(v_f) / t_h)
