"""Variational fast-forward lattice ramps built per single-particle state.

Each initially occupied eigenstate is steered from its eigenstate at the
start depth to the matching eigenstate at the target depth through the
two-state interpolation ansatz

    Phi(x, t) = N(t) [(1 - eps(t)) psi_I(x) + eps(t) psi_F(x)] e^{i b(t) x^2},

where eps(t) is a quintic switch with vanishing first and second
derivatives at both ends and b(t) is a width chirp. Making the
Schroedinger action stationary on this manifold fixes b and yields the
driving amplitude for state n. In recoil units (hbar = 1, hbar^2/2m = 1,
i.e. m = 1/2):

    b = (1/(8 xi^2)) d(xi^2)/dt
    V_n(t) = -[ (d xi^2/d eps)(db/dt + 4 b^2) + d beta/d eps ] / (d alpha/d eps)

with xi^2, alpha, beta the second moment, lattice overlap and kinetic
energy of the real envelope. The many-body ramps are either the mean of
the lowest band's per-state amplitudes or the single amplitude tuned to
the state just below the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import TIME_UNIT, Ramp, quintic_smoothstep
from .spectral import SystemConfig, position_squared_matrix, potential_matrix, spectrum

OVERLAP_TOL = 1e-12
SINGULAR_TOL = 1e-10
MAX_SINGULAR_FRACTION = 0.05
DEFAULT_GRID = 1024


class DegenerateStateError(ValueError):
    """Start and target states coincide or are orthogonal; no path exists."""


class RampRejectedError(RuntimeError):
    """Too much of the schedule sits on a singular manifold."""


def smoothstep_eps(t, t_f: float):
    """Switch parameter eps(t) = 10 s^3 - 15 s^4 + 6 s^5 with s = t/t_f.

    Returns (eps, deps/dt, d2eps/dt2); t and t_f must share units.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < -1e-12) or np.any(t > t_f + 1e-12):
        raise ValueError("t must lie in [0, t_f]")
    s = np.clip(t / t_f, 0.0, 1.0)
    val, d1, d2 = quintic_smoothstep(s)
    return val, d1 / t_f, d2 / (t_f * t_f)


@dataclass(frozen=True)
class StaMoments:
    """Pair matrix elements entering the interpolation ansatz.

    overlap is <psi_I|psi_F> after the sign alignment; x2_*, a_*, b_*
    are the matrix elements of x^2, cos^2(k0 x + phi) and the kinetic
    form between the I/F states.
    """

    overlap: float
    x2_ii: float
    x2_if: float
    x2_ff: float
    a_ii: float
    a_if: float
    a_ff: float
    b_ii: float
    b_if: float
    b_ff: float


def sta_moments(psi_i: np.ndarray, psi_f: np.ndarray,
                config: SystemConfig) -> StaMoments:
    """All nine pair integrals in the sine basis, with aligned sign.

    The target state is flipped if needed so the overlap is
    non-negative; an overlap below 1e-12 leaves the interpolation path
    passing through zero norm and is rejected.
    """
    psi_i = np.asarray(psi_i, dtype=float)
    psi_f = np.asarray(psi_f, dtype=float)
    s = float(np.dot(psi_i, psi_f))
    if s < 0:
        psi_f = -psi_f
        s = -s
    if s < OVERLAP_TOL:
        raise DegenerateStateError(
            f"start/target overlap {s:.2e} is too small for the interpolation ansatz")
    X2 = position_squared_matrix(config)
    P = potential_matrix(config)
    kin = (np.arange(1, config.basis_size + 1, dtype=float) / config.wells) ** 2

    def pair(op_apply):
        return (float(psi_i @ op_apply(psi_i)),
                float(psi_i @ op_apply(psi_f)),
                float(psi_f @ op_apply(psi_f)))

    x2_ii, x2_if, x2_ff = pair(lambda v: X2 @ v)
    a_ii, a_if, a_ff = pair(lambda v: P @ v)
    b_ii, b_if, b_ff = pair(lambda v: kin * v)
    return StaMoments(s, x2_ii, x2_if, x2_ff, a_ii, a_if, a_ff, b_ii, b_if, b_ff)


class Interpolant(NamedTuple):
    xi2: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    d_xi2: np.ndarray
    d_alpha: np.ndarray
    d_beta: np.ndarray
    d2_xi2: np.ndarray


def _quadratic(eps, q0, q1, q2):
    """(1-e)^2 q0 + 2 e (1-e) q1 + e^2 q2 with first two derivatives."""
    a = q0 - 2.0 * q1 + q2
    b = 2.0 * (q1 - q0)
    val = a * eps * eps + b * eps + q0
    return val, 2.0 * a * eps + b, 2.0 * a


def interpolant(eps, moments: StaMoments) -> Interpolant:
    """Normalized envelope moments and their eps-derivatives.

    Every moment is a ratio of quadratics q(eps)/d(eps) with
    d = (1-eps)^2 + eps^2 + 2 eps (1-eps) S, so the derivatives follow
    from the rational form exactly.
    """
    eps = np.asarray(eps, dtype=float)
    d, dd, d2d = _quadratic(eps, 1.0, moments.overlap, 1.0)
    if np.any(np.abs(d) < 1e-14):
        raise DegenerateStateError("interpolation norm vanished along the path")

    def rational(q0, q1, q2, second=False):
        q, dq, d2q = _quadratic(eps, q0, q1, q2)
        val = q / d
        dval = (dq * d - q * dd) / (d * d)
        if not second:
            return val, dval, None
        d2val = ((d2q * d - q * d2d) * d - 2.0 * dd * (dq * d - q * dd)) / (d * d * d)
        return val, dval, d2val

    xi2, d_xi2, d2_xi2 = rational(moments.x2_ii, moments.x2_if, moments.x2_ff, second=True)
    alpha, d_alpha, _ = rational(moments.a_ii, moments.a_if, moments.a_ff)
    beta, d_beta, _ = rational(moments.b_ii, moments.b_if, moments.b_ff)
    return Interpolant(xi2, alpha, beta, d_xi2, d_alpha, d_beta, d2_xi2)


def control_amplitude(t, moments: StaMoments, duration: float,
                      mass: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Driving amplitude V(t) on internal times, plus the singular mask.

    Points where |d alpha/d eps| < 1e-10 make the variational equation
    degenerate; they are returned masked and are filled by interpolation
    at the ramp level. mass is the particle mass in units where
    hbar = 1 (recoil units give m = 1/2); the paper-style convention
    m = 1 is kept reachable for cross-checks.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    eps, deps, d2eps = smoothstep_eps(t, duration)
    iv = interpolant(eps, moments)
    # chirp b = (m/4) (d xi^2/dt) / xi^2 and its time derivative
    g = mass * iv.d_xi2 / (4.0 * iv.xi2)
    dg = mass * (iv.d2_xi2 * iv.xi2 - iv.d_xi2 * iv.d_xi2) / (4.0 * iv.xi2 * iv.xi2)
    b = g * deps
    db = dg * deps * deps + g * d2eps
    numer = iv.d_xi2 * (db + (2.0 / mass) * b * b) + (0.5 / mass) * iv.d_beta
    singular = np.abs(iv.d_alpha) < SINGULAR_TOL
    denom = np.where(singular, 1.0, iv.d_alpha)
    v = -numer / denom
    v[singular] = np.nan
    return v, singular


def _fill_singular(v: np.ndarray, singular: np.ndarray) -> np.ndarray:
    if not np.any(singular):
        return v
    good = ~singular
    if not np.any(good):
        raise RampRejectedError("control amplitude singular everywhere")
    idx = np.arange(len(v), dtype=float)
    out = v.copy()
    out[singular] = np.interp(idx[singular], idx[good], v[good])
    return out


def sta_ramp_single(n: int, config: SystemConfig, v_i: float, v_f: float,
                    t_f: float, t_grid: int = DEFAULT_GRID) -> Ramp:
    """Fast-forward ramp tuned to eigenstate n (0-based) of the start depth.

    Identical endpoints need no driving and come back flagged
    degenerate with a constant schedule. More than 5% singular grid
    points reject the ramp.
    """
    if t_f <= 0:
        raise ValueError("ramp time must be positive")
    if t_grid < 512:
        raise ValueError("need at least 512 grid points to scan the schedule")
    direction = "up" if v_f >= v_i else "down"
    if v_i == v_f:
        return Ramp(kind="sta-single", direction=direction, v_start=float(v_i),
                    v_end=float(v_f), t_f=float(t_f),
                    depth=lambda t: np.full_like(np.asarray(t, dtype=float), float(v_i)),
                    degenerate=True, meta={"state": n})
    spec_i = spectrum(config, v_i)
    spec_f = spectrum(config, v_f)
    moments = sta_moments(spec_i.vectors[:, n], spec_f.vectors[:, n], config)
    duration = TIME_UNIT * t_f

    scan_t = np.linspace(0.0, duration, t_grid)
    v_scan, singular = control_amplitude(scan_t, moments, duration)
    frac = float(np.mean(singular))
    if frac > MAX_SINGULAR_FRACTION:
        raise RampRejectedError(
            f"{frac:.1%} of the schedule for state {n} is singular")
    _fill_singular(v_scan, singular)  # raises if nothing is usable

    def depth(t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        v, bad = control_amplitude(np.atleast_1d(t), moments, duration)
        v = _fill_singular(v, bad)
        return float(v[0]) if scalar else v

    return Ramp(kind="sta-single", direction=direction, v_start=float(v_i),
                v_end=float(v_f), t_f=float(t_f), depth=depth,
                meta={"state": n, "singular_fraction": frac,
                      "overlap": moments.overlap})


def sta_ramp_averaged(config: SystemConfig, v_i: float, v_f: float,
                      t_f: float, t_grid: int = DEFAULT_GRID) -> Ramp:
    """Mean of the per-state ramps over the lowest band (states 0..M-1)."""
    singles = [sta_ramp_single(n, config, v_i, v_f, t_f, t_grid)
               for n in range(config.wells)]
    direction = singles[0].direction
    degenerate = all(r.degenerate for r in singles)

    def depth(t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        acc = np.zeros_like(np.atleast_1d(t))
        for r in singles:
            acc = acc + np.atleast_1d(r.depth(t))
        acc /= len(singles)
        return float(acc[0]) if scalar else acc

    return Ramp(kind="sta-averaged", direction=direction, v_start=float(v_i),
                v_end=float(v_f), t_f=float(t_f), depth=depth,
                degenerate=degenerate,
                meta={"states": list(range(config.wells))})


def most_irreversible_state(wells: int) -> int:
    """0-based label of the band state that excites most under a plain ramp.

    The very top of the lowest band lives in the zone-edge symmetry
    sector, whose nearest partner sits two bands up, so the drive cannot
    push it across the pinning gap at all. The state below it shares a
    sector with the bottom of the second band and carries essentially
    all of the near-gap excitation; that is the state worth targeting.
    """
    return max(wells - 2, 0)


def sta_ramp_targeted(config: SystemConfig, v_i: float, v_f: float,
                      t_f: float, t_grid: int = DEFAULT_GRID,
                      state: int | None = None) -> Ramp:
    """Ramp tuned to the most irreversible state just below the gap."""
    n = most_irreversible_state(config.wells) if state is None else state
    ramp = sta_ramp_single(n, config, v_i, v_f, t_f, t_grid)
    return Ramp(kind="sta-targeted", direction=ramp.direction, v_start=ramp.v_start,
                v_end=ramp.v_end, t_f=ramp.t_f, depth=ramp.depth,
                degenerate=ramp.degenerate, meta=ramp.meta)
