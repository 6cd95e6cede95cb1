"""Deterministic CSV/JSON artifact writers.

All tables use '.' decimals, no thousands separators and 17 significant
digits, so identical inputs reproduce byte-identical bodies across
platforms. Each run directory gets a JSON sidecar carrying the full
configuration echo and the package version; sidecars contain no
timestamps for the same reason.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

CYCLE_HEADER = ["N", "M", "V_i", "V_f", "T_C", "T_H", "W_C", "W_H", "Q_C", "Q_H",
                "W_ext", "eta", "P", "eta_star", "P_star", "engine_flag"]


def fmt(x) -> str:
    """One cell: 17 significant digits for floats, plain repr otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_sidecar(path, payload: dict) -> Path:
    """JSON metadata next to a table; keys are sorted for stable bytes."""
    from . import __version__
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"version": __version__, **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x)!r}")


def write_spectrum(path, spec) -> Path:
    """Spectrum as (index, energy) rows."""
    rows = [(i, e) for i, e in enumerate(spec.energies)]
    return write_csv(path, ["index", "energy"], rows)


def write_eigenvectors(path, spec) -> Path:
    """Row-major plain-text eigenvector matrix, 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, spec.vectors, fmt="%.17g")
    return path


def write_ensemble(path, energies, ensemble) -> Path:
    rows = [(i, e, f) for i, (e, f) in enumerate(zip(energies, ensemble.occupations))]
    return write_csv(path, ["index", "energy", "occupation"], rows)


def cycle_row(record, ratio=None):
    """One CYCLE_HEADER row from a cycle record and optional ratios."""
    eta_star = p_star = float("nan")
    if ratio is not None:
        eta_star, p_star = ratio.eta_star, ratio.p_star
    return [record.particles, record.wells, record.v_i, record.v_f,
            record.t_c, record.t_h, record.w_c, record.w_h, record.q_c,
            record.q_h, record.w_ext, record.eta, record.power,
            eta_star, p_star, record.engine]


def write_cycles(path, records, ratios=None) -> Path:
    if ratios is None:
        ratios = [None] * len(records)
    rows = [cycle_row(r, q) for r, q in zip(records, ratios)]
    return write_csv(path, CYCLE_HEADER, rows)


def write_ramp(path, ramp, n_samples: int = 1024) -> Path:
    """Ramp schedule as (t, V) rows, t in ramp-time units."""
    t, v = ramp.sample(n_samples)
    return write_csv(path, ["t", "V"], zip(t, v))


def read_ramp(path):
    """(times, depths) from a two-column ramp CSV."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    return data[:, 0], data[:, 1]


def write_propagation(path, result) -> Path:
    rows = [(int(n), ad, na, d, nd) for n, ad, na, d, nd in
            zip(result.indices, result.e_ad, result.e_na,
                result.delta_e, result.norm_drift)]
    return write_csv(path, ["n", "E_AD", "E_NA", "dE", "norm_drift"], rows)
