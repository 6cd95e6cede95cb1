"""Batch front end: reproduce spectrum/cycle/dynamics/control tables.

Subcommands
    spectrum   eigenvalues, gaps and a basis-convergence report over depths
    adiabatic  single cycles, filling sweeps, depth grids, N-scaling,
               efficiency at maximum power
    dynamics   finite-time cycles versus ramp time, irreversible work tables
    sta        control-ramp construction and control-driven cycles
    oracle     closed-form versus numerical side-by-side tables

Values may come from an INI-style config file (section per subcommand,
plus [common]); explicit command-line flags win over the file. Every
table is CSV with 17 significant digits and a JSON sidecar echoing the
full configuration. Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .cycle import (adiabatic_cycle, default_vf_grid, efficiency_at_max_power,
                    performance_ratios, sqhe_config, sweep_depths, sweep_filling)
from .dynamics import (DtControl, PropagationError, cycle_from_propagations,
                       finite_time_cycle, make_stroke_ramps, stroke_propagations)
from .oracles import (closed_form_ratios, mb_energies, ratio_approximation,
                      sqhe_energies)
from .spectral import (EigensolverError, SystemConfig, band_gap,
                       basis_mult_for_depth, convergence_report, spectrum)
from .thermo import adiabatic_energy, ensemble_energy, thermal_ensemble


class ConfigError(ValueError):
    pass


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def parse_grid(text: str) -> np.ndarray:
    """Grid spec 'start:stop:num' (linear) or 'start:stop:num:log'."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"bad grid spec {text!r}; want start:stop:num[:log]")
    lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
    if len(parts) == 4:
        if parts[3] != "log":
            raise ConfigError(f"unknown grid scale {parts[3]!r}")
        return np.geomspace(lo, hi, num)
    return np.linspace(lo, hi, num)


def parse_range(text: str) -> range:
    """Inclusive integer range 'lo:hi[:step]'."""
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 2:
        return range(parts[0], parts[1] + 1)
    if len(parts) == 3:
        return range(parts[0], parts[1] + 1, parts[2])
    raise ConfigError(f"bad range spec {text!r}; want lo:hi[:step]")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="lattice-otto", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--config", type=Path, help="INI config file")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, help="output directory (default: out)")
        p.add_argument("--wells", "-M", type=int, help="number of lattice wells")
        p.add_argument("--particles", "-N", type=int, help="particle number")
        p.add_argument("--basis-mult", type=int,
                       help="sine modes per well (default: auto from max depth)")

    p = sub.add_parser("spectrum", help="eigenvalues and gaps over a depth list")
    common(p)
    p.add_argument("--depths", help="comma list of lattice depths")
    p.add_argument("--eigenvectors", action="store_true",
                   help="also write eigenvector matrices")

    p = sub.add_parser("adiabatic", help="quasistatic cycles and sweeps")
    common(p)
    p.add_argument("--mode", choices=["single", "filling", "depths", "nscaling",
                                      "maxpower"])
    p.add_argument("--vi", type=float, help="initial lattice depth")
    p.add_argument("--vf", type=float, help="final lattice depth")
    p.add_argument("--tc", type=float, help="cold bath temperature")
    p.add_argument("--th", type=float, help="hot bath temperature")
    p.add_argument("--n-range", help="filling sweep lo:hi[:step]")
    p.add_argument("--vi-grid", help="grid spec for V_i")
    p.add_argument("--vf-grid", help="grid spec for V_f")
    p.add_argument("--n-list", help="comma list of N=M sizes for nscaling")
    p.add_argument("--th-list", help="comma list of hot temperatures (maxpower)")

    p = sub.add_parser("dynamics", help="finite-time cycles and irreversible work")
    common(p)
    p.add_argument("--mode", choices=["cycles", "wirr"])
    p.add_argument("--vi", type=float)
    p.add_argument("--vf", type=float)
    p.add_argument("--tc", type=float)
    p.add_argument("--th", type=float)
    p.add_argument("--tf", type=float, help="ramp time for wirr mode")
    p.add_argument("--tf-list", help="comma list of ramp times (cycles mode)")
    p.add_argument("--n-list", help="comma list of particle numbers")
    p.add_argument("--n-range", help="particle sweep lo:hi[:step] (wirr mode)")
    p.add_argument("--th-list", help="expansion-stroke temperatures (wirr mode)")
    p.add_argument("--dt", type=float, help="fixed integrator step (internal units)")
    p.add_argument("--dt-target", type=float,
                   help="relative E_NA target for step halving")

    p = sub.add_parser("sta", help="control ramps and control-driven cycles")
    common(p)
    p.add_argument("--vi", type=float)
    p.add_argument("--vf", type=float)
    p.add_argument("--tc", type=float)
    p.add_argument("--th", type=float)
    p.add_argument("--tf-list", help="comma list of ramp times")
    p.add_argument("--ramps", help="comma list from {lambda,averaged,targeted}")
    p.add_argument("--inset-tf", type=float,
                   help="ramp time for the per-state excess-energy tables")
    p.add_argument("--dt", type=float)
    p.add_argument("--dt-target", type=float)

    p = sub.add_parser("oracle", help="closed-form versus numerical tables")
    common(p)
    p.add_argument("--n-list", help="comma list of N=M sizes")
    p.add_argument("--vf-list", help="comma list of final depths")
    p.add_argument("--th", type=float)
    return top


DEFAULTS = {
    "out": "out", "wells": 100, "particles": 100, "basis_mult": 0,
    "depths": "0,5,25", "eigenvectors": False,
    "mode": None, "vi": 0.0, "vf": 50.0, "tc": 0.0, "th": 5.0,
    "n_range": "10:110", "vi_grid": "0:30:16", "vf_grid": None,
    "n_list": None, "th_list": None,
    "tf": 2.0, "tf_list": "1,2,5,10,15", "dt": None, "dt_target": None,
    "ramps": "lambda,averaged,targeted", "inset_tf": None,
    "vf_list": "100,200,400",
}

_MODE_DEFAULT = {"adiabatic": "single", "dynamics": "cycles"}


def _merge_config(args: argparse.Namespace) -> dict:
    """defaults < config-file values < explicit flags."""
    merged = dict(DEFAULTS)
    if args.config is not None:
        if not Path(args.config).exists():
            raise ConfigError(f"config file {args.config} not found")
        ini = configparser.ConfigParser()
        ini.read(args.config)
        for section in ("common", args.command):
            if ini.has_section(section):
                for key, val in ini.items(section):
                    merged[key.replace("-", "_")] = val
    for key, val in vars(args).items():
        if key in ("config", "command"):
            continue
        if val is not None and val is not False:
            merged[key] = val
    if merged.get("mode") is None:
        merged["mode"] = _MODE_DEFAULT.get(args.command)
    # config-file strings for typed scalars
    for key in ("wells", "particles", "basis_mult"):
        merged[key] = int(merged[key])
    for key in ("vi", "vf", "tc", "th", "tf"):
        if merged.get(key) is not None:
            merged[key] = float(merged[key])
    if isinstance(merged.get("eigenvectors"), str):
        merged["eigenvectors"] = merged["eigenvectors"].strip().lower() in ("1", "true", "yes", "on")
    merged["out"] = Path(merged["out"])
    return merged


def _config_for(cfg: dict, depth_hint: float) -> SystemConfig:
    mult = cfg["basis_mult"] or basis_mult_for_depth(depth_hint)
    return SystemConfig(cfg["wells"], cfg["particles"], basis_size=mult * cfg["wells"])


def _dt_control(cfg: dict) -> DtControl:
    if cfg.get("dt"):
        return DtControl(fixed_dt=float(cfg["dt"]))
    if cfg.get("dt_target"):
        return DtControl(target=float(cfg["dt_target"]))
    return DtControl()


def _echo(cfg: dict) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in cfg.items()}


def cmd_spectrum(cfg: dict) -> None:
    depths = parse_floats(str(cfg["depths"]))
    out = cfg["out"]
    reports = []
    for v0 in depths:
        syscfg = _config_for(cfg, v0)
        spec = spectrum(syscfg, v0, vectors=bool(cfg["eigenvectors"]))
        tag = io.fmt(v0)
        io.write_spectrum(out / f"spectrum_V{tag}.csv", spec)
        if cfg["eigenvectors"]:
            io.write_eigenvectors(out / f"eigenvectors_V{tag}.txt", spec)
        rep = convergence_report(syscfg, v0)
        gap = band_gap(spec, syscfg.wells) if len(spec) > syscfg.wells else math.nan
        reports.append((v0, syscfg.basis_size, rep.doubled_size,
                        rep.max_rel_change, gap))
    io.write_csv(out / "convergence.csv",
                 ["V0", "K", "K_doubled", "max_rel_change", "band_gap"], reports)
    io.write_sidecar(out / "spectrum_meta.json", {"config": _echo(cfg)})


def cmd_adiabatic(cfg: dict) -> None:
    out = cfg["out"]
    mode = cfg["mode"]
    vi, vf, tc, th = cfg["vi"], cfg["vf"], cfg["tc"], cfg["th"]
    if mode == "single":
        syscfg = _config_for(cfg, max(vi, vf))
        many = adiabatic_cycle(syscfg, vi, vf, tc, th)
        single = adiabatic_cycle(sqhe_config(syscfg.basis_size // syscfg.wells),
                                 vi, vf, tc, th)
        ratio = performance_ratios(many, single, syscfg.particles)
        io.write_cycles(out / "cycle_single.csv", [many, single], [ratio, None])
    elif mode == "filling":
        syscfg = _config_for(cfg, max(vi, vf))
        records = sweep_filling(syscfg, vi, vf, tc, th, parse_range(str(cfg["n_range"])))
        io.write_cycles(out / "filling_sweep.csv", records)
    elif mode == "depths":
        vi_grid = parse_grid(str(cfg["vi_grid"]))
        vf_grid = parse_grid(str(cfg["vf_grid"] or cfg["vi_grid"]))
        v_max = max(vi_grid.max(), vf_grid.max())
        syscfg = _config_for(cfg, v_max)
        records = sweep_depths(syscfg, vi_grid, vf_grid, tc, th)
        rows = [(r.particles, r.wells, r.v_i, r.v_f, r.t_c, r.t_h,
                 r.eta_star, r.p_star, r.defined) for r in records]
        io.write_csv(out / "depth_grid.csv",
                     ["N", "M", "V_i", "V_f", "T_C", "T_H", "eta_star", "P_star",
                      "engine_flag"], rows)
    elif mode == "nscaling":
        sizes = parse_ints(str(cfg["n_list"] or "2,5,10,20,50,100"))
        rows = []
        for n in sizes:
            mult = cfg["basis_mult"] or basis_mult_for_depth(max(vi, vf))
            syscfg = SystemConfig(n, n, basis_size=mult * n)
            many = adiabatic_cycle(syscfg, vi, vf, tc, th)
            single = adiabatic_cycle(sqhe_config(mult), vi, vf, tc, th)
            ratio = performance_ratios(many, single, n)
            rows.append((n, ratio.eta_star, ratio.p_star,
                         ratio_approximation(n, vf, th)))
        io.write_csv(out / "n_scaling.csv",
                     ["N", "eta_star", "P_star", "ratio_closed_form"], rows)
    elif mode == "maxpower":
        th_list = parse_floats(str(cfg["th_list"] or cfg["th"]))
        vf_grid = parse_grid(str(cfg["vf_grid"])) if cfg["vf_grid"] else default_vf_grid()
        rows = []
        for th_i in th_list:
            many_cfg = SystemConfig(cfg["wells"], cfg["particles"])
            res_m = efficiency_at_max_power(many_cfg, tc, th_i, vf_grid, v_i=vi)
            res_s = efficiency_at_max_power(SystemConfig(1, 1), tc, th_i, vf_grid, v_i=vi)
            rows.append((tc, th_i, tc / th_i, res_m.eta_at_pmax, res_m.v_f_opt,
                         res_s.eta_at_pmax, res_s.v_f_opt, res_m.eta_ca))
        io.write_csv(out / "max_power.csv",
                     ["T_C", "T_H", "ratio", "eta_mqhe", "Vf_opt_mqhe",
                      "eta_sqhe", "Vf_opt_sqhe", "eta_CA"], rows)
        io.write_sidecar(out / "max_power_meta.json",
                         {"config": _echo(cfg),
                          "vf_grid": [float(vf_grid[0]), float(vf_grid[-1]),
                                      int(len(vf_grid)), "log"]})
    else:
        raise ConfigError(f"unknown adiabatic mode {mode!r}")
    io.write_sidecar(out / "adiabatic_meta.json", {"config": _echo(cfg)})


def cmd_dynamics(cfg: dict) -> None:
    out = cfg["out"]
    vi, vf, tc, th = cfg["vi"], cfg["vf"], cfg["tc"], cfg["th"]
    syscfg = _config_for(cfg, max(vi, vf))
    ctrl = _dt_control(cfg)
    if cfg["mode"] == "cycles":
        tf_list = parse_floats(str(cfg["tf_list"]))
        n_list = parse_ints(str(cfg["n_list"] or cfg["particles"]))
        rows = []
        for tf in tf_list:
            res_up, res_down = stroke_propagations(syscfg, vi, vf, tf,
                                                   "reference", dt_control=ctrl)
            for n in n_list:
                rec = cycle_from_propagations(syscfg, res_up, res_down, tc, th,
                                              tf, n, mode="finite-time:reference")
                ad = adiabatic_cycle(syscfg, vi, vf, tc, th, n_particles=n)
                rows.append((tf, n, rec.w_ext, rec.q_h, rec.eta, rec.power,
                             ad.eta, rec.eta / ad.eta if ad.eta else math.nan))
        io.write_csv(out / "eta_vs_tf.csv",
                     ["t_f", "N", "W_ext", "Q_H", "eta", "P", "eta_AD",
                      "eta_over_eta_AD"], rows)
    elif cfg["mode"] == "wirr":
        tf = float(cfg["tf"])
        n_range = parse_range(str(cfg["n_range"] or "2:" + str(syscfg.wells)))
        th_list = parse_floats(str(cfg["th_list"] or "0"))
        res_up, res_down = stroke_propagations(syscfg, vi, vf, tf,
                                               "reference", dt_control=ctrl)
        e_i = spectrum(syscfg, vi, vectors=False).energies
        e_f = spectrum(syscfg, vf, vectors=False).energies
        rows = []
        for n in n_range:
            f_up = thermal_ensemble(e_i, n, tc).occupations
            w_up = float(np.dot(f_up, res_up.delta_e))
            for th_i in th_list:
                f_dn = thermal_ensemble(e_f, n, th_i).occupations
                w_dn = float(np.dot(f_dn, res_down.delta_e))
                rows.append((n, tf, tc, th_i, w_up, w_dn))
        io.write_csv(out / "wirr.csv",
                     ["N", "t_f", "T_C_up", "T_H_down", "W_irr_up", "W_irr_down"],
                     rows)
    else:
        raise ConfigError(f"unknown dynamics mode {cfg['mode']!r}")
    io.write_sidecar(out / "dynamics_meta.json", {"config": _echo(cfg)})


_RAMP_KINDS = {"lambda": "reference", "averaged": "sta-averaged",
               "targeted": "sta-targeted"}


def cmd_sta(cfg: dict) -> None:
    out = cfg["out"]
    vi, vf, tc, th = cfg["vi"], cfg["vf"], cfg["tc"], cfg["th"]
    syscfg = _config_for(cfg, max(vi, vf))
    ctrl = _dt_control(cfg)
    kinds = [k.strip() for k in str(cfg["ramps"]).split(",") if k.strip()]
    tf_list = parse_floats(str(cfg["tf_list"]))
    single_cfg = sqhe_config(syscfg.basis_size // syscfg.wells)
    rows = []
    inset_tf = cfg["inset_tf"]
    for tf in tf_list:
        bench = finite_time_cycle(single_cfg, vi, vf, tc, th, tf, "reference",
                                  dt_control=ctrl, n_particles=1)
        for kind in kinds:
            if kind not in _RAMP_KINDS:
                raise ConfigError(f"unknown ramp kind {kind!r}")
            up, down = make_stroke_ramps(syscfg, vi, vf, tf, _RAMP_KINDS[kind])
            io.write_ramp(out / f"ramp_{kind}_tf{io.fmt(tf)}_up.csv", up)
            io.write_ramp(out / f"ramp_{kind}_tf{io.fmt(tf)}_down.csv", down)
            res_up, res_down = stroke_propagations(syscfg, vi, vf, tf,
                                                   ramps=(up, down), dt_control=ctrl)
            rec = cycle_from_propagations(syscfg, res_up, res_down, tc, th, tf,
                                          syscfg.particles,
                                          mode=f"finite-time:{up.kind}")
            rows.append((tf, kind, rec.w_ext, rec.q_h, rec.eta,
                         rec.eta / bench.eta if bench.eta else math.nan))
            if inset_tf is not None and float(inset_tf) == tf:
                io.write_propagation(out / f"excess_{kind}_tf{io.fmt(tf)}_up.csv",
                                     res_up)
                io.write_propagation(out / f"excess_{kind}_tf{io.fmt(tf)}_down.csv",
                                     res_down)
    io.write_csv(out / "sta_cycles.csv",
                 ["t_f", "ramp", "W_ext", "Q_H", "eta", "eta_star"], rows)
    io.write_sidecar(out / "sta_meta.json",
                     {"config": _echo(cfg),
                      "benchmark": "one-well engine driven by the reference ramp "
                                   "at the same t_f",
                      "strokes": "control applied to both strokes"})


def cmd_oracle(cfg: dict) -> None:
    out = cfg["out"]
    th = cfg["th"]
    sizes = parse_ints(str(cfg["n_list"] or "100"))
    vf_list = parse_floats(str(cfg["vf_list"]))
    rows = []
    for n in sizes:
        for vf in vf_list:
            mult = cfg["basis_mult"] or basis_mult_for_depth(vf)
            syscfg = SystemConfig(n, n, basis_size=mult * n)
            e0 = spectrum(syscfg, 0.0, vectors=False).energies
            ef = spectrum(syscfg, vf, vectors=False).energies
            cold = thermal_ensemble(e0, n, 0.0)
            hot = thermal_ensemble(ef, n, th)
            num = (ensemble_energy(e0, cold.occupations),
                   adiabatic_energy(cold.occupations, ef),
                   ensemble_energy(ef, hot.occupations),
                   adiabatic_energy(hot.occupations, e0))
            cf = mb_energies(n, vf, th)
            many = adiabatic_cycle(syscfg, 0.0, vf, 0.0, th)
            single = adiabatic_cycle(sqhe_config(mult), 0.0, vf, 0.0, th)
            ratio = performance_ratios(many, single, n)
            es_cf, _ = closed_form_ratios(n, vf, th)
            rows.append((n, vf, th,
                         num[0], cf.cold_start, num[1], cf.cold_end,
                         num[2], cf.hot_start, num[3], cf.hot_end,
                         ratio.eta_star, es_cf, ratio_approximation(n, vf, th)))
    io.write_csv(out / "oracle.csv",
                 ["N", "V_f", "T_H",
                  "E_cold_start_num", "E_cold_start_cf",
                  "E_cold_end_num", "E_cold_end_cf",
                  "E_hot_start_num", "E_hot_start_cf",
                  "E_hot_end_num", "E_hot_end_cf",
                  "eta_star_num", "eta_star_cf", "ratio_eq"], rows)
    io.write_sidecar(out / "oracle_meta.json", {"config": _echo(cfg)})


_COMMANDS = {"spectrum": cmd_spectrum, "adiabatic": cmd_adiabatic,
             "dynamics": cmd_dynamics, "sta": cmd_sta, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = _merge_config(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        _COMMANDS[args.command](cfg)
    except (ConfigError,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PropagationError, EigensolverError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
