"""Orchestration: config -> experiment -> files on disk."""
import copy
import warnings
from collections import Counter
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .analysis import cfrog_trace, fit_beat_period
from .config import build, load_config
from .errors import SimulationWarning, ValidationError
from .experiments import (EXPERIMENTS, Setup, delay_scan, locking_frequency_scan,
                          phase_delay_map, phase_scan, window_scan)
from .fields import to_time
from .masks import CompositeMask, ConstantMask, WindowMask, apply_mask
from .molecule import validate_model
from .units import HBAR


def bundled_configs():
    root = resources.files("pscoherence") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def resolve_config(path):
    """A filesystem path, or the name of a bundled config."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name[:-5] if p.name.endswith(".yaml") else p.name
    if name in bundled_configs():
        return Path(str(resources.files("pscoherence") / "data" / f"{name}.yaml"))
    return p


def make_setup(cfg, parts):
    e = cfg.experiment
    return Setup(parts["spectrum"], parts["model"], parts["shaping"], parts["A_T"],
                 parts["A_R"], mode=e.mode, dt_max=e.dt_max, local_phase=e.local_phase)


def check(cfg, parts):
    """Static diagnostics: channel enumeration plus warnings."""
    diag = validate_model(parts["model"])
    warns = list(diag.warnings)
    lo, hi = cfg.field.edge_low, cfg.field.edge_high
    centers = []
    for m in parts["shaping"]:
        if isinstance(m, WindowMask):
            centers.append(m.omega_c)
    if cfg.experiment.window_centers:
        centers += list(cfg.experiment.window_centers)
    for c in centers:
        if not lo <= c <= hi:
            warns.append(f"window centre {c:.4f} rad/fs outside spectrum support "
                         f"[{lo:.4f}, {hi:.4f}] rad/fs")
    return diag, warns


def _snapshot(raw, seed):
    snap = copy.deepcopy(raw)
    snap["seed"] = seed
    return snap


def _flag_summary(flag_lists):
    c = Counter(f for fl in flag_lists for f in fl)
    return dict(sorted(c.items()))


def run_experiment(cfg, raw, out_dir=None, threads=1, seed=None):
    """Run the configured experiment and write its files.

    Returns a report dict with ``files``, ``flags`` and ``warnings``.
    """
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    parts = build(cfg)
    diag, warns = check(cfg, parts)
    out = Path(out_dir if out_dir is not None else cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    e = cfg.experiment
    prefix = cfg.output.prefix or e.type
    setup = make_setup(cfg, parts)
    meta = {"config": _snapshot(raw, seed), "experiment": e.type,
            "channels": [list(c) for c in diag.channels],
            "resonance_photon_energies_eV": diag.resonance_photon_energies}
    files, flags = [], {}
    omega_L = e.locking_frequency if e.locking_frequency is not None else cfg.field.center

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SimulationWarning)
        if e.type == "delay_scan":
            r = delay_scan(setup, e.delays, e.locking_phase, omega_L, e.noise, rng)
            n = r.axis.size
            files.append(io.write_columns(
                out / f"{prefix}.txt",
                [r.axis, np.full(n, e.locking_phase), np.full(n, omega_L), r.yields,
                 r.incoherent, r.coherent],
                ["tau_fs", "phi_L_rad", "omega_L_rad_fs", "yield", "incoherent",
                 "coherent"]))
            meta.update(scan=r.metadata, fixed=r.fixed)
            try:
                meta["beat_fit"] = fit_beat_period(r).as_dict()
            except ValidationError as exc:
                meta["beat_fit"] = {"skipped": exc.message}
            flags = _flag_summary(r.flags)

        elif e.type == "phase_scan":
            phis = e.phases if e.phases is not None else np.linspace(0, 4 * np.pi, 129)
            if len(e.delays) == 1:
                r = phase_scan(setup, e.delays[0], phis, omega_L, e.noise, rng)
                n = r.axis.size
                files.append(io.write_columns(
                    out / f"{prefix}.txt",
                    [r.axis, np.full(n, e.delays[0]), np.full(n, omega_L), r.yields,
                     r.incoherent, r.coherent],
                    ["phi_L_rad", "tau_fs", "omega_L_rad_fs", "yield", "incoherent",
                     "coherent"]))
                meta.update(scan=r.metadata, depth_of_modulation=r.extras["depth"])
                flags = _flag_summary(r.flags)
            else:
                scans, depth = phase_delay_map(setup, e.delays, phis, omega_L, e.noise,
                                               rng, threads)
                files.append(io.write_matrix(
                    out / f"{prefix}_map.txt", np.column_stack([s.yields for s in scans]),
                    ["rows: locking phase (see _phases.txt); columns: delay "
                     "(see _depth.txt)"]))
                files.append(io.write_columns(out / f"{prefix}_phases.txt", [phis],
                                              ["phi_L_rad"]))
                files.append(io.write_columns(out / f"{prefix}_depth.txt",
                                              [e.delays, depth],
                                              ["tau_fs", "depth_of_modulation"]))
                meta.update(scan=scans[0].metadata, omega_L=omega_L)
                flags = _flag_summary(f for s in scans for f in s.flags)

        elif e.type == "locking_frequency_scan":
            res = locking_frequency_scan(setup, e.locking_frequencies, e.delays,
                                         e.locking_phase, threads, e.noise, rng)
            wl = np.repeat([en.omega_L for en in res.entries], len(e.delays))
            tau = np.tile(e.delays, len(res.entries))
            cat = lambda attr: np.concatenate([getattr(en.scan, attr)  # noqa: E731
                                               for en in res.entries])
            files.append(io.write_columns(
                out / f"{prefix}.txt", [wl, tau, cat("yields"), cat("incoherent"),
                                        cat("coherent")],
                ["omega_L_rad_fs", "tau_fs", "yield", "incoherent", "coherent"]))
            nan = float("nan")
            files.append(io.write_columns(
                out / f"{prefix}_fits.txt",
                [[en.omega_L for en in res.entries],
                 [en.fit.tau_beat if en.fit and en.fit.modulated else nan
                  for en in res.entries],
                 [en.expected_period if en.expected_period is not None else nan
                  for en in res.entries],
                 [en.fit.goodness if en.fit else nan for en in res.entries]],
                ["omega_L_rad_fs", "tau_beat_fs", "expected_fs", "goodness"]))
            meta["fits"] = [{"omega_L": en.omega_L,
                             "fit": en.fit.as_dict() if en.fit else None,
                             "expected_period_fs": en.expected_period,
                             "diagnostics": en.diagnostics} for en in res.entries]
            meta["resonance"] = res.resonance.as_dict() if res.resonance else None
            meta["diagnostics"] = res.diagnostics
            meta["scan"] = res.entries[0].scan.metadata
            flags = _flag_summary(f for en in res.entries for f in en.scan.flags)

        elif e.type == "window_scan":
            r = window_scan(setup, e.window_centers, e.window_width, Up=e.Up,
                            threads=threads)
            files.append(io.write_columns(
                out / f"{prefix}.txt",
                [r.axis, r.axis * HBAR, r.yields, r.extras["normalized"]],
                ["omega_c_rad_fs", "photon_energy_eV", "yield", "normalized_yield"]))
            rows = [(wc, p["photons"], p["kinetic_energy_eV"], float(p["open"]),
                     p["weight"])
                    for wc, peaks in zip(r.axis, r.extras["photoelectron_peaks"])
                    for p in peaks]
            cols = list(zip(*rows)) if rows else [[]] * 5
            files.append(io.write_columns(
                out / f"{prefix}_peaks.txt", cols,
                ["omega_c_rad_fs", "photons", "kinetic_energy_eV", "open", "weight"]))
            meta.update(fixed=r.fixed, scan=setup.metadata(),
                        photoelectron_peaks=r.extras["photoelectron_peaks"])

        elif e.type == "cfrog":
            mask = CompositeMask(parts["shaping"] + (ConstantMask(parts["A_T"]),))
            f = to_time(apply_mask(parts["spectrum"], mask))
            omega, taus, trace = cfrog_trace(f, e.delays)
            keep = np.flatnonzero(trace.max(axis=1) > 1e-8 * trace.max())
            sl = slice(keep[0], keep[-1] + 1)
            files.append(io.write_matrix(
                out / f"{prefix}_trace.txt", trace[sl],
                ["rows: second-harmonic frequency (see _omega.txt); columns: delay "
                 "(see _delays.txt)"]))
            files.append(io.write_columns(out / f"{prefix}_omega.txt", [omega[sl]],
                                          ["omega_rad_fs"]))
            files.append(io.write_columns(out / f"{prefix}_delays.txt", [taus],
                                          ["tau_fs"]))
        else:  # pragma: no cover - rejected by the schema
            raise ValidationError(f"unknown experiment {e.type!r}", "experiment.type")

    warns += [str(w.message) for w in caught]
    meta.update(warnings=warns, flags=flags)
    files.append(io.write_json(out / f"{prefix}.json", meta))
    return {"files": [str(p) for p in files], "flags": flags, "warnings": warns}


def run_path(path, out_dir=None, threads=1, seed=None):
    cfg, raw = load_config(resolve_config(path))
    return run_experiment(cfg, raw, out_dir, threads, seed)


def list_experiments():
    return dict(EXPERIMENTS)
