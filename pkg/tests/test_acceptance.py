"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import time

import numpy as np
import pytest
from scipy.signal import hilbert

from conftest import ACCEPTANCE_LINES
from helpers import ev, gaussian_spectrum, harmonic, model, pair
from pscoherence.analysis import depth_of_modulation, fit_beat_period, photoelectron_peak
from pscoherence.config import build, load_config
from pscoherence.experiments import (Setup, delay_scan, locking_frequency_scan,
                                     phase_scan, window_scan)
from pscoherence.fields import (FrequencyGrid, SpectralField, spectral_energy,
                                temporal_energy, to_freq, to_time)
from pscoherence.masks import (PulsePairMask, WindowMask, analytic_double_pulse,
                               apply_mask, delayed_envelope)
from pscoherence.molecule import CoordinateGrid
from pscoherence.propagator import (PacketEvolver, coherence_integral, gaussian_packet,
                                    harmonic_width, initial_ground_gaussian, overlap,
                                    propagate, vibrational_energy)
from pscoherence.runner import make_setup, resolve_config
from pscoherence.units import HBAR
from pscoherence.yields import channel_weights

DW7 = 2 * np.sqrt(2 * np.log(2)) / 7.0  # spectral width of a 7 fs Gaussian
TAUS = np.arange(110.0, 330.0, 0.5)


def report(n, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {name} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c01_shaper_identity():
    rng = np.random.default_rng(1)
    f = gaussian_spectrum(2.5, DW7)
    t = to_time(f)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        A_T, A_R = rng.uniform(0.1, 1.0, 2)
        wl = rng.uniform(2.3, 2.7)
        tau = rng.uniform(5.0, 300.0)
        phi = rng.uniform(0, 2 * np.pi)
        masked = to_time(apply_mask(f, PulsePairMask(A_T, A_R, wl, tau, phi)))
        oracle = analytic_double_pulse(t, A_R, tau, wl, phi, A_T=A_T)
        err = np.abs(masked.envelope - oracle.envelope).max() / np.abs(oracle.envelope).max()
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    report(1, "shaper identity", worst < 1e-9 and elapsed < 10,
           f"max rel error {worst:.2e} over 20 draws, {elapsed:.2f} s")


def test_c02_transform_contracts():
    rng = np.random.default_rng(2)
    grid = FrequencyGrid.centered(2.4, 1024, 2 * np.pi / 1024)
    amp = rng.normal(size=1024) + 1j * rng.normal(size=1024)
    f = SpectralField(grid, amp, 2.4)
    back = to_freq(to_time(f))
    rt = np.abs(back.amplitude - f.amplitude).max() / np.abs(f.amplitude).max()
    pars = abs(temporal_energy(to_time(f)) - spectral_energy(f)) / spectral_energy(f)
    g = gaussian_spectrum(2.5, 0.2)
    base = to_time(g)
    tau = 37.3
    spec = to_freq(base.replace(delayed_envelope(base, tau)))
    expect = g.amplitude * np.exp(1j * (g.omega - g.carrier_omega0) * tau)
    shift = np.abs(spec.amplitude - expect).max() / np.abs(g.amplitude).max()
    report(2, "transform contracts", rt < 1e-12 and pars < 1e-12 and shift < 1e-10,
           f"round trip {rt:.1e}, Parseval {pars:.1e}, shift {shift:.1e}")


def test_c03_propagator():
    T, mu = 200.0, 10.0
    grid = CoordinateGrid(-2.0, 2.0, 512)
    curve = harmonic(period=T)
    wp = gaussian_packet(grid, 0.25, harmonic_width(curve, mu))
    e0 = vibrational_energy(wp, curve, mu)
    out = propagate(wp, curve, T / 2000, 1000, mu)
    dn = abs(out.norm() - 1)
    de = abs(vibrational_energy(out, curve, mu) - e0) / e0
    back = propagate(wp, curve, T / 2000, 2000, mu)
    fid = abs(overlap(wp, back)) ** 2
    report(3, "propagator", dn < 1e-6 and de < 1e-5 and fid > 0.999,
           f"norm drift {dn:.1e}, energy drift {de:.1e} at dt=T/2000, fidelity {fid:.6f}")


def resonance_pipeline(delta_ev, omega_Ls):
    s = Setup(gaussian_spectrum(ev(1.50), 0.18), pair(delta_ev=delta_ev))
    res = locking_frequency_scan(s, omega_Ls, TAUS, threads=2)
    w21 = ev(delta_ev)
    errs = [abs(e.fit.tau_beat / (2 * np.pi / abs(w21 - e.omega_L)) - 1) for e in res.entries]
    return res, errs


def test_c04_beat_periods_1p50():
    start = time.perf_counter()
    wls = [2.40, 2.51, 2.55, 2.60, 2.65]
    res, errs = resonance_pipeline(1.50, wls)
    elapsed = time.perf_counter() - start
    fitted = ", ".join(f"{e.fit.tau_beat:.1f}" for e in res.entries)
    e_res = res.resonance.energy_ev
    ok = max(errs) < 0.02 and abs(e_res - 1.50) < 0.01 and elapsed < 120
    report(4, "beat periods at 1.50 eV", ok,
           f"tau_beat [{fitted}] fs, worst {max(errs):.2%}, resonance {e_res:.4f} eV, "
           f"{elapsed:.1f} s")


def test_c05_resonance_1p55():
    res, errs = resonance_pipeline(1.55, [2.20, 2.22, 2.25, 2.51])
    e_res = res.resonance.energy_ev
    report(5, "resonance at 1.55 eV", abs(e_res - 1.55) < 0.01 and max(errs) < 0.02,
           f"resonance {e_res:.4f} eV, worst period error {max(errs):.2%}")


def test_c06_phase_scan():
    phis = np.linspace(0, 4 * np.pi, 257)
    depths, worst = [], 0.0
    for d in (0.0, 0.05, 0.10, 0.15, 0.20):
        m = model([("s1", 6.0, 4), ("s2", 7.5, 5, {"R0": d})])
        r = phase_scan(Setup(gaussian_spectrum(ev(1.50), 0.18), m), 100.0, phis, 2.40)
        y = r.yields
        worst = max(worst, np.abs(y[:128] - y[128:256]).max() / np.abs(y).max())
        depths.append(r.extras["depth"])
    mono = bool(np.all(np.diff(depths) < 0))
    report(6, "phase-scan contract", worst < 1e-8 and mono,
           f"2pi discrepancy {worst:.1e}, D_M {', '.join(f'{x:.3f}' for x in depths)}")


def coherence_history(m, ts):
    wp = initial_ground_gaussian(m)
    evs = {s: PacketEvolver(wp.relabel(s), m.state(s).curve, m.reduced_mass, 0.5)
           for s in ("a", "b")}
    out = []
    for t in ts:
        pa, pb = evs["a"].advance_to(t), evs["b"].advance_to(t)
        out.append(abs(coherence_integral(m, "a", "b", pa, pb, 1, 1, t)))
    return np.array(out)


def test_c07_long_lived_coherence():
    T = 200.0
    ts = np.linspace(0, 5 * T, 201)
    par = model([("a", 6.0, 4, {"R0": 0.1}), ("b", 7.5, 5, {"R0": 0.1})], period=T)
    dis = model([("a", 6.0, 4), ("b", 7.5, 5, {"R0": 0.3})], period=T)
    rp = coherence_history(par, ts)
    rd = coherence_history(dis, ts)
    flat = np.ptp(rp) / rp[0]
    between = rd[(ts % T > 0.3 * T) & (ts % T < 0.7 * T)]
    collapse = between.max() / rd[0]
    report(7, "long-lived coherence", flat < 1e-6 and collapse < 0.10,
           f"parallel |rho| variation {flat:.1e} over 5 periods, displaced minimum "
           f"window max {collapse:.1%} of initial")


def test_c08_impulsive_vs_integrated():
    m = model([("a", 6.0, 4), ("b", 7.5, 5, {"R0": 0.1})], period=100.0)
    spec = gaussian_spectrum(ev(1.50), DW7)
    taus = np.arange(120.0, 320.0, 0.5)
    imp = delay_scan(Setup(spec, m, mode="impulsive"), taus, 0.0, 2.40)
    itg = delay_scan(Setup(spec, m, mode="integrated"), taus, 0.0, 2.40)
    fwhm = Setup(spec, m).probe_fwhm
    amp = np.ptp(itg.coherent) / 2
    dev = np.abs(imp.yields - itg.yields).max() / amp
    report(8, "impulsive vs integrated", dev < 0.05,
           f"max deviation {dev:.2%} of modulation amplitude, probe FWHM {fwhm:.2f} fs, "
           f"T=100 fs")


def test_c09_interference_condition():
    cfg, _ = load_config(resolve_config("thiophene_delay"))
    s = make_setup(cfg, build(cfg))
    taus = cfg.experiment.delays
    wl = cfg.experiment.locking_frequency
    red = depth_of_modulation(delay_scan(s, taus, 0.0, wl).yields)
    w = s.shaping[0]
    blue_setup = s.with_window(WindowMask(w.A, ev(1.74), w.delta_omega))
    blue = depth_of_modulation(delay_scan(blue_setup, taus, 0.0, wl).yields)
    report(9, "interference condition", red > 0.1 and blue < 0.01,
           f"depth {red:.3f} at 1.55 eV window, {blue:.1e} at 1.74 eV window")


def test_c10_photoelectron_peaks():
    ok = True
    for Up in (0.0, 0.05, 0.2):
        p = photoelectron_peak(6, 1.5, 8.9, Up)
        ok &= abs(p.kinetic_energy - (0.1 - Up)) < 1e-12 and p.open == (Up <= 0.1)
    s = Setup(gaussian_spectrum(ev(1.50), 0.5), pair(delta_ev=1.45, lower_ev=5.8))
    r = window_scan(s, [ev(1.45), ev(1.50)], 0.078)
    peaks = r.extras["photoelectron_peaks"]
    six = [[p for p in pk if p["photons"] == 6] for pk in peaks]
    closed = all(not p["open"] and p["kinetic_energy_eV"] == pytest.approx(-0.2)
                 for p in six[0])
    opened = all(p["open"] and p["kinetic_energy_eV"] == pytest.approx(0.1)
                 for p in six[1])
    ok &= bool(six[0]) and bool(six[1]) and closed and opened
    report(10, "photoelectron peaks", ok,
           "K = n hbar w - Ip - Up exact; 6 photons at 1.45 eV reported closed")


def test_c11_two_channel_beating():
    m = model([("s1", 6.0, 4), ("s2", 7.45, 5), ("s3", 7.55, 5)])
    s = Setup(gaussian_spectrum(ev(1.50), 0.18), m)
    weights = list(channel_weights(m, s.amplitudes, s.probe_peak).values())
    taus = np.arange(110.0, 1400.0, 0.5)
    r = delay_scan(s, taus, 0.0, 2.60)
    env2 = np.abs(hilbert(r.coherent)) ** 2
    keep = slice(taus.size // 8, -taus.size // 8)
    fit = fit_beat_period(taus[keep], env2[keep])
    w_env = 2 * np.pi / fit.tau_beat
    err = abs(w_env * HBAR / 0.10 - 1)
    balance = abs(weights[0] / weights[1] - 1)
    report(11, "two-channel beating", err < 0.02 and len(weights) == 2 and balance < 1e-6,
           f"envelope beat {w_env * HBAR:.4f} eV/hbar vs 0.10, error {err:.2%}, "
           f"weight imbalance {balance:.1e}")
