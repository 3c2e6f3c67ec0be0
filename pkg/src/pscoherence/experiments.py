"""Experiment drivers: delay, phase, locking-frequency and window scans."""
import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .analysis import (BeatFit, beat_period, depth_of_modulation, fit_beat_period,
                       fit_resonance, photoelectron_peak)
from .errors import ValidationError
from .fields import SpectralField, intensity_fwhm, to_time
from .masks import CompositeMask, ConstantMask, WindowMask, apply_mask
from .molecule import MoleculeModel
from .propagator import PacketEvolver, initial_ground_gaussian
from .units import HBAR
from .yields import (channel_frequency, channel_weights, duration_factors,
                     excitation_amplitudes, ionization_amplitudes, probe_window,
                     yield_impulsive, yield_time_integrated)

EXPERIMENTS = {
    "delay_scan": "yield vs pump-probe delay at fixed locking phase and frequency",
    "phase_scan": "yield vs locking phase (0-4 pi) at one or more fixed delays",
    "locking_frequency_scan": "delay scans at several locking frequencies, "
                              "beat-period fits and resonance estimate",
    "window_scan": "incoherent yield and photoelectron peaks vs window centre",
    "cfrog": "collinear SHG-FROG trace of the shaped pulse",
}


@dataclass
class Setup:
    """Shaped pump/probe fields acting on a molecule.

    ``shaping`` holds the masks common to pump and probe (window, Taylor
    phase); the pulse pair adds the delayed, phase-locked probe copy with
    relative amplitude ``A_R``.
    """

    spectrum: SpectralField
    model: MoleculeModel
    shaping: tuple = ()
    A_T: float = 1.0
    A_R: float = 1.0
    mode: str = "impulsive"
    dt_max: float = None
    local_phase: bool = False
    n_durations: float = 4.0

    def __post_init__(self):
        if self.mode not in ("impulsive", "integrated"):
            raise ValidationError(f"unknown mode {self.mode!r}", "experiment.mode")
        self.shaping = tuple(self.shaping)
        if self.dt_max is None:
            periods = [2 * np.pi / s.curve.omega_vib for s in self.model.states
                       if s.curve.omega_vib]
            self.dt_max = min(1.0, min(periods) / 200) if periods else 1.0

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def with_window(self, window):
        masks = tuple(m for m in self.shaping if not isinstance(m, WindowMask))
        return self.replace(shaping=(window,) + masks)

    @cached_property
    def pump(self):
        mask = CompositeMask(self.shaping + (ConstantMask(self.A_T),))
        return to_time(apply_mask(self.spectrum, mask))

    @cached_property
    def probe(self):
        return self.pump.replace(self.A_R * self.pump.envelope)

    @cached_property
    def probe_peak(self):
        return self.probe.peak

    @cached_property
    def amplitudes(self):
        return excitation_amplitudes(self.pump, self.model)

    @cached_property
    def factors(self):
        return duration_factors(self.probe, self.model)

    @cached_property
    def pump_fwhm(self):
        return intensity_fwhm(self.pump).fwhm

    @cached_property
    def probe_fwhm(self):
        return intensity_fwhm(self.probe).fwhm if self.A_R > 0 else self.pump_fwhm

    @cached_property
    def window_offset(self):
        idx, _ = probe_window(self.probe, self.n_durations)
        return float(self.probe.t[idx[0]])

    @property
    def pump_end(self):
        return self.n_durations * self.pump_fwhm

    @property
    def clearance(self):
        return self.n_durations * (self.pump_fwhm + self.probe_fwhm)

    def evolvers(self):
        ground = initial_ground_gaussian(self.model)
        out = {}
        for s in self.model.states:
            if self.amplitudes[s.label] != 0:
                out[s.label] = PacketEvolver(ground.relabel(s.label), s.curve,
                                             self.model.reduced_mass, self.dt_max)
        return out

    def point(self, evolvers, tau, phi_L, omega_L):
        """Yield at one delay; ``evolvers`` are advanced in place."""
        amps = self.amplitudes
        if self.mode == "impulsive":
            packets = {lab: ev.advance_to(tau) for lab, ev in evolvers.items()}
            yp = yield_impulsive(self.model, amps, packets, tau, phi_L, omega_L,
                                 self.probe_peak, factors=self.factors,
                                 local_phase=self.local_phase)
        else:
            start = max(0.0, tau + self.window_offset)
            packets = {lab: ev.advance_to(max(start, ev.time))
                       for lab, ev in evolvers.items()}
            yp = yield_time_integrated(self.model, amps, packets, self.probe, tau, phi_L,
                                       omega_L, pump_end=self.pump_end,
                                       n_durations=self.n_durations)
        if tau < self.clearance and "pulse_overlap" not in yp.flags:
            yp.flags.append("pulse_overlap")
        return yp

    def metadata(self):
        return {
            "mode": self.mode,
            "A_T": self.A_T,
            "A_R": self.A_R,
            "probe_peak_field": self.probe_peak,
            "pump_fwhm_fs": self.pump_fwhm,
            "probe_fwhm_fs": self.probe_fwhm,
            "clearance_fs": self.clearance,
            "propagation_dt_max_fs": self.dt_max,
            "effective_duration_factors": {
                f"{k[0]},{k[1]}": [v.real, v.imag] for k, v in self.factors.items()},
            "excitation_amplitudes": {
                k: [v.real, v.imag] for k, v in self.amplitudes.values.items()},
            "amplitude_diagnostics": list(self.amplitudes.diagnostics),
        }


@dataclass
class ScanResult:
    axis_name: str
    axis: np.ndarray
    yields: np.ndarray
    incoherent: np.ndarray = None
    coherent: np.ndarray = None
    fixed: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.yields = np.asarray(self.yields, dtype=float)
        if self.axis.size > 1 and not (np.all(np.diff(self.axis) > 0)
                                       or np.all(np.diff(self.axis) < 0)):
            raise ValidationError("scan axis must be strictly monotonic", self.axis_name)
        if not np.all(np.isfinite(self.yields)):
            raise ValidationError("non-finite yields", "yields")


def _require_increasing(values, path):
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError("need a non-empty 1-D list", path)
    if v.size > 1 and not np.all(np.diff(v) > 0):
        raise ValidationError("values must be strictly increasing", path)
    return v


def _add_noise(y, noise, rng):
    if noise and noise > 0:
        if rng is None:
            raise ValidationError("noise requested without a random generator", "seed")
        y = y + noise * np.mean(np.abs(y)) * rng.standard_normal(y.size)
    return y


def delay_scan(setup, taus, phi_L=0.0, omega_L=0.0, noise=0.0, rng=None):
    """Yield vs delay; packets are propagated incrementally along the axis."""
    taus = _require_increasing(taus, "experiment.delays")
    if taus[0] < 0:
        raise ValidationError("delays must be >= 0", "experiment.delays")
    evolvers = setup.evolvers()
    pts = [setup.point(evolvers, tau, phi_L, omega_L) for tau in taus]
    y = _add_noise(np.array([p.total for p in pts]), noise, rng)
    return ScanResult(
        "delay", taus, y,
        incoherent=np.array([p.incoherent for p in pts]),
        coherent=np.array([p.coherent for p in pts]),
        fixed={"phi_L": phi_L, "omega_L": omega_L},
        flags=[p.flags for p in pts],
        metadata=setup.metadata())


def phase_scan(setup, tau, phis=None, omega_L=0.0, noise=0.0, rng=None):
    """Yield vs locking phase at one delay; ``extras['depth']`` is D_M."""
    if phis is None:
        phis = np.linspace(0, 4 * np.pi, 129)
    phis = _require_increasing(phis, "experiment.phases")
    evolvers = setup.evolvers()
    pts = [setup.point(evolvers, tau, p, omega_L) for p in phis]
    y = _add_noise(np.array([p.total for p in pts]), noise, rng)
    return ScanResult(
        "phase", phis, y,
        incoherent=np.array([p.incoherent for p in pts]),
        coherent=np.array([p.coherent for p in pts]),
        fixed={"tau": tau, "omega_L": omega_L},
        flags=[p.flags for p in pts],
        metadata=setup.metadata(),
        extras={"depth": depth_of_modulation(y)})


def phase_delay_map(setup, taus, phis=None, omega_L=0.0, noise=0.0, rng=None, threads=1):
    """Phase scans at several delays: (list of ScanResult, depth per delay)."""
    taus = _require_increasing(taus, "experiment.delays")
    setup.amplitudes, setup.factors, setup.probe_peak  # noqa: B018 - warm caches
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        scans = list(pool.map(lambda t: phase_scan(setup, t, phis, omega_L), taus))
    if noise:
        for s in scans:
            s.yields = _add_noise(s.yields, noise, rng)
            s.extras["depth"] = depth_of_modulation(s.yields)
    return scans, np.array([s.extras["depth"] for s in scans])


def dominant_channel(setup):
    weights = channel_weights(setup.model, setup.amplitudes, setup.probe_peak)
    if not weights or max(weights.values()) == 0:
        return None
    return max(weights, key=weights.get)


@dataclass
class LockingEntry:
    omega_L: float
    scan: ScanResult
    fit: BeatFit = None
    expected_period: float = None
    diagnostics: list = field(default_factory=list)


@dataclass
class LockingScanResult:
    entries: list
    resonance: object = None
    diagnostics: list = field(default_factory=list)


def locking_frequency_scan(setup, omega_Ls, taus, phi_L=0.0, threads=1, noise=0.0,
                           rng=None, period_noise=0.02):
    """Delay scan and beat-period fit per locking frequency, then a resonance fit."""
    omega_Ls = np.asarray(omega_Ls, dtype=float)
    taus = _require_increasing(taus, "experiment.delays")
    span = taus[-1] - taus[0]
    setup.amplitudes, setup.factors, setup.probe_peak  # noqa: B018 - warm caches
    chan = dominant_channel(setup)
    w_chan = channel_frequency(setup.model, chan) if chan else None

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        scans = list(pool.map(lambda w: delay_scan(setup, taus, phi_L, w), omega_Ls))
    if noise:
        for s in scans:
            s.yields = _add_noise(s.yields, noise, rng)

    entries = []
    for w, scan in zip(omega_Ls, scans):
        entry = LockingEntry(float(w), scan)
        if w_chan is None:
            entry.diagnostics.append("no excited coherence channel; fit skipped")
            entries.append(entry)
            continue
        expected = beat_period(w_chan, w)
        entry.expected_period = float(expected)
        if expected > span:
            entry.diagnostics.append(
                f"expected beat period {expected:.4g} fs exceeds scan span {span:.4g} fs; "
                "fit skipped")
        else:
            if span < 2 * expected:
                entry.diagnostics.append("scan spans fewer than two expected periods")
            entry.fit = fit_beat_period(scan)
        entries.append(entry)

    pts = [(e.omega_L, e.fit.tau_beat) for e in entries if e.fit and e.fit.modulated]
    result = LockingScanResult(entries)
    if len({p[0] for p in pts}) >= 2:
        result.resonance = fit_resonance(pts, period_noise=period_noise)
    else:
        result.diagnostics.append("fewer than two fitted locking frequencies; "
                                  "no resonance estimate")
    return result


def window_scan(setup, omega_cs, delta_omega, A=1.0, Up=0.0, threads=1):
    """Incoherent yield vs window centre with photoelectron peaks per point.

    Yields include the effective-duration factor of each ionization order,
    i.e. they are time-integrated incoherent yields. ``extras`` carries the
    normalised yields and the peak list.
    """
    omega_cs = np.asarray(omega_cs, dtype=float)
    model = setup.model

    def one(wc):
        s = setup.with_window(WindowMask(A, wc, delta_omega))
        amps = s.amplitudes
        total, contrib = 0.0, {}
        for st in model.states:
            ion = ionization_amplitudes(s.probe_peak, model, st.label)
            fac = np.real(s.factors[(ion.order, ion.order)])
            y = float(abs(amps[st.label]) ** 2 * abs(ion.b) ** 2 * fac)
            contrib[st.label] = y
            total += y
        peaks = []
        photon = wc * HBAR
        for st in model.states:
            if total > 0 and contrib[st.label] >= 1e-3 * total:
                n = st.photon_order + model.ion_order(st)
                pk = photoelectron_peak(n, photon, model.Ip, Up)
                peaks.append({"state": st.label, "photons": n,
                              "kinetic_energy_eV": pk.kinetic_energy, "open": pk.open,
                              "weight": contrib[st.label] / total})
        return total, peaks

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        res = list(pool.map(one, omega_cs))
    y = np.array([r[0] for r in res])
    norm = y / y.max() if y.max() > 0 else y
    return ScanResult(
        "window_center", omega_cs, y, incoherent=y, coherent=np.zeros_like(y),
        fixed={"delta_omega": delta_omega, "A": A, "Up": Up},
        metadata={"mode": setup.mode, "A_T": setup.A_T, "A_R": setup.A_R},
        extras={"normalized": norm, "photoelectron_peaks": [r[1] for r in res]})
