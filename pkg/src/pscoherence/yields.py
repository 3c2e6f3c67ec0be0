"""Excitation / ionization amplitudes and the phase-sensitive ionization yield.

Conventions: the pump is centred at t = 0 with positive-frequency field
``env(t) exp(-i omega0 t)``; the probe arrives at ``tau`` with carrier phase
``phi = phi_L - omega_L tau``. Within the multiphoton rotating-wave
approximation the ionization amplitude of state s is
``b_s = Q_s (E_probe^+)^m_s``, and a coherence channel (i, j) contributes
``b_i conj(b_j) * coherence_integral(i, j) + c.c.``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fields import TemporalField, intensity_fwhm
from .molecule import offset_omega
from .propagator import PacketEvolver, coherence_integral

SUPPORT_FLOOR = 1e-10


@dataclass
class ExcitationAmplitudes:
    values: dict
    diagnostics: list = field(default_factory=list)

    def __getitem__(self, label):
        return self.values[label]

    def scaled(self, label, factor):
        vals = dict(self.values)
        vals[label] = vals[label] * factor
        return ExcitationAmplitudes(vals, list(self.diagnostics))

    def with_value(self, label, value):
        vals = dict(self.values)
        vals[label] = value
        return ExcitationAmplitudes(vals, list(self.diagnostics))


@dataclass(frozen=True)
class IonizationAmplitudes:
    b: complex
    order: int


@dataclass
class YieldPoint:
    tau: float
    phi_L: float
    omega_L: float
    total: float
    incoherent: float
    coherent: float
    flags: list = field(default_factory=list)

    @property
    def yield_(self):
        return self.total


def multiphoton_spectrum(pump, n, omega):
    """Spectral amplitude of ``(E_pump^+)^n`` at absolute frequency ``omega``:
    ``(1/2pi) int env(t)^n exp(i (omega - n omega0) t) dt``."""
    detuning = omega - n * pump.carrier_omega0
    return complex(np.sum(pump.envelope**n * np.exp(1j * detuning * pump.t))
                   * pump.d_t / (2 * np.pi))


def excitation_amplitudes(pump: TemporalField, model):
    """Lowest-order perturbative n-photon amplitudes ``a_n = Q F_n(omega_n0)``."""
    vals, diags = {}, []
    nyquist = np.pi / pump.d_t
    for s in model.states:
        n = s.photon_order
        target = model.transition_omega(s.label)
        detuning = target - n * pump.carrier_omega0
        if abs(detuning) >= nyquist:
            vals[s.label] = 0j
            diags.append(f"{s.label}: {n}-photon detuning {detuning:.3f} rad/fs "
                         "outside the sampled band; a = 0")
            continue
        F = multiphoton_spectrum(pump, n, target)
        ref = np.max(np.abs(np.fft.fft(pump.envelope**n))) * pump.d_t / (2 * np.pi)
        if ref == 0 or abs(F) < SUPPORT_FLOOR * ref:
            vals[s.label] = 0j
            diags.append(f"{s.label}: transition at {target:.3f} rad/fs outside the "
                         f"{n}-photon spectral support; a = 0")
            continue
        vals[s.label] = complex(s.q_excite) * F
    return ExcitationAmplitudes(vals, diags)


def ionization_amplitudes(probe_peak_field, model, state):
    """``b = Q_ion (E'_0)^m`` with the state's ionization order m."""
    s = model.state(state)
    m = model.ion_order(s)
    return IonizationAmplitudes(complex(s.q_ion) * probe_peak_field**m, m)


def effective_duration(probe: TemporalField, m_i, m_j):
    """``int e^m_i conj(e)^m_j dt / E0^(m_i+m_j)`` for the probe envelope e.

    Replaces the delta-function normalisation of the impulsive limit so that
    impulsive and time-integrated yields share a scale.
    """
    env = probe.envelope
    peak = np.max(np.abs(env))
    e = env / peak
    return complex(np.sum(e**m_i * np.conj(e) ** m_j) * probe.d_t)


def duration_factors(probe, model):
    """Effective durations for every power appearing in the yield."""
    orders = {model.ion_order(s) for s in model.states}
    out = {(m, m): effective_duration(probe, m, m) for m in orders}
    for ch in model.channels():
        key = (model.ion_order(ch.lower), model.ion_order(ch.upper))
        out[key] = effective_duration(probe, *key)
    return out


def coherent_phase_explicit(omega_ji, tau, phi_L, omega_L, omega0, t):
    """Total coherent phase keeping the carrier: ``(omega0 tau + phi) +
    (omega_ji - omega0) t`` with ``phi = phi_L - omega_L tau``."""
    phi = phi_L - omega_L * tau
    return omega0 * tau + phi + (omega_ji - omega0) * t


def coherent_phase(omega_ji, tau, phi_L, omega_L):
    """Carrier-free form valid at ``t = tau``."""
    return (omega_ji - omega_L) * tau + phi_L


def _check_packets(model, packets, amps):
    for s in model.states:
        if amps[s.label] != 0 and s.label not in packets:
            raise ValidationError(f"no packet for excited state {s.label}", "packets")


def yield_impulsive(model, amps, packets, tau, phi_L, omega_L, probe_peak_field,
                    factors=None, local_phase=False, channels=None):
    """Yield with the probe treated as instantaneous at ``tau``.

    ``packets`` maps state label to its packet at time ``tau``. ``factors``
    (from :func:`duration_factors`) multiplies each term by the matching
    effective probe duration; by default all are 1.
    """
    _check_packets(model, packets, amps)
    factors = factors or {}
    inc = 0.0
    b = {}
    for s in model.states:
        ion = ionization_amplitudes(probe_peak_field, model, s.label)
        b[s.label] = ion
        a = amps[s.label] * s.decay(tau)
        fac = factors.get((ion.order, ion.order), 1.0)
        inc += float(abs(a) ** 2 * abs(ion.b) ** 2 * np.real(fac))
    coh = 0.0
    for ch in channels if channels is not None else model.channels():
        i, j = ch
        ai, aj = amps[i], amps[j]
        if ai == 0 or aj == 0:
            continue
        rho = coherence_integral(model, i, j, packets[i], packets[j], ai, aj, tau,
                                 local_phase=local_phase)
        fac = factors.get((b[i].order, b[j].order), 1.0)
        term = b[i].b * np.conj(b[j].b) * fac * rho * np.exp(1j * (phi_L - omega_L * tau))
        coh += 2 * float(np.real(term))
    flags = []
    total = inc + coh
    if total < -1e-12 * max(inc, 1e-300):
        flags.append("negative_yield")
    return YieldPoint(tau, phi_L, omega_L, total, inc, coh, flags)


def probe_window(probe, n_durations=4.0):
    """Indices of probe samples within ``n_durations`` FWHM of its centre."""
    width = intensity_fwhm(probe).fwhm
    inten = np.abs(probe.envelope) ** 2
    center = float(np.sum(probe.t * inten) / np.sum(inten))
    idx = np.flatnonzero(np.abs(probe.t - center) <= n_durations * width)
    return idx, width


def yield_time_integrated(model, amps, packets, probe, tau, phi_L, omega_L,
                          pump_end=None, n_durations=4.0, dt_max=None, channels=None):
    """Time-integrated yield by explicit quadrature over the probe envelope.

    ``probe`` is the probe envelope centred near t = 0 (it is delayed by
    ``tau`` here). ``packets`` hold each state's packet at any time not later
    than the start of the integration window; copies are propagated across the
    window on the probe's time step. The window is
    ``[tau - n_durations*FWHM, tau + n_durations*FWHM]``, clipped below at
    ``pump_end``; a clipped window is flagged ``pulse_overlap``.
    """
    _check_packets(model, packets, amps)
    idx, width = probe_window(probe, n_durations)
    times = tau + probe.t[idx]
    env = probe.envelope[idx]
    flags = []
    if pump_end is not None and times[0] < pump_end:
        flags.append("pulse_overlap")
        keep = times >= pump_end
        times, env = times[keep], env[keep]
    dt = probe.d_t
    omega0 = probe.carrier_omega0
    phi = phi_L - omega_L * tau
    step = dt if dt_max is None else min(dt, dt_max)

    active = [s.label for s in model.states if amps[s.label] != 0]
    evolvers = {}
    for lab in active:
        wp = packets[lab]
        if wp.time > times[0] + 1e-9:
            raise ValidationError(f"packet for {lab} is later than the window start",
                                  "packets")
        evolvers[lab] = PacketEvolver(wp, model.state(lab).curve, model.reduced_mass, step)

    inc = 0.0
    orders = {s.label: model.ion_order(s) for s in model.states}
    for s in model.states:
        if amps[s.label] == 0:
            continue
        a = amps[s.label] * s.decay(times)
        q = complex(s.q_ion)
        m = orders[s.label]
        inc += float(np.sum(np.abs(a) ** 2 * abs(q) ** 2 * np.abs(env) ** (2 * m)) * dt)

    chans = [c for c in (channels if channels is not None else model.channels())
             if amps[c.lower] != 0 and amps[c.upper] != 0]
    acc = {c: 0j for c in chans}
    for k, t in enumerate(times):
        current = {lab: ev.advance_to(t) for lab, ev in evolvers.items()}
        for c in chans:
            i, j = c
            rho = coherence_integral(model, i, j, current[i], current[j],
                                     amps[i], amps[j], t)
            mi, mj = orders[i], orders[j]
            P = env[k] ** mi * np.conj(env[k]) ** mj
            acc[c] += P * np.exp(-1j * (mi - mj) * omega0 * t) * rho
    coh = 0.0
    for c in chans:
        i, j = c
        mi, mj = orders[i], orders[j]
        qq = complex(model.state(i).q_ion) * np.conj(complex(model.state(j).q_ion))
        carrier = np.exp(1j * (mi - mj) * (omega0 * tau + phi))
        coh += 2 * float(np.real(qq * carrier * acc[c] * dt))
    total = inc + coh
    if total < -1e-12 * max(inc, 1e-300):
        flags.append("negative_yield")
    return YieldPoint(tau, phi_L, omega_L, total, inc, coh, flags)


def channel_weights(model, amps, probe_peak_field):
    """``|a_i a_j b_i b_j|`` per channel, used to pick the dominant channel."""
    out = {}
    for c in model.channels():
        bi = ionization_amplitudes(probe_peak_field, model, c.lower).b
        bj = ionization_amplitudes(probe_peak_field, model, c.upper).b
        out[c] = abs(amps[c.lower] * amps[c.upper] * bi * bj)
    return out


def channel_frequency(model, channel):
    """Electronic beat frequency of a channel (offset difference), rad/fs."""
    return offset_omega(model, channel.lower, channel.upper)

