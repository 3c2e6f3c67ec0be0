"""Derived quantities: beat periods, resonance energies, modulation depth,
photoelectron peaks and collinear SHG-FROG traces."""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .errors import ValidationError
from .fields import TemporalField, to_freq, to_time
from .units import HBAR

MODULATION_THRESHOLD = 5.0
MULTI_COMPONENT_GOODNESS = 0.3


@dataclass
class BeatFit:
    """Single-sinusoid fit ``offset + amplitude cos(2 pi tau / tau_beat + phase)``.

    ``goodness`` is the residual norm relative to the trace's variation
    (0 is a perfect fit). ``tau_beat`` is None when no modulation was found.
    """

    tau_beat: float = None
    amplitude: float = 0.0
    offset: float = 0.0
    phase: float = 0.0
    goodness: float = 1.0
    modulated: bool = False
    multi_component: bool = False
    diagnostics: list = field(default_factory=list)

    def as_dict(self):
        return {
            "tau_beat_fs": self.tau_beat,
            "amplitude": self.amplitude,
            "offset": self.offset,
            "phase_rad": self.phase,
            "goodness": self.goodness,
            "modulated": self.modulated,
            "multi_component": self.multi_component,
            "diagnostics": list(self.diagnostics),
        }


def _spectrum(x, y, omegas):
    return np.abs(np.exp(-1j * np.outer(omegas, x)) @ (y - y.mean()))


def fit_beat_period(trace, values=None):
    """Fit the dominant modulation period of a delay trace.

    ``trace`` is a ScanResult, or an axis array with ``values`` given. A
    discrete spectrum of the mean-removed trace seeds a least-squares
    sinusoid fit. A trace counts as modulated when the strongest spectral
    component exceeds ``MODULATION_THRESHOLD`` times the median spectral floor.
    """
    if values is None:
        x, y = np.asarray(trace.axis, float), np.asarray(trace.yields, float)
    else:
        x, y = np.asarray(trace, float), np.asarray(values, float)
    if x.size < 8:
        raise ValidationError("need at least 8 points", "trace")
    span = x[-1] - x[0]
    dx = np.median(np.diff(x))
    omegas = np.linspace(2 * np.pi / span, np.pi / dx, 8 * x.size)
    spec = _spectrum(x, y, omegas)
    peak = int(np.argmax(spec))
    floor = np.median(spec)
    if not spec[peak] > MODULATION_THRESHOLD * floor or spec[peak] == 0:
        return BeatFit(offset=float(y.mean()), diagnostics=["no modulation"])

    w0 = omegas[peak]
    basis = np.column_stack([np.ones_like(x), np.cos(w0 * x), np.sin(w0 * x)])
    c, *_ = np.linalg.lstsq(basis, y, rcond=None)
    p0 = [c[0], np.hypot(c[1], c[2]), w0, np.arctan2(-c[2], c[1])]
    scale = np.ptp(y)

    def resid(p):
        return (p[0] + p[1] * np.cos(p[2] * x + p[3]) - y) / scale

    sol = least_squares(resid, p0, x_scale="jac", xtol=1e-14, ftol=1e-14, gtol=1e-14)
    off, amp, w, ph = sol.x
    if amp < 0:
        amp, ph = -amp, ph + np.pi
    if w < 0:
        w, ph = -w, -ph
    ph = float(np.angle(np.exp(1j * ph)))
    goodness = float(np.linalg.norm(sol.fun * scale) / np.linalg.norm(y - y.mean()))
    goodness = min(max(goodness, 0.0), 1.0)
    tau_beat = 2 * np.pi / w
    diags = []
    if tau_beat > span / 2:
        diags.append("fewer than two periods in the trace")
    if tau_beat / dx < 16:
        diags.append("fewer than 16 points per period")
    multi = goodness > MULTI_COMPONENT_GOODNESS
    if multi:
        diags.append("single-sinusoid residual high; multi-component trace")
    return BeatFit(float(tau_beat), float(amp), float(off), ph, goodness, True, multi, diags)


def beat_period(omega_21, omega_L):
    """``2 pi / |omega_21 - omega_L|`` (inf at zero detuning)."""
    det = abs(omega_21 - omega_L)
    return np.inf if det == 0 else 2 * np.pi / det


@dataclass
class ResonanceFit:
    omega_21: float
    energy_ev: float
    residual: float
    multi_pair: bool = False
    threshold: float = None

    def as_dict(self):
        return {
            "omega_21_rad_fs": self.omega_21,
            "energy_eV": self.energy_ev,
            "rms_relative_residual": self.residual,
            "multi_pair": self.multi_pair,
            "multi_pair_threshold": self.threshold,
        }


def _fit_omega21(wl, tb):
    def resid(p):
        return (2 * np.pi / np.abs(p[0] - wl) - tb) / tb

    best = None
    for k in range(wl.size):
        for sign in (1, -1):
            guess = wl[k] + sign * 2 * np.pi / tb[k]
            if np.any(np.isclose(guess, wl)):
                continue
            sol = least_squares(resid, [guess], xtol=1e-15, ftol=1e-15, gtol=1e-15)
            cost = float(np.sqrt(np.mean(sol.fun**2)))
            if best is None or cost < best[1] - 1e-15:
                best = (float(sol.x[0]), cost)
    return best


def fit_resonance(points, period_noise=0.02, n_monte_carlo=200, seed=0):
    """Least-squares fit of ``tau_beat = 2 pi / |omega_21 - omega_L|``.

    ``points`` is a sequence of (omega_L [rad/fs], tau_beat [fs]). Starting
    guesses on both sides of every locking frequency are tried and the lowest
    residual kept. The fit is flagged ``multi_pair`` when its rms relative
    residual exceeds three times the mean residual of single-resonance data
    with ``period_noise`` relative scatter (Monte Carlo at the same omega_L).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValidationError("need at least two (omega_L, tau_beat) points", "points")
    wl, tb = pts[:, 0], pts[:, 1]
    if np.ptp(wl) == 0:
        raise ValidationError("all locking frequencies are equal", "points")
    w21, cost = _fit_omega21(wl, tb)
    threshold = None
    multi = False
    if period_noise > 0 and n_monte_carlo > 0:
        rng = np.random.default_rng(seed)
        exact = 2 * np.pi / np.abs(w21 - wl)
        costs = []
        for _ in range(n_monte_carlo):
            noisy = exact * (1 + period_noise * rng.standard_normal(wl.size))
            costs.append(_fit_omega21(wl, noisy)[1])
        threshold = 3 * float(np.mean(costs))
        multi = cost > threshold
    return ResonanceFit(w21, w21 * HBAR, cost, multi, threshold)


def depth_of_modulation(yields):
    """``(max - min) / (max + min)``; 0 for an all-zero trace."""
    y = np.asarray(yields, dtype=float)
    hi, lo = y.max(), y.min()
    if hi + lo == 0:
        return 0.0
    return float((hi - lo) / (hi + lo))


class PhotoelectronPeak(NamedTuple):
    kinetic_energy: float
    open: bool


def photoelectron_peak(n, photon_energy, Ip, Up=0.0):
    """``K = n hbar omega - Ip - Up`` (eV); ``open`` is False below threshold."""
    if n < 0 or photon_energy < 0 or Ip < 0 or Up < 0:
        raise ValidationError("inputs must be nonnegative", "photoelectron_peak")
    K = n * photon_energy - Ip - Up
    return PhotoelectronPeak(K, K >= 0)


def _delayed(f: TemporalField, tau):
    """Full-field delay ``E(t - tau)`` expressed on the envelope."""
    spec = to_freq(f)
    shifted = spec.replace(spec.amplitude * np.exp(1j * spec.omega * tau))
    return to_time(shifted, f.t_start).envelope


def cfrog_trace(f: TemporalField, taus):
    """Collinear SHG-FROG trace ``|FT[(E(t) + E(t - tau))^2]|^2``.

    Returns ``(omega_sh, taus, trace)`` with ``trace[k, l]`` the
    second-harmonic spectral intensity at ``omega_sh[k]`` and ``taus[l]``.
    """
    taus = np.asarray(taus, dtype=float)
    mag = np.abs(f.envelope)
    on = np.flatnonzero(mag > 1e-10 * mag.max())
    t = f.t
    lo, hi = t[on[0]], t[on[-1]]
    if np.any(lo + taus < f.t_start) or np.any(hi + taus > f.t_stop):
        raise ValidationError("delay moves the pulse outside the time window", "taus")
    out = np.empty((f.n_points, taus.size))
    omega = None
    for l, tau in enumerate(taus):
        total = f.envelope + _delayed(f, tau)
        sh = TemporalField(f.t_start, f.d_t, total**2, 2 * f.carrier_omega0,
                           f.omega_start + f.carrier_omega0)
        spec = to_freq(sh)
        out[:, l] = np.abs(spec.amplitude) ** 2
        omega = spec.omega
    return omega, taus, out


def trace_delay_width(taus, trace):
    """RMS delay width of the frequency-integrated trace above its
    large-delay background (insensitive to interference fringes)."""
    taus = np.asarray(taus, dtype=float)
    marg = trace.sum(axis=0)
    ends = np.argsort(np.abs(taus))[-2:]
    w = np.abs(marg - marg[ends].mean())
    centre = np.sum(taus * w) / np.sum(w)
    return float(np.sqrt(np.sum((taus - centre) ** 2 * w) / np.sum(w)))
