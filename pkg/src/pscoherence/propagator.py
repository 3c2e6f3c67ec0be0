"""Split-step propagation of vibrational wave packets and electronic coherence.

Packets evolve on the *shape* of their curve (potential minus its vertical
offset ``V_FC``); the electronic phase between two states is carried by an
explicit factor. With the default ``local_phase=False`` that factor is
``exp(i (V_FC,j - V_FC,i) t / hbar)``, which makes the product of two packets
identical to full-potential propagation. ``local_phase=True`` uses the
R-resolved ``exp(i omega_ji(R) t)`` instead, meant for packets that do not
already carry the R-dependent part of the potential difference (e.g. frozen
packets); for parallel curves both choices coincide.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .molecule import CoordinateGrid, offset_omega, omega_21
from .units import AMU_A2_PER_FS2_EV, HBAR

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class WavePacket:
    state_label: str
    amplitude: np.ndarray
    time: float
    grid: CoordinateGrid

    def __post_init__(self):
        amp = np.array(self.amplitude, dtype=np.complex128, copy=True)
        if amp.shape != (self.grid.n_points,):
            raise ValidationError("amplitude does not match the coordinate grid", "amplitude")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)
        if abs(self.norm() - 1) > NORM_TOLERANCE:
            raise ValidationError(f"packet not normalized (norm={self.norm():.8f})",
                                  "amplitude")

    def norm(self):
        return float(np.sum(np.abs(self.amplitude) ** 2) * self.grid.dR)

    def mean_position(self):
        return float(np.sum(self.grid.R * np.abs(self.amplitude) ** 2) * self.grid.dR)

    def density(self):
        return np.abs(self.amplitude) ** 2

    def relabel(self, label, time=None):
        return WavePacket(label, self.amplitude, self.time if time is None else time,
                          self.grid)


def gaussian_packet(grid, center, sigma, momentum=0.0, label="", time=0.0):
    """Normalized Gaussian with density standard deviation ``sigma`` and mean
    wavenumber ``momentum`` (1/angstrom)."""
    R = grid.R
    amp = np.exp(-((R - center) ** 2) / (4 * sigma**2) + 1j * momentum * (R - center))
    amp /= np.sqrt(np.sum(np.abs(amp) ** 2) * grid.dR)
    return WavePacket(label, amp, time, grid)


def harmonic_width(curve, reduced_mass):
    """Density standard deviation of the harmonic ground state (angstrom)."""
    k = curve.force_constant(reduced_mass)
    if not k > 0:
        raise ValidationError("non-positive curvature at the minimum", "ground_curve")
    mu_omega = np.sqrt(k * reduced_mass * AMU_A2_PER_FS2_EV)  # eV fs / A^2
    return float(np.sqrt(HBAR / (2 * mu_omega)))


def initial_ground_gaussian(model, label="ground"):
    """Vibrational ground state of the (locally harmonic) ground curve."""
    grid = model.grid
    sigma = harmonic_width(model.ground_curve, model.reduced_mass)
    wp = gaussian_packet(grid, model.ground_curve.R0, sigma, label=label)
    mag = np.abs(wp.amplitude)
    if max(mag[0], mag[-1]) > 1e-6 * mag.max():
        raise ValidationError("coordinate grid too narrow for the ground state",
                              "molecule.grid")
    return wp


def kinetic_energy(grid, reduced_mass):
    """hbar^2 k^2 / 2 mu on the FFT wavenumber grid, in eV."""
    return HBAR**2 * grid.k**2 / (2 * reduced_mass * AMU_A2_PER_FS2_EV)


class SplitStepPropagator:
    """Strang splitting: half potential, full kinetic, half potential."""

    def __init__(self, curve, grid, reduced_mass, dt):
        self.curve = curve
        self.grid = grid
        self.reduced_mass = reduced_mass
        self.dt = dt
        self.U = curve.shape(grid.R, reduced_mass)
        self.T = kinetic_energy(grid, reduced_mass)
        self._half_v = np.exp(-0.5j * self.U * dt / HBAR)
        self._kin = np.exp(-1j * self.T * dt / HBAR)

    def stability_scale(self, psi):
        """Energy spread (eV) seen by ``psi``: potential range over its
        coordinate support plus kinetic energy over its momentum support."""
        mag = np.abs(psi)
        on = mag > 1e-6 * mag.max()
        pot = np.ptp(self.U[on])
        spec = np.abs(np.fft.fft(psi))
        kin = self.T[spec > 1e-6 * spec.max()].max()
        return float(pot + kin)

    def check(self, psi):
        scale = self.stability_scale(psi)
        if scale * self.dt / HBAR > np.pi:
            suggested = 0.5 * np.pi * HBAR / scale
            raise ValidationError(
                f"time step {self.dt:.4g} fs too large for energy scale {scale:.4g} eV; "
                f"use dt <= {suggested:.4g} fs", "dt")

    def run(self, psi, n_steps):
        if n_steps == 0:
            return psi
        hv, kin = self._half_v, self._kin
        psi = hv * psi
        for i in range(n_steps):
            psi = np.fft.ifft(kin * np.fft.fft(psi))
            psi = (hv * hv * psi) if i < n_steps - 1 else hv * psi
        return psi


def propagate(wp, curve, dt, n_steps, reduced_mass, check=True):
    """Advance ``wp`` by ``n_steps`` steps of ``dt`` fs on ``curve``."""
    if n_steps < 0:
        raise ValidationError("n_steps must be >= 0", "n_steps")
    prop = SplitStepPropagator(curve, wp.grid, reduced_mass, dt)
    if check:
        prop.check(wp.amplitude)
    psi = prop.run(wp.amplitude, int(n_steps))
    return WavePacket(wp.state_label, psi, wp.time + n_steps * dt, wp.grid)


class PacketEvolver:
    """Incremental propagation of one packet to successive target times.

    The packet is stepped on a fixed lattice ``t0 + k dt_max``; a target
    between lattice points is reached by one partial step applied to a copy.
    The packet at a given time therefore does not depend on which earlier
    times were requested.
    """

    def __init__(self, wp, curve, reduced_mass, dt_max):
        self.curve = curve
        self.reduced_mass = reduced_mass
        self.dt_max = dt_max
        self.label = wp.state_label
        self.grid = wp.grid
        self.time = wp.time
        self._lattice_time = wp.time
        self._lattice_psi = wp.amplitude
        self.psi = wp.amplitude
        self._step = SplitStepPropagator(curve, self.grid, reduced_mass, dt_max)
        self._step.check(self.psi)

    def advance_to(self, t):
        if t - self.time < -1e-12:
            raise ValidationError("cannot propagate backwards in time", "time")
        n = math.floor((t - self._lattice_time) / self.dt_max + 1e-9)
        if n > 0:
            self._lattice_psi = self._step.run(self._lattice_psi, n)
            self._lattice_time += n * self.dt_max
        rest = t - self._lattice_time
        if rest > 1e-12:
            part = SplitStepPropagator(self.curve, self.grid, self.reduced_mass, rest)
            self.psi = part.run(self._lattice_psi, 1)
        else:
            self.psi = self._lattice_psi
        self.time = t
        return self.packet()

    def packet(self):
        return WavePacket(self.label, self.psi, self.time, self.grid)


def vibrational_energy(wp, curve, reduced_mass):
    """<T> + <V> - V_FC in eV."""
    grid = wp.grid
    psi = wp.amplitude
    pot = np.sum(curve.shape(grid.R, reduced_mass) * np.abs(psi) ** 2) * grid.dR
    phik = np.fft.fft(psi)
    kin = np.sum(kinetic_energy(grid, reduced_mass) * np.abs(phik) ** 2) / np.sum(
        np.abs(phik) ** 2)
    return float(pot + kin)


def overlap(wp1, wp2):
    """``sum chi_1 conj(chi_2) dR``."""
    if wp1.grid != wp2.grid:
        raise ValidationError("packets live on different grids", "grid")
    return complex(np.sum(wp1.amplitude * np.conj(wp2.amplitude)) * wp1.grid.dR)


def coherence_integral(model, state_i, state_j, wp_i, wp_j, a_i, a_j, t,
                       local_phase=False):
    """R-integrated coherence ``int a_i chi_i conj(a_j chi_j) exp(i omega_ji t) dR``
    with internal-conversion decay of both amplitudes."""
    if wp_i.grid != wp_j.grid:
        raise ValidationError("packets live on different grids", "grid")
    ai = a_i * model.state(state_i).decay(t)
    aj = a_j * model.state(state_j).decay(t)
    if local_phase:
        w = omega_21(model, state_i, state_j, wp_i.grid.R)
        integral = np.sum(wp_i.amplitude * np.conj(wp_j.amplitude) * np.exp(1j * w * t))
        integral *= wp_i.grid.dR
    else:
        integral = overlap(wp_i, wp_j) * np.exp(1j * offset_omega(model, state_i, state_j) * t)
    return complex(ai * np.conj(aj) * integral)
