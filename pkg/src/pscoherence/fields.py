"""Broadband fields on conjugate frequency / time grids.

Fields are stored as complex envelopes relative to a carrier ``omega0``:
the physical field is ``E(t) = env(t) exp(-i omega0 t) + c.c.`` and the
positive-frequency part is synthesised with the kernel ``exp(-i omega t)``,

    env(t) = d_omega * sum_k E(omega_k) exp(-i (omega_k - omega0) t),

so that a spectral factor ``exp(i omega tau)`` delays the field by ``tau``.
The analysis direction uses ``exp(+i omega t)``. With this normalisation
``sum |env|^2 dt == 2 pi sum |E|^2 d_omega`` holds exactly.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

EDGE_TOLERANCE = 1e-6


def _frozen(arr, dtype=np.complex128):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FrequencyGrid:
    n_points: int
    omega_start: float
    d_omega: float

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValidationError("must be a power of two >= 16", "grid.n_points")
        if not self.d_omega > 0:
            raise ValidationError("must be positive", "grid.d_omega")

    @classmethod
    def centered(cls, center, n_points, d_omega):
        """Grid with ``center`` on the sample ``n_points // 2``."""
        return cls(n_points, center - (n_points // 2) * d_omega, d_omega)

    @classmethod
    def for_window(cls, center, time_window, omega_span):
        """Smallest power-of-two grid with temporal window >= ``time_window``
        and spectral span >= ``omega_span``."""
        d_omega = 2 * np.pi / time_window
        n = 16
        while n * d_omega < omega_span:
            n *= 2
        return cls.centered(center, n, d_omega)

    @property
    def omega(self):
        return self.omega_start + self.d_omega * np.arange(self.n_points)

    @property
    def omega_stop(self):
        return self.omega_start + self.d_omega * (self.n_points - 1)

    @property
    def d_t(self):
        return 2 * np.pi / (self.n_points * self.d_omega)

    @property
    def time_window(self):
        return 2 * np.pi / self.d_omega


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: FrequencyGrid
    amplitude: np.ndarray
    carrier_omega0: float

    def __post_init__(self):
        amp = _frozen(self.amplitude)
        if amp.shape != (self.grid.n_points,):
            raise ValidationError(
                f"expected {self.grid.n_points} samples, got {amp.shape}", "amplitude")
        if not np.all(np.isfinite(amp)):
            raise ValidationError("non-finite spectral amplitude", "amplitude")
        if not self.grid.omega_start <= self.carrier_omega0 <= self.grid.omega_stop:
            raise ValidationError("carrier outside the frequency grid", "carrier_omega0")
        object.__setattr__(self, "amplitude", amp)

    @property
    def omega(self):
        return self.grid.omega

    def replace(self, amplitude):
        return SpectralField(self.grid, amplitude, self.carrier_omega0)

    def edge_ratio(self):
        """Largest edge amplitude relative to the peak (0 for a zero field)."""
        peak = np.max(np.abs(self.amplitude))
        if peak == 0:
            return 0.0
        return max(abs(self.amplitude[0]), abs(self.amplitude[-1])) / peak


@dataclass(frozen=True, eq=False)
class TemporalField:
    t_start: float
    d_t: float
    envelope: np.ndarray
    carrier_omega0: float
    omega_start: float = field(default=None)

    def __post_init__(self):
        env = _frozen(self.envelope)
        if env.ndim != 1 or env.size < 16:
            raise ValidationError("envelope must be 1-D with >= 16 samples", "envelope")
        if not self.d_t > 0:
            raise ValidationError("must be positive", "d_t")
        if not np.all(np.isfinite(env)):
            raise ValidationError("non-finite envelope", "envelope")
        object.__setattr__(self, "envelope", env)
        if self.omega_start is None:
            n = env.size
            object.__setattr__(
                self, "omega_start", self.carrier_omega0 - (n // 2) * self.d_omega)

    @property
    def n_points(self):
        return self.envelope.size

    @property
    def d_omega(self):
        return 2 * np.pi / (self.n_points * self.d_t)

    @property
    def t(self):
        return self.t_start + self.d_t * np.arange(self.n_points)

    @property
    def t_stop(self):
        return self.t_start + self.d_t * (self.n_points - 1)

    @property
    def peak(self):
        return float(np.max(np.abs(self.envelope)))

    def replace(self, envelope):
        return TemporalField(self.t_start, self.d_t, envelope, self.carrier_omega0,
                             self.omega_start)

    def frequency_grid(self):
        return FrequencyGrid(self.n_points, self.omega_start, self.d_omega)


def to_time(f, t_start=None):
    """Synthesise the temporal envelope of a spectral field.

    The time axis defaults to a window centred on t = 0.
    """
    g = f.grid
    n, dt = g.n_points, g.d_t
    if t_start is None:
        t_start = -(n // 2) * dt
    t = t_start + dt * np.arange(n)
    k = np.arange(n)
    pre = f.amplitude * np.exp(-1j * k * g.d_omega * t_start)
    env = g.d_omega * np.exp(-1j * (g.omega_start - f.carrier_omega0) * t) * np.fft.fft(pre)
    return TemporalField(t_start, dt, env, f.carrier_omega0, g.omega_start)


def to_freq(f, grid=None):
    """Analyse a temporal envelope back onto its conjugate frequency grid.

    Exact inverse of :func:`to_time`. ``grid``, when given, must be the
    conjugate of the time axis.
    """
    own = f.frequency_grid()
    if grid is not None:
        if grid.n_points != own.n_points or not np.isclose(
                grid.d_omega, own.d_omega, rtol=1e-12, atol=0):
            raise ValidationError(
                "frequency grid is not conjugate to the time axis "
                "(d_t * n_points * d_omega must equal 2 pi)", "grid")
        own = grid
    t = f.t
    k = np.arange(own.n_points)
    y = f.envelope * np.exp(1j * (own.omega_start - f.carrier_omega0) * t) / own.d_omega
    amp = np.fft.ifft(y) * np.exp(1j * k * own.d_omega * f.t_start)
    return SpectralField(own, amp, f.carrier_omega0)


def spectral_energy(f):
    return 2 * np.pi * float(np.sum(np.abs(f.amplitude) ** 2)) * f.grid.d_omega


def temporal_energy(f):
    return float(np.sum(np.abs(f.envelope) ** 2)) * f.d_t


class PulseWidth(NamedTuple):
    fwhm: float
    multimodal: bool


def intensity_fwhm(f):
    """FWHM of |env|^2 with linear interpolation between samples.

    If the half-maximum level is crossed more than twice, the span between
    the outermost crossings is returned and the result is flagged multimodal.
    """
    t = f.t
    inten = np.abs(f.envelope) ** 2
    peak = inten.max()
    if peak == 0:
        raise ValidationError("zero field has no duration", "envelope")
    above = inten >= peak / 2
    edges = np.flatnonzero(np.diff(above.astype(np.int8)))
    if edges.size == 0:
        return PulseWidth(float(t[-1] - t[0]), False)

    def crossing(i):
        y0, y1 = inten[i] - peak / 2, inten[i + 1] - peak / 2
        return t[i] + (t[i + 1] - t[i]) * y0 / (y0 - y1)

    left = crossing(edges[0]) if not above[0] else t[0]
    right = crossing(edges[-1]) if not above[-1] else t[-1]
    return PulseWidth(float(right - left), bool(edges.size > 2))


def gaussian_fwhm(delta_omega):
    """Intensity FWHM of the transform of ``exp(-(omega-omega0)^2 / delta_omega^2)``."""
    return 2 * np.sqrt(2 * np.log(2)) / delta_omega


def synthesize_spectrum(center_omega, edge_low, edge_high, shape="gaussian", order=4,
                        grid=None, time_window=1024.0, omega_span=None):
    """Smooth, unit-peak spectrum centred at ``center_omega``.

    The profile is symmetric in omega; its width is set so the amplitude has
    fallen to 1e-3 of the peak at the nearer edge, hence it is below 1e-3
    everywhere outside ``[edge_low, edge_high]``. ``shape`` is ``"gaussian"``
    or ``"supergaussian"`` (``exp(-|x/w|^order)``).
    """
    if not edge_low < center_omega < edge_high:
        raise ValidationError("need edge_low < center_omega < edge_high", "field.edges")
    near = min(center_omega - edge_low, edge_high - center_omega)
    if shape == "gaussian":
        power = 2.0
    elif shape == "supergaussian":
        power = float(order)
        if power < 2:
            raise ValidationError("supergaussian order must be >= 2", "field.order")
    else:
        raise ValidationError(f"unknown spectrum shape {shape!r}", "field.shape")
    width = near / np.log(1e3) ** (1 / power)
    if grid is None:
        if omega_span is None:
            omega_span = 2 * (edge_high - edge_low) + 12 * width
        grid = FrequencyGrid.for_window(center_omega, time_window, omega_span)
    x = (grid.omega - center_omega) / width
    amp = np.exp(-np.abs(x) ** power)
    spec = SpectralField(grid, amp, center_omega)
    if spec.edge_ratio() > EDGE_TOLERANCE:
        raise ValidationError("frequency grid does not cover the spectrum support", "grid")
    return spec


def write_field(path, f):
    """Columnar text: axis, real, imaginary, with a parameter header."""
    if isinstance(f, SpectralField):
        head = [
            "domain = frequency",
            f"n_points = {f.grid.n_points}",
            f"omega_start = {f.grid.omega_start!r}",
            f"d_omega = {f.grid.d_omega!r}",
            f"carrier_omega0 = {f.carrier_omega0!r}",
            "columns = omega[rad/fs] real imag",
        ]
        axis, vals = f.omega, f.amplitude
    else:
        head = [
            "domain = time",
            f"n_points = {f.n_points}",
            f"t_start = {f.t_start!r}",
            f"d_t = {f.d_t!r}",
            f"omega_start = {f.omega_start!r}",
            f"carrier_omega0 = {f.carrier_omega0!r}",
            "columns = t[fs] real imag",
        ]
        axis, vals = f.t, f.envelope
    data = np.column_stack([axis, vals.real, vals.imag])
    np.savetxt(Path(path), data, fmt="%.17e", header="\n".join(head))


def read_field(path):
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
    data = np.loadtxt(path, ndmin=2)
    vals = data[:, 1] + 1j * data[:, 2]
    carrier = float(meta["carrier_omega0"])
    if meta["domain"] == "frequency":
        grid = FrequencyGrid(int(meta["n_points"]), float(meta["omega_start"]),
                             float(meta["d_omega"]))
        return SpectralField(grid, vals, carrier)
    return TemporalField(float(meta["t_start"]), float(meta["d_t"]), vals, carrier,
                         float(meta["omega_start"]))
