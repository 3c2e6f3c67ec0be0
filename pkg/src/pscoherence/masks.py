"""Spectral masks of an acousto-optic pulse shaper.

Each mask is a small frozen dataclass; calling it on an array of angular
frequencies returns the complex transmission.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationWarning, ValidationError
from .fields import EDGE_TOLERANCE, SpectralField, TemporalField


@dataclass(frozen=True)
class ConstantMask:
    value: complex = 1.0

    def __call__(self, omega, carrier=None):
        return np.full(np.shape(omega), complex(self.value))


@dataclass(frozen=True)
class WindowMask:
    """Gaussian window ``A exp(-(omega - omega_c)^2 / delta_omega^2)``."""

    A: float
    omega_c: float
    delta_omega: float

    def __post_init__(self):
        if self.A < 0:
            raise ValidationError("must be >= 0", "mask.A")
        if not self.delta_omega > 0:
            raise ValidationError("must be > 0", "mask.delta_omega")

    def __call__(self, omega, carrier=None):
        omega = np.asarray(omega, dtype=float)
        return self.A * np.exp(-((omega - self.omega_c) / self.delta_omega) ** 2) + 0j


@dataclass(frozen=True)
class PulsePairMask:
    """``A_T (1 + A_R exp(i (omega - omega_L) tau + i phi_L))``.

    Produces a pump copy and a probe delayed by ``tau`` whose carrier phase is
    ``phi_L - omega_L tau`` relative to the pump.
    """

    A_T: float = 1.0
    A_R: float = 1.0
    omega_L: float = 0.0
    tau: float = 0.0
    phi_L: float = 0.0

    def __post_init__(self):
        if self.A_T < 0:
            raise ValidationError("must be >= 0", "mask.A_T")
        if self.A_R < 0:
            raise ValidationError("must be >= 0", "mask.A_R")

    def __call__(self, omega, carrier=None):
        omega = np.asarray(omega, dtype=float)
        # phi_L kept in its own factor so phi_L -> phi_L + 2 pi is exact to rounding
        pair = np.exp(1j * (omega - self.omega_L) * self.tau) * np.exp(1j * self.phi_L)
        return self.A_T * (1 + self.A_R * pair)

    @property
    def probe_phase(self):
        return self.phi_L - self.omega_L * self.tau


@dataclass(frozen=True)
class TaylorPhaseMask:
    """Unit-modulus phase ``exp(i sum_k phi_k (omega - omega_ref)^k / k!)``.

    ``coefficients`` are (phi0 [rad], phi1 [fs], phi2 [fs^2], phi3 [fs^3],
    phi4 [fs^4]); shorter tuples are zero-padded. ``omega_ref`` defaults to the
    field carrier.
    """

    coefficients: tuple = (0.0, 0.0, 0.0, 0.0, 0.0)
    omega_ref: float = None

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) > 5:
            raise ValidationError("at most five Taylor coefficients (up to 4th order)",
                                  "mask.coefficients")
        object.__setattr__(self, "coefficients", coeffs + (0.0,) * (5 - len(coeffs)))

    def phase(self, omega, carrier=None):
        ref = self.omega_ref if self.omega_ref is not None else carrier
        if ref is None:
            raise ValidationError("omega_ref not set and no carrier given", "mask.omega_ref")
        x = np.asarray(omega, dtype=float) - ref
        return sum(c * x**k / math.factorial(k) for k, c in enumerate(self.coefficients))

    def __call__(self, omega, carrier=None):
        return np.exp(1j * self.phase(omega, carrier))


@dataclass(frozen=True)
class CompositeMask:
    """Pointwise product of ``masks`` in list order (empty list is identity)."""

    masks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "masks", tuple(self.masks))

    def __call__(self, omega, carrier=None):
        out = np.ones(np.shape(omega), dtype=complex)
        for m in self.masks:
            out = out * m(omega, carrier)
        return out


def evaluate_mask(m, omega, carrier=None):
    """Closed-form mask value(s) at ``omega``."""
    val = m(omega, carrier)
    return complex(val) if np.ndim(val) == 0 else val


def apply_mask(f: SpectralField, m) -> SpectralField:
    """Shaped field ``M(omega) E(omega)`` on the same grid and carrier."""
    values = m(f.omega, f.carrier_omega0)
    if not np.all(np.isfinite(values)):
        raise ValidationError("mask is not finite over the grid", "mask")
    out = f.replace(values * f.amplitude)
    if out.edge_ratio() > EDGE_TOLERANCE:
        warnings.warn(
            f"shaped spectrum edge amplitude {out.edge_ratio():.2e} of peak; "
            "wraparound risk", SimulationWarning, stacklevel=2)
    return out


def _shift_kernel(s, n, d_omega, offset):
    """Band-limited interpolation kernel on the envelope's frequency set.

    K(s) = (1/n) sum_k exp(-i (offset + k d_omega) s), summed in closed form.
    """
    z = np.exp(-1j * d_omega * s)
    den = 1 - z
    small = np.abs(den) < 1e-12
    safe = np.where(small, 1.0, den)
    geo = np.where(small, n, (1 - z**n) / safe)
    return np.exp(-1j * offset * s) * geo / n


def _support(env, rel=1e-12):
    mag = np.abs(env)
    idx = np.flatnonzero(mag > rel * mag.max())
    return idx[0], idx[-1]


def delayed_envelope(f: TemporalField, tau):
    """Samples of ``env(t - tau)`` by direct time-domain band-limited
    interpolation (no FFT)."""
    n = f.n_points
    peak = np.max(np.abs(f.envelope))
    if peak > 0:
        lo, hi = _support(f.envelope)
        t = f.t
        if t[lo] + tau < f.t_start or t[hi] + tau > f.t_stop:
            raise ValidationError(
                f"delayed copy (tau={tau} fs) leaves the time window "
                f"[{f.t_start:.1f}, {f.t_stop:.1f}] fs", "tau")
    d = np.arange(-(n - 1), n)
    kern = _shift_kernel(d * f.d_t - tau, n, f.d_omega, f.omega_start - f.carrier_omega0)
    return np.convolve(f.envelope, kern)[n - 1:2 * n - 1]


def analytic_double_pulse(f: TemporalField, A_R, tau, omega_L, phi_L, A_T=1.0):
    """Pump-probe pair built directly in time:
    ``A_T [E(t) + A_R E(t - tau) exp(i (phi_L - omega_L tau))]``
    for the full field, written here for the envelope.
    """
    if A_R == 0:
        return f.replace(A_T * f.envelope)
    delayed = delayed_envelope(f, tau)
    phase = np.exp(1j * phi_L) * np.exp(1j * (f.carrier_omega0 - omega_L) * tau)
    return f.replace(A_T * (f.envelope + A_R * phase * delayed))


def mask_from_dict(spec):
    """Build a mask from a plain mapping with a ``kind`` key."""
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "window":
        return WindowMask(**spec)
    if kind == "pulse_pair":
        return PulsePairMask(**spec)
    if kind == "taylor":
        return TaylorPhaseMask(**spec)
    if kind == "constant":
        return ConstantMask(**spec)
    if kind == "composite":
        return CompositeMask(tuple(mask_from_dict(m) for m in spec["masks"]))
    raise ValidationError(f"unknown mask kind {kind!r}", "mask.kind")
