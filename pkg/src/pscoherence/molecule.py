"""Electronic-state structure: potential curves, photon orders, couplings.

The nuclear coordinate R is a single reduced coordinate in angstrom with an
associated reduced mass in amu; potentials are in eV.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .units import AMU_A2_PER_FS2_EV, HBAR

CURVE_KINDS = ("harmonic", "morse", "linear")


@dataclass(frozen=True)
class PotentialCurve:
    """One adiabatic potential curve.

    harmonic: ``V_FC + 1/2 mu omega_vib^2 (R - R0)^2``
    morse:    ``V_FC + D (1 - exp(-a (R - R0)))^2`` with ``a`` matched to omega_vib
    linear:   ``V_FC + slope (R - R0)``
    """

    kind: str = "harmonic"
    R0: float = 0.0
    omega_vib: float = None
    well_depth: float = None
    slope: float = None
    V_FC: float = 0.0

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValidationError(f"unknown curve kind {self.kind!r}", "curve.kind")
        if self.kind in ("harmonic", "morse"):
            if self.omega_vib is None or not self.omega_vib > 0:
                raise ValidationError("curvature must be > 0", "curve.omega_vib")
        if self.kind == "morse" and (self.well_depth is None or not self.well_depth > 0):
            raise ValidationError("morse well depth must be > 0", "curve.well_depth")
        if self.kind == "linear" and self.slope is None:
            raise ValidationError("linear curve needs a slope", "curve.slope")

    def force_constant(self, reduced_mass):
        """Curvature at R0 in eV / angstrom^2 (0 for linear curves)."""
        if self.kind == "linear":
            return 0.0
        return reduced_mass * self.omega_vib**2 * AMU_A2_PER_FS2_EV

    def shape(self, R, reduced_mass):
        """Potential relative to the vertical offset ``V_FC``."""
        x = np.asarray(R, dtype=float) - self.R0
        if self.kind == "harmonic":
            return 0.5 * self.force_constant(reduced_mass) * x**2
        if self.kind == "morse":
            a = np.sqrt(self.force_constant(reduced_mass) / (2 * self.well_depth))
            return self.well_depth * (1 - np.exp(-a * x)) ** 2
        return self.slope * x

    def energy(self, R, reduced_mass):
        return self.V_FC + self.shape(R, reduced_mass)

    def is_parallel(self, other):
        """Identical shape (only the vertical offsets may differ)."""
        return (self.kind, self.R0, self.omega_vib, self.well_depth, self.slope) == (
            other.kind, other.R0, other.omega_vib, other.well_depth, other.slope)


def potential_energy(curve, R, reduced_mass=1.0):
    return curve.energy(R, reduced_mass)


@dataclass(frozen=True)
class CoordinateGrid:
    r_min: float
    r_max: float
    n_points: int = 512

    def __post_init__(self):
        if self.n_points < 16:
            raise ValidationError("need at least 16 points", "molecule.grid.n_points")
        if not self.r_max > self.r_min:
            raise ValidationError("r_max must exceed r_min", "molecule.grid.r_max")

    @property
    def R(self):
        return self.r_min + self.dR * np.arange(self.n_points)

    @property
    def dR(self):
        return (self.r_max - self.r_min) / self.n_points

    @property
    def k(self):
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dR)


@dataclass(frozen=True)
class ElectronicState:
    label: str
    curve: PotentialCurve
    photon_order: int
    q_excite: complex = 1.0
    q_ion: complex = 1.0
    ion_order: int = None
    ic_lifetime: float = None

    def __post_init__(self):
        if int(self.photon_order) != self.photon_order or self.photon_order < 1:
            raise ValidationError("must be a positive integer", "photon_order")
        if self.ion_order is not None and self.ion_order < 1:
            raise ValidationError("must be a positive integer", "ion_order")
        if self.ic_lifetime is not None and not self.ic_lifetime > 0:
            raise ValidationError("must be > 0 when given", "ic_lifetime")

    def decay(self, t):
        """Amplitude factor from internal conversion after time ``t``."""
        if self.ic_lifetime is None:
            return 1.0
        return np.exp(-np.asarray(t) / (2 * self.ic_lifetime))


class Channel(NamedTuple):
    lower: str
    upper: str


@dataclass(frozen=True, eq=False)
class MoleculeModel:
    """Ground curve, excited states and ionization structure.

    States are kept sorted by Franck-Condon energy. Each pair of states whose
    photon orders differ by one is a coherence channel. When a state's
    ionization order is not given, states at the lowest photon order get
    ``base_ion_order`` and higher orders one photon fewer per excitation
    photon, so every state reaches the same final energy.
    """

    ground_curve: PotentialCurve
    states: tuple
    Ip: float
    reduced_mass: float
    grid: CoordinateGrid
    base_ion_order: int = 2
    name: str = "molecule"
    _by_label: dict = field(default=None, repr=False)

    def __post_init__(self):
        if not self.Ip > 0:
            raise ValidationError("ionization potential must be > 0", "molecule.Ip")
        if not self.reduced_mass > 0:
            raise ValidationError("must be > 0", "molecule.reduced_mass")
        if len(self.states) == 0:
            raise ValidationError("at least one excited state required", "molecule.states")
        labels = [s.label for s in self.states]
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate state labels", "molecule.states")
        R = self.grid.R
        for i, s in enumerate(self.states):
            if not np.all(np.isfinite(s.curve.energy(R, self.reduced_mass))):
                raise ValidationError("curve not finite on the grid",
                                      f"molecule.states[{i}].curve")
        ordered = tuple(sorted(self.states, key=self._fc_energy))
        object.__setattr__(self, "states", ordered)
        object.__setattr__(self, "_by_label", {s.label: s for s in ordered})
        n_min = min(s.photon_order for s in ordered)
        for s in ordered:
            m = self.ion_order(s)
            if m < 1:
                raise ValidationError(
                    f"derived ionization order {m} < 1; set ion_order explicitly",
                    f"molecule.states.{s.label}.ion_order")
        if self.base_ion_order < 2 and any(s.photon_order == n_min for s in ordered):
            raise ValidationError("lower state of a channel needs m >= 2",
                                  "molecule.base_ion_order")

    def _fc_energy(self, s):
        R0 = self.ground_curve.R0
        return float(s.curve.energy(R0, self.reduced_mass)
                     - self.ground_curve.energy(R0, self.reduced_mass))

    def state(self, label):
        try:
            return self._by_label[label]
        except KeyError:
            raise ValidationError(f"unknown state {label!r}", "state") from None

    @property
    def labels(self):
        return [s.label for s in self.states]

    def fc_energy(self, label):
        """Vertical excitation energy at the ground-state equilibrium (eV)."""
        return self._fc_energy(self.state(label))

    def transition_omega(self, label):
        return self.fc_energy(label) / HBAR

    def resonance_photon_energy(self, label):
        return self.fc_energy(label) / self.state(label).photon_order

    def ion_order(self, s):
        if isinstance(s, str):
            s = self.state(s)
        if s.ion_order is not None:
            return s.ion_order
        n_min = min(st.photon_order for st in self.states)
        return self.base_ion_order - (s.photon_order - n_min)

    def channels(self):
        out = []
        for a in self.states:
            for b in self.states:
                if b.photon_order == a.photon_order + 1:
                    out.append(Channel(a.label, b.label))
        return out

    def potential(self, label, R=None):
        R = self.grid.R if R is None else R
        return self.state(label).curve.energy(R, self.reduced_mass)


def omega_21(model, state_i, state_j, R=None):
    """Local transition frequency ``(V_j(R) - V_i(R)) / hbar`` in rad/fs."""
    if state_i == state_j:
        raise ValidationError("coherence needs two distinct states", "state_j")
    R = model.grid.R if R is None else np.asarray(R, dtype=float)
    return (model.potential(state_j, R) - model.potential(state_i, R)) / HBAR


def offset_omega(model, state_i, state_j):
    """Transition frequency between the vertical offsets of two curves."""
    if state_i == state_j:
        raise ValidationError("coherence needs two distinct states", "state_j")
    return (model.state(state_j).curve.V_FC - model.state(state_i).curve.V_FC) / HBAR


@dataclass
class ModelDiagnostics:
    channels: list
    resonance_photon_energies: dict
    fc_energies: dict
    warnings: list = field(default_factory=list)

    def summary(self):
        lines = ["channels:"]
        for c in self.channels:
            lines.append(f"  {c.lower} -> {c.upper}")
        if not self.channels:
            lines.append("  (none)")
        lines.append("resonance photon energies [eV]:")
        for k, v in self.resonance_photon_energies.items():
            lines.append(f"  {k}: {v:.4f} (E_FC = {self.fc_energies[k]:.4f} eV)")
        return "\n".join(lines)


def validate_model(model):
    """Invariant checks plus channel and resonance enumeration."""
    warns = []
    R = model.grid.R
    if model.ground_curve.kind == "linear":
        raise ValidationError("ground curve has no minimum", "molecule.ground_curve.kind")
    for s in model.states:
        if s.q_excite == 0:
            warns.append(f"state {s.label}: zero excitation coupling")
        e = s.curve.energy(R, model.reduced_mass)
        if np.ptp(e) > 50:
            warns.append(f"state {s.label}: potential spans {np.ptp(e):.1f} eV on the grid")
    return ModelDiagnostics(
        channels=model.channels(),
        resonance_photon_energies={s.label: model.resonance_photon_energy(s.label)
                                   for s in model.states},
        fc_energies={s.label: model.fc_energy(s.label) for s in model.states},
        warnings=warns,
    )
