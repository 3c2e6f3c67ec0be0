"""Small builders shared by the test modules."""
import numpy as np

from pscoherence.fields import FrequencyGrid, SpectralField
from pscoherence.molecule import (CoordinateGrid, ElectronicState, MoleculeModel,
                                  PotentialCurve)
from pscoherence.units import HBAR


def gaussian_spectrum(center, delta_omega, time_window=1024.0, span=None):
    """``exp(-(omega - center)^2 / delta_omega^2)`` on a centred grid."""
    grid = FrequencyGrid.for_window(center, time_window, span or 24 * delta_omega)
    amp = np.exp(-((grid.omega - center) / delta_omega) ** 2)
    return SpectralField(grid, amp, center)


def harmonic(E=0.0, R0=0.0, period=200.0):
    return PotentialCurve("harmonic", R0, 2 * np.pi / period, V_FC=E)


def model(states, period=200.0, mu=10.0, Ip=8.9, span=2.0, n_points=512):
    """``states`` entries: (label, V_FC [eV], photon order[, dict of extras]).

    Extras may set R0, period, q_excite, q_ion, ion_order, ic_lifetime.
    """
    out = []
    for entry in states:
        label, E, n = entry[:3]
        extra = dict(entry[3]) if len(entry) > 3 else {}
        curve = harmonic(E, extra.pop("R0", 0.0), extra.pop("period", period))
        out.append(ElectronicState(label, curve, n, **extra))
    return MoleculeModel(harmonic(period=period), tuple(out), Ip, mu,
                         CoordinateGrid(-span, span, n_points))


def pair(delta_ev=1.50, lower_ev=6.0, **kw):
    """Single channel: 4-photon state and a 5-photon state ``delta_ev`` above."""
    return model([("s1", lower_ev, 4), ("s2", lower_ev + delta_ev, 5)], **kw)


def ev(x):
    return x / HBAR
