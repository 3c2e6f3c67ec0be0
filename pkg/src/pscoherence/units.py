"""Physical constants and unit conversions.

Internal units are fixed: time in fs, angular frequency in rad/fs, energy in
eV, nuclear coordinate in angstrom, mass in amu.
"""
import numpy as np

HBAR = 0.6582119569  # eV fs
C_NM_PER_FS = 299.792458  # nm / fs

# amu * angstrom^2 / fs^2 expressed in eV
AMU_A2_PER_FS2_EV = 103.642697


def ev_to_omega(energy_ev):
    return np.asarray(energy_ev) / HBAR if np.ndim(energy_ev) else energy_ev / HBAR


def omega_to_ev(omega):
    return np.asarray(omega) * HBAR if np.ndim(omega) else omega * HBAR


def nm_to_omega(wavelength_nm):
    return 2 * np.pi * C_NM_PER_FS / wavelength_nm


def omega_to_nm(omega):
    return 2 * np.pi * C_NM_PER_FS / omega
