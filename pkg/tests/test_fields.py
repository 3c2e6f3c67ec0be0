import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import gaussian_spectrum
from pscoherence.errors import ValidationError
from pscoherence.fields import (FrequencyGrid, SpectralField, TemporalField,
                                gaussian_fwhm, intensity_fwhm, read_field,
                                spectral_energy, synthesize_spectrum, temporal_energy,
                                to_freq, to_time, write_field)
from pscoherence.masks import (ConstantMask, analytic_double_pulse, apply_mask,
                               delayed_envelope)
from pscoherence.units import nm_to_omega

W750, W900, W600 = nm_to_omega(750), nm_to_omega(900), nm_to_omega(600)


def random_field(seed, n=256):
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid.centered(2.4, n, 0.01)
    x = (grid.omega - 2.4) / 0.3
    amp = np.exp(-x**2) * (rng.normal(size=n) + 1j * rng.normal(size=n))
    amp[np.abs(x) > 3.5] = 0
    return SpectralField(grid, amp, 2.4)


class TestGrid:
    def test_power_of_two(self):
        with pytest.raises(ValidationError):
            FrequencyGrid(100, 0.0, 0.1)
        with pytest.raises(ValidationError):
            FrequencyGrid(8, 0.0, 0.1)

    def test_positive_step(self):
        with pytest.raises(ValidationError):
            FrequencyGrid(64, 0.0, 0.0)

    def test_conjugate(self):
        g = FrequencyGrid.centered(2.5, 1024, 0.01)
        assert g.d_t * g.n_points * g.d_omega == pytest.approx(2 * np.pi, rel=1e-15)
        assert g.omega[512] == pytest.approx(2.5)
        assert np.all(np.diff(g.omega) > 0)

    def test_carrier_in_span(self):
        g = FrequencyGrid.centered(2.5, 64, 0.01)
        with pytest.raises(ValidationError):
            SpectralField(g, np.zeros(64), 5.0)

    def test_non_finite(self):
        g = FrequencyGrid.centered(2.5, 64, 0.01)
        amp = np.zeros(64, complex)
        amp[3] = np.nan
        with pytest.raises(ValidationError):
            SpectralField(g, amp, 2.5)

    def test_frozen(self):
        f = gaussian_spectrum(2.5, 0.1)
        with pytest.raises(ValueError):
            f.amplitude[0] = 1


class TestSynthesis:
    def test_gaussian_peak_and_symmetry(self):
        f = synthesize_spectrum(W750, W900, W600)
        i = np.argmax(np.abs(f.amplitude))
        assert f.omega[i] == pytest.approx(W750, abs=f.grid.d_omega)
        x = f.omega - W750
        a = np.abs(f.amplitude)
        mirrored = np.interp(-x, x, a)
        assert np.max(np.abs(mirrored - a)) < 1e-12

    def test_outside_edges_small(self):
        for shape in ("gaussian", "supergaussian"):
            f = synthesize_spectrum(W750, W900, W600, shape=shape, order=4)
            out = (f.omega < W900) | (f.omega > W600)
            assert np.abs(f.amplitude[out]).max() < 1e-3

    def test_supergaussian_flat_top(self):
        g = synthesize_spectrum(W750, W900, W600)
        s = synthesize_spectrum(W750, W900, W600, shape="supergaussian", order=4)
        i = np.argmin(np.abs(s.omega - W750))
        assert abs(s.amplitude[i] - 1) < 1e-12
        near = np.abs(s.omega - W750) < 0.5 * (W750 - W900)
        assert np.abs(s.amplitude[near]).min() > np.abs(g.amplitude[near]).min()

    def test_degenerate_edges(self):
        with pytest.raises(ValidationError):
            synthesize_spectrum(W750, W750, W750)
        with pytest.raises(ValidationError):
            synthesize_spectrum(W750, W600, W900)


class TestTransform:
    def test_gaussian_fwhm(self):
        t = to_time(gaussian_spectrum(2.5, 0.18))
        assert intensity_fwhm(t).fwhm == pytest.approx(13.08, rel=0.01)
        assert intensity_fwhm(t).fwhm == pytest.approx(gaussian_fwhm(0.18), rel=0.01)
        assert not intensity_fwhm(t).multimodal

    def test_delta_constant(self):
        g = FrequencyGrid.centered(2.5, 64, 0.05)
        amp = np.zeros(64)
        amp[32] = 1.0
        env = to_time(SpectralField(g, amp, 2.5)).envelope
        assert np.ptp(np.abs(env)) < 1e-14

    def test_zero(self):
        g = FrequencyGrid.centered(2.5, 64, 0.05)
        f = TemporalField(-10.0, g.d_t, np.zeros(64), 2.5, g.omega_start)
        assert np.all(to_freq(f).amplitude == 0)

    def test_round_trip_and_parseval(self):
        f = random_field(1)
        back = to_freq(to_time(f))
        rel = np.abs(back.amplitude - f.amplitude).max() / np.abs(f.amplitude).max()
        assert rel < 1e-12
        assert temporal_energy(to_time(f)) == pytest.approx(spectral_energy(f), rel=1e-12)

    def test_shift_theorem(self):
        f = gaussian_spectrum(2.5, 0.2)
        base = to_time(f)
        tau = 37.3
        spec = to_freq(base.replace(delayed_envelope(base, tau)))
        for k in (f.grid.n_points // 2 - 20, f.grid.n_points // 2, f.grid.n_points // 2 + 7):
            expect = f.amplitude[k] * np.exp(1j * (f.omega[k] - f.carrier_omega0) * tau)
            assert abs(spec.amplitude[k] - expect) < 1e-10

    def test_custom_start(self):
        f = random_field(2)
        t = to_time(f, t_start=-100.0)
        assert t.t_start == -100.0
        back = to_freq(t)
        assert np.abs(back.amplitude - f.amplitude).max() < 1e-12 * np.abs(f.amplitude).max()

    def test_non_conjugate_grid(self):
        t = to_time(random_field(3))
        with pytest.raises(ValidationError):
            to_freq(t, FrequencyGrid.centered(2.4, 256, 0.011))

    def test_envelope_convention(self):
        """A spectral factor exp(i omega tau) delays the pulse by tau."""
        f = gaussian_spectrum(2.5, 0.2)
        moved = to_time(f.replace(f.amplitude * np.exp(1j * f.omega * 40.0)))
        t = moved.t
        assert t[np.argmax(np.abs(moved.envelope))] == pytest.approx(40.0, abs=moved.d_t)


class TestDuration:
    def test_scale_invariance(self):
        t = to_time(gaussian_spectrum(2.5, 0.3))
        assert intensity_fwhm(t.replace(7.3 * t.envelope)).fwhm == pytest.approx(
            intensity_fwhm(t).fwhm, rel=1e-12)

    def test_double_pulse_multimodal(self):
        t = to_time(gaussian_spectrum(2.5, 2 * np.sqrt(2 * np.log(2)) / 7.0))
        pair = analytic_double_pulse(t, 1.0, 100.0, 2.5, 0.0)
        w = intensity_fwhm(pair)
        assert w.multimodal
        assert w.fwhm > 100.0

    def test_zero_field(self):
        t = to_time(gaussian_spectrum(2.5, 0.3))
        with pytest.raises(ValidationError):
            intensity_fwhm(t.replace(np.zeros(t.n_points)))


def test_serialization(tmp_path):
    f = random_field(4)
    write_field(tmp_path / "spec.txt", f)
    g = read_field(tmp_path / "spec.txt")
    assert np.array_equal(g.amplitude, f.amplitude)
    assert g.grid == f.grid
    t = to_time(f)
    write_field(tmp_path / "time.txt", t)
    u = read_field(tmp_path / "time.txt")
    assert np.array_equal(u.envelope, t.envelope) and u.d_t == t.d_t


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), log_n=st.integers(5, 10))
def test_round_trip_property(seed, log_n):
    f = random_field(seed, 2**log_n)
    t = to_time(f)
    back = to_freq(t)
    peak = np.abs(f.amplitude).max()
    assert np.abs(back.amplitude - f.amplitude).max() < 1e-12 * peak
    assert abs(temporal_energy(t) - spectral_energy(f)) < 1e-12 * spectral_energy(f)


@settings(max_examples=30, deadline=None)
@given(tau=st.floats(-150, 150))
def test_shift_property(tau):
    """Time-domain delay (direct convolution) <-> linear spectral phase."""
    f = gaussian_spectrum(2.5, 0.25)
    base = to_time(f)
    spec = to_freq(base.replace(delayed_envelope(base, tau)))
    expect = f.amplitude * np.exp(1j * (f.omega - f.carrier_omega0) * tau)
    assert np.abs(spec.amplitude - expect).max() < 1e-10


def test_identity_mask_bitwise():
    f = random_field(5)
    assert np.array_equal(apply_mask(f, ConstantMask(1.0)).amplitude, f.amplitude)
