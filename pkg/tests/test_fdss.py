"""Filter designs against closed-form cross-oracles and sampled-chirp oracles."""

import numpy as np
import pytest
from scipy import special

from chirplink import analysis, fdss
from chirplink.fdss import (
    ChirpTrajectory,
    band_limits,
    design_arbitrary,
    design_linear,
    design_plain,
    design_sinusoidal,
    load_filter_csv,
    triangular_trajectory,
)

M, N, D = 336, 512, 318.0


def synthesize_single_chirp(filt, n=N):
    """Time-domain chirp from the filter: truncated Fourier synthesis."""
    grid = np.zeros(n, dtype=complex)
    grid[filt.subcarriers % n] = filt.coeffs
    return np.fft.ifft(grid)


def piecewise_triangle(x):
    """Independent piecewise-quadratic triangular profile (down-chirp first)."""
    x = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(x < 0, x**2 / np.pi + x, -(x**2) / np.pi + x)


class TestPlain:
    def test_small_band(self):
        filt = design_plain(4)
        np.testing.assert_array_equal(filt.coeffs, np.ones(4, dtype=complex))
        np.testing.assert_array_equal(filt.subcarriers, [-1, 0, 1, 2])

    def test_band_limits_336(self):
        filt = design_plain(336)
        assert (filt.l_down, filt.l_up) == (-167, 168)
        assert band_limits(336) == (-167, 168)

    def test_rejects_bad_m(self):
        with pytest.raises(ValueError):
            design_plain(0)


class TestSinusoidal:
    def test_zero_deviation_is_single_tone(self):
        filt = design_sinusoidal(0.0, 16)
        mags = np.abs(filt.coeffs)
        assert mags[filt.subcarriers == 0] == pytest.approx(np.sqrt(16))
        assert np.all(mags[filt.subcarriers != 0] == 0.0)

    def test_truncation_loss_at_default_operating_point(self):
        # oracle: out-of-band energy of the Bessel sequence (independent impl)
        filt = design_sinusoidal(D, M)
        ks = filt.subcarriers
        oracle_loss = 1.0 - np.sum(special.jv(ks, D / 2) ** 2)
        assert abs(filt.truncation_loss - oracle_loss) < 1e-9
        assert 0 < filt.truncation_loss < 2e-4

    def test_coefficient_ratio_against_quadrature_oracle(self):
        # J_1(1)/J_0(1) from the quadrature oracle: 0.575080915004306
        filt = design_sinusoidal(2.0, 16)
        ratio = filt.coeff(1) / filt.coeff(0)
        assert abs(ratio - 0.575080915004306) < 1e-9

    def test_rejects_oversized_deviation(self):
        with pytest.raises(ValueError):
            design_sinusoidal(20.0, 16)


class TestLinear:
    def test_magnitude_symmetry(self):
        filt = design_linear(D, M)
        mags = np.abs(filt.coeffs)
        ks = filt.subcarriers
        for k in range(1, 167):
            assert abs(mags[ks == k][0] - mags[ks == -k][0]) < 1e-6

    def test_against_oversampled_dft_oracle(self):
        filt = design_linear(D, M)
        oversample = 16 * M
        u = np.arange(oversample) / oversample
        chirp = np.exp(1j * np.pi * D * (u**2 - u))
        coeffs = np.fft.fft(chirp) / oversample
        oracle = coeffs[filt.subcarriers % oversample]
        oracle *= np.sqrt(M / np.sum(np.abs(oracle) ** 2))
        rel_rms = np.linalg.norm(filt.coeffs - oracle) / np.linalg.norm(oracle)
        assert rel_rms <= 1e-3

    def test_mild_ripple_compared_to_sinusoidal(self):
        lin = design_linear(D, M).magnitude_ratio()
        sin = design_sinusoidal(D, M).magnitude_ratio()
        assert np.isfinite(lin)
        assert lin < 0.1 * sin

    def test_rejects_bad_deviation(self):
        with pytest.raises(ValueError):
            design_linear(0.0, M)
        with pytest.raises(ValueError):
            design_linear(400.0, M)


class TestTrajectory:
    def test_triangular_coefficients(self):
        traj = triangular_trajectory(64)
        b = traj.sin_coeffs
        assert b[1] == pytest.approx(0.0, abs=1e-15)  # n = 2
        assert b[0] == pytest.approx(8 / np.pi**2)    # n = 1
        assert b[2] == pytest.approx(8 / (np.pi**2 * 27))  # n = 3
        assert np.all(b[1::2] == 0.0)
        flipped = triangular_trajectory(64, down_first=False)
        np.testing.assert_allclose(flipped.sin_coeffs, -b)

    def test_triangular_needs_converged_series(self):
        # below ~41 harmonics the truncated slope misses the +/-1 span by >1%
        with pytest.raises(ValueError):
            triangular_trajectory(8)

    def test_reconstruction_matches_piecewise_profile(self):
        traj = triangular_trajectory(64)
        x = np.linspace(-np.pi, np.pi, 10001)
        assert np.max(np.abs(traj.f(x) - piecewise_triangle(x))) < 1e-3

    def test_slope_normalization_enforced(self):
        with pytest.raises(ValueError):
            ChirpTrajectory(0.0, np.zeros(1), np.array([0.8]), 10.0)
        with pytest.raises(ValueError):
            ChirpTrajectory(0.0, np.zeros(1), np.array([1.2]), 10.0)
        ChirpTrajectory(0.0, np.zeros(1), np.array([1.0]), 10.0)  # ok

    def test_slope_profile(self):
        traj = triangular_trajectory(64)
        x = np.array([0.0, np.pi / 2, np.pi + 1e-9])
        expect = np.array([1.0, 0.0, -1.0])
        np.testing.assert_allclose(traj.slope(x), expect, atol=7e-3)


class TestArbitrary:
    def test_pure_sine_reproduces_sinusoidal(self):
        for dev in (10.0, D):
            traj = ChirpTrajectory(0.0, np.zeros(1), np.array([1.0]), dev)
            arb = design_arbitrary(traj, M)
            ref = design_sinusoidal(dev, M)
            assert np.max(np.abs(arb.coeffs - ref.coeffs)) < 1e-9

    def test_pure_cosine_matches_rotated_bessel(self):
        traj = ChirpTrajectory(0.0, np.array([1.0]), np.zeros(1), 10.0)
        filt = design_arbitrary(traj, 64)
        ks = filt.subcarriers
        ref = special.jv(ks, 5.0)
        ref = ref * np.sqrt(64 / np.sum(ref**2))
        np.testing.assert_allclose(np.abs(filt.coeffs), np.abs(ref), atol=1e-9)
        # phases differ from the sine case by exactly j^k
        derotated = filt.coeffs * np.array([1, -1j, -1, 1j])[np.mod(ks, 4)]
        np.testing.assert_allclose(derotated.imag, 0.0, atol=1e-9)
        np.testing.assert_allclose(derotated.real, ref, atol=1e-9)

    def test_constant_phase_term(self):
        base = ChirpTrajectory(0.0, np.zeros(1), np.array([1.0]), 10.0)
        offset = ChirpTrajectory(1.0, np.zeros(1), np.array([1.0]), 10.0)
        a = design_arbitrary(base, 64)
        b = design_arbitrary(offset, 64)
        np.testing.assert_allclose(b.coeffs, a.coeffs * np.exp(1j * 10.0 / 4.0), atol=1e-9)

    def test_triangular_synthesis_nmse(self):
        traj = triangular_trajectory(64, deviation=D)
        filt = design_arbitrary(traj, M)
        synth = synthesize_single_chirp(filt)
        tau = np.arange(N) / N
        ref = np.exp(1j * (D / 2) * piecewise_triangle(2 * np.pi * tau))
        assert analysis.nmse_db(synth, ref) <= -25.0

    def test_reports_truncation_loss(self):
        traj = triangular_trajectory(64, deviation=D)
        filt = design_arbitrary(traj, M)
        assert 0 < filt.truncation_loss < 2e-3
        # narrower band at same deviation loses more energy
        lossier = design_arbitrary(triangular_trajectory(64, deviation=318.0), 320)
        assert lossier.truncation_loss > filt.truncation_loss

    def test_rejects_band_overflow(self):
        with pytest.raises(ValueError):
            design_arbitrary(triangular_trajectory(64, deviation=100.0), 64)


class TestFilterInvariants:
    @pytest.mark.parametrize("make", [
        lambda: design_plain(M),
        lambda: design_linear(D, M),
        lambda: design_sinusoidal(D, M),
        lambda: design_arbitrary(triangular_trajectory(64, deviation=D), M),
    ])
    def test_band_and_power(self, make):
        filt = make()
        assert len(filt.coeffs) == M
        assert filt.subcarriers[0] == M // 2 - M + 1
        assert filt.subcarriers[-1] == M // 2
        assert abs(np.sum(np.abs(filt.coeffs) ** 2) - M) < 1e-9 * M

    def test_truncation_loss_monotone_in_band_size(self):
        losses = [design_sinusoidal(100.0, m).truncation_loss for m in (104, 128, 168, 336)]
        assert all(a >= b - 1e-15 for a, b in zip(losses, losses[1:]))

    def test_csv_round_trip_bit_exact(self, tmp_path):
        filt = design_sinusoidal(D, M)
        path = tmp_path / "filter.csv"
        filt.export_csv(path)
        back = load_filter_csv(path)
        assert back.m == filt.m
        np.testing.assert_array_equal(back.coeffs, filt.coeffs)

    def test_raw_power_bound_validated(self):
        with pytest.raises(ValueError):
            fdss.FdssFilter(np.full(4, 2.0, dtype=complex), 4, fdss.RAW_FOURIER)
