"""Sliding-FFT analysis: window shapes, band crop, normalization,
thresholding, dump format."""

import numpy as np
import pytest

from labpulse.errors import ConfigError, SignalTooShort
from labpulse.roi import CellSignalSeries
from labpulse.spectrogram import (
    Spectrogram,
    StftConfig,
    compute_spectrogram,
    normalize_columns,
    preprocess,
    read_spectrogram,
    threshold_noise,
    tukey_window,
    write_spectrogram,
)
from labpulse.synthetic import HrTrajectory, generate_signal

from oracles import tukey_direct


class TestTukeyWindow:
    def test_shape_zero_is_rectangular(self):
        np.testing.assert_array_equal(tukey_window(4, 0.0), [1.0, 1.0, 1.0, 1.0])

    def test_shape_one_is_hann(self):
        w = tukey_window(5, 1.0)
        np.testing.assert_allclose(w, [0.0, 0.5, 1.0, 0.5, 0.0], atol=1e-15)
        np.testing.assert_allclose(w, w[::-1], atol=0)

    def test_matches_direct_formula(self):
        for shape in (0.1, 0.25, 0.5, 0.9):
            w = tukey_window(512, shape)
            np.testing.assert_allclose(w, tukey_direct(512, shape), atol=1e-12)

    def test_symmetry_and_range(self):
        for length in (16, 63, 512):
            w = tukey_window(length, 0.5)
            np.testing.assert_allclose(w, w[::-1], atol=1e-15)
            assert w.min() >= 0.0 and w.max() <= 1.0

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            tukey_window(1, 0.5)
        with pytest.raises(ValueError):
            tukey_window(8, 1.5)


class TestComputeSpectrogram:
    def test_sinusoid_argmax_is_nearest_bin(self):
        sig = generate_signal(HrTrajectory.constant(72.0, 60.0), 30.0, 60.0)
        spec = compute_spectrogram(sig, StftConfig())
        nearest = int(np.abs(spec.freq_bpm - 72.0).argmin())
        assert np.all(spec.powers.argmax(axis=0) == nearest)

    def test_column_count_and_axes(self):
        cfg = StftConfig()
        sig = np.zeros(1000)
        spec = compute_spectrogram(sig, cfg)
        assert spec.n_columns == (1000 - 512) // 4 + 1
        assert np.all((spec.freq_bpm >= 50.0) & (spec.freq_bpm <= 150.0))
        # window centers advance by stride / rate
        np.testing.assert_allclose(np.diff(spec.time_s), 4.0 / 30.0)

    def test_constant_signal_gives_zero_columns(self):
        spec = compute_spectrogram(np.full(700, 3.3), StftConfig())
        assert np.all(spec.powers == 0.0)

    def test_two_tone_thresholded_ridges(self):
        """Equal 60 and 120 BPM tones leave exactly two ridge runs per
        column, each containing the bin nearest its tone."""
        t = np.arange(1800) / 30.0
        x = np.sin(2 * np.pi * 1.0 * t) + np.sin(2 * np.pi * 2.0 * t)
        cfg = StftConfig()
        spec = threshold_noise(normalize_columns(compute_spectrogram(x, cfg)), cfg.noise_threshold)
        near60 = int(np.abs(spec.freq_bpm - 60.0).argmin())
        near120 = int(np.abs(spec.freq_bpm - 120.0).argmin())
        for col in range(spec.n_columns):
            nz = np.nonzero(spec.powers[:, col])[0]
            runs = np.split(nz, np.where(np.diff(nz) > 1)[0] + 1)
            assert len(runs) == 2
            assert near60 in runs[0] and near120 in runs[1]

    def test_time_localization(self):
        """A tone present only in the second half shows up only in
        columns whose window overlaps it."""
        n = 3000
        t = np.arange(n) / 30.0
        x = np.where(t >= 50.0, np.sin(2 * np.pi * 1.2 * t), 0.0)
        cfg = StftConfig()
        spec = compute_spectrogram(x, cfg)
        for col in range(spec.n_columns):
            start = col * cfg.stride
            if start + cfg.window_length <= 1500:
                assert np.all(spec.powers[:, col] == 0.0)
            elif start >= 1500 + 32:
                assert spec.powers[:, col].max() > 0.0

    def test_signal_too_short(self):
        with pytest.raises(SignalTooShort):
            compute_spectrogram(np.zeros(100), StftConfig())

    def test_series_rate_must_match_config(self):
        series = CellSignalSeries(0, np.zeros(600), frame_rate=25.0)
        with pytest.raises(ConfigError):
            compute_spectrogram(series, StftConfig(frame_rate=30.0))

    def test_parseval_with_documented_convention(self):
        """Forward unnormalized FFT: sum |X|^2 over all N bins equals
        N times the squared sum of the windowed samples."""
        rng = np.random.default_rng(8)
        x = rng.normal(0, 1, 512)
        seg = x - x.mean()
        windowed = seg * tukey_window(512, 0.5)
        spectrum = np.fft.fft(windowed)
        np.testing.assert_allclose(
            np.sum(np.abs(spectrum) ** 2), 512.0 * np.sum(windowed**2), rtol=1e-12
        )

    def test_determinism(self):
        sig = generate_signal(HrTrajectory.constant(90.0, 40.0), 30.0, 40.0, rng_seed=2)
        a = compute_spectrogram(sig, StftConfig())
        b = compute_spectrogram(sig, StftConfig())
        np.testing.assert_array_equal(a.powers, b.powers)


class TestNormalizeAndThreshold:
    def test_normalize_single_column(self):
        spec = Spectrogram(np.array([[2.0], [4.0], [8.0]]), np.arange(3.0), np.zeros(1))
        np.testing.assert_allclose(normalize_columns(spec).powers[:, 0], [0.25, 0.5, 1.0])

    def test_normalize_keeps_zero_columns(self):
        spec = Spectrogram(np.zeros((3, 2)), np.arange(3.0), np.arange(2.0))
        np.testing.assert_array_equal(normalize_columns(spec).powers, 0.0)

    def test_normalize_random_matrix_property(self):
        rng = np.random.default_rng(9)
        spec = Spectrogram(rng.uniform(0.01, 5.0, (8, 8)), np.arange(8.0), np.arange(8.0))
        normed = normalize_columns(spec)
        np.testing.assert_allclose(normed.powers.max(axis=0), 1.0)

    def test_threshold_keeps_boundary(self):
        spec = Spectrogram(np.array([[0.05], [0.1], [0.95]]), np.arange(3.0), np.zeros(1))
        np.testing.assert_allclose(threshold_noise(spec, 0.1).powers[:, 0], [0.0, 0.1, 0.95])

    def test_threshold_identity_when_all_above(self):
        spec = Spectrogram(np.full((4, 3), 0.5), np.arange(4.0), np.arange(3.0))
        np.testing.assert_array_equal(threshold_noise(spec, 0.1).powers, spec.powers)

    def test_threshold_matches_pointwise_oracle(self):
        rng = np.random.default_rng(10)
        values = rng.uniform(0, 1, (12, 7))
        spec = Spectrogram(values, np.arange(12.0), np.arange(7.0))
        got = threshold_noise(spec, 0.1).powers
        for k in range(12):
            for l in range(7):
                assert got[k, l] == (values[k, l] if values[k, l] >= 0.1 else 0.0)

    def test_processed_invariants_on_random_signals(self):
        """Column max exactly 1 (non-zero columns) and nothing in the
        open interval (0, threshold)."""
        rng = np.random.default_rng(11)
        cfg = StftConfig()
        for _ in range(20):
            x = rng.normal(0, 1, 800) + rng.uniform(0.5, 2) * np.sin(
                2 * np.pi * rng.uniform(1, 2) * np.arange(800) / 30.0
            )
            spec = preprocess(x, cfg)
            for col in spec.powers.T:
                if col.max() > 0:
                    assert col.max() == 1.0
                gap = (col > 0) & (col < cfg.noise_threshold)
                assert not np.any(gap)


class TestDumpFormat:
    def test_roundtrip_and_header_bytes(self, tmp_path):
        rng = np.random.default_rng(12)
        spec = Spectrogram(
            rng.uniform(0, 1, (5, 9)), np.linspace(50, 150, 5), np.arange(9) * 0.133
        )
        path = tmp_path / "dump.rpsg"
        write_spectrogram(spec, path)
        raw = path.read_bytes()
        assert raw[:4] == b"RPSG"
        assert int.from_bytes(raw[4:8], "little") == 5
        assert int.from_bytes(raw[8:12], "little") == 9
        assert len(raw) == 16 + 5 * 9 * 4
        back = read_spectrogram(path)
        np.testing.assert_allclose(back.powers, spec.powers, atol=1e-6)
        np.testing.assert_allclose(back.freq_bpm, spec.freq_bpm)
        np.testing.assert_allclose(back.time_s, spec.time_s)


class TestConfigValidation:
    def test_invalid_configs_rejected(self):
        with pytest.raises(ConfigError):
            StftConfig(stride=0)
        with pytest.raises(ConfigError):
            StftConfig(stride=600)
        with pytest.raises(ConfigError):
            StftConfig(band_low=150, band_high=50)
        with pytest.raises(ConfigError):
            StftConfig(noise_threshold=1.0)
        with pytest.raises(ConfigError):
            StftConfig(tukey_shape=2.0)
