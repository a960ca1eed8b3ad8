import numpy as np
import pytest

from dfdiag.dataset import SignalSample
from dfdiag.errors import InvalidWindow, LengthError, ShapeError, SignalTooShort
from dfdiag.spectral import (
    Spectrogram,
    StftConfig,
    batch_magnitudes,
    fft_real,
    spectro_tensor,
    stft,
    tensor_norm_stats,
    window_weights,
)

from conftest import direct_dft


class TestWindow:
    def test_hamming_endpoints_n2(self):
        np.testing.assert_allclose(window_weights("hamming", 2), [0.08, 0.08])

    def test_hamming_midpoint_n3(self):
        np.testing.assert_allclose(window_weights("hamming", 3), [0.08, 1.0, 0.08])

    def test_symmetry_n256(self):
        w = window_weights("hamming", 256)
        assert np.max(np.abs(w - w[::-1])) < 1e-15

    def test_rectangular(self):
        assert np.all(window_weights("rectangular", 8) == 1.0)

    def test_too_short(self):
        with pytest.raises(InvalidWindow):
            window_weights("hamming", 1)


class TestFft:
    def test_impulse(self):
        np.testing.assert_allclose(fft_real([1, 0, 0, 0]), np.ones(4), atol=1e-12)

    def test_dc(self):
        out = fft_real([1, 1, 1, 1])
        np.testing.assert_allclose(out[0], 4.0, atol=1e-12)
        np.testing.assert_allclose(out[1:], 0.0, atol=1e-12)

    @pytest.mark.parametrize("n", [16, 256])
    def test_matches_direct_dft(self, n):
        rng = np.random.default_rng(123)
        for _ in range(20):
            x = rng.normal(size=n)
            np.testing.assert_allclose(
                fft_real(x), direct_dft(x), atol=1e-9, rtol=0
            )

    def test_linearity(self):
        rng = np.random.default_rng(5)
        x, y = rng.normal(size=128), rng.normal(size=128)
        a, b = 2.5, -1.25
        lhs = fft_real(a * x + b * y)
        rhs = a * fft_real(x) + b * fft_real(y)
        assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=64)
        spec = fft_real(x)
        for k in range(1, 32):
            assert abs(spec[k] - np.conj(spec[64 - k])) < 1e-9

    def test_non_power_of_two_rejected(self):
        with pytest.raises(LengthError):
            fft_real(np.ones(12))
        with pytest.raises(LengthError):
            fft_real(np.ones(1))


class TestStft:
    def test_zero_signal(self):
        cfg = StftConfig(window_len=16, frames=4, retained_bins=8)
        spec = stft(np.zeros(128), cfg)
        assert np.all(spec.magnitudes() == 0.0)

    def test_reference_geometry(self):
        # 10240 points with a 256-point window fit to 32 frames: hop 322,
        # 32 x 128 grid when keeping the lower half of the bins
        cfg = StftConfig(window_len=256, frames=32)
        starts = cfg.frame_starts(10240)
        assert starts[1] - starts[0] == 322
        spec = stft(np.random.default_rng(0).normal(size=10240), cfg)
        assert (spec.frames, spec.bins) == (32, 128)

    def test_explicit_hop_mode(self):
        cfg = StftConfig(window_len=256, frames=None, hop=128)
        spec = stft(np.zeros(10240), cfg)
        assert spec.frames == (10240 - 256) // 128 + 1

    def test_cosine_at_bin8_argmax(self):
        cfg = StftConfig(window_len=64, frames=8, window="rectangular", retained_bins=32)
        n = 64 * 8
        t = np.arange(n)
        x = np.cos(2 * np.pi * 8 * t / 64)
        spec = stft(x, cfg)
        for frame in spec.magnitudes():
            assert int(np.argmax(frame)) == 8

    def test_frames_match_windowed_fft(self):
        cfg = StftConfig(window_len=32, frames=5, retained_bins=16)
        rng = np.random.default_rng(9)
        x = rng.normal(size=200)
        spec = stft(x, cfg)
        w = window_weights("hamming", 32)
        for m, start in enumerate(cfg.frame_starts(x.size)):
            expected = fft_real(x[start : start + 32] * w)[:16]
            np.testing.assert_array_equal(spec.values[m], expected)

    def test_fit_frames_always_exact(self):
        for n_points in (95, 128, 300, 1000):
            cfg = StftConfig(window_len=64, frames=32)
            if n_points < 64 + 31:
                with pytest.raises(SignalTooShort):
                    cfg.frame_starts(n_points)
            else:
                assert cfg.frame_starts(n_points).size == 32

    def test_signal_too_short(self):
        cfg = StftConfig(window_len=256, frames=32)
        with pytest.raises(SignalTooShort):
            stft(np.zeros(100), cfg)

    def test_bin_frequencies(self):
        cfg = StftConfig(window_len=16, frames=2, retained_bins=8)
        spec = stft(np.zeros(64), cfg, sample_rate=160.0)
        np.testing.assert_allclose(spec.bin_frequencies, np.arange(8) * 10.0)

    def test_config_validation(self):
        with pytest.raises(LengthError):
            StftConfig(window_len=100, frames=4)
        with pytest.raises(ShapeError):
            StftConfig(window_len=16, frames=4, hop=8)
        with pytest.raises(ShapeError):
            StftConfig(window_len=16, frames=None, hop=None)
        with pytest.raises(ShapeError):
            StftConfig(window_len=16, frames=4, retained_bins=10)


class TestSpectroTensor:
    def _sample(self, n_channels, n_points, seed=0):
        rng = np.random.default_rng(seed)
        return SignalSample(
            id="s",
            channels=rng.normal(size=(n_channels, n_points)),
            sample_rate=1280.0,
            label=0,
        )

    def test_case1_style_dims(self):
        sample = self._sample(8, 10240)
        cfg = StftConfig(window_len=256, frames=32)
        tensor = spectro_tensor(sample, cfg)
        assert tensor.shape == (32, 128, 8)

    def test_case2_style_dims(self):
        sample = self._sample(3, 400)
        cfg = StftConfig(window_len=16, frames=64, retained_bins=8)
        tensor = spectro_tensor(sample, cfg)
        assert tensor.shape == (64, 8, 3)

    def test_zero_signal_log_magnitude(self):
        sample = SignalSample("z", np.zeros((2, 64)), 10.0)
        cfg = StftConfig(window_len=16, frames=4, magnitude="log1p_abs")
        tensor = spectro_tensor(sample, cfg)
        assert np.all(tensor.values == 0.0)

    def test_normalization(self):
        sample = self._sample(3, 400, seed=4)
        cfg = StftConfig(window_len=16, frames=8, magnitude="log1p_abs")
        raw = spectro_tensor(sample, cfg).values
        stack = raw[None]
        mean, std = tensor_norm_stats(stack)
        normed = spectro_tensor(sample, cfg, norm=(mean, std)).values
        np.testing.assert_allclose(normed.mean(axis=(0, 1)), 0.0, atol=1e-9)
        np.testing.assert_allclose(normed.std(axis=(0, 1)), 1.0, atol=1e-9)

    def test_batch_matches_single(self):
        sample = self._sample(2, 300, seed=8)
        cfg = StftConfig(window_len=32, frames=6)
        single = spectro_tensor(sample, cfg).values
        batched = batch_magnitudes(sample.channels[None], cfg)[0]
        np.testing.assert_array_equal(np.transpose(batched, (1, 2, 0)), single)
