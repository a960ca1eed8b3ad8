"""Windowing, FFT, and spectrogram computation.

The transform is an iterative radix-2 decimation-in-time FFT, vectorized over
a batch axis so whole datasets of frames go through numpy in one pass.  The
short-time transform slides a window over the signal; the hop is either given
explicitly or derived so that exactly the requested number of frames fits
("fit-frames" mode, hop = floor((L - N) / (T - 1))).

Spectrogram grids are (frames, bins); per-sample tensors for the CNN stack
channels last: (frames, bins, channels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SignalSample
from .errors import InvalidWindow, LengthError, ShapeError, SignalTooShort

WINDOW_KINDS = ("hamming", "rectangular")
MAGNITUDE_MODES = ("abs", "log1p_abs")


def window_weights(kind: str, n: int) -> np.ndarray:
    """Symmetric window of length n; hamming = 0.54 - 0.46 cos(2 pi k/(n-1))."""
    if n < 2:
        raise InvalidWindow(f"window length must be >= 2, got {n}")
    if kind == "rectangular":
        return np.ones(n)
    if kind == "hamming":
        k = np.arange(n)
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / (n - 1))
    raise InvalidWindow(f"unknown window kind {kind!r}")


def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _fft_batched(x: np.ndarray) -> np.ndarray:
    """Radix-2 DIT over the last axis of a (batch..., n) array."""
    n = x.shape[-1]
    if n < 2 or n & (n - 1):
        raise LengthError(f"transform length must be a power of two >= 2, got {n}")
    y = np.asarray(x, dtype=np.complex128)[..., _bit_reversal(n)]
    lead = y.shape[:-1]
    m = 2
    while m <= n:
        half = m // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / m)
        y = y.reshape(lead + (n // m, m))
        even = y[..., :half]
        odd = y[..., half:] * twiddle
        y = np.concatenate((even + odd, even - odd), axis=-1)
        m *= 2
    return y.reshape(lead + (n,))


def fft_real(x: np.ndarray) -> np.ndarray:
    """Full complex spectrum X[k] = sum_n x[n] e^{-2 pi i k n / N} of a real vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-d signal, got shape {x.shape}")
    return _fft_batched(x)


@dataclass(frozen=True)
class StftConfig:
    """Framing and windowing parameters.

    Exactly one of `hop` (explicit hop) and `frames` (fit-frames: derive the
    hop so the signal yields exactly this many frames) must be set.
    retained_bins defaults to window_len // 2, dropping Nyquist.
    """

    window_len: int = 256
    frames: int | None = 32
    hop: int | None = None
    window: str = "hamming"
    retained_bins: int | None = None
    magnitude: str = "abs"

    def __post_init__(self):
        n = self.window_len
        if n < 2 or n & (n - 1):
            raise LengthError(f"window_len must be a power of two >= 2, got {n}")
        if (self.hop is None) == (self.frames is None):
            raise ShapeError("set exactly one of hop and frames")
        if self.hop is not None and self.hop < 1:
            raise ShapeError("hop must be >= 1")
        if self.frames is not None and self.frames < 2:
            raise ShapeError("fit-frames needs frames >= 2")
        if self.window not in WINDOW_KINDS:
            raise InvalidWindow(f"unknown window kind {self.window!r}")
        if self.magnitude not in MAGNITUDE_MODES:
            raise ShapeError(f"unknown magnitude mode {self.magnitude!r}")
        if self.bins > n // 2 + 1:
            raise ShapeError(f"retained_bins must be <= {n // 2 + 1}")

    @property
    def bins(self) -> int:
        return self.window_len // 2 if self.retained_bins is None else self.retained_bins

    def frame_starts(self, n_points: int) -> np.ndarray:
        n = self.window_len
        if self.frames is not None:
            if n_points < n + (self.frames - 1):
                raise SignalTooShort(
                    f"fit-frames needs >= {n + self.frames - 1} points, got {n_points}"
                )
            hop = (n_points - n) // (self.frames - 1)
            return np.arange(self.frames) * hop
        if n_points < n:
            raise SignalTooShort(f"signal of {n_points} points shorter than window {n}")
        count = (n_points - n) // self.hop + 1
        return np.arange(count) * self.hop


@dataclass(frozen=True)
class Spectrogram:
    """Complex time-frequency grid of one channel: values[frame, bin]."""

    values: np.ndarray
    bin_frequencies: np.ndarray

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def bins(self) -> int:
        return self.values.shape[1]

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class SpectroTensor:
    """Real-valued CNN input: values[frame, bin, channel]."""

    values: np.ndarray
    bin_frequencies: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape


def _frame_signal(x: np.ndarray, starts: np.ndarray, window: np.ndarray) -> np.ndarray:
    idx = starts[:, None] + np.arange(window.size)[None, :]
    return x[..., idx] * window


def stft(x: np.ndarray, cfg: StftConfig, sample_rate: float = 1.0) -> Spectrogram:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1-d signal, got shape {x.shape}")
    starts = cfg.frame_starts(x.size)
    window = window_weights(cfg.window, cfg.window_len)
    spectra = _fft_batched(_frame_signal(x, starts, window))[:, : cfg.bins]
    freqs = np.arange(cfg.bins) * sample_rate / cfg.window_len
    return Spectrogram(values=spectra, bin_frequencies=freqs)


def _apply_magnitude(values: np.ndarray, mode: str) -> np.ndarray:
    mags = np.abs(values)
    if mode == "log1p_abs":
        return np.log1p(mags)
    return mags


def batch_magnitudes(
    waveforms: np.ndarray, cfg: StftConfig, magnitude: str | None = None
) -> np.ndarray:
    """Spectrogram magnitudes for a stack of signals.

    waveforms: (..., n_points) real array; returns (..., frames, bins).
    Used both for CNN tensor assembly and for dataset-level feature
    extraction, where the leading axes are (samples, channels).
    """
    waveforms = np.asarray(waveforms, dtype=np.float64)
    starts = cfg.frame_starts(waveforms.shape[-1])
    window = window_weights(cfg.window, cfg.window_len)
    spectra = _fft_batched(_frame_signal(waveforms, starts, window))[..., : cfg.bins]
    return _apply_magnitude(spectra, magnitude or cfg.magnitude)


def spectro_tensor(
    sample: SignalSample,
    cfg: StftConfig,
    norm: tuple[np.ndarray, np.ndarray] | None = None,
) -> SpectroTensor:
    """Per-channel spectrogram magnitudes stacked channel-last.

    norm, when given, is per-channel (mean, std) from the training set; the
    tensor is standardized with it.
    """
    mags = batch_magnitudes(sample.channels, cfg)  # (channels, frames, bins)
    values = np.transpose(mags, (1, 2, 0))
    if norm is not None:
        mean, std = norm
        if mean.shape[0] != values.shape[2] or std.shape[0] != values.shape[2]:
            raise ShapeError("normalization stats do not match channel count")
        values = (values - mean[None, None, :]) / std[None, None, :]
    freqs = np.arange(cfg.bins) * sample.sample_rate / cfg.window_len
    return SpectroTensor(values=values, bin_frequencies=freqs)


def tensor_norm_stats(tensors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean/std over a (samples, frames, bins, channels) stack.

    Zero-variance channels get std 1 so standardization stays finite.
    """
    mean = tensors.mean(axis=(0, 1, 2))
    std = tensors.std(axis=(0, 1, 2))
    std = np.where(std > 0, std, 1.0)
    return mean, std
