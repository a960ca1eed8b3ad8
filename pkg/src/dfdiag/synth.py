"""Seeded synthetic vibration-signal generator.

Produces balanced labeled datasets whose classes mimic typical rotating-
machinery conditions: shaft-harmonic unbalance of increasing severity,
broken-part signatures with extra harmonics and amplitude modulation, and
looseness-style periodic impacts.  Signals are sums of rotation-frequency
harmonics, an optional decaying impulse train, optional amplitude modulation,
and white Gaussian noise, rendered per channel with channel-specific phase
lags and gains.

Generation is a pure function of (spec, n_per_class, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, SignalSample, _seeded_rng
from .errors import SpecError

# Per-sample variability: uniform amplitude jitter and random phases make
# samples of one class distinct without moving class centroids.
_AMPLITUDE_JITTER = 0.06
_IMPULSE_DECAY_SAMPLES = 24.0


@dataclass(frozen=True)
class ClassSignature:
    """Spectral fingerprint of one machine condition.

    harmonics: (multiple of rotation frequency, amplitude) pairs.
    impulse_rate_hz / impulse_amplitude: decaying impact train, 0 = absent.
    am_depth: depth of amplitude modulation at the rotation frequency.
    """

    name: str
    harmonics: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
    impulse_rate_hz: float = 0.0
    impulse_amplitude: float = 0.0
    am_depth: float = 0.0

    def fingerprint(self) -> tuple:
        return (
            tuple(sorted(self.harmonics)),
            round(self.impulse_rate_hz, 9),
            round(self.impulse_amplitude, 9),
            round(self.am_depth, 9),
        )


@dataclass(frozen=True)
class SignatureSpec:
    """Full recipe for a synthetic multi-class dataset."""

    classes: tuple[ClassSignature, ...]
    rotation_hz: float = 25.0
    noise_std: float = 0.5
    n_channels: int = 3
    n_points: int = 2048
    sample_rate: float = 1280.0

    def validate(self) -> None:
        if len(self.classes) < 2:
            raise SpecError("need at least 2 classes")
        if not (0 < self.rotation_hz < self.sample_rate / 2):
            raise SpecError("rotation frequency must sit below Nyquist")
        if self.noise_std < 0:
            raise SpecError("noise_std must be >= 0")
        if self.n_channels < 1 or self.n_points < 2:
            raise SpecError("need >=1 channel and >=2 points")
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise SpecError("class names must be unique")
        for c in self.classes:
            for mult, amp in c.harmonics:
                if amp < 0:
                    raise SpecError(f"negative amplitude in class {c.name!r}")
                if amp > 0 and mult * self.rotation_hz >= self.sample_rate / 2:
                    raise SpecError(
                        f"harmonic {mult}x of class {c.name!r} is above Nyquist"
                    )
            if c.impulse_amplitude < 0 or c.impulse_rate_hz < 0:
                raise SpecError(f"negative impulse term in class {c.name!r}")
            if c.am_depth < 0:
                raise SpecError(f"negative AM depth in class {c.name!r}")
        seen: dict[tuple, str] = {}
        for c in self.classes:
            fp = c.fingerprint()
            if fp in seen:
                raise SpecError(
                    f"classes {seen[fp]!r} and {c.name!r} are indistinguishable"
                )
            seen[fp] = c.name

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)


def default_spec() -> SignatureSpec:
    """Seven conditions: normal, four unbalance grades, a broken rotating part,
    and pedestal looseness.  The minor unbalance grade sits deliberately close
    to the normal condition."""
    return SignatureSpec(
        classes=(
            ClassSignature("normal", harmonics=((1.0, 1.0),)),
            ClassSignature("unbalance-1", harmonics=((1.0, 1.35),)),
            ClassSignature("unbalance-3", harmonics=((1.0, 1.9),)),
            ClassSignature("unbalance-5", harmonics=((1.0, 2.8),)),
            ClassSignature("unbalance-7", harmonics=((1.0, 4.0),)),
            ClassSignature(
                "pan-break",
                harmonics=((1.0, 1.0), (2.0, 0.85), (3.0, 0.55)),
                am_depth=0.4,
            ),
            ClassSignature(
                "looseness",
                harmonics=((1.0, 1.0), (0.5, 0.6)),
                impulse_rate_hz=12.5,
                impulse_amplitude=2.2,
            ),
        ),
    )


def _impulse_train(
    rng: np.random.Generator, n_points: int, sample_rate: float, rate_hz: float
) -> np.ndarray:
    """Unit impulse train at the given rate with a random start offset,
    convolved with an exponential decay kernel."""
    period = sample_rate / rate_hz
    deltas = np.zeros(n_points)
    start = rng.uniform(0.0, period)
    positions = np.arange(start, n_points, period).astype(int)
    deltas[positions[positions < n_points]] = 1.0
    kernel_len = int(min(n_points, 6 * _IMPULSE_DECAY_SAMPLES))
    kernel = np.exp(-np.arange(kernel_len) / _IMPULSE_DECAY_SAMPLES)
    return np.convolve(deltas, kernel)[:n_points]


def _render_sample(
    spec: SignatureSpec, sig: ClassSignature, rng: np.random.Generator
) -> np.ndarray:
    t = np.arange(spec.n_points) / spec.sample_rate
    channels = np.empty((spec.n_channels, spec.n_points))

    gains = 1.0 - 0.12 * np.arange(spec.n_channels) / max(spec.n_channels - 1, 1)
    lags = 2.0 * np.pi * np.arange(spec.n_channels) / max(spec.n_channels, 1)

    harmonic_phases = rng.uniform(0.0, 2.0 * np.pi, size=len(sig.harmonics))
    jitter = 1.0 + rng.uniform(-_AMPLITUDE_JITTER, _AMPLITUDE_JITTER)
    am_phase = rng.uniform(0.0, 2.0 * np.pi)

    impulses = None
    if sig.impulse_amplitude > 0 and sig.impulse_rate_hz > 0:
        impulses = sig.impulse_amplitude * _impulse_train(
            rng, spec.n_points, spec.sample_rate, sig.impulse_rate_hz
        )

    for ch in range(spec.n_channels):
        tone = np.zeros(spec.n_points)
        for (mult, amp), phase in zip(sig.harmonics, harmonic_phases):
            if amp == 0:
                continue
            omega = 2.0 * np.pi * mult * spec.rotation_hz
            tone += amp * np.sin(omega * t + phase + lags[ch] * mult)
        if sig.am_depth > 0:
            tone *= 1.0 + sig.am_depth * np.sin(
                2.0 * np.pi * spec.rotation_hz * t + am_phase
            )
        x = jitter * gains[ch] * tone
        if impulses is not None:
            x = x + gains[ch] * impulses
        x = x + rng.normal(0.0, spec.noise_std, size=spec.n_points)
        channels[ch] = x
    return channels


def generate_synthetic(
    spec: SignatureSpec, n_per_class: int, seed: int
) -> LabeledDataset:
    """Balanced dataset of len(spec.classes) * n_per_class samples."""
    spec.validate()
    if n_per_class < 1:
        raise SpecError("n_per_class must be >= 1")
    samples: list[SignalSample] = []
    for label, sig in enumerate(spec.classes):
        for k in range(n_per_class):
            rng = _seeded_rng(seed, 7, label, k)
            channels = _render_sample(spec, sig, rng)
            samples.append(
                SignalSample(
                    id=f"{sig.name}-{k:04d}",
                    channels=channels,
                    sample_rate=spec.sample_rate,
                    label=label,
                    origin="synthetic",
                )
            )
    return LabeledDataset(spec.class_names, tuple(samples), provenance="synthetic")
