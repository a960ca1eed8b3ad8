import numpy as np
import pytest

from dfdiag.errors import SpecError
from dfdiag.synth import (
    ClassSignature,
    SignatureSpec,
    default_spec,
    generate_synthetic,
)

from conftest import direct_dft


def test_default_spec_generates_balanced_dataset():
    spec = default_spec()
    ds = generate_synthetic(spec, n_per_class=10, seed=42)
    assert len(ds) == 70
    assert ds.n_classes == 7
    counts = [len(v) for v in ds.by_class().values()]
    assert counts == [10] * 7
    assert ds.samples[0].channels.shape == (spec.n_channels, spec.n_points)


def test_determinism_bit_identical():
    spec = default_spec()
    a = generate_synthetic(spec, n_per_class=3, seed=7)
    b = generate_synthetic(spec, n_per_class=3, seed=7)
    for sa, sb in zip(a.samples, b.samples):
        assert sa.id == sb.id
        assert sa.label == sb.label
        assert sa.channels.tobytes() == sb.channels.tobytes()


def test_seed_changes_data():
    spec = default_spec()
    a = generate_synthetic(spec, n_per_class=2, seed=1)
    b = generate_synthetic(spec, n_per_class=2, seed=2)
    assert a.samples[0].channels.tobytes() != b.samples[0].channels.tobytes()


def test_noiseless_single_harmonic_peaks_at_configured_bin():
    # one pure tone at 4x a 16 Hz rotation with a 1024-point window at
    # 1024 Hz: the spectrum magnitude must peak exactly at bin 64
    spec = SignatureSpec(
        classes=(
            ClassSignature("tone", harmonics=((4.0, 1.0),)),
            ClassSignature("other", harmonics=((2.0, 1.0),)),
        ),
        rotation_hz=16.0,
        noise_std=0.0,
        n_channels=2,
        n_points=1024,
        sample_rate=1024.0,
    )
    ds = generate_synthetic(spec, n_per_class=3, seed=11)
    for sample in ds.samples:
        expected_bin = 64 if sample.label == 0 else 32
        for ch in range(spec.n_channels):
            mags = np.abs(direct_dft(sample.channels[ch].astype(np.float64)))
            assert int(np.argmax(mags[:512])) == expected_bin


def test_degenerate_classes_rejected():
    dup = ClassSignature("a", harmonics=((1.0, 2.0),))
    dup2 = ClassSignature("b", harmonics=((1.0, 2.0),))
    spec = SignatureSpec(classes=(dup, dup2))
    with pytest.raises(SpecError):
        spec.validate()


def test_harmonic_above_nyquist_rejected():
    spec = SignatureSpec(
        classes=(
            ClassSignature("a", harmonics=((100.0, 1.0),)),
            ClassSignature("b", harmonics=((1.0, 1.0),)),
        ),
        rotation_hz=25.0,
        sample_rate=1280.0,
    )
    with pytest.raises(SpecError):
        spec.validate()


def test_bad_n_per_class():
    with pytest.raises(SpecError):
        generate_synthetic(default_spec(), n_per_class=0, seed=0)
