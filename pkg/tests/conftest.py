"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own fast paths: the DFT is
the O(N^2) definition evaluated term by term, and the KKT checker recomputes
decision values from raw multipliers.
"""

import numpy as np
import pytest

from dfdiag.dataset import LabeledDataset, SignalSample
from dfdiag.synth import ClassSignature, SignatureSpec


def direct_dft(x):
    """O(N^2) definitional transform: X[k] = sum_n x[n] e^{-2 pi i k n / N}."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    k = np.arange(n)
    twiddle = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return twiddle @ x


def kkt_violation(kernel, y, alpha, b, c_reg):
    """Largest violation of the dual optimality conditions over all points.

    For each training point with margin m_i = y_i f(x_i):
      alpha = 0      requires m_i >= 1
      alpha = c_reg  requires m_i <= 1
      otherwise      requires m_i == 1
    Returns the maximum amount by which any condition is missed.
    """
    decision = (alpha * y) @ kernel + b
    margin = y * decision
    worst = 0.0
    bound_eps = 1e-10 * c_reg
    for i in range(y.size):
        if alpha[i] <= bound_eps:
            worst = max(worst, 1.0 - margin[i])
        elif alpha[i] >= c_reg - bound_eps:
            worst = max(worst, margin[i] - 1.0)
        else:
            worst = max(worst, abs(margin[i] - 1.0))
    return worst


def toy_dataset(n_classes=3, n_per_class=4, n_channels=2, n_points=64, seed=0):
    """Small labeled dataset with distinct per-class sinusoids plus noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_points)
    samples = []
    for c in range(n_classes):
        for k in range(n_per_class):
            base = np.sin(2 * np.pi * (c + 1) * t / n_points)
            channels = np.stack(
                [base * (1 + 0.1 * ch) + 0.01 * rng.normal(size=n_points)
                 for ch in range(n_channels)]
            )
            samples.append(
                SignalSample(
                    id=f"c{c}k{k}",
                    channels=channels,
                    sample_rate=64.0,
                    label=c,
                )
            )
    names = tuple(f"class{c}" for c in range(n_classes))
    return LabeledDataset(names, tuple(samples), provenance="synthetic")


@pytest.fixture
def small_spec():
    """Compact three-class signature spec for fast generator tests."""
    return SignatureSpec(
        classes=(
            ClassSignature("quiet", harmonics=((1.0, 1.0),)),
            ClassSignature("loud", harmonics=((1.0, 3.0),)),
            ClassSignature("buzzy", harmonics=((1.0, 1.0), (3.0, 1.5))),
        ),
        rotation_hz=16.0,
        noise_std=0.2,
        n_channels=2,
        n_points=512,
        sample_rate=512.0,
    )
