"""The 15-statistic feature pool over waveforms and spectra.

Ten time-domain statistics are computed per channel on the raw waveform (or,
optionally, on the spectrogram's time profile), five frequency-domain
statistics on the per-channel spectrum magnitude profile (mean spectrogram
magnitude over frames, or optionally a whole-signal transform).  Every
feature contributes one value per channel, so a feature combination of k
names over c channels is a k*c vector.

Dimensionless ratio features (crest/clearance/pulse/shape factor) return 0
when their denominator vanishes, keeping classifier inputs finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, SignalSample
from .errors import (
    EmptyCombination,
    EmptyInput,
    NonFinite,
    ShapeError,
    UnknownFeature,
)
from .spectral import StftConfig, batch_magnitudes, fft_real

TIME_FEATURE_IDS = (
    "Tim-Abm",
    "Tim-Var",
    "Tim-Cre",
    "Tim-Clf",
    "Tim-Kur",
    "Tim-Crf",
    "Tim-Rms",
    "Tim-Puf",
    "Tim-Ske",
    "Tim-Shf",
)
FREQ_FEATURE_IDS = ("Fre-Afr", "Fre-Cre", "Fre-Kur", "Fre-Mea", "Fre-Var")
FEATURE_IDS = TIME_FEATURE_IDS + FREQ_FEATURE_IDS

SPECTRUM_SOURCES = ("spectrogram", "fft")
TIME_SOURCES = ("waveform", "spectrogram")


def feature_domain(feature_id: str) -> str:
    if feature_id in TIME_FEATURE_IDS:
        return "time"
    if feature_id in FREQ_FEATURE_IDS:
        return "frequency"
    raise UnknownFeature(f"unknown feature id {feature_id!r}")


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


def _time_stats(x: np.ndarray) -> dict[str, np.ndarray]:
    """All 10 time-domain statistics along the last axis of x."""
    ax = -1
    absx = np.abs(x)
    abm = absx.mean(axis=ax)
    mean = x.mean(axis=ax)
    var = ((x - mean[..., None]) ** 2).mean(axis=ax)
    cre = absx.max(axis=ax)
    rms = np.sqrt((x**2).mean(axis=ax))
    return {
        "Tim-Abm": abm,
        "Tim-Var": var,
        "Tim-Cre": cre,
        "Tim-Clf": _safe_div(cre, abm**2),
        "Tim-Kur": (x**4).mean(axis=ax),
        "Tim-Crf": _safe_div(cre, rms),
        "Tim-Rms": rms,
        "Tim-Puf": _safe_div(cre, abm),
        "Tim-Ske": (x**3).mean(axis=ax),
        "Tim-Shf": _safe_div(rms, abm),
    }


def _freq_stats(spectrum: np.ndarray, omega: np.ndarray) -> dict[str, np.ndarray]:
    """All 5 frequency-domain statistics along the last axis of spectrum."""
    ax = -1
    total = spectrum.sum(axis=ax)
    mean = spectrum.mean(axis=ax)
    return {
        "Fre-Afr": _safe_div((spectrum * omega).sum(axis=ax), total),
        "Fre-Cre": np.abs(spectrum).max(axis=ax),
        "Fre-Kur": (spectrum**4).mean(axis=ax),
        "Fre-Mea": mean,
        "Fre-Var": ((spectrum - mean[..., None]) ** 2).mean(axis=ax),
    }


def time_domain_features(x: np.ndarray) -> dict[str, float]:
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("empty signal")
    if not np.all(np.isfinite(x)):
        raise NonFinite("signal contains non-finite values")
    return {k: float(v) for k, v in _time_stats(x.ravel()).items()}


def frequency_domain_features(spectrum: np.ndarray, omega: np.ndarray) -> dict[str, float]:
    spectrum = np.asarray(spectrum, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    if spectrum.size == 0:
        raise EmptyInput("empty spectrum")
    if spectrum.shape != omega.shape:
        raise ShapeError(f"spectrum {spectrum.shape} vs frequencies {omega.shape}")
    if not (np.all(np.isfinite(spectrum)) and np.all(np.isfinite(omega))):
        raise NonFinite("spectrum contains non-finite values")
    return {k: float(v) for k, v in _freq_stats(spectrum, omega).items()}


@dataclass(frozen=True)
class FeatureVector:
    """Concatenation of named per-channel feature blocks, in id order."""

    values: np.ndarray
    ids: tuple[str, ...]
    n_channels: int


@dataclass(frozen=True)
class FeaturePool:
    """All 15 features of one sample: id -> per-channel value vector."""

    values: dict[str, np.ndarray]
    n_channels: int
    stft: StftConfig

    def __post_init__(self):
        missing = set(FEATURE_IDS) - set(self.values)
        if missing:
            raise UnknownFeature(f"pool missing entries {sorted(missing)}")


def combine_features(pool: FeaturePool, ids: tuple[str, ...] | list[str]) -> FeatureVector:
    ids = tuple(ids)
    if not ids:
        raise EmptyCombination("a combination needs at least one feature")
    for fid in ids:
        if fid not in pool.values:
            raise UnknownFeature(f"unknown feature id {fid!r}")
    values = np.concatenate([pool.values[fid] for fid in ids])
    return FeatureVector(values=values, ids=ids, n_channels=pool.n_channels)


def _spectrum_profiles(
    waveforms: np.ndarray,
    cfg: StftConfig,
    sample_rate: float,
    spectrum_source: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel spectrum magnitudes (..., bins) and their frequencies."""
    if spectrum_source == "spectrogram":
        mags = batch_magnitudes(waveforms, cfg, magnitude="abs")
        omega = np.arange(cfg.bins) * sample_rate / cfg.window_len
        return mags.mean(axis=-2), omega
    if spectrum_source == "fft":
        n = waveforms.shape[-1]
        flat = waveforms.reshape(-1, n)
        spectra = np.abs(
            np.stack([fft_real(row) for row in flat])[:, : n // 2]
        ).reshape(waveforms.shape[:-1] + (n // 2,))
        omega = np.arange(n // 2) * sample_rate / n
        return spectra, omega
    raise ShapeError(f"unknown spectrum source {spectrum_source!r}")


def extract_feature_pool(
    sample: SignalSample,
    cfg: StftConfig,
    spectrum_source: str = "spectrogram",
    time_source: str = "waveform",
) -> FeaturePool:
    waveforms = sample.channels.astype(np.float64)
    spectra, omega = _spectrum_profiles(
        waveforms, cfg, sample.sample_rate, spectrum_source
    )
    if time_source == "waveform":
        time_input = waveforms
    elif time_source == "spectrogram":
        time_input = batch_magnitudes(waveforms, cfg, magnitude="abs").mean(axis=-1)
    else:
        raise ShapeError(f"unknown time source {time_source!r}")
    values = dict(_time_stats(time_input))
    values.update(_freq_stats(spectra, omega))
    return FeaturePool(values=values, n_channels=sample.n_channels, stft=cfg)


@dataclass(frozen=True)
class FeatureTable:
    """All 15 features of all samples of a dataset, as one matrix.

    Column layout groups by feature id (in FEATURE_IDS order), channels
    within each block, so selecting a combination is a column slice.
    Labels use -1 for unlabeled samples.
    """

    sample_ids: tuple[str, ...]
    labels: np.ndarray
    values: np.ndarray
    n_channels: int
    stft: StftConfig

    def columns(self, ids: tuple[str, ...] | list[str]) -> np.ndarray:
        ids = tuple(ids)
        if not ids:
            raise EmptyCombination("a combination needs at least one feature")
        blocks = []
        for fid in ids:
            if fid not in FEATURE_IDS:
                raise UnknownFeature(f"unknown feature id {fid!r}")
            j = FEATURE_IDS.index(fid) * self.n_channels
            blocks.append(self.values[:, j : j + self.n_channels])
        return np.concatenate(blocks, axis=1)

    def header(self) -> list[str]:
        return [
            f"{fid}.ch{ch}"
            for fid in FEATURE_IDS
            for ch in range(self.n_channels)
        ]


def extract_feature_table(
    ds: LabeledDataset,
    cfg: StftConfig,
    spectrum_source: str = "spectrogram",
    time_source: str = "waveform",
    block: int = 256,
) -> FeatureTable:
    """Vectorized pool extraction over a whole dataset, in sample blocks."""
    if not ds.samples:
        raise EmptyInput("cannot extract features from an empty dataset")
    n = len(ds)
    n_ch = ds.n_channels
    values = np.empty((n, len(FEATURE_IDS) * n_ch))
    labels = np.array(
        [(-1 if s.label is None else s.label) for s in ds.samples], dtype=np.int64
    )
    for start in range(0, n, block):
        chunk = ds.samples[start : start + block]
        waveforms = np.stack([s.channels for s in chunk]).astype(np.float64)
        spectra, omega = _spectrum_profiles(
            waveforms, cfg, ds.sample_rate, spectrum_source
        )
        if time_source == "waveform":
            time_input = waveforms
        elif time_source == "spectrogram":
            time_input = batch_magnitudes(waveforms, cfg, magnitude="abs").mean(axis=-1)
        else:
            raise ShapeError(f"unknown time source {time_source!r}")
        stats = dict(_time_stats(time_input))
        stats.update(_freq_stats(spectra, omega))
        for col, fid in enumerate(FEATURE_IDS):
            j = col * n_ch
            values[start : start + len(chunk), j : j + n_ch] = stats[fid]
    return FeatureTable(
        sample_ids=tuple(ds.ids()),
        labels=labels,
        values=values,
        n_channels=n_ch,
        stft=cfg,
    )


def write_feature_csv(table: FeatureTable, path) -> None:
    """One row per sample: id, label (or -), then the 15 x channels values."""
    with open(path, "w") as fh:
        fh.write("id,label," + ",".join(table.header()) + "\n")
        for i, sid in enumerate(table.sample_ids):
            label = "-" if table.labels[i] < 0 else str(int(table.labels[i]))
            row = ",".join(repr(float(v)) for v in table.values[i])
            fh.write(f"{sid},{label},{row}\n")
