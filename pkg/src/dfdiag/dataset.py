"""Dataset model and label-level operations.

A :class:`SignalSample` is a multi-channel time-domain waveform; a
:class:`LabeledDataset` is a homogeneous collection of them plus the class
name table.  All values are immutable after construction (waveform arrays are
marked read-only), so datasets can be shared freely across workers.

Seeded operations (subsampling, splitting, label noise) are pure functions of
their inputs and the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClassStarved,
    EmptyInput,
    InvalidFraction,
    NonFinite,
    SchemaError,
    ShapeError,
)

PROVENANCES = ("real", "synthetic", "quasi")


def _seeded_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent deterministic stream for (seed, purpose...)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *stream]))


@dataclass(frozen=True)
class SignalSample:
    """One multi-channel waveform, optionally labeled.

    channels has shape (n_channels, n_points); label is a class index into
    the owning dataset's class table, or None for unlabeled samples.  origin
    records which kind of dataset the sample came from once datasets of mixed
    provenance are merged.
    """

    id: str
    channels: np.ndarray
    sample_rate: float
    label: int | None = None
    origin: str | None = None

    def __post_init__(self):
        # float32 is the storage dtype of the on-disk tensor container;
        # keeping it in memory makes save/load round-trips bit-exact.
        arr = np.asarray(self.channels, dtype=np.float32)
        if arr.ndim != 2:
            raise ShapeError(f"channels must be 2-d, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise ShapeError(f"need >=1 channel and >=2 points, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFinite(f"sample {self.id!r} contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "channels", arr)
        if self.sample_rate <= 0:
            raise ShapeError("sample_rate must be positive")

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_points(self) -> int:
        return self.channels.shape[1]

    def with_label(self, label: int | None) -> "SignalSample":
        return replace(self, label=label)


@dataclass(frozen=True)
class LabeledDataset:
    """Homogeneous collection of samples plus the class name table.

    All samples share channel count, length, and sample rate; ids are unique.
    Labels may be None (unlabeled pool).  provenance marks how the labels came
    to be: measured ("real"), generated ("synthetic"), or predicted ("quasi").
    """

    class_names: tuple[str, ...]
    samples: tuple[SignalSample, ...]
    provenance: str = "synthetic"

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.class_names) < 2:
            raise SchemaError("need at least 2 classes")
        if self.provenance not in PROVENANCES:
            raise SchemaError(f"unknown provenance {self.provenance!r}")
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise SchemaError("sample ids are not unique")
        if self.samples:
            first = self.samples[0]
            for s in self.samples:
                if (
                    s.n_channels != first.n_channels
                    or s.n_points != first.n_points
                    or s.sample_rate != first.sample_rate
                ):
                    raise SchemaError(f"sample {s.id!r} disagrees on shape or rate")
        for s in self.samples:
            if s.label is not None and not (0 <= s.label < len(self.class_names)):
                raise SchemaError(f"sample {s.id!r} has label outside class table")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_channels(self) -> int:
        if not self.samples:
            raise EmptyInput("empty dataset has no channel count")
        return self.samples[0].n_channels

    @property
    def n_points(self) -> int:
        if not self.samples:
            raise EmptyInput("empty dataset has no length")
        return self.samples[0].n_points

    @property
    def sample_rate(self) -> float:
        if not self.samples:
            raise EmptyInput("empty dataset has no sample rate")
        return self.samples[0].sample_rate

    def ids(self) -> list[str]:
        return [s.id for s in self.samples]

    def labels(self) -> np.ndarray:
        """Label vector; raises if any sample is unlabeled."""
        out = np.empty(len(self.samples), dtype=np.int64)
        for i, s in enumerate(self.samples):
            if s.label is None:
                raise EmptyInput(f"sample {s.id!r} is unlabeled")
            out[i] = s.label
        return out

    def by_class(self) -> dict[int, list[int]]:
        """Map label -> positions of its samples (unlabeled samples skipped)."""
        out: dict[int, list[int]] = {c: [] for c in range(self.n_classes)}
        for i, s in enumerate(self.samples):
            if s.label is not None:
                out[s.label].append(i)
        return out

    def subset(self, positions: Iterable[int]) -> "LabeledDataset":
        picked = tuple(self.samples[i] for i in positions)
        return LabeledDataset(self.class_names, picked, self.provenance)

    def without_ids(self, ids: Iterable[str]) -> "LabeledDataset":
        drop = set(ids)
        keep = tuple(s for s in self.samples if s.id not in drop)
        return LabeledDataset(self.class_names, keep, self.provenance)

    def with_samples(self, samples: Sequence[SignalSample]) -> "LabeledDataset":
        return LabeledDataset(self.class_names, tuple(samples), self.provenance)


@dataclass(frozen=True)
class DatasetSplit:
    """Disjoint train/val partition of a source dataset."""

    train: LabeledDataset
    val: LabeledDataset
    seed: int = 0

    def __post_init__(self):
        overlap = set(self.train.ids()) & set(self.val.ids())
        if overlap:
            raise SchemaError(f"train/val share ids: {sorted(overlap)[:3]}")


def check_same_schema(a: LabeledDataset, b: LabeledDataset) -> None:
    if a.class_names != b.class_names:
        raise SchemaError("class tables differ")
    if not a.samples or not b.samples:
        return
    if (
        a.n_channels != b.n_channels
        or a.n_points != b.n_points
        or a.sample_rate != b.sample_rate
    ):
        raise SchemaError("sample geometry differs between datasets")


def stratified_subsample(
    ds: LabeledDataset, fraction: float, seed: int
) -> LabeledDataset:
    """Keep floor(fraction * per-class count) samples of every class.

    The floor is taken with a tiny tolerance so that decimal fractions typed
    by a user (0.06 of 300 -> 18) are not truncated by float representation.
    """
    if not (0.0 < fraction <= 1.0):
        raise InvalidFraction(f"fraction must be in (0, 1], got {fraction}")
    groups = ds.by_class()
    keep: list[int] = []
    for label in sorted(groups):
        members = groups[label]
        if not members:
            continue
        count = int(np.floor(fraction * len(members) + 1e-9))
        if count < 1:
            raise ClassStarved(
                f"fraction {fraction} keeps no samples of class "
                f"{ds.class_names[label]!r} ({len(members)} available)"
            )
        rng = _seeded_rng(seed, 101, label)
        picked = rng.permutation(len(members))[:count]
        keep.extend(members[i] for i in sorted(picked))
    return ds.subset(sorted(keep))


def split_labeled(
    ds: LabeledDataset, val_fraction: float, seed: int
) -> DatasetSplit:
    """Stratified train/val split; per-class val count = round-half-up."""
    if not (0.0 < val_fraction < 1.0):
        raise InvalidFraction(f"val_fraction must be in (0, 1), got {val_fraction}")
    groups = ds.by_class()
    val_pos: list[int] = []
    train_pos: list[int] = []
    for label in sorted(groups):
        members = groups[label]
        if not members:
            continue
        if len(members) < 2:
            raise ClassStarved(
                f"class {ds.class_names[label]!r} has fewer than 2 samples"
            )
        n_val = int(np.floor(val_fraction * len(members) + 0.5))
        n_val = min(max(n_val, 1), len(members) - 1)
        rng = _seeded_rng(seed, 202, label)
        order = rng.permutation(len(members))
        val_pos.extend(members[i] for i in order[:n_val])
        train_pos.extend(members[i] for i in order[n_val:])
    return DatasetSplit(
        train=ds.subset(sorted(train_pos)),
        val=ds.subset(sorted(val_pos)),
        seed=seed,
    )


def _noise_plan(
    n: int, n_classes: int, fraction: float, seed: int
) -> tuple[list[int], np.ndarray]:
    """Positions to relabel (round(fraction*n) of them) and their new labels."""
    if not (0.0 <= fraction <= 1.0):
        raise InvalidFraction(f"noise fraction must be in [0, 1], got {fraction}")
    n_noisy = int(np.floor(fraction * n + 0.5))
    if n_noisy == 0:
        return [], np.empty(0, dtype=np.int64)
    rng = _seeded_rng(seed, 303)
    positions = sorted(rng.permutation(n)[:n_noisy].tolist())
    new_labels = rng.integers(0, n_classes, size=n_noisy)
    return positions, new_labels


def label_noise_ids(ds: LabeledDataset, fraction: float, seed: int) -> list[str]:
    """Ids whose labels inject_label_noise(ds, fraction, seed) would redraw."""
    positions, _ = _noise_plan(len(ds), ds.n_classes, fraction, seed)
    return [ds.samples[p].id for p in positions]


def inject_label_noise(
    ds: LabeledDataset, fraction: float, seed: int
) -> LabeledDataset:
    """Redraw the labels of round(fraction * |ds|) samples uniformly over all classes.

    Waveforms are untouched (the arrays are shared, not copied).  A redrawn
    label may coincide with the original one.
    """
    positions, new_labels = _noise_plan(len(ds), ds.n_classes, fraction, seed)
    if not positions:
        return ds
    samples = list(ds.samples)
    for pos, label in zip(positions, new_labels):
        samples[pos] = samples[pos].with_label(int(label))
    return ds.with_samples(samples)
