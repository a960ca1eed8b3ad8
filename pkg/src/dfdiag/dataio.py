"""On-disk formats: tensor containers, dataset manifests, CSV ingestion.

Waveform tensor container ("DFD1", version 1)::

    magic   4 bytes  b"DFD1"
    version u32 LE   1
    dim0    u32 LE   n_channels
    dim1    u32 LE   n_points
    rate    f64 LE   sample rate in Hz
    data    f32 LE   n_channels * n_points values, channel-major

Spectrogram tensors reuse the container at version 2 with three dims
(frames, bins, channels) in place of the two:

    magic, version=2, frames u32, bins u32, channels u32, rate f64, data f32
    (frames-major, then bins, then channels)

A dataset on disk is a directory holding one tensor file per sample plus a
text manifest: a header naming the format version, class table and
provenance, then one line per sample (id, label index or "-", tensor
filename, origin or "-").
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset, SignalSample
from .errors import FormatError, MissingData, SchemaError

MAGIC = b"DFD1"
MANIFEST_HEADER = "DFD-MANIFEST 1"
MANIFEST_NAME = "manifest.txt"

_HEADER_V1 = struct.Struct("<4sIIId")
_HEADER_V2 = struct.Struct("<4sIIIId")


def write_waveform(path: str | os.PathLike, channels: np.ndarray, sample_rate: float) -> None:
    arr = np.ascontiguousarray(channels, dtype="<f4")
    if arr.ndim != 2:
        raise SchemaError(f"waveform tensor must be 2-d, got {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER_V1.pack(MAGIC, 1, arr.shape[0], arr.shape[1], float(sample_rate)))
        fh.write(arr.tobytes())


def read_waveform(path: str | os.PathLike) -> tuple[np.ndarray, float]:
    try:
        with open(path, "rb") as fh:
            header = fh.read(_HEADER_V1.size)
            if len(header) < _HEADER_V1.size:
                raise MissingData(f"{path}: truncated header")
            magic, version, n_channels, n_points, rate = _HEADER_V1.unpack(header)
            if magic != MAGIC:
                raise FormatError(f"{path}: bad magic {magic!r}")
            if version != 1:
                raise FormatError(f"{path}: expected version 1, got {version}")
            payload = fh.read(4 * n_channels * n_points)
    except FileNotFoundError as exc:
        raise MissingData(f"{path}: tensor file missing") from exc
    if len(payload) != 4 * n_channels * n_points:
        raise MissingData(f"{path}: truncated payload")
    data = np.frombuffer(payload, dtype="<f4").reshape(n_channels, n_points)
    return data, rate


def write_spectro(path: str | os.PathLike, values: np.ndarray, sample_rate: float) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim != 3:
        raise SchemaError(f"spectro tensor must be 3-d, got {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(
            _HEADER_V2.pack(MAGIC, 2, arr.shape[0], arr.shape[1], arr.shape[2], float(sample_rate))
        )
        fh.write(arr.tobytes())


def read_spectro(path: str | os.PathLike) -> tuple[np.ndarray, float]:
    try:
        with open(path, "rb") as fh:
            header = fh.read(_HEADER_V2.size)
            if len(header) < _HEADER_V2.size:
                raise MissingData(f"{path}: truncated header")
            magic, version, frames, bins, channels, rate = _HEADER_V2.unpack(header)
            if magic != MAGIC:
                raise FormatError(f"{path}: bad magic {magic!r}")
            if version != 2:
                raise FormatError(f"{path}: expected version 2, got {version}")
            payload = fh.read(4 * frames * bins * channels)
    except FileNotFoundError as exc:
        raise MissingData(f"{path}: tensor file missing") from exc
    if len(payload) != 4 * frames * bins * channels:
        raise MissingData(f"{path}: truncated payload")
    data = np.frombuffer(payload, dtype="<f4").reshape(frames, bins, channels)
    return data, rate


def save_dataset(ds: LabeledDataset, directory: str | os.PathLike) -> Path:
    """Write tensors plus manifest into `directory`; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in ds.class_names:
        if "," in name or "\t" in name or "\n" in name:
            raise SchemaError(f"class name {name!r} not representable in manifest")
    lines = [MANIFEST_HEADER]
    lines.append("classes\t" + ",".join(ds.class_names))
    lines.append(f"provenance\t{ds.provenance}")
    for idx, sample in enumerate(ds.samples):
        if "\t" in sample.id or "\n" in sample.id:
            raise SchemaError(f"sample id {sample.id!r} not representable in manifest")
        fname = f"sample_{idx:06d}.dfd1"
        write_waveform(directory / fname, sample.channels, sample.sample_rate)
        label = "-" if sample.label is None else str(sample.label)
        origin = sample.origin if sample.origin else "-"
        lines.append(f"{sample.id}\t{label}\t{fname}\t{origin}")
    manifest = directory / MANIFEST_NAME
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def load_dataset(manifest: str | os.PathLike) -> LabeledDataset:
    manifest = Path(manifest)
    if manifest.is_dir():
        manifest = manifest / MANIFEST_NAME
    try:
        text = manifest.read_text()
    except FileNotFoundError as exc:
        raise MissingData(f"{manifest}: manifest missing") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise FormatError(f"{manifest}: not a dataset manifest")
    class_names: tuple[str, ...] | None = None
    provenance = "real"
    samples: list[SignalSample] = []
    for line in lines[1:]:
        fields = line.split("\t")
        if fields[0] == "classes":
            class_names = tuple(fields[1].split(","))
            continue
        if fields[0] == "provenance":
            provenance = fields[1]
            continue
        if len(fields) < 3:
            raise FormatError(f"{manifest}: bad sample line {line!r}")
        sid, label_s, fname = fields[0], fields[1], fields[2]
        origin = fields[3] if len(fields) > 3 and fields[3] != "-" else None
        channels, rate = read_waveform(manifest.parent / fname)
        label = None if label_s == "-" else int(label_s)
        samples.append(
            SignalSample(id=sid, channels=channels, sample_rate=rate, label=label, origin=origin)
        )
    if class_names is None:
        raise FormatError(f"{manifest}: missing classes header line")
    return LabeledDataset(class_names, tuple(samples), provenance=provenance)


def _read_numeric_csv(path: Path) -> np.ndarray:
    """Rows = time points, columns = channels; tolerates one header line."""
    with open(path) as fh:
        first = fh.readline()
    skip = 0
    try:
        [float(tok) for tok in first.replace(",", " ").split()]
    except ValueError:
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return data.T


def convert_csv_tree(
    src: str | os.PathLike,
    sample_rate: float,
    out_dir: str | os.PathLike,
    class_names: list[str] | None = None,
) -> Path:
    """Build a dataset directory from a tree of per-sample CSV files.

    Layout: `src/<class>/<name>.csv` for labeled samples (one column per
    channel), plus optional unlabeled `src/<name>.csv` at the top level.
    Class names default to the sorted subdirectory names.
    """
    src = Path(src)
    subdirs = sorted(p.name for p in src.iterdir() if p.is_dir())
    if class_names is None:
        class_names = subdirs
    if len(class_names) < 2:
        raise SchemaError("need at least 2 class subdirectories (or --class-names)")
    index = {name: i for i, name in enumerate(class_names)}
    samples: list[SignalSample] = []
    for sub in subdirs:
        if sub not in index:
            raise SchemaError(f"subdirectory {sub!r} not in class table {class_names}")
        for csv_path in sorted((src / sub).glob("*.csv")):
            channels = _read_numeric_csv(csv_path)
            samples.append(
                SignalSample(
                    id=f"{sub}/{csv_path.stem}",
                    channels=channels,
                    sample_rate=sample_rate,
                    label=index[sub],
                    origin="real",
                )
            )
    for csv_path in sorted(src.glob("*.csv")):
        channels = _read_numeric_csv(csv_path)
        samples.append(
            SignalSample(
                id=csv_path.stem,
                channels=channels,
                sample_rate=sample_rate,
                label=None,
                origin="real",
            )
        )
    if not samples:
        raise MissingData(f"{src}: no CSV files found")
    ds = LabeledDataset(tuple(class_names), tuple(samples), provenance="real")
    return save_dataset(ds, out_dir)
