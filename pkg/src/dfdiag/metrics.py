"""Classification accuracy and the confusion matrix behind it."""

from __future__ import annotations

import numpy as np

from .errors import EmptyInput, ShapeError


def confusion_matrix(truth: np.ndarray, preds: np.ndarray, n_classes: int) -> np.ndarray:
    """counts[i, j] = samples of true class i predicted as class j."""
    truth = np.asarray(truth, dtype=np.int64)
    preds = np.asarray(preds, dtype=np.int64)
    if truth.size == 0:
        raise EmptyInput("no samples to score")
    if truth.shape != preds.shape:
        raise ShapeError(f"truth {truth.shape} vs predictions {preds.shape}")
    if truth.min() < 0 or preds.min() < 0:
        raise ShapeError("labels must be non-negative")
    if max(truth.max(), preds.max()) >= n_classes:
        raise ShapeError("label outside class table")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truth, preds), 1)
    return counts


def accuracy(preds: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of matching entries: trace of the confusion matrix over its total."""
    preds = np.asarray(preds, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if preds.size == 0:
        raise EmptyInput("no samples to score")
    if preds.shape != truth.shape:
        raise ShapeError(f"predictions {preds.shape} vs truth {truth.shape}")
    n_classes = int(max(preds.max(), truth.max())) + 1
    counts = confusion_matrix(truth, preds, n_classes)
    return float(np.trace(counts) / counts.sum())
