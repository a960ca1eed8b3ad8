"""Fault diagnosis for rotating machinery with scarce labeled samples.

The pipeline: spectrogram and statistical feature extraction, SVM candidate
training and validation-ranked selection, probability-fusion pseudo-labeling
of the unlabeled pool, and training of a compact 2D CNN on the augmented set.
"""

__version__ = "0.1.0"
