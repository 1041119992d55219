"""Noise-information spectral gap of an additive-noise private PCA mechanism."""

__version__ = "0.1.0"
