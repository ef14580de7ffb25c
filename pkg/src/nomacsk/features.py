"""Dual-domain features: a derotated time row stacked on a PSD row."""

from __future__ import annotations

import numpy as np

NORM_EPS = 1e-8


def psd(r) -> np.ndarray:
    """Squared magnitude of the unnormalized forward DFT along the last axis."""
    r = np.asarray(r)
    if r.shape[-1] == 0:
        raise ValueError("empty input")
    spec = np.fft.fft(r, axis=-1)
    return spec.real ** 2 + spec.imag ** 2


def realify(r, dominant_tap) -> np.ndarray:
    """``Re(r * conj(tap)/|tap|)``; ``tap`` broadcasts over leading axes."""
    r = np.asarray(r)
    tap = np.asarray(dominant_tap, dtype=complex)
    mag = np.abs(tap)
    zero = mag == 0
    unit = np.divide(np.conj(tap), mag, out=np.zeros_like(tap), where=~zero)[..., None]
    if np.any(zero) and np.any(r[np.broadcast_to(zero[..., None], r.shape)] != 0):
        raise ValueError("zero dominant tap with a nonzero signal")
    return np.real(r * unit)


def build_feature(r, dominant_tap=1.0) -> np.ndarray:
    """Stack ``realify(r)`` over ``psd(r)``; shape ``(..., 2, beta)``."""
    r = np.asarray(r)
    if r.shape[-1] == 0:
        raise ValueError("empty input")
    return np.stack([realify(r, dominant_tap), psd(r)], axis=-2)


def normalize_feature(feature) -> np.ndarray:
    """Divide each row by its RMS (plus a small floor) before the network."""
    f = np.asarray(feature, dtype=np.float64)
    rms = np.sqrt(np.mean(f ** 2, axis=-1, keepdims=True))
    return f / (rms + NORM_EPS)
