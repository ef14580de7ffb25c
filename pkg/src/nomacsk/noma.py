"""Power-domain superposition at the transmitter side."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class PowerAllocation:
    coefficients: tuple[Fraction, ...]
    reference_power: float = 1.0

    @property
    def n_vehicles(self) -> int:
        return len(self.coefficients)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([float(a) for a in self.coefficients])

    def amplitudes(self) -> np.ndarray:
        """Per-vehicle amplitude ``sqrt(alpha_i * P)``."""
        return np.sqrt(self.alphas * self.reference_power)


def power_coefficients(n_vehicles: int, reference_power: float = 1.0) -> PowerAllocation:
    """``alpha_i = 2^(N-i) / sum_j 2^(N-j)``; vehicle 1 (weakest channel) gets the most."""
    if int(n_vehicles) != n_vehicles or n_vehicles < 1:
        raise ValueError(f"n_vehicles must be a positive integer, got {n_vehicles}")
    if reference_power <= 0:
        raise ValueError("reference power must be positive")
    n = int(n_vehicles)
    total = sum(2 ** (n - j) for j in range(1, n + 1))
    coeffs = tuple(Fraction(2 ** (n - i), total) for i in range(1, n + 1))
    return PowerAllocation(coeffs, float(reference_power))


def scale_signal(chips, alpha: float, p: float) -> np.ndarray:
    if p <= 0:
        raise ValueError("reference power must be positive")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    chips = chips.chips if hasattr(chips, "chips") else chips
    return np.sqrt(alpha * p) * np.asarray(chips)


def superpose(signals) -> np.ndarray:
    """Element-wise sum of per-vehicle chip vectors."""
    signals = [np.asarray(s) for s in signals]
    if not signals:
        raise ValueError("nothing to superpose")
    n = signals[0].shape
    for s in signals[1:]:
        if s.shape != n:
            raise ValueError(f"length mismatch: {s.shape} vs {n}")
    return np.sum(signals, axis=0)


def bit_energy(beta: int, n_vehicles: int, reference_power: float = 1.0) -> float:
    """Energy per information bit of the composite signal, ``P*beta/N``."""
    return reference_power * beta / n_vehicles


def noise_density(ebn0_db, beta: int, n_vehicles: int, reference_power: float = 1.0):
    """Per-sample complex noise variance ``N0`` for a given Eb/N0 in dB."""
    return bit_energy(beta, n_vehicles, reference_power) / 10.0 ** (np.asarray(ebn0_db) / 10.0)
