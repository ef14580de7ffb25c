"""Chaotic chip generators and CSK bit mapping.

Bit 0 is carried by a Logistic orbit (r = 3.7), bit 1 by a Cubic
(Chebyshev T3) orbit. The seed is ``x_0``; ``chips[k]`` is the ``k+1``-th
iterate, so the seed itself is never transmitted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

LOGISTIC_R = 3.7
DEGENERATE_TOL = 1e-12


class MapId(enum.IntEnum):
    LOGISTIC = 0
    CUBIC = 1


class DegenerateSeedError(ValueError):
    """The orbit collapses onto 0 or ±1 within the requested length."""


@dataclass(frozen=True)
class ChipSequence:
    chips: np.ndarray
    map_id: MapId
    seed: float

    def __len__(self) -> int:
        return len(self.chips)


def _check_args(seed: float, beta: int) -> None:
    if not 0.0 < seed < 1.0:
        raise ValueError(f"seed must lie in (0, 1), got {seed}")
    if int(beta) != beta or beta < 1:
        raise ValueError(f"beta must be a positive integer, got {beta}")


def logistic_orbits(seeds: np.ndarray, beta: int) -> np.ndarray:
    """Vectorised Logistic iteration, returns shape ``(len(seeds), beta)``."""
    x = np.asarray(seeds, dtype=np.float64).copy()
    out = np.empty((x.size, beta))
    for k in range(beta):
        x = LOGISTIC_R * x * (1.0 - x)
        out[:, k] = x
    return out


def cubic_orbits(seeds: np.ndarray, beta: int) -> np.ndarray:
    x = np.asarray(seeds, dtype=np.float64).copy()
    out = np.empty((x.size, beta))
    for k in range(beta):
        x = 4.0 * x ** 3 - 3.0 * x
        out[:, k] = x
    return out


def orbits(map_ids: np.ndarray, seeds: np.ndarray, beta: int) -> np.ndarray:
    """Orbits for a mix of maps; row ``m`` uses ``map_ids[m]``."""
    map_ids = np.asarray(map_ids)
    out = np.empty((map_ids.size, beta))
    logi = map_ids == MapId.LOGISTIC
    out[logi] = logistic_orbits(np.asarray(seeds)[logi], beta)
    out[~logi] = cubic_orbits(np.asarray(seeds)[~logi], beta)
    return out


def degenerate_rows(chips: np.ndarray) -> np.ndarray:
    a = np.abs(chips)
    return np.any((a >= 1.0 - DEGENERATE_TOL) | (a <= DEGENERATE_TOL), axis=-1)


def generate_logistic(seed: float, beta: int) -> ChipSequence:
    _check_args(seed, beta)
    return ChipSequence(logistic_orbits(np.array([seed]), beta)[0], MapId.LOGISTIC, float(seed))


def generate_cubic(seed: float, beta: int) -> ChipSequence:
    _check_args(seed, beta)
    chips = cubic_orbits(np.array([seed]), beta)[0]
    if degenerate_rows(chips[None, :])[0]:
        raise DegenerateSeedError(f"cubic orbit from seed {seed} reaches 0 or ±1 within {beta} chips")
    return ChipSequence(chips, MapId.CUBIC, float(seed))


def modulate(bit: int, seed: float, beta: int) -> ChipSequence:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    return generate_logistic(seed, beta) if bit == 0 else generate_cubic(seed, beta)


def draw_seeds(rng: np.random.Generator, map_ids: np.ndarray, beta: int) -> np.ndarray:
    """Uniform seeds on (0, 1), resampled until no orbit is degenerate."""
    map_ids = np.asarray(map_ids)
    seeds = rng.random(map_ids.size)
    bad = (seeds <= 0.0) | degenerate_rows(orbits(map_ids, seeds, beta))
    while bad.any():
        seeds[bad] = rng.random(int(bad.sum()))
        idx = np.flatnonzero(bad)
        bad[idx] = (seeds[idx] <= 0.0) | degenerate_rows(orbits(map_ids[idx], seeds[idx], beta))
    return seeds


def standardize_rows(chips: np.ndarray) -> np.ndarray:
    """Zero mean, unit mean-square along the last axis."""
    chips = np.asarray(chips, dtype=np.float64)
    if chips.shape[-1] < 2:
        raise ValueError("need at least 2 chips to standardize")
    centered = chips - chips.mean(axis=-1, keepdims=True)
    rms = np.sqrt(np.mean(centered ** 2, axis=-1, keepdims=True))
    if np.any(rms <= 0.0):
        raise ValueError("zero-variance chip sequence cannot be standardized")
    return centered / rms


def standardize(seq: ChipSequence) -> ChipSequence:
    return ChipSequence(standardize_rows(seq.chips), seq.map_id, seq.seed)


def modulated_chips(bits: np.ndarray, rng: np.random.Generator, beta: int) -> tuple[np.ndarray, np.ndarray]:
    """Standardized transmit chips for an array of bits.

    Returns ``(chips, seeds)`` with ``chips.shape == bits.shape + (beta,)``.
    """
    bits = np.asarray(bits)
    flat = bits.reshape(-1)
    seeds = draw_seeds(rng, flat, beta)
    chips = standardize_rows(orbits(flat, seeds, beta))
    return chips.reshape(bits.shape + (beta,)), seeds.reshape(bits.shape)
