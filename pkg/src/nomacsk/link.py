"""Uplink transmission of one bit per vehicle, vectorised over trials."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import chaos, channels as chn
from .noma import PowerAllocation, noise_density, power_coefficients


@dataclass
class TxBlock:
    bits: np.ndarray                 # (M, N) int8
    chips: np.ndarray                # (M, N, beta) standardized, before power scaling
    seeds: np.ndarray                # (M, N)
    channels: list[chn.ChannelBatch]  # one batch per vehicle
    received: np.ndarray             # (M, beta) complex
    n0: np.ndarray                   # (M,)
    snr_db: np.ndarray               # (M,)
    alloc: PowerAllocation

    def __len__(self) -> int:
        return self.bits.shape[0]


def draw_channels(cfg, rng: np.random.Generator, size: int) -> list[chn.ChannelBatch]:
    return [chn.draw_batch(cfg.scenario, rng, size, vehicle=i + 1, beta=cfg.beta,
                           rayleigh_profiles=cfg.rayleigh_profiles)
            for i in range(cfg.n_vehicles)]


def receive(chips: np.ndarray, alloc: PowerAllocation, channels: list[chn.ChannelBatch],
            n0: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Superpose ``h_i * sqrt(alpha_i P) * s_i`` over vehicles and add noise."""
    amps = alloc.amplitudes()
    r = np.zeros((chips.shape[0], chips.shape[2]), dtype=complex)
    for i, ch in enumerate(channels):
        r += amps[i] * chn.apply_channel_batch(chips[:, i, :], ch)
    return chn.add_awgn(r, n0, rng)


def transmit_block(cfg, rng: np.random.Generator, size: int, snr_db) -> TxBlock:
    """Draw bits, chaotic chips, channels and noise for ``size`` trials.

    ``cfg`` needs ``n_vehicles``, ``beta``, ``scenario``, ``rayleigh_profiles``
    and ``reference_power``; ``snr_db`` is a scalar Eb/N0 or one per trial.
    """
    n, beta = cfg.n_vehicles, cfg.beta
    alloc = power_coefficients(n, cfg.reference_power)
    bits = rng.integers(0, 2, (size, n)).astype(np.int8)
    chips, seeds = chaos.modulated_chips(bits, rng, beta)
    channels = draw_channels(cfg, rng, size)
    snr = np.broadcast_to(np.asarray(snr_db, dtype=float), (size,)).copy()
    n0 = noise_density(snr, beta, n, cfg.reference_power)
    r = receive(chips, alloc, channels, n0, rng)
    return TxBlock(bits, chips, seeds, channels, r, n0, snr, alloc)
