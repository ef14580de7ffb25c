"""Successive interference cancellation around the learned demodulator.

Stages run in decreasing power order. After each decision the receiver
regenerates a chaotic sequence of the decided map from a *fresh* random
seed, passes it through its view of that vehicle's channel, scales it by
``sqrt(alpha_i P)`` and subtracts it. Because the seed is fresh, the
subtraction removes interference only in a statistical sense.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import chaos, channels as chn
from .features import build_feature
from .noma import PowerAllocation

Demod = Callable[[np.ndarray], np.ndarray]


@dataclass
class SicStage:
    residual: np.ndarray
    feature: np.ndarray
    bit: np.ndarray
    recon_seed: Optional[np.ndarray] = None


@dataclass
class SicTrace:
    stages: list[SicStage] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.stages)


def reconstruct(bits: np.ndarray, rng: np.random.Generator, beta: int) -> tuple[np.ndarray, np.ndarray]:
    """Standardized chips of the decided maps, each from a fresh seed."""
    return chaos.modulated_chips(np.asarray(bits), rng, beta)


def cancel(residual: np.ndarray, chips_hat: np.ndarray, amplitude: float,
           channel: chn.ChannelBatch) -> np.ndarray:
    """``r - h * sqrt(alpha P) * s_hat`` for a batch of residuals."""
    return residual - amplitude * chn.apply_channel_batch(chips_hat, channel)


def receiver_view(channels: list[chn.ChannelBatch], csi_rho: float,
                  rng: np.random.Generator) -> list[chn.ChannelBatch]:
    return [chn.degrade_batch(ch, csi_rho, rng) for ch in channels]


def sic_receive_batch(received: np.ndarray, alloc: PowerAllocation, channels: list[chn.ChannelBatch],
                      csi_rho: float, demod: Demod, rng: np.random.Generator,
                      keep_trace: bool = False) -> tuple[np.ndarray, Optional[SicTrace]]:
    """Decode all vehicles for a batch of received vectors.

    ``channels`` are the true realizations; the receiver works with a view
    degraded by ``csi_rho`` (identical when ``csi_rho == 1``).
    """
    received = np.asarray(received)
    n = alloc.n_vehicles
    if len(channels) != n:
        raise ValueError(f"{len(channels)} channel batches for {n} vehicles")
    if received.ndim != 2:
        raise ValueError("received must be (trials, beta)")
    for ch in channels:
        if len(ch) != received.shape[0]:
            raise ValueError("channel batch size does not match received batch")
    beta = received.shape[1]
    view = receiver_view(channels, csi_rho, rng)
    amps = alloc.amplitudes()
    residual = received
    bits = np.zeros((received.shape[0], n), dtype=np.int8)
    trace = SicTrace() if keep_trace else None
    for i in range(n):
        feature = build_feature(residual, chn.dominant_taps(view[i]))
        bits[:, i] = demod(feature)
        seed = None
        if i < n - 1:
            chips_hat, seed = reconstruct(bits[:, i], rng, beta)
            nxt = cancel(residual, chips_hat, amps[i], view[i])
        if trace is not None:
            trace.stages.append(SicStage(residual, feature, bits[:, i].copy(), seed))
        if i < n - 1:
            residual = nxt
    return bits, trace


def sic_receive(r: np.ndarray, alloc: PowerAllocation, channels: list[chn.ChannelRealization],
                csi_rho: float, model: Demod, rng: np.random.Generator) -> tuple[list[int], SicTrace]:
    """Single received vector; returns bits and a per-stage trace."""
    r = np.asarray(r)
    if r.ndim != 1:
        raise ValueError("r must be a single chip vector")
    batches = [chn.ChannelBatch.from_realizations([c]) for c in channels]
    bits, trace = sic_receive_batch(r[None, :], alloc, batches, csi_rho, model, rng, keep_trace=True)
    single = SicTrace([SicStage(s.residual[0], s.feature[0], s.bit[0],
                                None if s.recon_seed is None else s.recon_seed[0])
                       for s in trace.stages])
    return [int(b) for b in bits[0]], single
