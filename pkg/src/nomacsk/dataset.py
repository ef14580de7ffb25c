"""Stage-mixed training data for the shared demodulator.

Each sample picks a vehicle/stage ``i`` uniformly, runs the uplink, and
cancels stages ``1..i-1`` using the *true* bits (teacher forcing) so the
data do not depend on the model being trained. The stage-``i`` feature is
labelled with vehicle ``i``'s bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import channels as chn
from .features import build_feature
from .link import transmit_block
from .sic import cancel, reconstruct


@dataclass
class TrainingSet:
    features: np.ndarray  # (M, 2, beta) raw feature tensors
    labels: np.ndarray    # (M,) int8
    stages: np.ndarray    # (M,) 1-based SIC stage
    snr_db: np.ndarray    # (M,)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[tuple[np.ndarray, int, int, float]]:
        for m in range(len(self)):
            yield self.features[m], int(self.labels[m]), int(self.stages[m]), float(self.snr_db[m])


def _chunk(cfg, rng: np.random.Generator, size: int, snr_range, stage: Optional[int]) -> TrainingSet:
    lo, hi = snr_range
    snr = rng.uniform(lo, hi, size)
    block = transmit_block(cfg, rng, size, snr)
    n = cfg.n_vehicles
    stages = rng.integers(0, n, size) if stage is None else np.full(size, stage - 1)
    amps = block.alloc.amplitudes()
    residual = block.received
    for i in range(n - 1):
        todo = stages > i
        if not todo.any():
            break
        chips_hat, _ = reconstruct(block.bits[:, i], rng, cfg.beta)
        nxt = cancel(residual, chips_hat, amps[i], block.channels[i])
        residual = np.where(todo[:, None], nxt, residual)
    rows = np.arange(size)
    taps = np.stack([chn.dominant_taps(ch) for ch in block.channels], axis=1)[rows, stages]
    feats = build_feature(residual, taps).astype(np.float32)
    labels = block.bits[rows, stages]
    return TrainingSet(feats, labels, stages + 1, snr)


def generate_dataset(cfg, rng: np.random.Generator, size: Optional[int] = None,
                     snr_range_db=None, stage: Optional[int] = None,
                     chunk_size: int = 10_000) -> TrainingSet:
    """Build ``size`` samples (default ``cfg.training.samples``).

    ``snr_range_db`` defaults to the config's training range; ``stage``
    pins every sample to one SIC stage instead of drawing uniformly.
    """
    size = cfg.training.samples if size is None else int(size)
    snr_range = tuple(cfg.training.snr_range_db if snr_range_db is None else snr_range_db)
    if len(snr_range) != 2 or snr_range[0] > snr_range[1]:
        raise ValueError(f"invalid SNR range {snr_range}")
    if size < 1:
        raise ValueError("size must be positive")
    if stage is not None and not 1 <= stage <= cfg.n_vehicles:
        raise ValueError(f"stage {stage} outside 1..{cfg.n_vehicles}")
    parts = [_chunk(cfg, rng, min(chunk_size, size - s), snr_range, stage)
             for s in range(0, size, chunk_size)]
    return TrainingSet(*(np.concatenate([getattr(p, f) for p in parts])
                         for f in ("features", "labels", "stages", "snr_db")))
