"""A label-free eavesdropper.

Eve sees the superposed uplink through her own channels and has no CSI and
no ground truth. She clusters intercepted feature tensors into two groups
using two summary statistics, treats the cluster index as a bit label, and
trains her own copy of the demodulator on those pseudo-labels. Her raw
decisions are then scored against every vehicle's true bits. No attempt is
made to resolve the arbitrary cluster-to-bit assignment.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .demodulator import ModelConfig, TrainConfig, build_model, train

log = logging.getLogger(__name__)


def summary_statistics(features: np.ndarray) -> np.ndarray:
    """Per-sample (time-row skewness, folded PSD spectral centroid)."""
    f = np.asarray(features, dtype=np.float64)
    if f.ndim != 3 or f.shape[1] != 2:
        raise ValueError(f"expected (M, 2, beta) features, got {f.shape}")
    t = f[:, 0, :]
    c = t - t.mean(axis=1, keepdims=True)
    m2 = np.mean(c ** 2, axis=1)
    m3 = np.mean(c ** 3, axis=1)
    skew = np.divide(m3, m2 ** 1.5, out=np.zeros_like(m3), where=m2 > 0)
    beta = f.shape[2]
    k = np.arange(beta)
    freq = np.minimum(k, beta - k) / beta
    s = f[:, 1, :]
    tot = s.sum(axis=1)
    centroid = np.divide(s @ freq, tot, out=np.zeros_like(tot), where=tot > 0)
    return np.column_stack([skew, centroid])


def two_means(points: np.ndarray, iters: int = 50, seed: int = 0) -> np.ndarray:
    """Lloyd's algorithm with k=2, a fixed number of iterations and a seeded start."""
    x = np.asarray(points, dtype=np.float64)
    if len(x) < 2:
        raise ValueError("need at least 2 samples to cluster")
    rng = np.random.default_rng(seed)
    distinct = np.unique(x, axis=0)
    if len(distinct) < 2:
        raise ValueError("all samples identical, nothing to cluster")
    centers = distinct[rng.choice(len(distinct), 2, replace=False)].copy()
    labels = np.zeros(len(x), dtype=np.int8)
    for _ in range(iters):
        d = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d.argmin(axis=1).astype(np.int8)
        for j in (0, 1):
            members = x[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                centers[j] = x[d[:, 1 - j].argmax()]
    return labels


def bootstrap_labels(features: np.ndarray, iters: int = 50, seed: int = 0) -> np.ndarray:
    """Pseudo-labels from 2-means on z-scored summary statistics."""
    summ = summary_statistics(features)
    if len(summ) < 2:
        raise ValueError("need at least 2 samples")
    sd = summ.std(axis=0)
    if np.all(sd == 0):
        raise ValueError("all feature summaries identical")
    z = (summ - summ.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return two_means(z, iters, seed)


@dataclass
class EveResult:
    ber: list[float]
    errors: list[int]
    bits: int


def eve_train_and_score(settings, train_features: np.ndarray, test_features: np.ndarray,
                        test_bits: np.ndarray, beta: int, model_config: ModelConfig = ModelConfig(),
                        seed: int = 0, train_bits: np.ndarray | None = None) -> EveResult:
    """Train Eve on intercepted features and score her against the truth.

    ``settings`` is an :class:`~nomacsk.config.EveSettings`. Ground truth
    (``train_bits``) is only read in the ``"truth"`` control arm, where Eve
    gets one model per vehicle trained on that vehicle's real bits.
    """
    train_features = np.asarray(train_features)
    test_bits = np.asarray(test_bits)
    if len(train_features) == 0:
        raise ValueError("no intercepted samples")
    if len(train_features) < settings.batch_size:
        raise ValueError("fewer intercepts than one batch")
    n_vehicles = test_bits.shape[1]
    rng = np.random.default_rng(seed)

    if settings.labels == "truth":
        if train_bits is None:
            raise ValueError("truth arm needs train_bits")
        label_sets = [np.asarray(train_bits)[:, i] for i in range(n_vehicles)]
    else:
        pseudo = bootstrap_labels(train_features, settings.kmeans_iters, seed)
        if settings.labels == "shuffled":
            pseudo = rng.permutation(pseudo)
        label_sets = [pseudo]

    decisions = []
    for labels in label_sets:
        model = build_model(beta, model_config)
        train(model, train_features, labels,
              TrainConfig(epochs=settings.epochs, batch_size=settings.batch_size, lr=settings.lr,
                          shuffle_seed=int(rng.integers(2 ** 31))))
        decisions.append(model(test_features))
    errors = []
    for i in range(n_vehicles):
        dec = decisions[i] if len(decisions) > 1 else decisions[0]
        errors.append(int(np.count_nonzero(dec != test_bits[:, i])))
    m = len(test_bits)
    return EveResult([e / m for e in errors], errors, m)
