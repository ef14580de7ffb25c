"""The dual-domain CNN + attention demodulator, its training loop, and the
stage-mixed training-set generator."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .features import normalize_feature

log = logging.getLogger(__name__)

FC_HIDDEN = 64


@dataclass(frozen=True)
class ModelConfig:
    n_filters: int = 32
    kernel_size: int = 3
    heads: int = 8
    head_dim: int = 64
    fc_hidden: int = FC_HIDDEN
    init_seed: int = 0


LAYER_ORDER = ("conv1", "bn1", "relu1", "conv2", "bn2", "relu2", "mhsa", "gap", "fc1", "relu3", "fc2")


class DemodulatorModel:
    """Conv(k) -> BN -> ReLU -> Conv(2k) -> BN -> ReLU -> MH-SA -> GAP ->
    FC(64) -> ReLU -> FC(2), softmax applied on top of the logits."""

    def __init__(self, beta: int, config: ModelConfig = ModelConfig(), dtype=np.float32) -> None:
        k = config.kernel_size
        if beta < 3 * k - 1:
            raise ValueError(f"beta={beta} too short for kernel size {k}: need beta >= {3 * k - 1}")
        self.beta = beta
        self.config = config
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(config.init_seed)
        n = config.n_filters
        self.l1 = beta - k + 1
        self.l2 = self.l1 - 2 * k + 1
        self.net = nn.Sequential([
            nn.Conv1d(2, n, k, rng, dtype, name="conv1"),
            nn.BatchNorm1d(n, dtype=dtype, name="bn1"),
            _named(nn.ReLU(), "relu1"),
            nn.Conv1d(n, n, 2 * k, rng, dtype, name="conv2"),
            nn.BatchNorm1d(n, dtype=dtype, name="bn2"),
            _named(nn.ReLU(), "relu2"),
            nn.MultiHeadSelfAttention(self.l2, config.heads, config.head_dim, rng, dtype, name="mhsa"),
            _named(nn.GlobalAvgPool(), "gap"),
            nn.Dense(n, config.fc_hidden, rng, dtype, name="fc1"),
            _named(nn.ReLU(), "relu3"),
            nn.Dense(config.fc_hidden, 2, rng, dtype, name="fc2"),
        ])
        self.training = False

    # -- introspection -----------------------------------------------------
    @property
    def layers(self) -> dict[str, nn.Layer]:
        return {layer.name: layer for layer in self.net.layers}

    def param_counts(self) -> dict[str, int]:
        return {layer.name: layer.n_params() for layer in self.net.layers}

    def output_shapes(self) -> dict[str, tuple[int, ...]]:
        """Per-layer output shape for a single sample (batch axis dropped)."""
        x = np.zeros((2, 2, self.beta), dtype=self.dtype)
        shapes = {"input": (2, self.beta)}
        for layer in self.net.layers:
            x = layer.forward(x, training=False)
            shapes[layer.name] = x.shape[1:]
        shapes["softmax"] = x.shape[1:]
        return shapes

    # -- inference ---------------------------------------------------------
    def logits(self, features: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(features, dtype=self.dtype)
        if x.ndim == 2:
            x = x[None]
        if x.shape[1:] != (2, self.beta):
            raise ValueError(f"expected features of shape (B, 2, {self.beta}), got {x.shape}")
        return self.net.forward(x, training=training)

    def predict_proba(self, features: np.ndarray, batch_size: int = 4096) -> np.ndarray:
        """Class probabilities for raw (unnormalized) feature tensors."""
        f = normalize_feature(features)
        single = f.ndim == 2
        if single:
            f = f[None]
        out = np.empty((f.shape[0], 2), dtype=np.float64)
        for s in range(0, f.shape[0], batch_size):
            out[s:s + batch_size] = nn.softmax(self.logits(f[s:s + batch_size]).astype(np.float64))
        return out[0] if single else out

    def __call__(self, features: np.ndarray) -> np.ndarray:
        """Hard decisions for a batch of raw feature tensors."""
        return decide(self.predict_proba(features))

    # -- persistence -------------------------------------------------------
    def state_dict(self) -> dict[str, np.ndarray]:
        return self.net.state_dict()

    def load_state_dict(self, state) -> None:
        self.net.load_state_dict(state)

    def save(self, path) -> None:
        path = Path(path)
        nn.save_tensors(path, self.state_dict())
        meta = {"beta": self.beta, "format": "DNCW", **asdict(self.config)}
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "DemodulatorModel":
        path = Path(path)
        meta = json.loads(sidecar_path(path).read_text())
        cfg = ModelConfig(**{k: meta[k] for k in ModelConfig.__dataclass_fields__})
        model = cls(meta["beta"], cfg)
        model.load_state_dict(nn.load_tensors(path))
        return model


def _named(layer: nn.Layer, name: str) -> nn.Layer:
    layer.name = name
    return layer


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def build_model(beta: int, config: ModelConfig = ModelConfig(), dtype=np.float32) -> DemodulatorModel:
    if beta < 8:
        raise ValueError(f"beta must be >= 8, got {beta}")
    return DemodulatorModel(beta, config, dtype)


def decide(probs: np.ndarray) -> np.ndarray:
    """MAP bit from class probabilities; an exact tie goes to 0."""
    probs = np.asarray(probs)
    return (probs[..., 1] > probs[..., 0]).astype(np.int8)


def demodulate(model: DemodulatorModel, feature: np.ndarray) -> tuple[int, np.ndarray]:
    p = model.predict_proba(feature)
    if p.ndim != 1:
        raise ValueError("demodulate takes a single 2 x beta feature tensor")
    return int(decide(p)), p


# --------------------------------------------------------------------------
# training

@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 64
    lr: float = 1e-3
    val_fraction: float = 0.1
    shuffle_seed: int = 0
    plateau_patience: int = 3
    plateau_factor: float = 0.1


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    lr: list[float] = field(default_factory=list)
    best_epoch: int = -1


def evaluate(model: DemodulatorModel, x: np.ndarray, y: np.ndarray, batch_size: int = 4096) -> tuple[float, float]:
    """Mean loss and accuracy on already-normalized features."""
    losses, correct = 0.0, 0
    for s in range(0, len(y), batch_size):
        logits = model.logits(x[s:s + batch_size]).astype(np.float64)
        p = nn.softmax(logits)
        yb = y[s:s + batch_size]
        losses += nn.cross_entropy(p, yb) * len(yb)
        correct += int(np.sum(decide(p) == yb))
    return losses / len(y), correct / len(y)


def train(model: DemodulatorModel, features: np.ndarray, labels: np.ndarray,
          config: TrainConfig = TrainConfig()) -> TrainHistory:
    """Mini-batch Adam with plateau lr decay; keeps the best-validation weights.

    ``features`` are raw (unnormalized) ``(M, 2, beta)`` tensors.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) == 0:
        raise ValueError("empty dataset")
    if config.batch_size < 2:
        raise ValueError("batch size must be >= 2 for batch normalization")
    x = normalize_feature(features).astype(model.dtype)
    rng = np.random.default_rng(config.shuffle_seed)
    order = rng.permutation(len(labels))
    n_val = int(round(config.val_fraction * len(labels)))
    if len(labels) - n_val < config.batch_size:
        raise ValueError("not enough training samples for one batch")
    val_idx, tr_idx = order[:n_val], order[n_val:]
    x_val, y_val = x[val_idx], labels[val_idx]
    x_tr, y_tr = x[tr_idx], labels[tr_idx]

    state = nn.AdamState(lr=config.lr)
    sched = nn.PlateauScheduler(factor=config.plateau_factor, patience=config.plateau_patience)
    hist = TrainHistory()
    best_loss, best_state = float("inf"), None
    n_tr = len(y_tr)
    for epoch in range(config.epochs):
        perm = rng.permutation(n_tr)
        total = 0.0
        seen = 0
        # drop a trailing batch of size 1, BN cannot normalize it
        for s in range(0, n_tr, config.batch_size):
            idx = perm[s:s + config.batch_size]
            if len(idx) < 2:
                continue
            model.net.zero_grad()
            logits = model.logits(x_tr[idx], training=True)
            loss, dlogits = nn.softmax_cross_entropy_grad(logits.astype(np.float64), y_tr[idx])
            model.net.backward(dlogits.astype(model.dtype))
            nn.adam_step(state, model.net.params(), model.net.grads())
            total += loss * len(idx)
            seen += len(idx)
        hist.train_loss.append(total / seen)
        hist.lr.append(state.lr)
        if n_val:
            vloss, vacc = evaluate(model, x_val, y_val)
        else:
            vloss, vacc = hist.train_loss[-1], float("nan")
        hist.val_loss.append(vloss)
        hist.val_accuracy.append(vacc)
        if vloss < best_loss:
            best_loss = vloss
            best_state = {k: v.copy() for k, v in model.state_dict().items()}
            hist.best_epoch = epoch
        state.lr = sched.step(vloss, state.lr)
        log.info("epoch %d train_loss=%.4f val_loss=%.4f val_acc=%.4f lr=%.1e",
                 epoch + 1, hist.train_loss[-1], vloss, vacc, hist.lr[-1])
    if best_state is not None:
        model.load_state_dict(best_state)
    return hist
