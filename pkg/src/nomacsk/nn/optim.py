from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
    """One bias-corrected Adam update, in place on ``params`` and ``state``."""
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    for k, p in params.items():
        g = grads[k]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape} for {k}")
        if k not in state.m:
            state.m[k] = np.zeros_like(p)
            state.v[k] = np.zeros_like(p)
        m, v = state.m[k], state.v[k]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= (state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)).astype(p.dtype)


@dataclass
class PlateauScheduler:
    """Cut the learning rate by ``factor`` after ``patience`` epochs without
    a relative improvement larger than ``threshold``."""

    factor: float = 0.1
    patience: int = 3
    threshold: float = 1e-4
    best: float = float("inf")
    bad_epochs: int = 0

    def step(self, val_loss: float, lr: float) -> float:
        if val_loss < self.best * (1.0 - self.threshold):
            self.best = val_loss
            self.bad_epochs = 0
            return lr
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            self.bad_epochs = 0
            return lr * self.factor
        return lr


def plateau_schedule(history, lr: float = 1e-3, **kwargs) -> float:
    """Replay a list of per-epoch validation losses; return the final lr."""
    if len(history) < 1:
        raise ValueError("need at least one epoch of history")
    sched = PlateauScheduler(**kwargs)
    for loss in history:
        lr = sched.step(loss, lr)
    return lr
