from __future__ import annotations

from typing import Iterator

import numpy as np

from .layers import BackwardBeforeForward, Layer


class Sequential:
    """Ordered layer stack; parameter names are ``<layer>.<param>``."""

    def __init__(self, layers: list[Layer]) -> None:
        self.layers = layers
        self._ran_forward = False

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training)
        self._ran_forward = True
        return x

    def backward(self, dout: np.ndarray) -> np.ndarray:
        if not self._ran_forward:
            raise BackwardBeforeForward("backward called before forward")
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def named_params(self) -> Iterator[tuple[str, np.ndarray, np.ndarray]]:
        for layer in self.layers:
            for k, p in layer.params.items():
                yield f"{layer.name}.{k}", p, layer.grads[k]

    def params(self) -> dict[str, np.ndarray]:
        return {name: p for name, p, _ in self.named_params()}

    def grads(self) -> dict[str, np.ndarray]:
        return {name: g for name, _, g in self.named_params()}

    def state_dict(self) -> dict[str, np.ndarray]:
        out = {}
        for layer in self.layers:
            for k, p in layer.params.items():
                out[f"{layer.name}.{k}"] = p
            for k, b in layer.buffers.items():
                out[f"{layer.name}.{k}"] = b
        return out

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        own = self.state_dict()
        missing = set(own) - set(state)
        extra = set(state) - set(own)
        if missing or extra:
            raise KeyError(f"state mismatch: missing={sorted(missing)} unexpected={sorted(extra)}")
        for k, v in state.items():
            if own[k].shape != v.shape:
                raise ValueError(f"{k}: shape {v.shape} != {own[k].shape}")
            own[k][...] = v

    def astype(self, dtype) -> "Sequential":
        for layer in self.layers:
            for store in (layer.params, layer.buffers):
                for k in store:
                    store[k] = store[k].astype(dtype)
            layer.zero_grad()
        return self
