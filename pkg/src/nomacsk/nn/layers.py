"""Layers with hand-written forward and backward passes.

Every layer caches what its backward pass needs during ``forward`` and
accumulates into ``grads`` on ``backward``. Batches are laid out as
``(batch, channels, length)`` throughout.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class BackwardBeforeForward(RuntimeError):
    pass


class Layer:
    name: str = "layer"

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}
        self._cache = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for k, v in self.params.items():
            self.grads[k] = np.zeros_like(v)

    def n_params(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def _need_cache(self):
        if self._cache is None:
            raise BackwardBeforeForward(f"{self.name}: backward called before forward")
        return self._cache


class Conv1d(Layer):
    """Valid (no padding), stride-1 1-D convolution."""

    def __init__(self, c_in: int, c_out: int, k: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "conv") -> None:
        super().__init__()
        self.name = name
        self.c_in, self.c_out, self.k = c_in, c_out, k
        std = np.sqrt(2.0 / (c_in * k))
        self.params["weight"] = (rng.standard_normal((c_out, c_in, k)) * std).astype(dtype)
        self.params["bias"] = np.zeros(c_out, dtype=dtype)
        self.zero_grad()

    def out_length(self, l_in: int) -> int:
        return l_in - self.k + 1

    def forward(self, x, training=False):
        w, b = self.params["weight"], self.params["bias"]
        if x.ndim != 3 or x.shape[1] != self.c_in:
            raise ValueError(f"{self.name}: expected (B, {self.c_in}, L), got {x.shape}")
        if x.shape[2] < self.k:
            raise ValueError(f"{self.name}: input length {x.shape[2]} < kernel {self.k}")
        bsz, _, l_in = x.shape
        l_out = l_in - self.k + 1
        # (B, C, Lout, k) -> (B, Lout, C*k)
        cols = sliding_window_view(x, self.k, axis=2).transpose(0, 2, 1, 3)
        cols = np.ascontiguousarray(cols).reshape(bsz, l_out, self.c_in * self.k)
        w2 = w.reshape(self.c_out, -1)
        z = cols @ w2.T + b
        self._cache = (cols, l_in)
        return np.ascontiguousarray(z.transpose(0, 2, 1))

    def backward(self, dout):
        cols, l_in = self._need_cache()
        w = self.params["weight"]
        bsz, _, l_out = dout.shape
        dz = dout.transpose(0, 2, 1)  # (B, Lout, Cout)
        dz_flat = dz.reshape(-1, self.c_out)
        self.grads["weight"] += (dz_flat.T @ cols.reshape(-1, cols.shape[2])).reshape(w.shape)
        self.grads["bias"] += dout.sum(axis=(0, 2))
        dcols = (dz @ w.reshape(self.c_out, -1)).reshape(bsz, l_out, self.c_in, self.k)
        dx = np.zeros((bsz, self.c_in, l_in), dtype=dout.dtype)
        for j in range(self.k):
            dx[:, :, j:j + l_out] += dcols[:, :, :, j].transpose(0, 2, 1)
        return dx


class BatchNorm1d(Layer):
    """Per-channel normalization over the batch and length axes."""

    def __init__(self, channels: int, eps: float = 1e-5, momentum: float = 0.1,
                 dtype=np.float32, name: str = "bn") -> None:
        super().__init__()
        self.name = name
        self.eps, self.momentum = eps, momentum
        self.params["weight"] = np.ones(channels, dtype=dtype)
        self.params["bias"] = np.zeros(channels, dtype=dtype)
        self.buffers["running_mean"] = np.zeros(channels, dtype=dtype)
        self.buffers["running_var"] = np.ones(channels, dtype=dtype)
        self.zero_grad()

    def forward(self, x, training=False):
        gamma, beta = self.params["weight"], self.params["bias"]
        if training:
            m = x.shape[0] * x.shape[2]
            if m < 2:
                raise ValueError(f"{self.name}: batch*length must be >= 2 in training mode")
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            mom = self.momentum
            rm, rv = self.buffers["running_mean"], self.buffers["running_var"]
            rm[...] = (1 - mom) * rm + mom * mean
            rv[...] = (1 - mom) * rv + mom * var * (m / (m - 1))
        else:
            mean = self.buffers["running_mean"]
            var = self.buffers["running_var"]
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[None, :, None]) * inv_std[None, :, None]
        self._cache = (xhat, inv_std, training)
        return gamma[None, :, None] * xhat + beta[None, :, None]

    def backward(self, dout):
        xhat, inv_std, training = self._need_cache()
        gamma = self.params["weight"]
        self.grads["weight"] += (dout * xhat).sum(axis=(0, 2))
        self.grads["bias"] += dout.sum(axis=(0, 2))
        dxhat = dout * gamma[None, :, None]
        if not training:
            return dxhat * inv_std[None, :, None]
        m = dout.shape[0] * dout.shape[2]
        s1 = dxhat.sum(axis=(0, 2), keepdims=True)
        s2 = (dxhat * xhat).sum(axis=(0, 2), keepdims=True)
        return inv_std[None, :, None] / m * (m * dxhat - s1 - xhat * s2)


class ReLU(Layer):
    name = "relu"

    def forward(self, x, training=False):
        mask = x > 0
        self._cache = mask
        return x * mask

    def backward(self, dout):
        return dout * self._need_cache()


def _softmax_lastaxis(s: np.ndarray) -> np.ndarray:
    e = s - s.max(axis=-1, keepdims=True)
    np.exp(e, out=e)
    e /= e.sum(axis=-1, keepdims=True)
    return e


class MultiHeadSelfAttention(Layer):
    """Scaled dot-product attention with the channels as tokens.

    The per-head projections act on the temporal axis: an input of shape
    ``(n, L)`` is projected by ``L x d_h`` matrices, so the attention map is
    ``n x n``. Heads are concatenated and mapped back to ``L`` by ``W_O``.
    No bias terms.
    """

    def __init__(self, length: int, heads: int, head_dim: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "mhsa") -> None:
        super().__init__()
        if heads < 1 or head_dim < 1:
            raise ValueError("heads and head_dim must be >= 1")
        self.name = name
        self.length, self.heads, self.head_dim = length, heads, head_dim
        a = np.sqrt(1.0 / length)
        for key in ("w_q", "w_k", "w_v"):
            self.params[key] = rng.uniform(-a, a, (heads, length, head_dim)).astype(dtype)
        a_o = np.sqrt(1.0 / (heads * head_dim))
        self.params["w_o"] = rng.uniform(-a_o, a_o, (heads * head_dim, length)).astype(dtype)
        self.zero_grad()

    def _fused(self) -> np.ndarray:
        # (3, h, L, d) -> (L, 3*h*d), column blocks ordered (q|k|v, head)
        w = np.stack([self.params["w_q"], self.params["w_k"], self.params["w_v"]])
        return w.transpose(2, 0, 1, 3).reshape(self.length, -1)

    def forward(self, x, training=False):
        if x.ndim != 3 or x.shape[2] != self.length:
            raise ValueError(f"{self.name}: expected (B, n, {self.length}), got {x.shape}")
        bsz, n, _ = x.shape
        h, d = self.heads, self.head_dim
        x2 = x.reshape(bsz * n, self.length)
        proj = (x2 @ self._fused()).reshape(bsz, n, 3, h, d)
        proj = np.ascontiguousarray(proj.transpose(2, 0, 3, 1, 4)).reshape(3, bsz * h, n, d)
        q, k, v = proj[0], proj[1], proj[2]
        scale = 1.0 / math.sqrt(d)
        scores = q @ k.transpose(0, 2, 1)
        scores *= scale
        attn = _softmax_lastaxis(scores)
        z = attn @ v  # (B*h, n, d)
        concat = np.ascontiguousarray(z.reshape(bsz, h, n, d).transpose(0, 2, 1, 3)).reshape(bsz * n, h * d)
        self._cache = (x2, q, k, v, attn, concat, bsz)
        return (concat @ self.params["w_o"]).reshape(bsz, n, self.length)

    def attention_map(self, x: np.ndarray) -> np.ndarray:
        """Attention weights ``(B, h, n, n)`` for ``x`` (runs a forward pass)."""
        self.forward(x)
        attn, bsz = self._cache[4], self._cache[6]
        return attn.reshape(bsz, self.heads, attn.shape[1], attn.shape[2])

    def backward(self, dout):
        x2, q, k, v, attn, concat, bsz = self._need_cache()
        n = dout.shape[1]
        h, d, L = self.heads, self.head_dim, self.length
        w_o = self.params["w_o"]
        dout2 = dout.reshape(bsz * n, L)
        self.grads["w_o"] += concat.T @ dout2
        dz = np.ascontiguousarray((dout2 @ w_o.T).reshape(bsz, n, h, d).transpose(0, 2, 1, 3))
        dz = dz.reshape(bsz * h, n, d)
        dattn = dz @ v.transpose(0, 2, 1)
        dv = attn.transpose(0, 2, 1) @ dz
        ds = dattn - (dattn * attn).sum(axis=-1, keepdims=True)
        ds *= attn
        ds *= 1.0 / math.sqrt(d)
        dq = ds @ k
        dk = ds.transpose(0, 2, 1) @ q
        dproj = np.stack([dq, dk, dv]).reshape(3, bsz, h, n, d)
        dproj = np.ascontiguousarray(dproj.transpose(1, 3, 0, 2, 4)).reshape(bsz * n, 3 * h * d)
        gw = (x2.T @ dproj).reshape(L, 3, h, d).transpose(1, 2, 0, 3)
        for i, key in enumerate(("w_q", "w_k", "w_v")):
            self.grads[key] += gw[i]
        dx2 = dproj @ self._fused().T
        return dx2.reshape(bsz, n, L)


class GlobalAvgPool(Layer):
    name = "gap"

    def forward(self, x, training=False):
        if x.shape[-1] < 1:
            raise ValueError("gap: empty temporal axis")
        self._cache = x.shape
        return x.mean(axis=-1)

    def backward(self, dout):
        shape = self._need_cache()
        return np.broadcast_to(dout[..., None] / shape[-1], shape).copy()


class Dense(Layer):
    """Affine map ``y = x @ W + b`` with ``W`` of shape ``(in, out)``."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator,
                 dtype=np.float32, name: str = "fc") -> None:
        super().__init__()
        self.name = name
        std = np.sqrt(2.0 / d_in)
        self.params["weight"] = (rng.standard_normal((d_in, d_out)) * std).astype(dtype)
        self.params["bias"] = np.zeros(d_out, dtype=dtype)
        self.zero_grad()

    def forward(self, x, training=False):
        if x.shape[-1] != self.params["weight"].shape[0]:
            raise ValueError(f"{self.name}: expected last dim {self.params['weight'].shape[0]}, got {x.shape}")
        self._cache = x
        return x @ self.params["weight"] + self.params["bias"]

    def backward(self, dout):
        x = self._need_cache()
        self.grads["weight"] += x.T @ dout
        self.grads["bias"] += dout.sum(axis=0)
        return dout @ self.params["weight"].T


def softmax(logits: np.ndarray) -> np.ndarray:
    return _softmax_lastaxis(np.asarray(logits))


P_CLAMP = 1e-12


def cross_entropy(prob: np.ndarray, labels) -> float:
    """Mean binary cross-entropy (natural log) on ``p̂ = prob[..., 1]``."""
    prob = np.asarray(prob, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    p1 = np.clip(prob[..., 1], P_CLAMP, 1 - P_CLAMP)
    return float(np.mean(-(labels * np.log(p1) + (1 - labels) * np.log(1 - p1))))


def softmax_cross_entropy_grad(logits: np.ndarray, labels) -> tuple[float, np.ndarray]:
    """Loss and its gradient w.r.t. the logits, averaged over the batch."""
    probs = softmax(logits)
    labels = np.asarray(labels, dtype=np.int64)
    loss = cross_entropy(probs, labels)
    onehot = np.zeros_like(probs)
    onehot[np.arange(len(labels)), labels] = 1
    return loss, (probs - onehot) / len(labels)
