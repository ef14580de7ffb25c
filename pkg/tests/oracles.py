"""Slow, independent reference implementations used as test oracles."""

import math

import numpy as np

from nomacsk import nn


def naive_conv1d(x, w, b):
    c_out, c_in, k = w.shape
    length = x.shape[1] - k + 1
    out = np.zeros((c_out, length))
    for o in range(c_out):
        for t in range(length):
            acc = b[o]
            for c in range(c_in):
                for j in range(k):
                    acc += w[o, c, j] * x[c, t + j]
            out[o, t] = acc
    return out


def naive_mhsa(x, w_q, w_k, w_v, w_o):
    """Triple-loop attention over the rows of ``x`` (n tokens of length L)."""
    n, length = x.shape
    heads, _, d = w_q.shape
    concat = np.zeros((n, heads * d))
    for h in range(heads):
        q = np.zeros((n, d)); k = np.zeros((n, d)); v = np.zeros((n, d))
        for i in range(n):
            for c in range(d):
                for t in range(length):
                    q[i, c] += x[i, t] * w_q[h, t, c]
                    k[i, c] += x[i, t] * w_k[h, t, c]
                    v[i, c] += x[i, t] * w_v[h, t, c]
        for i in range(n):
            scores = [sum(q[i, c] * k[j, c] for c in range(d)) / math.sqrt(d) for j in range(n)]
            top = max(scores)
            e = [math.exp(s - top) for s in scores]
            tot = sum(e)
            for j in range(n):
                for c in range(d):
                    concat[i, h * d + c] += e[j] / tot * v[j, c]
    out = np.zeros((n, length))
    for i in range(n):
        for t in range(length):
            out[i, t] = sum(concat[i, m] * w_o[m, t] for m in range(heads * d))
    return out


def finite_difference_check(model, x, y, step=1e-5):
    """Largest per-tensor relative error between backprop and central differences.

    ``model`` must be float64 and is run in training mode (batch statistics),
    which keeps the loss a deterministic function of the parameters.
    """
    def loss():
        logits = model.logits(x, training=True)
        return nn.cross_entropy(nn.softmax(logits), y)

    model.net.zero_grad()
    logits = model.logits(x, training=True)
    _, dlogits = nn.softmax_cross_entropy_grad(logits, y)
    model.net.backward(dlogits)
    worst = {}
    for name, p, g in model.net.named_params():
        analytic = g.copy()
        numeric = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + step
            up = loss()
            p[idx] = old - step
            down = loss()
            p[idx] = old
            numeric[idx] = (up - down) / (2 * step)
        denom = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
        worst[name] = float(np.linalg.norm(analytic - numeric) / denom)
    return worst
