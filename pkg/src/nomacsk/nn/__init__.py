"""Small NumPy neural-network engine for the demodulator."""

from .io import WeightFormatError, load_tensors, read_tensors, save_tensors, write_tensors
from .layers import (
    BackwardBeforeForward,
    BatchNorm1d,
    Conv1d,
    Dense,
    GlobalAvgPool,
    Layer,
    MultiHeadSelfAttention,
    ReLU,
    cross_entropy,
    softmax,
    softmax_cross_entropy_grad,
)
from .network import Sequential
from .optim import AdamState, PlateauScheduler, adam_step, plateau_schedule

__all__ = [
    "AdamState",
    "BackwardBeforeForward",
    "BatchNorm1d",
    "Conv1d",
    "Dense",
    "GlobalAvgPool",
    "Layer",
    "MultiHeadSelfAttention",
    "PlateauScheduler",
    "ReLU",
    "Sequential",
    "WeightFormatError",
    "adam_step",
    "cross_entropy",
    "load_tensors",
    "plateau_schedule",
    "read_tensors",
    "save_tensors",
    "softmax",
    "softmax_cross_entropy_grad",
    "write_tensors",
]
