"""Fully connected network with a pluggable hidden activation.

Weights of layer ``l`` have shape ``(layer_dims[l+1], layer_dims[l])``;
the output layer feeds a softmax cross-entropy head.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..activations import (
    ActivationKind,
    activation_grad_array,
    activation_value_array,
    parse_kind,
    softmax,
)

__all__ = [
    "NetworkError",
    "Network",
    "Cache",
    "init_network",
    "forward",
    "backward",
    "loss",
    "sgd_step",
]


class NetworkError(ValueError):
    """Shape or label problems in the network routines."""


@dataclass
class Network:
    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: ActivationKind
    output_head: str = "softmax-cross-entropy"

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def copy(self) -> "Network":
        return Network(
            self.layer_dims,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.hidden_activation,
            self.output_head,
        )


@dataclass
class Cache:
    """Per-layer inputs and pre-activations kept for the backward pass."""

    inputs: list[np.ndarray] = field(default_factory=list)
    pre_activations: list[np.ndarray] = field(default_factory=list)
    logits: np.ndarray | None = None


def init_network(layer_dims, activation="stl", seed: int = 0) -> Network:
    """Glorot-uniform weights, zero biases, deterministic in ``seed``."""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2:
        raise NetworkError(f"need at least an input and an output layer, got {dims}")
    if any(d <= 0 for d in dims):
        raise NetworkError(f"layer sizes must be positive, got {dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(dims, weights, biases, parse_kind(activation))


def forward(net: Network, batch) -> tuple[np.ndarray, Cache]:
    X = np.asarray(batch, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != net.layer_dims[0]:
        raise NetworkError(f"batch has shape {X.shape}, network expects (*, {net.layer_dims[0]})")
    cache = Cache()
    a = X
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        cache.inputs.append(a)
        z = a @ W.T + b
        cache.pre_activations.append(z)
        a = z if i == last else activation_value_array(net.hidden_activation, z)
    cache.logits = a
    return a, cache


def _check_labels(labels, n, n_classes):
    y = np.asarray(labels)
    if y.shape != (n,):
        raise NetworkError(f"expected {n} labels, got shape {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        raise NetworkError("labels must be integers")
    if n and (y.min() < 0 or y.max() >= n_classes):
        raise NetworkError(f"labels must lie in [0, {n_classes}), got range [{y.min()}, {y.max()}]")
    return y


def loss(net: Network, X, labels) -> float:
    """Mean softmax cross-entropy of ``net`` on ``(X, labels)``."""
    logits, _ = forward(net, X)
    y = _check_labels(labels, logits.shape[0], logits.shape[1])
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-logp[np.arange(len(y)), y].mean())


def backward(net: Network, cache: Cache, labels):
    """Gradients of the mean cross-entropy with respect to every parameter.

    Returns ``(weight_grads, bias_grads, min_activation_grad)``; the last item
    is the smallest elementwise hidden-activation derivative seen, which
    lets callers watch for vanishing gradients.
    """
    logits = cache.logits
    n = logits.shape[0]
    y = _check_labels(labels, n, logits.shape[1])
    delta = softmax(logits)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    L = len(net.weights)
    gW = [None] * L
    gb = [None] * L
    min_g = math.inf
    for i in range(L - 1, -1, -1):
        gW[i] = delta.T @ cache.inputs[i]
        gb[i] = delta.sum(axis=0)
        if i > 0:
            d_act = activation_grad_array(net.hidden_activation, cache.pre_activations[i - 1])
            if d_act.size:
                min_g = min(min_g, float(d_act.min()))
            delta = (delta @ net.weights[i]) * d_act
    return gW, gb, min_g


def sgd_step(net: Network, grads_w, grads_b, learning_rate: float) -> None:
    for W, b, gw, gb in zip(net.weights, net.biases, grads_w, grads_b):
        W -= learning_rate * gw
        b -= learning_rate * gb
