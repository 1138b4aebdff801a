"""Small fully-connected action-value network with hand-rolled backprop.

Rectified-linear hidden layers, linear output head, adaptive-moment updates.
Keeping the math explicit makes the gradients directly checkable against
finite differences.
"""

from __future__ import annotations

import numpy as np


class QNetwork:
    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        self.weights = weights
        self.biases = biases

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1], *(w.shape[0] for w in self.weights))

    @staticmethod
    def initialize(layer_sizes, rng: np.random.Generator) -> "QNetwork":
        weights, biases = [], []
        for n_in, n_out in zip(layer_sizes, layer_sizes[1:]):
            scale = np.sqrt(2.0 / n_in)
            weights.append(rng.normal(0.0, scale, size=(n_out, n_in)))
            biases.append(np.zeros(n_out))
        return QNetwork(weights, biases)

    def copy(self) -> "QNetwork":
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Action values for a single state (6,) or a batch (B, 6)."""
        single = np.ndim(x) == 1
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if not np.isfinite(h).all():
            raise ValueError("network input must be finite")
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w.T + b, 0.0)
        out = h @ self.weights[-1].T + self.biases[-1]
        return out[0] if single else out

    def forward_cached(self, x: np.ndarray):
        """Batch forward keeping pre/post activations for backprop."""
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        activations = [h]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w.T + b, 0.0)
            activations.append(h)
        out = h @ self.weights[-1].T + self.biases[-1]
        return out, activations

    def backward(self, activations: list[np.ndarray], grad_out: np.ndarray):
        """Parameter gradients given d(loss)/d(output), shape (B, n_actions)."""
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        g = np.asarray(grad_out, dtype=np.float64)
        for layer in range(len(self.weights) - 1, -1, -1):
            a_in = activations[layer]
            grads_w[layer] = g.T @ a_in
            grads_b[layer] = g.sum(axis=0)
            if layer > 0:
                g = (g @ self.weights[layer]) * (activations[layer] > 0.0)
        return grads_w, grads_b

    def params(self):
        return self.weights + self.biases

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "weights": [w.reshape(-1).tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @staticmethod
    def from_dict(data: dict) -> "QNetwork":
        sizes = data["layer_sizes"]
        weights = [
            np.array(flat, dtype=np.float64).reshape(n_out, n_in)
            for flat, n_in, n_out in zip(data["weights"], sizes, sizes[1:])
        ]
        biases = [np.array(b, dtype=np.float64) for b in data["biases"]]
        return QNetwork(weights, biases)


class Adam:
    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
