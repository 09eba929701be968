"""Synthetic training tasks with closed-form gradients.

Three kinds: logistic (binary labels in {-1, +1}), least_squares (exactly
realizable linear targets, so the optimum has a zero gradient), and mlp
(one tanh hidden layer regressing an exactly realizable target).  All
gradients are analytic and checked against finite differences in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .rng import DATASET_STREAM, stream_rng

TASK_KINDS = ("logistic", "least_squares", "mlp")
MLP_INPUTS = 3   # mlp feature width; each hidden unit costs MLP_INPUTS + 2 params


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form is stable for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class SyntheticTask:
    """A dataset plus loss/gradient oracles over parameter vectors."""

    kind: str
    features: np.ndarray           # (n, p)
    labels: np.ndarray             # (n,)
    dim: int
    hidden: int = 0                # mlp only
    w_star: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_samples(self) -> int:
        return len(self.labels)

    def _mlp_unpack(self, w: np.ndarray):
        h, p = self.hidden, MLP_INPUTS
        w1 = w[: h * p].reshape(h, p)
        b1 = w[h * p: h * p + h]
        w2 = w[h * p + h: h * p + 2 * h]
        b2 = w[-1]
        return w1, b1, w2, b2

    def _mlp_forward(self, w: np.ndarray, x: np.ndarray):
        w1, b1, w2, b2 = self._mlp_unpack(w)
        hidden = np.tanh(x @ w1.T + b1)
        return hidden @ w2 + b2, hidden

    def loss(self, w: np.ndarray, idx=None) -> float:
        """Mean loss over the given sample indices (default: all)."""
        x, y = self._select(idx)
        if self.kind == "logistic":
            return float(np.mean(np.logaddexp(0.0, -y * (x @ w))))
        if self.kind == "least_squares":
            return float(np.mean(0.5 * (x @ w - y) ** 2))
        out, _ = self._mlp_forward(w, x)
        return float(np.mean(0.5 * (out - y) ** 2))

    def gradient_sum(self, w: np.ndarray, idx) -> np.ndarray:
        """Sum of per-sample loss gradients over the given indices."""
        x, y = self._select(idx)
        if self.kind == "logistic":
            margins = -y * (x @ w)
            coeff = -y * _sigmoid(margins)
            return x.T @ coeff
        if self.kind == "least_squares":
            return x.T @ (x @ w - y)
        out, hidden = self._mlp_forward(w, x)
        w2 = self._mlp_unpack(w)[2]
        dout = out - y                          # (m,)
        dw2 = hidden.T @ dout
        db2 = dout.sum()
        dhidden = np.outer(dout, w2) * (1.0 - hidden ** 2)
        dw1 = dhidden.T @ x
        db1 = dhidden.sum(axis=0)
        return np.concatenate([dw1.ravel(), db1, dw2, [db2]])

    def sample_gradient(self, w: np.ndarray, index: int) -> np.ndarray:
        return self.gradient_sum(w, [index])

    def _select(self, idx):
        if idx is None:
            return self.features, self.labels
        idx = np.asarray(idx, dtype=int)
        return self.features[idx], self.labels[idx]


def synthetic_task(kind: str, n: int, d: int, seed: int) -> SyntheticTask:
    """Reproducible dataset of n samples with a d-dimensional parameter.

    For mlp, d is rounded down to the nearest representable parameter
    count h*(MLP_INPUTS+2)+1; the task's dim field is authoritative.
    """
    if kind not in TASK_KINDS:
        raise ConfigError(f"task kind {kind!r} not one of {TASK_KINDS}")
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = stream_rng(DATASET_STREAM, seed)
    if kind == "mlp":
        per_unit = MLP_INPUTS + 2
        hidden = max(1, (d - 1) // per_unit)
        dim = hidden * per_unit + 1
        features = rng.standard_normal((n, MLP_INPUTS))
        w_star = rng.standard_normal(dim)
        task = SyntheticTask(kind, features, np.zeros(n), dim, hidden, w_star)
        labels, _ = task._mlp_forward(w_star, features)
        task.labels = labels
        return task
    features = rng.standard_normal((n, d)) / np.sqrt(d)
    w_star = rng.standard_normal(d)
    if kind == "least_squares":
        labels = features @ w_star
    else:
        probs = _sigmoid(features @ w_star * 3.0)
        labels = np.where(rng.random(n) < probs, 1.0, -1.0)
    return SyntheticTask(kind, features, labels, d, 0, w_star)
