"""Training losses: beta-weighted motion MSE and state cross-entropy."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

PROB_FLOOR = 1e-12  # keeps -log(p) finite


def motion_loss(pred: np.ndarray, true: np.ndarray, beta: float = 10.0) -> float:
    """(beta / N) * sum over samples of the squared 3-vector error."""
    if beta <= 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    pred = np.atleast_2d(np.asarray(pred, dtype=np.float64))
    true = np.atleast_2d(np.asarray(true, dtype=np.float64))
    n = pred.shape[0]
    return float(beta * np.sum((pred - true) ** 2) / n)


def motion_loss_grad(pred: np.ndarray, true: np.ndarray, beta: float
                     ) -> tuple[float, np.ndarray]:
    """Loss plus gradient w.r.t. the predictions: (2*beta/N)(pred - true)."""
    if beta <= 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    diff = pred - true
    n = pred.shape[0]
    loss = float(beta * np.sum(diff.astype(np.float64) ** 2) / n)
    grad = diff * ((2.0 * beta / n))
    return loss, grad.astype(pred.dtype)


def state_loss(dist, true_label) -> float:
    """Mean -log p(true label) over the batch; probabilities floored at 1e-12."""
    dist = np.atleast_2d(np.asarray(dist, dtype=np.float64))
    labels = np.atleast_1d(np.asarray(true_label, dtype=np.int64))
    p = np.clip(dist[np.arange(len(labels)), labels], PROB_FLOOR, None)
    return float(-np.log(p).mean())


def state_loss_grad(probs: np.ndarray, labels: np.ndarray
                    ) -> tuple[float, np.ndarray]:
    """Loss plus gradient w.r.t. the head's pre-softmax logits.

    With p = softmax(z) and L = mean(-log p[y]), dL/dz = (p - onehot) / N.
    """
    n = probs.shape[0]
    idx = np.arange(n)
    labels = np.asarray(labels, dtype=np.int64)
    picked = np.clip(probs[idx, labels].astype(np.float64), PROB_FLOOR, None)
    loss = float(-np.log(picked).mean())
    grad = probs.copy()
    grad[idx, labels] -= 1.0
    grad /= n
    return loss, grad.astype(probs.dtype)
