"""Evaluation metrics: speed tracking, state accuracy, gradient checking."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DataError
from .config import ModelConfig
from .network import Model, head_losses_and_grads


def speed_metrics(predicted_vx: np.ndarray, v_star: float) -> tuple[float, float]:
    """(sigma_v, epsilon_v): population std of predicted forward speed and
    absolute bias of its mean against the commanded speed."""
    v = np.asarray(predicted_vx, dtype=np.float64)
    if v.size == 0:
        raise DataError("empty evaluation set")
    return float(v.std()), float(abs(v.mean() - v_star))


def eval_speed_metrics(model: Model, tokens: np.ndarray, v_star: float,
                       batch_size: int = 1024) -> tuple[float, float]:
    """Run the model over running-state samples commanded at v_star."""
    if len(tokens) == 0:
        raise DataError("empty evaluation set")
    preds = []
    for s in range(0, len(tokens), batch_size):
        outputs, _ = model.forward(tokens[s : s + batch_size], train=False)
        preds.append(outputs["motion"][:, 0])
    return speed_metrics(np.concatenate(preds), v_star)


def loss_only(model: Model, tokens, targets, beta: float) -> float:
    outputs, _ = model.forward(tokens, train=False)
    losses, _ = head_losses_and_grads(model.config, outputs, targets, beta)
    return losses["total"]


def grad_check(config: ModelConfig, vocab_size: int, tokens: np.ndarray,
               targets: dict[str, np.ndarray], beta: float = 10.0,
               epsilon: float = 1e-5, samples_per_tensor: int = 5,
               seed: int = 0) -> float:
    """Max relative error of analytic gradients vs central finite differences.

    Requires a tiny double-precision config (feature_dim <= 16) so the
    finite-difference probe stays fast and well-conditioned.
    """
    if config.feature_dim > 16:
        raise ConfigError("grad check requires feature_dim <= 16")
    if config.dtype != "float64":
        raise ConfigError("grad check requires the float64 mode")
    if config.dropout != 0.0:
        raise ConfigError("grad check requires dropout disabled")

    model = Model(config, vocab_size=vocab_size, seed=seed)
    _, grads, _ = model.loss_and_grads(tokens, targets, beta=beta, train=False)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, param in model.params.items():
        flat = param.reshape(-1)
        gflat = grads[name].reshape(-1)
        k = min(samples_per_tensor, flat.size)
        for j in rng.choice(flat.size, size=k, replace=False):
            orig = flat[j]
            flat[j] = orig + epsilon
            lp = loss_only(model, tokens, targets, beta)
            flat[j] = orig - epsilon
            lm = loss_only(model, tokens, targets, beta)
            flat[j] = orig
            fd = (lp - lm) / (2.0 * epsilon)
            denom = max(abs(fd), abs(gflat[j]), 1e-8)
            worst = max(worst, abs(fd - gflat[j]) / denom)
    return worst
