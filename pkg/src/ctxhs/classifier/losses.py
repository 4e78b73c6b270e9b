"""Cross-entropy losses used by the binary and fine-grained heads.

The multi-label loss is the plain sum of per-output binary cross-entropies,
so the nine output variables are supervised independently while sharing one
encoder. Probabilities are clamped to [eps, 1-eps] before taking logs.
"""

from __future__ import annotations

import numpy as np

EPSILON = 1e-7


def _clamp(p: np.ndarray) -> np.ndarray:
    return np.clip(p, EPSILON, 1.0 - EPSILON)


def binary_loss(y: float, p: float) -> float:
    """-y*log(p) - (1-y)*log(1-p) with the probability clamped."""
    p = float(_clamp(np.asarray(p, dtype=np.float64)))
    y = float(y)
    return float(-y * np.log(p) - (1.0 - y) * np.log1p(-p))


def binary_loss_grad(y: float, p: float) -> float:
    """d(binary_loss)/dp; zero in the clamped regions where the loss is flat."""
    p = float(p)
    if p < EPSILON or p > 1.0 - EPSILON:
        return 0.0
    y = float(y)
    return float(-y / p + (1.0 - y) / (1.0 - p))


def multilabel_loss(y: np.ndarray, p: np.ndarray) -> float:
    """Sum of coordinate-wise binary cross-entropies over the label vector."""
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape:
        raise ValueError(f"shape mismatch: labels {y.shape} vs probabilities {p.shape}")
    pc = _clamp(p)
    return float(np.sum(-y * np.log(pc) - (1.0 - y) * np.log1p(-pc)))


def multilabel_loss_grad(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape:
        raise ValueError(f"shape mismatch: labels {y.shape} vs probabilities {p.shape}")
    grad = -y / _clamp(p) + (1.0 - y) / (1.0 - _clamp(p))
    grad[(p < EPSILON) | (p > 1.0 - EPSILON)] = 0.0
    return grad
