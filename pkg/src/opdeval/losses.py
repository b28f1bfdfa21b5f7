"""Reference motion and extrinsic losses with analytic gradients.

Vector losses are summed over elements. Motion-type logits are ordered
as :data:`opdeval.artic.MOTION_TYPES` (prismatic, revolute).
"""

from dataclasses import dataclass

import numpy as np

from .artic import MOTION_TYPES, MotionType


@dataclass(frozen=True)
class LossWeights:
    lambda_c: float = 1.0
    lambda_a: float = 8.0
    lambda_o: float = 8.0
    lambda_ext: float = 15.0

    def __post_init__(self):
        if min(self.lambda_c, self.lambda_a, self.lambda_o, self.lambda_ext) < 0:
            raise ValueError("loss weights must be non-negative")


def smooth_l1(x, beta=1.0):
    """Summed smooth L1 and its gradient.

    ``0.5 x^2 / beta`` for ``|x| < beta``, ``|x| - 0.5 beta`` otherwise.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    quad = ax < beta
    value = np.where(quad, 0.5 * x * x / beta, ax - 0.5 * beta)
    grad = np.where(quad, x / beta, np.sign(x))
    return float(value.sum()), grad


def cross_entropy(logits, label):
    """``-log softmax(logits)[label]`` via log-sum-exp, and its gradient."""
    z = np.asarray(logits, dtype=float).reshape(-1)
    if not 0 <= label < z.size:
        raise IndexError(f"label {label} out of range for {z.size} classes")
    m = z.max()
    lse = m + np.log(np.exp(z - m).sum())
    p = np.exp(z - lse)
    grad = p.copy()
    grad[label] -= 1.0
    return float(lse - z[label]), grad


def motion_loss(type_logits, axis, origin, gt, weights=LossWeights(), beta=1.0, return_grad=False):
    """Weighted sum of motion-type cross-entropy, axis and origin smooth L1.

    The origin term only applies to revolute ground truth. The GT axis is
    normalized before the residual is taken.
    """
    label = MOTION_TYPES.index(MotionType.parse(gt.type))
    ce, g_logits = cross_entropy(type_logits, label)
    axis = np.asarray(axis, dtype=float)
    la, g_axis = smooth_l1(axis - gt.axis / np.linalg.norm(gt.axis), beta)
    origin = np.asarray(origin, dtype=float)
    if gt.type is MotionType.REVOLUTE:
        lo, g_origin = smooth_l1(origin - gt.origin, beta)
    else:
        lo, g_origin = 0.0, np.zeros_like(origin)
    value = weights.lambda_c * ce + weights.lambda_a * la + weights.lambda_o * lo
    if not return_grad:
        return value
    return value, {
        "type_logits": weights.lambda_c * g_logits,
        "axis": weights.lambda_a * g_axis,
        "origin": weights.lambda_o * g_origin,
    }


def extrinsic_loss(pred_vec12, gt, lambda_ext=15.0, beta=1.0, return_grad=False):
    """``lambda_ext`` times smooth L1 between a 12-vector and the GT extrinsics."""
    pred = np.asarray(pred_vec12, dtype=float).reshape(-1)
    if pred.size != 12:
        raise ValueError(f"expected 12 entries, got {pred.size}")
    value, grad = smooth_l1(pred - gt.to_vec12(), beta)
    if return_grad:
        return lambda_ext * value, lambda_ext * grad
    return lambda_ext * value
