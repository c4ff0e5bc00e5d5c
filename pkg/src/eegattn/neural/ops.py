"""Elementwise building blocks shared by the recurrent models.

Everything is float64; stability tricks (max-subtracted softmax,
branch-free stable sigmoid, clipped log in the cross-entropy) keep the
finite-difference gradient checks meaningful.
"""

import numpy as np

_BCE_EPS = 1e-12


def sigmoid(x):
    # clipping at +-708 keeps exp() finite; the result is still exact to
    # double precision across the whole real line
    x = np.clip(np.asarray(x, dtype=np.float64), -708.0, 708.0)
    return 1.0 / (1.0 + np.exp(-x))


def softmax(v):
    """Probability vector; max-subtracted for stability, sums to 1."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        raise ValueError("softmax of an empty vector")
    e = np.exp(v - v.max())
    return e / e.sum()


def dropout_mask(shape, rate, rng):
    """Inverted-scaling dropout mask: multiply by it in both passes."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(shape, dtype=np.float64)
    return (rng.random(shape) >= rate).astype(np.float64) / (1.0 - rate)


def dropout(v, rate, rng, train=True):
    """Apply inverted-scaling dropout; identity when train is False."""
    v = np.asarray(v, dtype=np.float64)
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train:
        return v
    return v * dropout_mask(v.shape, rate, rng)


def mse(y, yhat):
    """Mean squared error."""
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    return float(np.mean((y - yhat) ** 2))


def bce(y, yhat):
    """Mean binary cross-entropy; predictions clipped away from {0, 1}."""
    y = np.asarray(y, dtype=np.float64)
    yhat = np.clip(np.asarray(yhat, dtype=np.float64), _BCE_EPS, 1.0 - _BCE_EPS)
    return float(-np.mean(y * np.log(yhat) + (1.0 - y) * np.log(1.0 - yhat)))


def pad_batch(seqs):
    """Stack variable-length (T_i, d) sequences into (B, T, d) plus mask.

    mask[b, t] is 1.0 for real positions, 0.0 for padding.
    """
    seqs = [np.asarray(s, dtype=np.float64) for s in seqs]
    if not seqs:
        raise ValueError("empty batch")
    d = seqs[0].shape[1]
    T = max(s.shape[0] for s in seqs)
    xs = np.zeros((len(seqs), T, d), dtype=np.float64)
    mask = np.zeros((len(seqs), T), dtype=np.float64)
    for b, s in enumerate(seqs):
        if s.ndim != 2 or s.shape[1] != d:
            raise ValueError("all sequences must share the feature dimension")
        xs[b, : s.shape[0]] = s
        mask[b, : s.shape[0]] = 1.0
    return xs, mask
