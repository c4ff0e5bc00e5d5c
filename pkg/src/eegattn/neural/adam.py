"""Adam with bias correction, restrictable to a subset of tensors.

Moments and step counters are kept per tensor, so updating only some
parameters (the alternating-training auxiliary step does this) leaves
the others' optimizer state untouched.
"""

import numpy as np


class AdamState:
    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.m = {k: np.zeros_like(v) for k, v in params.values.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.values.items()}
        self.steps = {k: 0 for k in params.values}


def adam_step(params, grads, state: AdamState, names=None) -> None:
    """One bias-corrected Adam update for the named tensors (default all)."""
    for name in names if names is not None else params.values:
        g = grads[name]
        if not np.isfinite(g).all():
            raise ValueError(f"non-finite gradient for parameter {name!r}")
        t = state.steps[name] + 1
        state.steps[name] = t
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        denom = np.sqrt(v / (1.0 - state.beta2**t))
        denom += state.eps
        update = m / denom
        update *= state.lr / (1.0 - state.beta1**t)
        params.values[name] -= update
    params.version += 1
