"""Finite-difference verification of analytic gradients.

The closure must be deterministic (disable dropout), return the scalar
loss, and accumulate gradients into ``params.grads``; grad_check zeroes
the buffers before the analytic pass.  Central differences use h = 1e-5
in float64.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class GradCheckReport:
    per_param: dict  # name -> max relative error over the tensor
    max_rel_err: float
    worst_param: str
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance

    def __str__(self):
        status = "OK" if self.passed else "FAIL"
        return (
            f"grad check {status}: max rel err {self.max_rel_err:.3e} "
            f"({self.worst_param}) vs tolerance {self.tolerance:g}"
        )


def grad_check(model_closure, params, tolerance: float = 1e-4, h: float = 1e-5):
    """Compare analytic gradients against central finite differences."""
    params.zero_grads()
    loss_a = float(model_closure())
    analytic = {name: g.copy() for name, g in params.grads.items()}
    params.zero_grads()
    loss_b = float(model_closure())
    if loss_a != loss_b:
        raise ValueError(
            "non-deterministic closure: two forward passes returned "
            f"{loss_a!r} and {loss_b!r}"
        )

    per_param = {}
    worst_name, worst = "", 0.0
    for name, arr in params.values.items():
        ga = analytic[name]
        max_err = 0.0
        for idx in np.ndindex(arr.shape):
            orig = arr[idx]
            arr[idx] = orig + h
            lp = float(model_closure())
            arr[idx] = orig - h
            lm = float(model_closure())
            arr[idx] = orig
            g_num = (lp - lm) / (2.0 * h)
            denom = max(abs(ga[idx]), abs(g_num), 1e-8)
            max_err = max(max_err, abs(ga[idx] - g_num) / denom)
        per_param[name] = max_err
        if max_err >= worst:
            worst_name, worst = name, max_err
    params.zero_grads()
    return GradCheckReport(per_param, worst, worst_name, tolerance)
