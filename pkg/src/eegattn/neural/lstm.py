"""LSTM and biLSTM with exact hand-derived backpropagation through time.

Cells use the standard gating (sigmoid input/forget/output gates, tanh
candidate and output squash) with h0 = c0 = 0.  Sequences may be padded:
``mask`` freezes the hidden and cell state after a sequence ends, so the
value at the final padded position equals the last real state and
gradients placed anywhere flow back to the right timestep.

Parameters live in a ModelParams store under ``<prefix>.w_<gate>``
(input-to-hidden), ``<prefix>.u_<gate>`` (hidden-to-hidden) and
``<prefix>.b_<gate>``, gate order i, f, o, g (g = cell candidate).
Backward passes accumulate into ``params.grads`` and return input
gradients.
"""

from dataclasses import dataclass

import numpy as np

from .ops import sigmoid

GATES = ("i", "f", "o", "g")


def add_lstm_params(params, prefix: str, input_dim: int, hidden_dim: int) -> None:
    """Register one cell's 12 tensors; forget-gate bias starts at +1."""
    for gate in GATES:
        params.add(f"{prefix}.w_{gate}", (input_dim, hidden_dim), fan_in=input_dim)
    for gate in GATES:
        params.add(f"{prefix}.u_{gate}", (hidden_dim, hidden_dim), fan_in=hidden_dim)
    for gate in GATES:
        fill = 1.0 if gate == "f" else 0.0
        params.add(f"{prefix}.b_{gate}", (hidden_dim,), fill=fill)


def add_bilstm_params(params, prefix: str, input_dim: int, hidden_dim: int) -> None:
    add_lstm_params(params, f"{prefix}.fwd", input_dim, hidden_dim)
    add_lstm_params(params, f"{prefix}.bwd", input_dim, hidden_dim)


def lstm_param_names(prefix: str):
    names = []
    for kind in ("w", "u", "b"):
        names += [f"{prefix}.{kind}_{gate}" for gate in GATES]
    return names


def _gate_mats(params, prefix):
    W = np.concatenate([params.values[f"{prefix}.w_{g}"] for g in GATES], axis=1)
    U = np.concatenate([params.values[f"{prefix}.u_{g}"] for g in GATES], axis=1)
    b = np.concatenate([params.values[f"{prefix}.b_{g}"] for g in GATES])
    return W, U, b


@dataclass
class LstmCache:
    params: object
    prefix: str
    version: int
    xs: np.ndarray  # (B, T, d)
    mask: np.ndarray  # (B, T)
    gates: tuple  # i, f, o, g arrays, each (B, T, h)
    tanh_c: np.ndarray  # tanh of the unmasked candidate cell state
    c: np.ndarray  # post-mask cell states (B, T, h)
    h: np.ndarray  # post-mask hidden states (B, T, h)
    W: np.ndarray
    U: np.ndarray
    single: bool = False


def lstm_forward(params, prefix: str, xs, mask=None):
    """Run the cell over xs; returns (hidden states, cache).

    xs may be one sequence (T, d) or a padded batch (B, T, d) with mask.
    """
    xs = np.asarray(xs, dtype=np.float64)
    single = xs.ndim == 2
    if single:
        xs = xs[None]
    if xs.ndim != 3 or xs.shape[1] < 1:
        raise ValueError(f"inputs must be (T, d) or (B, T, d), got {xs.shape}")
    B, T, d = xs.shape
    if mask is None:
        mask = np.ones((B, T), dtype=np.float64)
    else:
        mask = np.asarray(mask, dtype=np.float64)
        if mask.shape != (B, T):
            raise ValueError(f"mask shape {mask.shape} does not match {B, T}")
    W, U, b = _gate_mats(params, prefix)
    if W.shape[0] != d:
        raise ValueError(
            f"input dim {d} does not match {prefix!r} parameters ({W.shape[0]})"
        )
    h_dim = U.shape[0]

    i_a = np.empty((B, T, h_dim))
    f_a = np.empty((B, T, h_dim))
    o_a = np.empty((B, T, h_dim))
    g_a = np.empty((B, T, h_dim))
    tc_a = np.empty((B, T, h_dim))
    c_a = np.empty((B, T, h_dim))
    h_a = np.empty((B, T, h_dim))

    xproj = (xs.reshape(B * T, d) @ W + b).reshape(B, T, 4 * h_dim)
    h_prev = np.zeros((B, h_dim))
    c_prev = np.zeros((B, h_dim))
    z = np.empty((B, 4 * h_dim))
    for t in range(T):
        np.matmul(h_prev, U, out=z)
        z += xproj[:, t]
        sig = sigmoid(z[:, : 3 * h_dim])
        i_t = i_a[:, t]
        f_t = f_a[:, t]
        o_t = o_a[:, t]
        i_t[...] = sig[:, :h_dim]
        f_t[...] = sig[:, h_dim : 2 * h_dim]
        o_t[...] = sig[:, 2 * h_dim :]
        g_t = np.tanh(z[:, 3 * h_dim :], out=g_a[:, t])
        c_new = f_t * c_prev
        c_new += i_t * g_t
        tc = np.tanh(c_new, out=tc_a[:, t])
        m = mask[:, t, None]
        c_t = c_a[:, t]
        np.multiply(m, c_new, out=c_t)
        c_t += (1.0 - m) * c_prev
        h_t = h_a[:, t]
        np.multiply(m, o_t * tc, out=h_t)
        h_t += (1.0 - m) * h_prev
        h_prev, c_prev = h_t, c_t

    cache = LstmCache(
        params, prefix, params.version, xs, mask,
        (i_a, f_a, o_a, g_a), tc_a, c_a, h_a, W, U, single=single,
    )
    return (h_a[0] if single else h_a), cache


def lstm_backward(cache: LstmCache, grad_h):
    """BPTT for a matching forward; accumulates into params.grads.

    Returns the gradient with respect to the inputs, same shape as xs.
    """
    if cache.version != cache.params.version:
        raise ValueError("stale cache: parameters changed since the forward pass")
    grad_h = np.asarray(grad_h, dtype=np.float64)
    if cache.single:
        grad_h = grad_h[None]
    i_a, f_a, o_a, g_a = cache.gates
    B, T, h_dim = i_a.shape
    if grad_h.shape != (B, T, h_dim):
        raise ValueError(f"grad_h shape {grad_h.shape} does not match {(B, T, h_dim)}")
    xs, mask = cache.xs, cache.mask
    W, U = cache.W, cache.U
    d = xs.shape[2]

    dz_all = np.empty((B, T, 4 * h_dim))
    dU = np.zeros_like(U)
    dh_carry = np.zeros((B, h_dim))
    dc_carry = np.zeros((B, h_dim))
    for t in range(T - 1, -1, -1):
        m = mask[:, t, None]
        h_prev = cache.h[:, t - 1] if t > 0 else np.zeros((B, h_dim))
        c_prev = cache.c[:, t - 1] if t > 0 else np.zeros((B, h_dim))
        i_t, f_t, o_t, g_t = i_a[:, t], f_a[:, t], o_a[:, t], g_a[:, t]
        tc = cache.tanh_c[:, t]

        dh_total = grad_h[:, t] + dh_carry
        dh_new = m * dh_total
        dh_prev = (1.0 - m) * dh_total
        dc_new = m * dc_carry
        dc_prev = (1.0 - m) * dc_carry

        do = dh_new * tc
        dc_new = dc_new + dh_new * o_t * (1.0 - tc * tc)
        di = dc_new * g_t
        df = dc_new * c_prev
        dg = dc_new * i_t
        dc_prev = dc_prev + dc_new * f_t

        dz = dz_all[:, t]
        dz[:, :h_dim] = di * i_t * (1.0 - i_t)
        dz[:, h_dim : 2 * h_dim] = df * f_t * (1.0 - f_t)
        dz[:, 2 * h_dim : 3 * h_dim] = do * o_t * (1.0 - o_t)
        dz[:, 3 * h_dim :] = dg * (1.0 - g_t * g_t)

        dU += h_prev.T @ dz
        dh_carry = dh_prev + dz @ U.T
        dc_carry = dc_prev

    dz_flat = dz_all.reshape(B * T, 4 * h_dim)
    dW = xs.reshape(B * T, d).T @ dz_flat
    db = dz_flat.sum(axis=0)
    dx = (dz_flat @ W.T).reshape(B, T, d)

    grads = cache.params.grads
    prefix = cache.prefix
    for k, gate in enumerate(GATES):
        sl = slice(k * h_dim, (k + 1) * h_dim)
        grads[f"{prefix}.w_{gate}"] += dW[:, sl]
        grads[f"{prefix}.u_{gate}"] += dU[:, sl]
        grads[f"{prefix}.b_{gate}"] += db[sl]
    return dx[0] if cache.single else dx


def _reverse_within_length(arr, lengths):
    """Reverse each row's first ``lengths[b]`` positions along axis 1."""
    B, T = arr.shape[:2]
    t_idx = np.arange(T)[None, :]
    rev = lengths[:, None] - 1 - t_idx
    rev = np.where(t_idx < lengths[:, None], rev, t_idx)
    if arr.ndim == 3:
        return np.take_along_axis(arr, rev[:, :, None], axis=1)
    return np.take_along_axis(arr, rev, axis=1)


@dataclass
class BiLstmCache:
    fwd: LstmCache
    bwd: LstmCache
    lengths: np.ndarray
    single: bool


def bilstm_forward(params, prefix: str, xs, mask=None):
    """Bidirectional pass; outputs [forward; backward] concatenated (…, 2h)."""
    xs = np.asarray(xs, dtype=np.float64)
    single = xs.ndim == 2
    if single:
        xs = xs[None]
    B, T, _ = xs.shape
    if mask is None:
        mask = np.ones((B, T), dtype=np.float64)
    else:
        mask = np.asarray(mask, dtype=np.float64)
    lengths = mask.sum(axis=1).astype(np.int64)
    h_f, cache_f = lstm_forward(params, f"{prefix}.fwd", xs, mask)
    xs_rev = _reverse_within_length(xs, lengths)
    h_b_rev, cache_b = lstm_forward(params, f"{prefix}.bwd", xs_rev, mask)
    h_b = _reverse_within_length(h_b_rev, lengths)
    out = np.concatenate([h_f, h_b], axis=2)
    cache = BiLstmCache(cache_f, cache_b, lengths, single)
    return (out[0] if single else out), cache


def bilstm_backward(cache: BiLstmCache, grad_h):
    """Backward for bilstm_forward; returns input gradients."""
    grad_h = np.asarray(grad_h, dtype=np.float64)
    if cache.single:
        grad_h = grad_h[None]
    h_dim = grad_h.shape[2] // 2
    dx = lstm_backward(cache.fwd, grad_h[:, :, :h_dim])
    grad_b_rev = _reverse_within_length(grad_h[:, :, h_dim:], cache.lengths)
    dx_rev = lstm_backward(cache.bwd, grad_b_rev)
    dx = dx + _reverse_within_length(dx_rev, cache.lengths)
    return dx[0] if cache.single else dx
