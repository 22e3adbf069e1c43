"""Minimal dense Q-network with hand-derived gradients, float64 throughout.

Two hidden ReLU layers feed either a dueling head pair (state value plus
mean-centered advantages) or a single linear Q head. Backpropagation and the
Adam update are written out explicitly; no autodiff framework is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODES = ("dueling", "vanilla")
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class QNetParams:
    """Named parameter arrays; layer shapes must chain input -> hidden ->
    hidden -> heads."""

    mode: str
    arrays: dict[str, np.ndarray]

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("mode must be one of %r" % (MODES,))
        expected = _array_names(self.mode)
        if tuple(self.arrays.keys()) != expected:
            raise ValueError("parameter arrays must be exactly %r" % (expected,))
        hidden = self.arrays["w1"].shape[1]
        if self.arrays["b1"].shape != (hidden,):
            raise ValueError("b1 shape mismatch")
        if self.arrays["w2"].shape != (hidden, hidden):
            raise ValueError("w2 shape mismatch")
        if self.arrays["b2"].shape != (hidden,):
            raise ValueError("b2 shape mismatch")
        n_act = self.n_actions
        if self.mode == "dueling":
            if self.arrays["wv"].shape != (hidden, 1) or self.arrays["bv"].shape != (1,):
                raise ValueError("value head shape mismatch")
            if self.arrays["wa"].shape != (hidden, n_act) or self.arrays["ba"].shape != (n_act,):
                raise ValueError("advantage head shape mismatch")
        else:
            if self.arrays["wq"].shape != (hidden, n_act) or self.arrays["bq"].shape != (n_act,):
                raise ValueError("q head shape mismatch")
        for a in self.arrays.values():
            if a.dtype != np.float64:
                raise ValueError("parameters must be float64")

    @property
    def input_dim(self) -> int:
        return self.arrays["w1"].shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.arrays["w1"].shape[1]

    @property
    def n_actions(self) -> int:
        key = "wa" if self.mode == "dueling" else "wq"
        return self.arrays[key].shape[1]


def _array_names(mode: str) -> tuple[str, ...]:
    if mode == "dueling":
        return ("w1", "b1", "w2", "b2", "wv", "bv", "wa", "ba")
    return ("w1", "b1", "w2", "b2", "wq", "bq")


def init_network(input_dim: int, n_actions: int, mode: str, rng,
                 hidden: int = 128) -> QNetParams:
    """Weights uniform in +-1/sqrt(fan_in), biases zero. Matrices are drawn
    in declaration order, so a given rng state fixes the network."""
    if input_dim < 1 or n_actions < 2 or hidden < 1:
        raise ValueError("bad network dimensions")

    def mat(fan_in, fan_out):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=(fan_in, fan_out))

    arrays = {"w1": mat(input_dim, hidden), "b1": np.zeros(hidden),
              "w2": mat(hidden, hidden), "b2": np.zeros(hidden)}
    if mode == "dueling":
        arrays["wv"] = mat(hidden, 1)
        arrays["bv"] = np.zeros(1)
        arrays["wa"] = mat(hidden, n_actions)
        arrays["ba"] = np.zeros(n_actions)
    elif mode == "vanilla":
        arrays["wq"] = mat(hidden, n_actions)
        arrays["bq"] = np.zeros(n_actions)
    else:
        raise ValueError("mode must be one of %r" % (MODES,))
    return QNetParams(mode=mode, arrays=arrays)


def _trunk(params: QNetParams, x: np.ndarray):
    a = params.arrays
    z1 = x @ a["w1"] + a["b1"]
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ a["w2"] + a["b2"]
    h2 = np.maximum(z2, 0.0)
    return z1, h1, z2, h2


def forward(params: QNetParams, states: np.ndarray):
    """Head outputs for a (batch, input_dim) array: dueling returns
    (value (batch, 1), advantages (batch, n_actions)); vanilla returns
    (None, q (batch, n_actions))."""
    x = np.asarray(states, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise ValueError("states must be (batch, %d)" % params.input_dim)
    _, _, _, h2 = _trunk(params, x)
    a = params.arrays
    if params.mode == "dueling":
        return h2 @ a["wv"] + a["bv"], h2 @ a["wa"] + a["ba"]
    return None, h2 @ a["wq"] + a["bq"]


def aggregate_q(value: np.ndarray, advantages: np.ndarray) -> np.ndarray:
    """Dueling combination Q = V + A - mean(A); invariant to a constant shift
    of the advantages."""
    return value + advantages - advantages.mean(axis=1, keepdims=True)


def q_values(params: QNetParams, states: np.ndarray) -> np.ndarray:
    v, a = forward(params, states)
    if params.mode == "dueling":
        return aggregate_q(v, a)
    return a


def td_loss_and_gradients(params: QNetParams, states: np.ndarray,
                          actions: np.ndarray, targets: np.ndarray):
    """Mean squared TD error on the taken actions and its exact gradients.

    Returns (loss, grads) with grads keyed like params.arrays.
    """
    x = np.asarray(states, dtype=np.float64)
    act = np.asarray(actions, dtype=np.int64)
    t = np.asarray(targets, dtype=np.float64)
    b = x.shape[0]
    if act.shape != (b,) or t.shape != (b,):
        raise ValueError("actions and targets must be (batch,)")
    if np.any((act < 0) | (act >= params.n_actions)):
        raise ValueError("action index out of range")
    arr = params.arrays
    z1, h1, z2, h2 = _trunk(params, x)
    rows = np.arange(b)
    if params.mode == "dueling":
        v = h2 @ arr["wv"] + arr["bv"]
        adv = h2 @ arr["wa"] + arr["ba"]
        q_sel = v[:, 0] + adv[rows, act] - adv.mean(axis=1)
    else:
        q = h2 @ arr["wq"] + arr["bq"]
        q_sel = q[rows, act]
    err = q_sel - t
    loss = float(np.mean(err ** 2))
    e = (2.0 / b) * err                      # dL/dq_sel

    grads = {}
    if params.mode == "dueling":
        n_act = params.n_actions
        d_v = e[:, None]
        d_adv = np.full((b, n_act), -1.0 / n_act)
        d_adv[rows, act] += 1.0
        d_adv *= e[:, None]
        grads["wv"] = h2.T @ d_v
        grads["bv"] = d_v.sum(axis=0)
        grads["wa"] = h2.T @ d_adv
        grads["ba"] = d_adv.sum(axis=0)
        d_h2 = d_v @ arr["wv"].T + d_adv @ arr["wa"].T
    else:
        d_q = np.zeros((b, params.n_actions))
        d_q[rows, act] = e
        grads["wq"] = h2.T @ d_q
        grads["bq"] = d_q.sum(axis=0)
        d_h2 = d_q @ arr["wq"].T
    d_z2 = d_h2 * (z2 > 0.0)
    grads["w2"] = h1.T @ d_z2
    grads["b2"] = d_z2.sum(axis=0)
    d_h1 = d_z2 @ arr["w2"].T
    d_z1 = d_h1 * (z1 > 0.0)
    grads["w1"] = x.T @ d_z1
    grads["b1"] = d_z1.sum(axis=0)
    return loss, {k: grads[k] for k in arr}


@dataclass
class AdamState:
    """First/second moment accumulators and the shared step counter."""

    m: dict
    v: dict
    t: int = 0

    @classmethod
    def for_params(cls, params: QNetParams) -> "AdamState":
        return cls(m={k: np.zeros_like(a) for k, a in params.arrays.items()},
                   v={k: np.zeros_like(a) for k, a in params.arrays.items()})


def adam_step(params: QNetParams, state: AdamState, grads: dict,
              lr: float) -> None:
    """One in-place Adam update with bias correction."""
    if lr <= 0.0:
        raise ValueError("learning rate must be positive")
    for g in grads.values():
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient")
    state.t += 1
    c1 = 1.0 - ADAM_BETA1 ** state.t
    c2 = 1.0 - ADAM_BETA2 ** state.t
    for k, a in params.arrays.items():
        g = grads[k]
        m = state.m[k]
        v = state.v[k]
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * g * g
        a -= lr * (m / c1) / (np.sqrt(v / c2) + ADAM_EPS)


def clone_params(params: QNetParams) -> QNetParams:
    return QNetParams(mode=params.mode,
                      arrays={k: a.copy() for k, a in params.arrays.items()})


CHECKPOINT_VERSION = 1


def save_checkpoint(path, params: QNetParams) -> None:
    """Versioned npz with the mode flag and raw float64 arrays; round-trips
    bit exactly."""
    np.savez(path, __version__=np.int64(CHECKPOINT_VERSION),
             __mode__=np.str_(params.mode), **params.arrays)


def load_checkpoint(path) -> QNetParams:
    with np.load(path, allow_pickle=False) as data:
        version = int(data["__version__"])
        if version != CHECKPOINT_VERSION:
            raise ValueError("unsupported checkpoint version %d" % version)
        mode = str(data["__mode__"])
        arrays = {k: data[k] for k in _array_names(mode)}
    return QNetParams(mode=mode, arrays=arrays)


def count_parameters(params: QNetParams) -> int:
    return int(sum(a.size for a in params.arrays.values()))
