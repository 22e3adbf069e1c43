"""Experience replay, exploration schedule and the Q-learning update."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .net import (AdamState, QNetParams, adam_step, clone_params, q_values,
                  td_loss_and_gradients)


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


class ReplayBuffer:
    """Fixed-capacity FIFO store over flat float64 arrays."""

    def __init__(self, capacity: int, state_dim: int):
        if capacity < 1 or state_dim < 1:
            raise ValueError("capacity and state_dim must be positive")
        self.capacity = capacity
        self.state_dim = state_dim
        self._states = np.empty((capacity, state_dim))
        self._actions = np.empty(capacity, dtype=np.int64)
        self._rewards = np.empty(capacity)
        self._next_states = np.empty((capacity, state_dim))
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def push(self, t: Transition) -> None:
        i = self._cursor
        self._states[i] = t.state
        self._actions[i] = t.action
        self._rewards[i] = t.reward
        self._next_states[i] = t.next_state
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, rng, batch_size: int):
        """Uniform without replacement; indices are redrawn until unique,
        which is O(batch) instead of a full-capacity permutation."""
        if batch_size < 1 or batch_size > self._size:
            raise ValueError("batch_size must be in [1, %d]" % self._size)
        idx = np.unique(rng.integers(0, self._size, size=batch_size))
        while idx.size < batch_size:
            extra = rng.integers(0, self._size, size=batch_size - idx.size)
            idx = np.unique(np.concatenate([idx, extra]))
        return (self._states[idx], self._actions[idx], self._rewards[idx],
                self._next_states[idx])

    def contents(self) -> list[Transition]:
        """Stored transitions, oldest first."""
        if self._size < self.capacity:
            order = range(self._size)
        else:
            order = [(self._cursor + k) % self.capacity
                     for k in range(self.capacity)]
        return [Transition(self._states[i].copy(), int(self._actions[i]),
                           float(self._rewards[i]), self._next_states[i].copy())
                for i in order]


@dataclass(frozen=True)
class ExplorationSchedule:
    """Exponential epsilon decay over the global step counter."""

    eps_start: float = 0.9
    eps_end: float = 0.1
    chi: float = 200.0

    def __post_init__(self):
        if not 0.0 <= self.eps_end <= self.eps_start <= 1.0:
            raise ValueError("need 0 <= eps_end <= eps_start <= 1")
        if self.chi <= 0.0:
            raise ValueError("chi must be positive")


def epsilon(schedule: ExplorationSchedule, global_step: int) -> float:
    if global_step < 0:
        raise ValueError("global_step must be non-negative")
    return schedule.eps_end + (schedule.eps_start - schedule.eps_end) \
        * math.exp(-global_step / schedule.chi)


def select_action(params: QNetParams, state: np.ndarray, eps: float,
                  rng) -> int:
    """Epsilon-greedy; the greedy branch breaks ties toward the lowest
    action index."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if rng.random() < eps:
        return int(rng.integers(params.n_actions))
    q = q_values(params, state[None, :])
    return int(np.argmax(q[0]))


def td_targets(rewards, next_states, target_params: QNetParams,
               gamma: float) -> np.ndarray:
    """r + gamma * max_a Q_target(s', a), no terminal masking (continuing
    task)."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    q_next = q_values(target_params, next_states)
    return np.asarray(rewards, dtype=np.float64) + gamma * q_next.max(axis=1)


def train_step(policy: QNetParams, target: QNetParams, adam: AdamState,
               buffer: ReplayBuffer, batch_size: int, gamma: float, lr: float,
               rng):
    """One minibatch update of the policy network; no-op (returns None) while
    the buffer holds fewer than batch_size transitions."""
    if len(buffer) < batch_size:
        return None
    states, actions, rewards, next_states = buffer.sample(rng, batch_size)
    targets = td_targets(rewards, next_states, target, gamma)
    loss, grads = td_loss_and_gradients(policy, states, actions, targets)
    adam_step(policy, adam, grads, lr)
    return loss


def maybe_sync_target(policy: QNetParams, target: QNetParams,
                      global_step: int, delta_sync: int) -> QNetParams:
    """Clone the policy into the target every delta_sync global steps
    (multiples of delta_sync, including step 0); otherwise return the target
    unchanged."""
    if delta_sync < 1:
        raise ValueError("delta_sync must be positive")
    if global_step % delta_sync == 0:
        return clone_params(policy)
    return target
