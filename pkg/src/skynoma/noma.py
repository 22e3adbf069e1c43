"""Two-user downlink NOMA with successive interference cancellation.

Within a cluster, the full transmit power is split between a strong and a
weak user (coefficients summing to one). The strong user cancels the weak
user's signal, so its residual interference coefficient beta is zero; the
weak user decodes under the strong user's interference (beta equal to the
strong coefficient). Each cluster occupies its own full-width band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALPHA_MIN = 0.01
ALPHA_MAX = 0.99


@dataclass(frozen=True)
class ClusterAllocation:
    """Power split of one cluster; weak user receives 1 - strong_alpha."""

    strong_alpha: float
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX

    def __post_init__(self):
        if not 0.0 < self.alpha_min <= self.alpha_max < 1.0:
            raise ValueError("invalid alpha clamp")
        if not self.alpha_min <= self.strong_alpha <= self.alpha_max:
            raise ValueError("strong_alpha %r outside [%r, %r]"
                             % (self.strong_alpha, self.alpha_min, self.alpha_max))

    @property
    def weak_alpha(self) -> float:
        return 1.0 - self.strong_alpha


def received_sinr(p_t_w: float, gain: float, mimo_g: float, alpha: float,
                  beta: float, sigma2_w: float) -> float:
    """SINR of one user: P*g*G*alpha / (P*g*G*beta + sigma2)."""
    if p_t_w <= 0.0 or gain <= 0.0 or mimo_g < 1.0 or sigma2_w <= 0.0:
        raise ValueError("powers, gains and noise must be positive")
    if not 0.0 <= alpha <= 1.0 or not 0.0 <= beta <= 1.0:
        raise ValueError("alpha and beta must lie in [0, 1]")
    s = p_t_w * gain * mimo_g
    return s * alpha / (s * beta + sigma2_w)


def user_rate(w_bw_hz: float, sinr: float) -> float:
    """Shannon rate in bits/s over bandwidth w_bw_hz."""
    if w_bw_hz <= 0.0:
        raise ValueError("bandwidth must be positive")
    if sinr < 0.0:
        raise ValueError("sinr must be non-negative")
    return w_bw_hz * math.log2(1.0 + sinr)


def sum_rate(rates) -> float:
    return float(np.sum(rates))


def jain_fairness(rates) -> float:
    """Jain index in [1/N, 1] for positive rate vectors; 0 for all-zero."""
    r = np.asarray(rates, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("rates must be a non-empty 1-D vector")
    if np.any(r < 0.0):
        raise ValueError("rates must be non-negative")
    total = float(r.sum())
    if total == 0.0:
        return 0.0
    return total * total / (r.size * float(np.dot(r, r)))


def feasible_strong_alpha_bound(r_min_bps: float, w_bw_hz: float) -> float:
    """Largest strong-user coefficient that leaves the weak user's rate able
    to reach r_min in the interference-limited limit: 2**(-r_min/W)."""
    if w_bw_hz <= 0.0:
        raise ValueError("bandwidth must be positive")
    if r_min_bps < 0.0:
        raise ValueError("r_min must be non-negative")
    return 2.0 ** (-r_min_bps / w_bw_hz)


def weighted_objective(rates, w_r: float, w_f: float) -> float:
    """Scalarized placement objective: w_r * sum rate + w_f * Jain index."""
    return w_r * sum_rate(rates) + w_f * jain_fairness(rates)
