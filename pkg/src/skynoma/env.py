"""Episodic decision environment for joint UAV placement and power control.

The UAV starts each episode hovering over the area center; a discrete action
moves it one step along each axis and nudges every cluster's strong-user
power coefficient. Users are paired into two-user NOMA clusters once per
environment (best gain with worst gain, at the initial hover position under
pure LoS), and the state vector normalizes per-user geometry, coefficients
and channel gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (ChannelParams, LinkKind, LinkMode, effective_gain,
                      mimo_gain, path_gain)
from .noma import (ALPHA_MAX, ALPHA_MIN, ClusterAllocation, jain_fairness,
                   received_sinr, user_rate)


def default_users() -> np.ndarray:
    return np.array([[4.0, 15.0], [-44.0, -49.0], [-5.0, 21.0], [47.0, 49.0]])


@dataclass(frozen=True)
class RewardWeights:
    """Non-negative weights of the five reward terms.

    w_r scales the bandwidth-normalized sum rate (gated on every user meeting
    r_min), w_f the Jain index (active only when r_min is zero), w_g the total
    linear channel gain, w_s the satisfied-user count, and w_u the normalized
    rates of unsatisfied users.
    """

    w_r: float = 1.0
    w_f: float = 0.0
    w_g: float = 0.0
    w_s: float = 0.0
    w_u: float = 0.0

    def __post_init__(self):
        for name in ("w_r", "w_f", "w_g", "w_s", "w_u"):
            if getattr(self, name) < 0.0:
                raise ValueError("%s must be non-negative" % name)


@dataclass
class Scenario:
    """Geometry, kinematics and service floor of one deployment."""

    channel: ChannelParams
    link_mode: LinkMode = LinkMode.EXPECTED
    users: np.ndarray = field(default_factory=default_users)
    area_side: float = 100.0
    h0: float = 10.0
    h_max: float = 300.0
    h_init: float = 50.0
    alpha_init: float = 0.5
    delta_x: float = 1.0
    delta_y: float = 1.0
    delta_h: float = 1.0
    delta_alpha: float = 0.01
    r_min_bps: float = 0.0
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX
    gain_db_min: float | None = None
    gain_db_max: float | None = None

    def __post_init__(self):
        self.users = np.asarray(self.users, dtype=np.float64)
        if self.users.ndim != 2 or self.users.shape[1] != 2:
            raise ValueError("users must be an (n, 2) array")
        n = self.users.shape[0]
        if n < 2 or n % 2 != 0:
            raise ValueError("user count must be even and at least 2")
        half = self.area_side / 2.0
        if self.area_side <= 0.0 or np.any(np.abs(self.users) > half):
            raise ValueError("users must lie inside the service area")
        if not 0.0 < self.h0 <= self.h_init <= self.h_max:
            raise ValueError("need 0 < h0 <= h_init <= h_max")
        for name in ("delta_x", "delta_y", "delta_h", "delta_alpha"):
            if getattr(self, name) <= 0.0:
                raise ValueError("%s must be positive" % name)
        if not 0.0 < self.alpha_min <= self.alpha_max < 1.0:
            raise ValueError("invalid alpha clamp")
        if not self.alpha_min <= self.alpha_init <= self.alpha_max:
            raise ValueError("alpha_init outside the clamp")
        if self.r_min_bps < 0.0:
            raise ValueError("r_min_bps must be non-negative")
        if self.gain_db_min is None or self.gain_db_max is None:
            lo, hi = gain_feature_bounds(self.channel, self.area_side,
                                         self.h0, self.h_max)
            if self.gain_db_min is None:
                self.gain_db_min = lo
            if self.gain_db_max is None:
                self.gain_db_max = hi
        if self.gain_db_min >= self.gain_db_max:
            raise ValueError("gain_db_min must be below gain_db_max")

    @property
    def n_ue(self) -> int:
        return self.users.shape[0]

    @property
    def n_clusters(self) -> int:
        return self.users.shape[0] // 2


def gain_feature_bounds(channel: ChannelParams, area_side: float, h0: float,
                        h_max: float) -> tuple[float, float]:
    """dB bounds of the achievable per-pair gain over the scenario geometry:
    LoS directly overhead at h0 up to NLoS across the area diagonal at h_max."""
    d_min = h0
    d_max = math.sqrt(2.0 * area_side ** 2 + h_max ** 2)
    g_max = path_gain(channel, LinkKind.LOS, d_min)
    g_min = path_gain(channel, LinkKind.NLOS, d_max)
    return 10.0 * math.log10(g_min), 10.0 * math.log10(g_max)


@dataclass(frozen=True)
class ClusterPairing:
    """User indices per cluster; strong[c] has the better initial gain."""

    strong: tuple[int, ...]
    weak: tuple[int, ...]

    @property
    def n_clusters(self) -> int:
        return len(self.strong)


def cluster_users(scenario: Scenario) -> ClusterPairing:
    """Pair users best-with-worst on gains at the initial hover position.

    Gains are evaluated under pure LoS from (0, 0, h_init); the sort is
    stable, so equal gains break toward the lower user index.
    """
    d = np.sqrt(scenario.users[:, 0] ** 2 + scenario.users[:, 1] ** 2
                + scenario.h_init ** 2)
    gains = np.array([path_gain(scenario.channel, LinkKind.LOS, float(di))
                      for di in d])
    order = np.argsort(-gains, kind="stable")
    n = scenario.n_ue
    strong = tuple(int(order[k]) for k in range(n // 2))
    weak = tuple(int(order[n - 1 - k]) for k in range(n // 2))
    return ClusterPairing(strong=strong, weak=weak)


@dataclass(frozen=True)
class ActionSpec:
    """Joint sign actions over 3 motion axes plus one power axis per cluster."""

    dims: int
    count: int


def build_action_spec(n_ue: int) -> ActionSpec:
    dims = 3 + n_ue // 2
    return ActionSpec(dims=dims, count=2 ** dims)


def decode_action(spec: ActionSpec, index: int) -> np.ndarray:
    """Map an action index to per-axis signs, least significant bit first:
    bit j set means +1 along axis j, order (dx, dy, dh, cluster 0, ...)."""
    if not 0 <= index < spec.count:
        raise ValueError("action index %r outside [0, %d)" % (index, spec.count))
    return np.array([1.0 if (index >> j) & 1 else -1.0
                     for j in range(spec.dims)])


@dataclass
class NetworkSnapshot:
    """Full network state after one transition."""

    uav: np.ndarray
    alphas: list[ClusterAllocation]
    link_kinds: list[LinkKind]
    gains: np.ndarray
    rates: np.ndarray
    step_index: int
    episode_index: int


def user_gains(scenario: Scenario, uav, rng=None, cached_kinds=None):
    """Per-user effective gain and realized link kind at a UAV position.

    Draws (when the link mode samples) consume rng in user order.
    """
    ch = scenario.channel
    h = float(uav[2])
    n = scenario.n_ue
    gains = np.empty(n)
    kinds = []
    for i in range(n):
        r = math.hypot(float(uav[0]) - scenario.users[i, 0],
                       float(uav[1]) - scenario.users[i, 1])
        d = math.hypot(r, h)
        # Links below the band's minimum elevation have no defined LoS
        # probability; clamp to the boundary (probability 0, pure NLoS) so
        # low flight over distant users keeps the step in-domain.
        theta = max(math.atan2(h, r), ch.theta0_rad)
        cached = cached_kinds[i] if cached_kinds is not None else None
        g, kind = effective_gain(ch, scenario.link_mode, theta, d, rng, cached)
        gains[i] = g
        kinds.append(kind)
    return gains, kinds


def cluster_rates(scenario: Scenario, pairing: ClusterPairing, gains,
                  alphas) -> np.ndarray:
    """Per-user rates; every cluster transmits over the full band."""
    ch = scenario.channel
    big_g = mimo_gain(ch)
    rates = np.empty(scenario.n_ue)
    for c in range(pairing.n_clusters):
        s, w = pairing.strong[c], pairing.weak[c]
        a = alphas[c].strong_alpha
        sinr_s = received_sinr(ch.p_t_w, float(gains[s]), big_g, a, 0.0,
                               ch.sigma2_w)
        sinr_w = received_sinr(ch.p_t_w, float(gains[w]), big_g, 1.0 - a, a,
                               ch.sigma2_w)
        rates[s] = user_rate(ch.w_bw_hz, sinr_s)
        rates[w] = user_rate(ch.w_bw_hz, sinr_w)
    return rates


def user_alphas(pairing: ClusterPairing, alphas, n_ue: int) -> np.ndarray:
    out = np.empty(n_ue)
    for c in range(pairing.n_clusters):
        out[pairing.strong[c]] = alphas[c].strong_alpha
        out[pairing.weak[c]] = alphas[c].weak_alpha
    return out


def compute_reward(rates, gains, weights: RewardWeights, r_min_bps: float,
                   w_bw_hz: float) -> float:
    """Five-term shaped reward on post-move rates and gains."""
    sat = rates >= r_min_bps
    n_sat = int(np.count_nonzero(sat))
    all_sat = 1.0 if n_sat == rates.size else 0.0
    reward = weights.w_r * (float(rates.sum()) / w_bw_hz) * all_sat
    # the fairness term is defined only for an unconstrained service floor
    if weights.w_f != 0.0 and r_min_bps == 0.0:
        reward += weights.w_f * jain_fairness(rates)
    reward += weights.w_g * float(gains.sum())
    reward += weights.w_s * n_sat
    if n_sat < rates.size:
        reward += weights.w_u * (float(rates[~sat].sum()) / w_bw_hz)
    return reward


def build_state(scenario: Scenario, pairing: ClusterPairing,
                snapshot: NetworkSnapshot) -> np.ndarray:
    """Flat observation: per user (dx, dy normalized by the half side, the
    user's own power coefficient, its gain on a clamped dB scale), then the
    altitude relative to the initial hover height."""
    n = scenario.n_ue
    half = scenario.area_side / 2.0
    span = scenario.gain_db_max - scenario.gain_db_min
    a_user = user_alphas(pairing, snapshot.alphas, n)
    state = np.empty(4 * n + 1)
    for i in range(n):
        state[4 * i] = (float(snapshot.uav[0]) - scenario.users[i, 0]) / half
        state[4 * i + 1] = (float(snapshot.uav[1]) - scenario.users[i, 1]) / half
        state[4 * i + 2] = a_user[i]
        feat = (10.0 * math.log10(float(snapshot.gains[i]))
                - scenario.gain_db_min) / span
        state[4 * i + 3] = min(1.0, max(0.0, feat))
    state[4 * n] = float(snapshot.uav[2]) / scenario.h_init
    return state


class UavNomaEnv:
    """Single-owner environment; snapshots are passed explicitly so a step is
    a pure function of (snapshot, action, rng)."""

    def __init__(self, scenario: Scenario, weights: RewardWeights):
        self.scenario = scenario
        self.weights = weights
        self.pairing = cluster_users(scenario)
        self.action_spec = build_action_spec(scenario.n_ue)
        self.state_dim = 4 * scenario.n_ue + 1
        self._episode = -1

    def reset(self, rng=None):
        sc = self.scenario
        self._episode += 1
        uav = np.array([0.0, 0.0, sc.h_init])
        alphas = [ClusterAllocation(sc.alpha_init, sc.alpha_min, sc.alpha_max)
                  for _ in range(sc.n_clusters)]
        gains, kinds = user_gains(sc, uav, rng, None)
        rates = cluster_rates(sc, self.pairing, gains, alphas)
        snap = NetworkSnapshot(uav=uav, alphas=alphas, link_kinds=kinds,
                               gains=gains, rates=rates, step_index=0,
                               episode_index=self._episode)
        return snap, build_state(sc, self.pairing, snap)

    def step(self, snapshot: NetworkSnapshot, action_index: int, rng=None):
        sc = self.scenario
        signs = decode_action(self.action_spec, action_index)
        half = sc.area_side / 2.0
        x = min(max(float(snapshot.uav[0]) + signs[0] * sc.delta_x, -half), half)
        y = min(max(float(snapshot.uav[1]) + signs[1] * sc.delta_y, -half), half)
        h = min(max(float(snapshot.uav[2]) + signs[2] * sc.delta_h, sc.h0),
                sc.h_max)
        uav = np.array([x, y, h])
        alphas = []
        for c, alloc in enumerate(snapshot.alphas):
            a = alloc.strong_alpha + signs[3 + c] * sc.delta_alpha
            a = min(max(a, sc.alpha_min), sc.alpha_max)
            alphas.append(ClusterAllocation(a, sc.alpha_min, sc.alpha_max))
        cached = (snapshot.link_kinds
                  if sc.link_mode is LinkMode.BERNOULLI_EPISODE else None)
        gains, kinds = user_gains(sc, uav, rng, cached)
        rates = cluster_rates(sc, self.pairing, gains, alphas)
        reward = compute_reward(rates, gains, self.weights, sc.r_min_bps,
                                sc.channel.w_bw_hz)
        snap = NetworkSnapshot(uav=uav, alphas=alphas, link_kinds=kinds,
                               gains=gains, rates=rates,
                               step_index=snapshot.step_index + 1,
                               episode_index=snapshot.episode_index)
        state = build_state(sc, self.pairing, snap)
        sat = rates >= sc.r_min_bps
        info = {
            "rates": rates,
            "gains": gains,
            "sum_rate_bps": float(rates.sum()),
            "jain": jain_fairness(rates),
            "satisfied": sat,
            "all_satisfied": bool(sat.all()),
        }
        return snap, state, reward, info
