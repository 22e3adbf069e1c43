"""Non-learning baselines: a static hover policy and an exhaustive grid
oracle over positions and power splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkMode
from .env import (ClusterPairing, Scenario, cluster_rates, cluster_users,
                  user_gains)
from .harness import EvalResult, _fmt, substream
from .noma import ClusterAllocation, jain_fairness, received_sinr, user_rate

DETERMINISTIC_MODES = (LinkMode.ALWAYS_LOS, LinkMode.EXPECTED)


def static_hover_eval(scenario: Scenario, steps: int = 1000, seed: int = 0,
                      strong_alpha: float = 0.3, position=None) -> EvalResult:
    """Metrics of a UAV parked over the area center with a fixed power split."""
    if steps < 1:
        raise ValueError("steps must be positive")
    uav = np.array([0.0, 0.0, scenario.h_init] if position is None
                   else position, dtype=np.float64)
    pairing = cluster_users(scenario)
    alphas = [ClusterAllocation(strong_alpha, scenario.alpha_min,
                                scenario.alpha_max)
              for _ in range(scenario.n_clusters)]
    rng = substream(seed, "env")
    rate_sum = jain_sum = 0.0
    sat_steps = 0
    cached = None
    for t in range(steps):
        if scenario.link_mode is LinkMode.BERNOULLI_EPISODE:
            gains, cached = user_gains(scenario, uav, rng, cached)
        else:
            gains, _ = user_gains(scenario, uav, rng, None)
        rates = cluster_rates(scenario, pairing, gains, alphas)
        rate_sum += float(rates.sum())
        jain_sum += jain_fairness(rates)
        sat_steps += bool(np.all(rates >= scenario.r_min_bps))
    return EvalResult(avg_rate_bps=rate_sum / steps, avg_jain=jain_sum / steps,
                      satisfaction_fraction=sat_steps / steps, steps=steps)


@dataclass(frozen=True)
class GridSpec:
    """Search grid: horizontal step over the full area, explicit altitude
    levels, a strong-alpha step, and the scalarized objective."""

    xy_step: float
    h_levels: tuple[float, ...]
    alpha_step: float
    w_r: float = 1.0
    w_f: float = 0.0
    r_min_bps: float = 0.0

    def __post_init__(self):
        if self.xy_step <= 0.0 or self.alpha_step <= 0.0:
            raise ValueError("grid steps must be positive")
        if not 0.0 < self.alpha_step < 1.0:
            raise ValueError("alpha_step must lie in (0, 1)")
        if len(self.h_levels) == 0:
            raise ValueError("need at least one altitude level")
        if list(self.h_levels) != sorted(self.h_levels):
            # ascending levels keep the lexicographic tie-break well defined
            raise ValueError("h_levels must be ascending")
        if self.r_min_bps < 0.0:
            raise ValueError("r_min_bps must be non-negative")


def grid_axis(half: float, step: float) -> np.ndarray:
    """Symmetric axis [-half, half] inclusive; the endpoint is kept when the
    span is an exact multiple of the step."""
    n = int(math.floor(half * 2.0 / step + 1e-9))
    return -half + step * np.arange(n + 1)


def alpha_axis(spec: GridSpec, scenario: Scenario) -> np.ndarray:
    """Strong-alpha grid: multiples of alpha_step inside the scenario clamp."""
    n = int(math.floor(1.0 / spec.alpha_step + 1e-9))
    vals = spec.alpha_step * np.arange(1, n + 1)
    vals = vals[(vals >= scenario.alpha_min) & (vals <= scenario.alpha_max)]
    if vals.size == 0:
        raise ValueError("alpha grid is empty inside the clamp")
    return vals


@dataclass(frozen=True)
class OracleResult:
    x: float
    y: float
    h: float
    strong_alphas: tuple[float, ...]
    objective: float
    rates: tuple[float, ...]


def grid_search_oracle(scenario: Scenario, spec: GridSpec) -> OracleResult | None:
    """Exhaustive maximization of w_r * sum rate + w_f * Jain over the grid.

    Deterministic link modes only. Points where any user falls below
    r_min_bps are discarded; ties resolve to the lexicographically smallest
    (x, y, h, alphas). Returns None when no grid point is feasible.
    """
    if scenario.link_mode not in DETERMINISTIC_MODES:
        raise ValueError("the oracle needs a deterministic link mode")
    for h in spec.h_levels:
        if not scenario.h0 <= h <= scenario.h_max:
            raise ValueError("altitude level %r outside [h0, h_max]" % (h,))
    pairing = cluster_users(scenario)
    alphas = alpha_axis(spec, scenario)
    axis = grid_axis(scenario.area_side / 2.0, spec.xy_step)

    best = None
    best_obj = -math.inf
    for x in axis:
        for y in axis:
            for h in spec.h_levels:
                gains, _ = user_gains(scenario, (x, y, h), None, None)
                obj, idx, rates = _best_alphas(scenario, pairing, gains,
                                               alphas, spec)
                if obj > best_obj:
                    best_obj = obj
                    best = OracleResult(
                        x=float(x), y=float(y), h=float(h),
                        strong_alphas=tuple(float(alphas[i]) for i in idx),
                        objective=float(obj), rates=tuple(rates))
    return best


def _best_alphas(scenario: Scenario, pairing: ClusterPairing, gains,
                 alphas: np.ndarray, spec: GridSpec):
    """Best objective over the per-cluster alpha product space at one
    position. Returns (objective, alpha index per cluster, per-user rates);
    objective is -inf when nothing is feasible."""
    ch = scenario.channel
    n_c = pairing.n_clusters
    n_a = alphas.size
    # per-cluster rate tables over the alpha axis
    tables = []
    for c in range(n_c):
        s, w = pairing.strong[c], pairing.weak[c]
        table = np.empty((n_a, 2))
        for i, a in enumerate(alphas):
            table[i] = _pair_rates(ch, (gains[s], gains[w]), float(a))
        tables.append(table)

    shape = (n_a,) * n_c
    total = np.zeros(shape)
    sumsq = np.zeros(shape)
    min_rate = np.full(shape, math.inf)
    for c, table in enumerate(tables):
        view = [1] * n_c
        view[c] = n_a
        s_rate = table[:, 0].reshape(view)
        w_rate = table[:, 1].reshape(view)
        total = total + s_rate + w_rate
        sumsq = sumsq + s_rate ** 2 + w_rate ** 2
        min_rate = np.minimum(min_rate, np.minimum(s_rate, w_rate))
    n_ue = 2 * n_c
    jain = np.where(total > 0.0, total ** 2 / (n_ue * sumsq), 0.0)
    objective = spec.w_r * total + spec.w_f * jain
    objective = np.where(min_rate >= spec.r_min_bps, objective, -math.inf)
    flat = int(np.argmax(objective))
    obj = float(objective.flat[flat])
    if math.isinf(obj):
        return -math.inf, (), ()
    idx = np.unravel_index(flat, shape)
    rates = np.empty(n_ue)
    for c, table in enumerate(tables):
        rates[pairing.strong[c]] = table[idx[c], 0]
        rates[pairing.weak[c]] = table[idx[c], 1]
    return obj, idx, rates


def _pair_rates(ch, pair_gains, strong_alpha: float):
    """Rates (strong, weak) of one cluster from its two linear gains."""
    big_g = float(ch.n_uav_antennas * ch.n_ue_antennas)
    s = received_sinr(ch.p_t_w, float(pair_gains[0]), big_g, strong_alpha,
                      0.0, ch.sigma2_w)
    w = received_sinr(ch.p_t_w, float(pair_gains[1]), big_g,
                      1.0 - strong_alpha, strong_alpha, ch.sigma2_w)
    return user_rate(ch.w_bw_hz, s), user_rate(ch.w_bw_hz, w)


ORACLE_STATIC_HEADER = ["avg_rate_bps", "avg_jain", "satisfaction_fraction"]


def write_baseline_csv(path, result: EvalResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ORACLE_STATIC_HEADER)
        w.writerow([_fmt(result.avg_rate_bps), _fmt(result.avg_jain),
                    _fmt(result.satisfaction_fraction)])


def oracle_header(n_clusters: int, n_ue: int) -> list[str]:
    return (["x", "y", "h"] + ["alpha_%d" % c for c in range(n_clusters)]
            + ["objective"] + ["rate_%d" % u for u in range(n_ue)])


def write_oracle_csv(path, result: OracleResult | None, n_clusters: int,
                     n_ue: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(oracle_header(n_clusters, n_ue))
        if result is not None:
            w.writerow([_fmt(result.x), _fmt(result.y), _fmt(result.h)]
                       + [_fmt(a) for a in result.strong_alphas]
                       + [_fmt(result.objective)]
                       + [_fmt(r) for r in result.rates])
