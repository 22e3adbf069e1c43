"""Training, evaluation and sweep drivers plus their CSV emitters.

All randomness flows from one root seed through named substreams, so a rerun
with the same config reproduces every trajectory, minibatch and layout draw
bit for bit.
"""

from __future__ import annotations

import csv
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agent import (ExplorationSchedule, ReplayBuffer, Transition, epsilon,
                    maybe_sync_target, select_action, train_step)
from .env import RewardWeights, Scenario, UavNomaEnv
from .net import AdamState, QNetParams, clone_params, init_network, q_values

STREAM_NAMES = ("env", "init", "exploration", "sampling", "layouts")


def substream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Independent generator for one named stream under a root seed."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    idx = STREAM_NAMES.index(name)
    return np.random.default_rng(np.random.SeedSequence([seed, idx, *extra]))


def seed_streams(seed: int) -> dict[str, np.random.Generator]:
    return {name: substream(seed, name) for name in STREAM_NAMES}


@dataclass
class TrainConfig:
    scenario: Scenario
    weights: RewardWeights = field(default_factory=RewardWeights)
    episodes: int = 1000
    steps_per_episode: int = 300
    batch_size: int = 128
    buffer_capacity: int = 15000
    learning_rate: float = 0.001
    gamma: float = 0.999
    target_sync: int = 3000
    schedule: ExplorationSchedule = field(default_factory=ExplorationSchedule)
    mode: str = "dueling"
    seed: int = 0

    def __post_init__(self):
        for name in ("episodes", "steps_per_episode", "batch_size",
                     "buffer_capacity", "target_sync"):
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive" % name)
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.mode not in ("dueling", "vanilla"):
            raise ValueError("mode must be 'dueling' or 'vanilla'")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class EpisodeRecord:
    episode: int
    mean_rate_bps: float
    mean_jain: float
    mean_reward: float
    final_uav: tuple[float, float, float]
    all_satisfied_fraction: float


def train(config: TrainConfig, trace_path=None, log_every: int = 0):
    """Run the full training loop; returns (policy params, episode records).

    Training updates begin once the buffer size exceeds the batch size; the
    target network re-syncs on global steps that are multiples of
    target_sync (step 0 is the initial clone).
    """
    streams = seed_streams(config.seed)
    env = UavNomaEnv(config.scenario, config.weights)
    policy = init_network(env.state_dim, env.action_spec.count, config.mode,
                          streams["init"])
    target = clone_params(policy)
    adam = AdamState.for_params(policy)
    buffer = ReplayBuffer(config.buffer_capacity, env.state_dim)
    steps = config.steps_per_episode
    records: list[EpisodeRecord] = []
    trace_fh = None
    trace = None
    if trace_path is not None:
        trace_fh = open(trace_path, "w", newline="")
        trace = csv.writer(trace_fh)
        n_c = config.scenario.n_clusters
        n_u = config.scenario.n_ue
        trace.writerow(["episode", "step", "x", "y", "h"]
                       + ["alpha_%d" % c for c in range(n_c)]
                       + ["rate_%d" % u for u in range(n_u)] + ["reward"])
    try:
        for ep in range(config.episodes):
            snap, state = env.reset(streams["env"])
            rate_sum = jain_sum = reward_sum = 0.0
            sat_steps = 0
            for tau in range(steps):
                gstep = ep * steps + tau
                eps = epsilon(config.schedule, gstep)
                action = select_action(policy, state, eps,
                                       streams["exploration"])
                snap, next_state, reward, info = env.step(snap, action,
                                                          streams["env"])
                buffer.push(Transition(state, action, reward, next_state))
                state = next_state
                if len(buffer) > config.batch_size:
                    train_step(policy, target, adam, buffer,
                               config.batch_size, config.gamma,
                               config.learning_rate, streams["sampling"])
                    target = maybe_sync_target(policy, target, gstep,
                                               config.target_sync)
                rate_sum += info["sum_rate_bps"]
                jain_sum += info["jain"]
                reward_sum += reward
                sat_steps += info["all_satisfied"]
                if trace is not None:
                    trace.writerow([ep, tau] + [_fmt(v) for v in snap.uav]
                                   + [_fmt(a.strong_alpha) for a in snap.alphas]
                                   + [_fmt(r) for r in snap.rates]
                                   + [_fmt(reward)])
            records.append(EpisodeRecord(
                episode=ep,
                mean_rate_bps=rate_sum / steps,
                mean_jain=jain_sum / steps,
                mean_reward=reward_sum / steps,
                final_uav=(float(snap.uav[0]), float(snap.uav[1]),
                           float(snap.uav[2])),
                all_satisfied_fraction=sat_steps / steps,
            ))
            if log_every and (ep + 1) % log_every == 0:
                r_tot, j_f = moving_metrics(records)
                print("episode %d  mean rate %.3e bps  window rate %.3e bps"
                      % (ep, records[-1].mean_rate_bps, r_tot[-1]),
                      file=sys.stderr)
    finally:
        if trace_fh is not None:
            trace_fh.close()
    return policy, records


def moving_metrics(records, window: int = 100):
    """Windowed means of per-episode rate and Jain, zero until a full window
    of episodes exists (the window counts the current episode)."""
    if window < 1:
        raise ValueError("window must be positive")
    rates = np.array([r.mean_rate_bps for r in records])
    jains = np.array([r.mean_jain for r in records])
    n = len(records)
    r_tot = np.zeros(n)
    j_f = np.zeros(n)
    for i in range(window - 1, n):
        r_tot[i] = rates[i - window + 1:i + 1].mean()
        j_f[i] = jains[i - window + 1:i + 1].mean()
    return r_tot, j_f


@dataclass(frozen=True)
class EvalResult:
    avg_rate_bps: float
    avg_jain: float
    satisfaction_fraction: float
    steps: int


def evaluate(params: QNetParams, scenario: Scenario, steps: int = 1000,
             seed: int = 0) -> EvalResult:
    """Greedy rollout without updates; satisfaction counts steps where every
    user meets the scenario's rate floor."""
    env = UavNomaEnv(scenario, RewardWeights())
    if params.input_dim != env.state_dim:
        raise ValueError("checkpoint expects input dim %d but the scenario "
                         "produces states of dim %d"
                         % (params.input_dim, env.state_dim))
    if steps < 1:
        raise ValueError("steps must be positive")
    rng_env = substream(seed, "env")
    snap, state = env.reset(rng_env)
    rate_sum = jain_sum = 0.0
    sat_steps = 0
    for _ in range(steps):
        action = int(np.argmax(q_values(params, state[None, :])[0]))
        snap, state, _, info = env.step(snap, action, rng_env)
        rate_sum += info["sum_rate_bps"]
        jain_sum += info["jain"]
        sat_steps += info["all_satisfied"]
    return EvalResult(avg_rate_bps=rate_sum / steps, avg_jain=jain_sum / steps,
                      satisfaction_fraction=sat_steps / steps, steps=steps)


@dataclass(frozen=True)
class SweepPoint:
    rmin_over_w: float
    r_e_tot_bps: float
    final_satisfaction: float


def _run_map(fn, items, jobs: int):
    """Run fn over items, optionally on worker threads; results keep the
    submission order so the (single) collector writes deterministic output."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def rmin_sweep(config: TrainConfig, ratios, log_every: int = 0,
               jobs: int = 1):
    """Train one agent per rate-floor point (r_min = ratio * bandwidth);
    reports the final windowed sum rate and the fraction of final-episode
    steps with every user satisfied."""
    ratios = [float(r) for r in ratios]
    if any(r < 0.0 for r in ratios):
        raise ValueError("rate-floor ratios must be non-negative")

    def one(ratio: float) -> SweepPoint:
        scenario = dataclasses.replace(
            config.scenario, r_min_bps=ratio * config.scenario.channel.w_bw_hz)
        cfg = dataclasses.replace(config, scenario=scenario)
        _, records = train(cfg, log_every=log_every)
        r_tot, _ = moving_metrics(records)
        return SweepPoint(rmin_over_w=ratio, r_e_tot_bps=float(r_tot[-1]),
                          final_satisfaction=records[-1].all_satisfied_fraction)

    return _run_map(one, ratios, jobs)


@dataclass(frozen=True)
class LayoutRow:
    layout: int
    rate_a_bps: float
    rate_b_bps: float
    ratio_pct: float


@dataclass(frozen=True)
class LayoutSweepResult:
    rows: tuple[LayoutRow, ...]
    win_fraction: float

    def ratios(self) -> np.ndarray:
        return np.array([r.ratio_pct for r in self.rows])


def layout_sweep(params_a: QNetParams, params_b: QNetParams,
                 scenario: Scenario, n_layouts: int = 100, steps: int = 1000,
                 seed: int = 0, jobs: int = 1) -> LayoutSweepResult:
    """Evaluate two policies on shared random user layouts (paired seeds).

    Wins are strict (rate_a > rate_b); ratio_pct is 100 * rate_a / rate_b.
    All layout and seed draws happen up front on the calling thread, so the
    result is identical for any jobs value.
    """
    if n_layouts < 1:
        raise ValueError("n_layouts must be positive")
    rng = substream(seed, "layouts")
    half = scenario.area_side / 2.0
    draws = []
    for k in range(n_layouts):
        users = rng.uniform(-half, half, size=(scenario.n_ue, 2))
        draws.append((k, users, int(rng.integers(2 ** 31))))

    def one(draw) -> LayoutRow:
        k, users, eval_seed = draw
        layout_scenario = dataclasses.replace(scenario, users=users)
        res_a = evaluate(params_a, layout_scenario, steps, eval_seed)
        res_b = evaluate(params_b, layout_scenario, steps, eval_seed)
        # grouped so equal rates give a ratio of exactly 100.0
        return LayoutRow(layout=k, rate_a_bps=res_a.avg_rate_bps,
                         rate_b_bps=res_b.avg_rate_bps,
                         ratio_pct=100.0 * (res_a.avg_rate_bps
                                            / res_b.avg_rate_bps))

    rows = _run_map(one, draws, jobs)
    wins = sum(r.rate_a_bps > r.rate_b_bps for r in rows)
    return LayoutSweepResult(rows=tuple(rows), win_fraction=wins / n_layouts)


def _fmt(x) -> str:
    return repr(float(x))


EPISODES_HEADER = ["episode", "mean_rate_bps", "mean_jain", "mean_reward",
                   "R_e_tot", "J_e_f"]


def write_episodes_csv(path, records, window: int = 100) -> None:
    r_tot, j_f = moving_metrics(records, window)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EPISODES_HEADER)
        for i, rec in enumerate(records):
            w.writerow([rec.episode, _fmt(rec.mean_rate_bps),
                        _fmt(rec.mean_jain), _fmt(rec.mean_reward),
                        _fmt(r_tot[i]), _fmt(j_f[i])])


EVAL_HEADER = ["steps", "avg_rate_bps", "avg_jain", "satisfaction_fraction"]


def write_eval_csv(path, result: EvalResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVAL_HEADER)
        w.writerow([result.steps, _fmt(result.avg_rate_bps),
                    _fmt(result.avg_jain), _fmt(result.satisfaction_fraction)])


SWEEP_HEADER = ["rmin_over_w", "r_e_tot_bps", "final_satisfaction"]


def write_sweep_csv(path, points) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_HEADER)
        for p in points:
            w.writerow([_fmt(p.rmin_over_w), _fmt(p.r_e_tot_bps),
                        _fmt(p.final_satisfaction)])


LAYOUTS_HEADER = ["layout", "rate_a_bps", "rate_b_bps", "ratio_pct"]


def write_layouts_csv(path, result: LayoutSweepResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LAYOUTS_HEADER)
        for row in result.rows:
            w.writerow([row.layout, _fmt(row.rate_a_bps), _fmt(row.rate_b_bps),
                        _fmt(row.ratio_pct)])
