"""Freeze seeded reference traces of the package itself into reference.npz.

Unlike generate_fixtures.py (independent oracles), these are regression pins:
they were recorded from a verified build and exist to catch unintended drift
in seeded behavior: rng stream layout, init order, training arithmetic.
Regenerate only after deliberately changing one of those, and re-verify.

Run from the repository root:  python3 tests/fixtures/generate_reference.py
"""

import math
import os

import numpy as np

from skynoma.agent import ReplayBuffer, Transition, td_targets, train_step
from skynoma.channel import ChannelParams, LinkKind, LinkMode, effective_gain
from skynoma.env import RewardWeights, Scenario, UavNomaEnv
from skynoma.harness import TrainConfig, substream, train
from skynoma.net import AdamState, clone_params, forward, init_network

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "reference.npz")


def bernoulli_draws():
    """Ten seeded mmWave draws at theta=45 deg, d=70 m."""
    ch = ChannelParams.mmwave()
    rng = substream(7, "env")
    gains = np.empty(10)
    kinds = np.empty(10, dtype=np.int64)
    for i in range(10):
        g, kind = effective_gain(ch, LinkMode.BERNOULLI_STEP, math.pi / 4,
                                 70.0, rng)
        gains[i] = g
        kinds[i] = 1 if kind is LinkKind.LOS else 0
    return gains, kinds


def env_first_step():
    """Default sub-6 scenario, seeded reset, action 0."""
    sc = Scenario(channel=ChannelParams.sub6(), link_mode=LinkMode.ALWAYS_LOS)
    env = UavNomaEnv(sc, RewardWeights(w_r=1.0, w_g=1e7))
    snap, state0 = env.reset(rng=substream(3, "env"))
    _, state1, reward, _ = env.step(snap, 0)
    return state0, state1, np.float64(reward)


def net_outputs():
    """Seeded dueling net on a fixed probe batch."""
    params = init_network(17, 32, "dueling", substream(11, "init"), hidden=8)
    states = substream(11, "env").uniform(-1.0, 1.0, size=(3, 17))
    v, a = forward(params, states)
    return states, v, a


def agent_numbers():
    """td_targets on the seeded net, then one train_step loss."""
    rng = substream(5, "init")
    policy = init_network(4, 3, "dueling", rng, hidden=6)
    target = clone_params(policy)
    draw = substream(5, "env")
    rewards = draw.uniform(0.0, 2.0, size=4)
    next_states = draw.uniform(-1.0, 1.0, size=(4, 4))
    targets = td_targets(rewards, next_states, target, 0.9)

    buffer = ReplayBuffer(capacity=32, state_dim=4)
    for i in range(8):
        buffer.push(Transition(draw.uniform(-1.0, 1.0, size=4), int(i % 3),
                               float(rewards[i % 4]),
                               draw.uniform(-1.0, 1.0, size=4)))
    adam = AdamState.for_params(policy)
    loss = train_step(policy, target, adam, buffer, batch_size=4, gamma=0.9,
                      lr=0.001, rng=substream(5, "sampling"))
    return targets, np.float64(loss)


def short_training():
    """First three episode records of a small seeded run."""
    sc = Scenario(channel=ChannelParams.sub6(), link_mode=LinkMode.ALWAYS_LOS)
    config = TrainConfig(scenario=sc, weights=RewardWeights(w_r=1.0, w_g=1e7),
                         episodes=3, steps_per_episode=40, batch_size=16,
                         buffer_capacity=256, target_sync=60, seed=13)
    _, records = train(config)
    rows = np.array([[r.mean_rate_bps, r.mean_jain, r.mean_reward,
                      r.final_uav[0], r.final_uav[1], r.final_uav[2]]
                     for r in records])
    return rows


def main():
    gains, kinds = bernoulli_draws()
    state0, state1, reward = env_first_step()
    probe, v, a = net_outputs()
    targets, loss = agent_numbers()
    episodes = short_training()
    np.savez(OUT,
             bern_gains=gains, bern_kinds=kinds,
             env_state0=state0, env_state1=state1, env_reward=reward,
             net_probe=probe, net_v=v, net_a=a,
             agent_targets=targets, agent_loss=loss,
             train_rows=episodes)
    print("wrote %s" % OUT)


if __name__ == "__main__":
    main()
