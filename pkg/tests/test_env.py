import math

import numpy as np
import pytest

from skynoma.channel import (ChannelParams, LinkKind, LinkMode,
                             effective_gain, path_gain)
from skynoma.env import (RewardWeights, Scenario, UavNomaEnv,
                         build_action_spec, build_state, cluster_rates,
                         cluster_users, compute_reward, decode_action,
                         default_users, gain_feature_bounds, user_alphas,
                         user_gains)
from skynoma.noma import ClusterAllocation, received_sinr, user_rate

REL = 1e-12


def sub6_scenario(**kw):
    return Scenario(channel=ChannelParams.sub6(), **kw)


def test_default_scenario_shape():
    sc = sub6_scenario()
    assert sc.n_ue == 4 and sc.n_clusters == 2
    assert sc.h_init == 50.0 and sc.alpha_init == 0.5
    np.testing.assert_array_equal(sc.users, default_users())
    assert sc.gain_db_min < sc.gain_db_max


def test_scenario_validation():
    with pytest.raises(ValueError):
        sub6_scenario(users=[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(ValueError):
        sub6_scenario(users=[[60.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        sub6_scenario(h_init=5.0)
    with pytest.raises(ValueError):
        sub6_scenario(alpha_init=0.995)
    with pytest.raises(ValueError):
        sub6_scenario(delta_alpha=0.0)
    with pytest.raises(ValueError):
        RewardWeights(w_r=-1.0)


def test_gain_feature_bounds_span_geometry():
    ch = ChannelParams.sub6()
    lo, hi = gain_feature_bounds(ch, 100.0, 10.0, 300.0)
    assert lo < hi
    # widening the area can only lower the floor
    lo2, _ = gain_feature_bounds(ch, 400.0, 10.0, 300.0)
    assert lo2 < lo


def test_default_layout_pairing():
    pairing = cluster_users(sub6_scenario())
    assert pairing.strong == (0, 2)
    assert pairing.weak == (3, 1)


def test_default_layout_pairing_matches_fixture(fixture_rows):
    vals = {r["quantity"]: int(float(r["expected"]))
            for r in fixture_rows("hover.csv") if r["quantity"].count("_")}
    pairing = cluster_users(sub6_scenario())
    assert pairing.strong == (vals["strong_0"], vals["strong_1"])
    assert pairing.weak == (vals["weak_0"], vals["weak_1"])


def test_two_user_pairing_prefers_nearer_user():
    sc = sub6_scenario(users=[[40.0, 0.0], [3.0, 0.0]])
    pairing = cluster_users(sc)
    assert pairing.strong == (1,) and pairing.weak == (0,)


def test_line_layout_pairs_best_with_worst():
    sc = sub6_scenario(users=[[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]])
    pairing = cluster_users(sc)
    assert pairing.strong == (0, 1)
    assert pairing.weak == (3, 2)


def test_equal_gain_tie_breaks_to_lower_index():
    sc = sub6_scenario(users=[[10.0, 0.0], [-10.0, 0.0],
                              [0.0, 10.0], [0.0, -10.0]])
    pairing = cluster_users(sc)
    assert pairing.strong == (0, 1)
    assert pairing.weak == (3, 2)


def test_action_spec_size():
    spec = build_action_spec(4)
    assert spec.dims == 5 and spec.count == 32


def test_decode_action_encoding():
    spec = build_action_spec(4)
    np.testing.assert_array_equal(decode_action(spec, 0), -np.ones(5))
    np.testing.assert_array_equal(decode_action(spec, 31), np.ones(5))
    np.testing.assert_array_equal(decode_action(spec, 5),
                                  [1.0, -1.0, 1.0, -1.0, -1.0])
    with pytest.raises(ValueError):
        decode_action(spec, 32)
    with pytest.raises(ValueError):
        decode_action(spec, -1)


def test_user_gains_matches_effective_gain():
    sc = sub6_scenario()
    uav = np.array([5.0, -3.0, 60.0])
    gains, kinds = user_gains(sc, uav)
    for i in range(sc.n_ue):
        r = math.hypot(uav[0] - sc.users[i, 0], uav[1] - sc.users[i, 1])
        g, kind = effective_gain(sc.channel, LinkMode.EXPECTED,
                                 math.atan2(uav[2], r), math.hypot(r, uav[2]))
        assert gains[i] == g and kinds[i] is kind


def test_user_gains_bernoulli_episode_reuses_cache():
    sc = sub6_scenario(link_mode=LinkMode.BERNOULLI_EPISODE)
    uav = np.array([0.0, 0.0, 50.0])
    cached = [LinkKind.NLOS, LinkKind.LOS, LinkKind.NLOS, LinkKind.LOS]
    gains, kinds = user_gains(sc, uav, rng=None, cached_kinds=cached)
    assert kinds == cached


def test_cluster_rates_against_direct_composition():
    sc = sub6_scenario()
    pairing = cluster_users(sc)
    gains, _ = user_gains(sc, np.array([0.0, 0.0, 50.0]))
    alphas = [ClusterAllocation(0.3, sc.alpha_min, sc.alpha_max)
              for _ in range(2)]
    rates = cluster_rates(sc, pairing, gains, alphas)
    ch = sc.channel
    for c in range(2):
        s, w = pairing.strong[c], pairing.weak[c]
        want_s = user_rate(ch.w_bw_hz, received_sinr(
            ch.p_t_w, gains[s], 1.0, 0.3, 0.0, ch.sigma2_w))
        want_w = user_rate(ch.w_bw_hz, received_sinr(
            ch.p_t_w, gains[w], 1.0, 0.7, 0.3, ch.sigma2_w))
        assert math.isclose(rates[s], want_s, rel_tol=REL)
        assert math.isclose(rates[w], want_w, rel_tol=REL)


def test_user_alphas_scatter():
    pairing = cluster_users(sub6_scenario())
    alphas = [ClusterAllocation(0.2, 0.01, 0.99),
              ClusterAllocation(0.4, 0.01, 0.99)]
    a = user_alphas(pairing, alphas, 4)
    assert a[pairing.strong[0]] == 0.2 and a[pairing.weak[0]] == 0.8
    assert a[pairing.strong[1]] == 0.4 and a[pairing.weak[1]] == 0.6


def test_reward_matches_fixtures(fixture_rows):
    for row in fixture_rows("reward.csv"):
        rates = np.array([float(v) for v in row["rates"].split(";")])
        gains = np.array([float(v) for v in row["gains"].split(";")])
        w = [float(v) for v in row["weights"].split(";")]
        weights = RewardWeights(w_r=w[0], w_f=w[1], w_g=w[2], w_s=w[3],
                                w_u=w[4])
        got = compute_reward(rates, gains, weights, float(row["r_min_bps"]),
                             float(row["w_hz"]))
        assert math.isclose(got, float(row["expected"]), rel_tol=REL)


def test_reward_rate_term_landmark():
    w = 50e6
    rates = np.array([w, w, 0.0, 0.0])
    got = compute_reward(rates, np.zeros(4), RewardWeights(w_r=1.0), 0.0, w)
    assert got == 2.0


def test_reward_indicator_product_kills_rate_term():
    w = 2e9
    rates = np.array([4e9, 7e9, 2e9, 1e9])
    got = compute_reward(rates, np.zeros(4), RewardWeights(w_r=10.0), 3e9, w)
    assert got == 0.0


def test_reward_fairness_needs_zero_floor():
    rates = np.array([1e8, 2e8])
    fairness_only = RewardWeights(w_r=0.0, w_f=5.0)
    with_floor = compute_reward(rates, np.zeros(2), fairness_only, 1e6, 50e6)
    without = compute_reward(rates, np.zeros(2), fairness_only, 0.0, 50e6)
    assert with_floor == 0.0 and without > 0.0


def test_env_reset_state_layout():
    sc = sub6_scenario()
    env = UavNomaEnv(sc, RewardWeights())
    snap, state = env.reset()
    np.testing.assert_array_equal(snap.uav, [0.0, 0.0, 50.0])
    assert all(a.strong_alpha == 0.5 for a in snap.alphas)
    assert state.shape == (17,)
    assert state[16] == 1.0
    for i in range(4):
        assert state[4 * i] == -sc.users[i, 0] / 50.0
        assert state[4 * i + 1] == -sc.users[i, 1] / 50.0
        assert state[4 * i + 2] == 0.5
        assert 0.0 <= state[4 * i + 3] <= 1.0


def test_state_zero_offset_above_user():
    sc = sub6_scenario(users=[[0.0, 0.0], [30.0, 30.0]])
    env = UavNomaEnv(sc, RewardWeights())
    snap, state = env.reset()
    assert state[0] == 0.0 and state[1] == 0.0


def test_env_reset_deterministic_with_seeded_rng():
    sc = sub6_scenario(link_mode=LinkMode.BERNOULLI_STEP)
    env = UavNomaEnv(sc, RewardWeights())
    _, s1 = env.reset(np.random.default_rng(42))
    _, s2 = env.reset(np.random.default_rng(42))
    np.testing.assert_array_equal(s1, s2)


def test_step_clamps_to_area_and_alpha_bounds():
    sc = sub6_scenario()
    env = UavNomaEnv(sc, RewardWeights())
    snap, _ = env.reset()
    snap.uav = np.array([50.0, -50.0, 300.0])
    snap.alphas = [ClusterAllocation(0.99, 0.01, 0.99),
                   ClusterAllocation(0.01, 0.01, 0.99)]
    # +x, -y, +h, +alpha0, -alpha1: every axis already pinned at its limit
    idx = 0b01101
    out, _, _, _ = env.step(snap, idx)
    np.testing.assert_array_equal(out.uav, [50.0, -51.0 + 1.0, 300.0])
    assert out.uav[1] == -50.0
    assert out.alphas[0].strong_alpha == 0.99
    assert math.isclose(out.alphas[0].weak_alpha, 0.01, rel_tol=REL)
    assert out.alphas[1].strong_alpha == 0.01


def test_step_floor_clamp():
    sc = sub6_scenario()
    env = UavNomaEnv(sc, RewardWeights())
    snap, _ = env.reset()
    snap.uav = np.array([0.0, 0.0, 10.0])
    out, _, _, _ = env.step(snap, 0)
    assert out.uav[2] == sc.h0


def test_low_elevation_links_fall_back_to_nlos():
    # At the altitude floor the far users sit below the sub-6 model's
    # minimum elevation; those links must resolve as NLoS, not error out.
    sc = sub6_scenario(link_mode=LinkMode.EXPECTED)
    ch = sc.channel
    gains, kinds = user_gains(sc, np.array([0.0, 0.0, sc.h0]))
    far = 1  # user (-44, -49): elevation well under theta0 at h=10
    r = math.hypot(44.0, 49.0)
    d = math.hypot(r, sc.h0)
    assert math.atan2(sc.h0, r) < ch.theta0_rad
    assert kinds[far] is LinkKind.NLOS
    assert gains[far] == path_gain(ch, LinkKind.NLOS, d)


def test_step_moves_and_rewards_consistently():
    sc = sub6_scenario()
    env = UavNomaEnv(sc, RewardWeights(w_r=1.0, w_g=1e7))
    snap, _ = env.reset()
    out, state, reward, info = env.step(snap, 0b00111)
    np.testing.assert_array_equal(out.uav, [1.0, 1.0, 51.0])
    assert out.alphas[0].strong_alpha == 0.49
    want = compute_reward(out.rates, out.gains, env.weights, sc.r_min_bps,
                          sc.channel.w_bw_hz)
    assert reward == want
    assert info["sum_rate_bps"] == float(out.rates.sum())
    assert info["all_satisfied"] is True
    np.testing.assert_array_equal(state,
                                  build_state(sc, env.pairing, out))


def test_episode_counter_advances_on_reset():
    env = UavNomaEnv(sub6_scenario(), RewardWeights())
    first, _ = env.reset()
    second, _ = env.reset()
    assert first.episode_index == 0 and second.episode_index == 1


def test_full_episode_stays_in_bounds():
    sc = sub6_scenario(link_mode=LinkMode.BERNOULLI_STEP)
    env = UavNomaEnv(sc, RewardWeights(w_r=1.0))
    rng = np.random.default_rng(8)
    snap, state = env.reset(rng)
    for _ in range(200):
        action = int(rng.integers(env.action_spec.count))
        snap, state, reward, info = env.step(snap, action, rng)
        assert abs(snap.uav[0]) <= 50.0 and abs(snap.uav[1]) <= 50.0
        assert sc.h0 <= snap.uav[2] <= sc.h_max
        for alloc in snap.alphas:
            assert sc.alpha_min <= alloc.strong_alpha <= sc.alpha_max
        assert np.isfinite(state).all() and np.isfinite(reward)


def test_seeded_reset_and_first_step_match_reference(fixtures_dir):
    import os

    from skynoma.harness import substream

    ref = np.load(os.path.join(fixtures_dir, "reference.npz"))
    sc = sub6_scenario(link_mode=LinkMode.ALWAYS_LOS)
    env = UavNomaEnv(sc, RewardWeights(w_r=1.0, w_g=1e7))
    snap, state0 = env.reset(rng=substream(3, "env"))
    np.testing.assert_array_equal(state0, ref["env_state0"])
    _, state1, reward, _ = env.step(snap, 0)
    np.testing.assert_array_equal(state1, ref["env_state1"])
    assert reward == float(ref["env_reward"])
