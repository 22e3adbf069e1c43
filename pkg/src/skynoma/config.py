"""Config files: INI-style sections mirroring the module types.

Four sections are recognized (channel, scenario, train, reward); every key
has a default, unknown sections or keys are hard errors, and dotted CLI
overrides (section.key=value) are applied before type parsing. The resolved
snapshot (every effective value, defaults included) is what run manifests
record and hash.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import os

from .agent import ExplorationSchedule
from .channel import ChannelParams, LinkMode
from .env import RewardWeights, Scenario
from .harness import TrainConfig


def _float_or_auto(s):
    return None if s == "auto" else float(s)


def _users(s):
    pairs = [p.strip() for p in s.split(";") if p.strip()]
    out = []
    for p in pairs:
        xy = p.split(",")
        if len(xy) != 2:
            raise ValueError("user %r is not 'x,y'" % p)
        out.append([float(xy[0]), float(xy[1])])
    if not out:
        raise ValueError("users must list at least one 'x,y' pair")
    return out


_CHANNEL_COMMON = {
    "p_t_dbm": float, "sigma2_dbm": float, "f_c_hz": float, "w_bw_hz": float,
    "c_env": float, "y_env": float, "n_uav_antennas": int,
    "n_ue_antennas": int,
}
CHANNEL_KEYS = {
    "sub6": {**_CHANNEL_COMMON, "eta_los_db": float, "eta_nlos_db": float,
             "theta0_deg": float},
    "mmwave": {**_CHANNEL_COMMON, "c_los_db": float, "c_nlos_db": float,
               "a_los": float, "a_nlos": float},
}
CHANNEL_DEFAULTS = {
    "sub6": {"p_t_dbm": 30.0, "sigma2_dbm": -88.0, "f_c_hz": 2e9,
             "w_bw_hz": 50e6, "c_env": 0.6, "y_env": 0.11,
             "eta_los_db": 1.0, "eta_nlos_db": 20.0, "theta0_deg": 15.0,
             "n_uav_antennas": 1, "n_ue_antennas": 1},
    "mmwave": {"p_t_dbm": 20.0, "sigma2_dbm": -84.0, "f_c_hz": 28e9,
               "w_bw_hz": 2e9, "c_env": 9.6117, "y_env": 0.1581,
               "c_los_db": -64.0, "c_nlos_db": -72.0, "a_los": 2.0,
               "a_nlos": 2.92, "n_uav_antennas": 8, "n_ue_antennas": 8},
}

SCENARIO_KEYS = {
    "users": _users, "area_side": float, "h0": float, "h_max": float,
    "h_init": float, "alpha_init": float, "delta_x": float, "delta_y": float,
    "delta_h": float, "delta_alpha": float, "r_min_over_w": float,
    "alpha_min": float, "alpha_max": float, "gain_db_min": _float_or_auto,
    "gain_db_max": _float_or_auto, "link_mode": str,
}
SCENARIO_DEFAULTS = {
    "users": [[4.0, 15.0], [-44.0, -49.0], [-5.0, 21.0], [47.0, 49.0]],
    "area_side": 100.0, "h0": 10.0, "h_max": 300.0, "h_init": 50.0,
    "alpha_init": 0.5, "delta_x": 1.0, "delta_y": 1.0, "delta_h": 1.0,
    "delta_alpha": 0.01, "r_min_over_w": 0.0, "alpha_min": 0.01,
    "alpha_max": 0.99, "gain_db_min": None, "gain_db_max": None,
    "link_mode": "expected",
}

TRAIN_KEYS = {
    "episodes": int, "steps_per_episode": int, "batch_size": int,
    "buffer_capacity": int, "learning_rate": float, "gamma": float,
    "target_sync": int, "eps_start": float, "eps_end": float, "chi": float,
    "mode": str, "seed": int,
}
TRAIN_DEFAULTS = {
    "episodes": 1000, "steps_per_episode": 300, "batch_size": 128,
    "buffer_capacity": 15000, "learning_rate": 0.001, "gamma": 0.999,
    "target_sync": 3000, "eps_start": 0.9, "eps_end": 0.1, "chi": 200.0,
    "mode": "dueling", "seed": 0,
}

REWARD_KEYS = {"w_r": float, "w_f": float, "w_g": float, "w_s": float,
               "w_u": float}
REWARD_DEFAULTS = {"w_r": 1.0, "w_f": 0.0, "w_g": 0.0, "w_s": 0.0, "w_u": 0.0}

SECTIONS = ("channel", "scenario", "train", "reward")


class ConfigError(ValueError):
    pass


def read_raw(path=None, overrides=()) -> dict[str, dict[str, str]]:
    """Raw string table from an optional file plus dotted overrides."""
    raw: dict[str, dict[str, str]] = {s: {} for s in SECTIONS}
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError("config file not found: %s" % path)
        cp = configparser.ConfigParser()
        try:
            cp.read(path)
        except configparser.Error as exc:
            raise ConfigError("cannot parse %s: %s" % (path, exc)) from exc
        for section in cp.sections():
            if section not in SECTIONS:
                raise ConfigError("unknown config section [%s]" % section)
            for key, value in cp.items(section):
                raw[section][key] = value
    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError("override %r is not section.key=value" % ov)
        dotted, value = ov.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in SECTIONS:
            raise ConfigError("unknown config section %r in override" % section)
        raw[section][key.strip()] = value.strip()
    return raw


def _resolve_section(name, raw, keys, defaults):
    resolved = dict(defaults)
    for key, value in raw.items():
        if key not in keys:
            raise ConfigError("unknown config key %s.%s" % (name, key))
        try:
            resolved[key] = keys[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("bad value for %s.%s: %s" % (name, key, exc)) \
                from exc
    return resolved


def load_config(path=None, overrides=()):
    """Build (TrainConfig, resolved snapshot dict) from file and overrides."""
    raw = read_raw(path, overrides)

    spectrum = raw["channel"].pop("spectrum", "sub6")
    if spectrum not in CHANNEL_KEYS:
        raise ConfigError("channel.spectrum must be 'sub6' or 'mmwave'")
    ch_vals = _resolve_section("channel", raw["channel"],
                               CHANNEL_KEYS[spectrum],
                               CHANNEL_DEFAULTS[spectrum])
    builder = ChannelParams.sub6 if spectrum == "sub6" else ChannelParams.mmwave
    try:
        channel = builder(**ch_vals)
    except ValueError as exc:
        raise ConfigError("channel: %s" % exc) from exc

    sc_vals = _resolve_section("scenario", raw["scenario"], SCENARIO_KEYS,
                               SCENARIO_DEFAULTS)
    try:
        link_mode = LinkMode(sc_vals["link_mode"])
    except ValueError:
        raise ConfigError("scenario.link_mode must be one of %s"
                          % ", ".join(m.value for m in LinkMode)) from None
    try:
        scenario = Scenario(
            channel=channel, link_mode=link_mode, users=sc_vals["users"],
            area_side=sc_vals["area_side"], h0=sc_vals["h0"],
            h_max=sc_vals["h_max"], h_init=sc_vals["h_init"],
            alpha_init=sc_vals["alpha_init"], delta_x=sc_vals["delta_x"],
            delta_y=sc_vals["delta_y"], delta_h=sc_vals["delta_h"],
            delta_alpha=sc_vals["delta_alpha"],
            r_min_bps=sc_vals["r_min_over_w"] * channel.w_bw_hz,
            alpha_min=sc_vals["alpha_min"], alpha_max=sc_vals["alpha_max"],
            gain_db_min=sc_vals["gain_db_min"],
            gain_db_max=sc_vals["gain_db_max"])
    except ValueError as exc:
        raise ConfigError("scenario: %s" % exc) from exc

    tr_vals = _resolve_section("train", raw["train"], TRAIN_KEYS,
                               TRAIN_DEFAULTS)
    rw_vals = _resolve_section("reward", raw["reward"], REWARD_KEYS,
                               REWARD_DEFAULTS)
    try:
        weights = RewardWeights(**rw_vals)
        schedule = ExplorationSchedule(eps_start=tr_vals["eps_start"],
                                       eps_end=tr_vals["eps_end"],
                                       chi=tr_vals["chi"])
        config = TrainConfig(
            scenario=scenario, weights=weights, episodes=tr_vals["episodes"],
            steps_per_episode=tr_vals["steps_per_episode"],
            batch_size=tr_vals["batch_size"],
            buffer_capacity=tr_vals["buffer_capacity"],
            learning_rate=tr_vals["learning_rate"], gamma=tr_vals["gamma"],
            target_sync=tr_vals["target_sync"], schedule=schedule,
            mode=tr_vals["mode"], seed=tr_vals["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    snapshot = {
        "channel": {"spectrum": spectrum, **ch_vals},
        "scenario": sc_vals,
        "train": tr_vals,
        "reward": rw_vals,
    }
    return config, snapshot


def config_hash(snapshot: dict) -> str:
    return hashlib.sha256(
        json.dumps(snapshot, sort_keys=True).encode()).hexdigest()
