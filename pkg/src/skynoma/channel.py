"""Air-to-ground channel models for a UAV base station.

Two bands are supported: mmWave (intercept/exponent path model) and sub-6 GHz
(free-space with excess loss). Line-of-sight probability depends on the
elevation angle; four link-sampling modes control how the LoS/NLoS state is
realized. All config-level dBm/dB/degree inputs are converted to linear units
and radians on construction; every function here works in linear units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

C_LIGHT = 3e8


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


class LinkKind(Enum):
    LOS = "los"
    NLOS = "nlos"


class LinkMode(Enum):
    ALWAYS_LOS = "always_los"
    EXPECTED = "expected"
    BERNOULLI_STEP = "bernoulli_step"
    BERNOULLI_EPISODE = "bernoulli_episode"


@dataclass(frozen=True)
class ChannelParams:
    """Band parameters, all linear units and radians.

    mmWave uses (c_los, c_nlos, a_los, a_nlos) intercepts/exponents; sub-6
    uses free-space loss with (eta_los_db, eta_nlos_db) excess losses and a
    minimum elevation theta0_rad below which its LoS probability is undefined.
    """

    spectrum: str               # "mmwave" | "sub6"
    f_c_hz: float
    p_t_w: float
    w_bw_hz: float
    sigma2_w: float
    c_env: float                # environment constant of the LoS probability
    y_env: float                # environment exponent/slope of the LoS probability
    n_uav_antennas: int
    n_ue_antennas: int
    c_los: float = 0.0
    c_nlos: float = 0.0
    a_los: float = 0.0
    a_nlos: float = 0.0
    eta_los_db: float = 0.0
    eta_nlos_db: float = 0.0
    theta0_rad: float = 0.0

    def __post_init__(self):
        if self.spectrum not in ("mmwave", "sub6"):
            raise ValueError("unknown spectrum %r" % (self.spectrum,))
        for name in ("f_c_hz", "p_t_w", "w_bw_hz", "sigma2_w"):
            if getattr(self, name) <= 0.0:
                raise ValueError("%s must be positive" % name)
        if self.n_uav_antennas < 1 or self.n_ue_antennas < 1:
            raise ValueError("antenna counts must be >= 1")
        if self.spectrum == "mmwave":
            if self.c_los <= 0.0 or self.c_nlos <= 0.0:
                raise ValueError("mmwave intercepts must be positive")
            if self.a_los <= 0.0 or self.a_nlos <= 0.0:
                raise ValueError("mmwave exponents must be positive")
        else:
            if not 0.0 <= self.theta0_rad < math.pi / 2:
                raise ValueError("theta0_rad out of range")

    @classmethod
    def mmwave(cls, p_t_dbm: float = 20.0, sigma2_dbm: float = -84.0,
               f_c_hz: float = 28e9, w_bw_hz: float = 2e9,
               c_env: float = 9.6117, y_env: float = 0.1581,
               c_los_db: float = -64.0, c_nlos_db: float = -72.0,
               a_los: float = 2.0, a_nlos: float = 2.92,
               n_uav_antennas: int = 8, n_ue_antennas: int = 8) -> "ChannelParams":
        return cls(spectrum="mmwave", f_c_hz=f_c_hz,
                   p_t_w=dbm_to_watts(p_t_dbm), w_bw_hz=w_bw_hz,
                   sigma2_w=dbm_to_watts(sigma2_dbm), c_env=c_env, y_env=y_env,
                   n_uav_antennas=n_uav_antennas, n_ue_antennas=n_ue_antennas,
                   c_los=db_to_linear(c_los_db), c_nlos=db_to_linear(c_nlos_db),
                   a_los=a_los, a_nlos=a_nlos)

    @classmethod
    def sub6(cls, p_t_dbm: float = 30.0, sigma2_dbm: float = -88.0,
             f_c_hz: float = 2e9, w_bw_hz: float = 50e6,
             c_env: float = 0.6, y_env: float = 0.11,
             eta_los_db: float = 1.0, eta_nlos_db: float = 20.0,
             theta0_deg: float = 15.0,
             n_uav_antennas: int = 1, n_ue_antennas: int = 1) -> "ChannelParams":
        return cls(spectrum="sub6", f_c_hz=f_c_hz,
                   p_t_w=dbm_to_watts(p_t_dbm), w_bw_hz=w_bw_hz,
                   sigma2_w=dbm_to_watts(sigma2_dbm), c_env=c_env, y_env=y_env,
                   n_uav_antennas=n_uav_antennas, n_ue_antennas=n_ue_antennas,
                   eta_los_db=eta_los_db, eta_nlos_db=eta_nlos_db,
                   theta0_rad=math.radians(theta0_deg))


def elevation_angle(uav_pos, user_pos) -> float:
    """Elevation angle in radians from a ground user to the UAV.

    pi/2 when the UAV is directly overhead.
    """
    h = float(uav_pos[2])
    if h <= 0.0:
        raise ValueError("UAV altitude must be positive")
    r = math.hypot(float(uav_pos[0]) - float(user_pos[0]),
                   float(uav_pos[1]) - float(user_pos[1]))
    return math.atan2(h, r)


def los_probability(params: ChannelParams, theta_rad: float) -> float:
    """LoS probability at elevation theta_rad, in [0, 1]."""
    if not 0.0 < theta_rad <= math.pi / 2:
        raise ValueError("theta_rad must be in (0, pi/2]")
    if params.spectrum == "mmwave":
        deg = math.degrees(theta_rad)
        return 1.0 / (1.0 + params.c_env * math.exp(-params.y_env * (deg - params.c_env)))
    if theta_rad < params.theta0_rad:
        raise ValueError("elevation below the sub-6 model's minimum angle")
    # the degree conversion is applied to the difference so theta == theta0
    # lands exactly on probability 0
    p = params.c_env * math.degrees(theta_rad - params.theta0_rad) ** params.y_env
    return min(1.0, max(0.0, p))


def path_gain(params: ChannelParams, kind: LinkKind, d_m: float) -> float:
    """Linear power gain of one antenna pair over a 3D distance d_m."""
    if d_m <= 0.0:
        raise ValueError("distance must be positive")
    if params.spectrum == "mmwave":
        if kind is LinkKind.LOS:
            return params.c_los * d_m ** -params.a_los
        return params.c_nlos * d_m ** -params.a_nlos
    eta_db = params.eta_los_db if kind is LinkKind.LOS else params.eta_nlos_db
    fs = (C_LIGHT / (4.0 * math.pi * params.f_c_hz * d_m)) ** 2
    return fs * 10.0 ** (-0.1 * eta_db)


def mimo_gain(params: ChannelParams) -> float:
    """Array gain of the UAV-user antenna pair product."""
    return float(params.n_uav_antennas * params.n_ue_antennas)


def effective_gain(params: ChannelParams, mode: LinkMode, theta_rad: float,
                   d_m: float, rng=None, cached_kind: LinkKind | None = None):
    """Realize the link state under `mode` and return (gain, kind).

    BERNOULLI_STEP draws a fresh kind from rng; BERNOULLI_EPISODE reuses
    cached_kind when given (drawing only when it is None). EXPECTED returns
    the probability-weighted gain and reports LoS when the probability is at
    least one half.
    """
    if mode is LinkMode.ALWAYS_LOS:
        return path_gain(params, LinkKind.LOS, d_m), LinkKind.LOS
    if mode is LinkMode.EXPECTED:
        p = los_probability(params, theta_rad)
        g = p * path_gain(params, LinkKind.LOS, d_m) \
            + (1.0 - p) * path_gain(params, LinkKind.NLOS, d_m)
        return g, (LinkKind.LOS if p >= 0.5 else LinkKind.NLOS)
    kind = cached_kind
    if mode is LinkMode.BERNOULLI_STEP or kind is None:
        if rng is None:
            raise ValueError("Bernoulli link modes need an rng")
        p = los_probability(params, theta_rad)
        kind = LinkKind.LOS if rng.random() < p else LinkKind.NLOS
    return path_gain(params, kind, d_m), kind
