"""Joint 3D UAV base-station placement and NOMA power allocation, learned
with a dueling deep Q-network over an air-to-ground channel simulator."""

from .agent import (ExplorationSchedule, ReplayBuffer, Transition, epsilon,
                    maybe_sync_target, select_action, td_targets, train_step)
from .baselines import (GridSpec, OracleResult, grid_search_oracle,
                        static_hover_eval)
from .channel import (ChannelParams, LinkKind, LinkMode, effective_gain,
                      elevation_angle, los_probability, mimo_gain, path_gain)
from .config import ConfigError, config_hash, load_config
from .env import (ActionSpec, ClusterPairing, NetworkSnapshot, RewardWeights,
                  Scenario, UavNomaEnv, build_action_spec, build_state,
                  cluster_users, compute_reward, decode_action, default_users)
from .harness import (EpisodeRecord, EvalResult, LayoutSweepResult, SweepPoint,
                      TrainConfig, evaluate, layout_sweep, moving_metrics,
                      rmin_sweep, seed_streams, substream, train)
from .net import (AdamState, QNetParams, adam_step, aggregate_q, clone_params,
                  count_parameters, forward, init_network, load_checkpoint,
                  q_values, save_checkpoint, td_loss_and_gradients)
from .noma import (ClusterAllocation, feasible_strong_alpha_bound,
                   jain_fairness, received_sinr, sum_rate, user_rate,
                   weighted_objective)

__version__ = "0.1.0"
