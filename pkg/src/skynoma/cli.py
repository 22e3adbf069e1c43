"""Command-line entry point.

Each command loads a config (file, then dotted-path overrides), runs one
driver, writes its CSV artifacts plus a run manifest into the output
directory, and renders the matching figure next to the CSV unless
--no-figures is given. Exit status 0 on success, 2 on any usage, config or
I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass

from .baselines import (GridSpec, grid_search_oracle, static_hover_eval,
                        write_baseline_csv, write_oracle_csv)
from .config import ConfigError, config_hash, load_config
from .harness import (evaluate, layout_sweep, rmin_sweep, train,
                      write_episodes_csv, write_eval_csv, write_layouts_csv,
                      write_sweep_csv)
from .net import load_checkpoint, save_checkpoint

OUT_ROOT_ENV = "SKYNOMA_OUT"
DEFAULT_SWEEP_RATIOS = "0,0.5,1,1.5,2,2.5,3"
DEFAULT_H_LEVELS = "10,25,50,75,100,150"


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: dict
    seed: int
    config_sha256: str
    out_dir: str
    duration_s: float


def write_manifest(out_dir: str, command: str, snapshot: dict, seed: int,
                   started: float) -> RunManifest:
    manifest = RunManifest(command=command, config=snapshot, seed=seed,
                           config_sha256=config_hash(snapshot),
                           out_dir=out_dir,
                           duration_s=time.perf_counter() - started)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(dataclasses.asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _overrides(args) -> list[str]:
    ovs = list(args.overrides)
    if getattr(args, "episodes", None) is not None:
        ovs.append("train.episodes=%d" % args.episodes)
    if getattr(args, "steps_per_episode", None) is not None:
        ovs.append("train.steps_per_episode=%d" % args.steps_per_episode)
    if args.seed is not None:
        ovs.append("train.seed=%d" % args.seed)
    return ovs


def _out_dir(args) -> str:
    if args.out is not None:
        out = args.out
    else:
        root = os.environ.get(OUT_ROOT_ENV, "runs")
        stamp = time.strftime("%Y%m%d-%H%M%S", time.gmtime())
        out = os.path.join(root, "%s-%s" % (args.command, stamp))
    os.makedirs(out, exist_ok=True)
    return out


def _load_params(path: str, what: str):
    if not os.path.exists(path):
        raise ConfigError("%s not found: %s" % (what, path))
    return load_checkpoint(path)


def _floats(text: str, flag: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("%s expects comma-separated numbers, got %r"
                          % (flag, text)) from None
    if not vals:
        raise ConfigError("%s must list at least one value" % flag)
    return vals


def cmd_train(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    out = _out_dir(args)
    trace_path = os.path.join(out, "trace.csv") if args.trace else None
    policy, records = train(config, trace_path=trace_path,
                            log_every=args.log_every)
    save_checkpoint(os.path.join(out, "checkpoint.npz"), policy)
    write_episodes_csv(os.path.join(out, "episodes.csv"), records)
    if not args.no_figures:
        from .figures import training_figure
        training_figure(records, os.path.join(out, "training.png"))
    write_manifest(out, "train", snapshot, config.seed, started)
    last = records[-1]
    print("trained %d episodes -> %s (final mean rate %.3f Mbps, jain %.3f)"
          % (len(records), out, last.mean_rate_bps / 1e6, last.mean_jain))
    return 0


def cmd_eval(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    params = _load_params(args.checkpoint, "checkpoint")
    out = _out_dir(args)
    result = evaluate(params, config.scenario, steps=args.steps,
                      seed=config.seed)
    write_eval_csv(os.path.join(out, "eval.csv"), result)
    write_manifest(out, "eval", snapshot, config.seed, started)
    print("eval %d steps -> %s (avg rate %.3f Mbps, jain %.3f, satisfied %.3f)"
          % (result.steps, out, result.avg_rate_bps / 1e6, result.avg_jain,
             result.satisfaction_fraction))
    return 0


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    ratios = _floats(args.ratios, "--ratios")
    out = _out_dir(args)
    points = rmin_sweep(config, ratios, log_every=args.log_every,
                        jobs=args.jobs)
    write_sweep_csv(os.path.join(out, "sweep.csv"), points)
    if not args.no_figures:
        from .figures import sweep_figure
        sweep_figure(points, os.path.join(out, "sweep.png"))
    write_manifest(out, "sweep", snapshot, config.seed, started)
    print("swept %d rate-floor points -> %s" % (len(points), out))
    return 0


def cmd_layouts(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    params_a = _load_params(args.checkpoint_a, "checkpoint A")
    params_b = _load_params(args.checkpoint_b, "checkpoint B")
    out = _out_dir(args)
    result = layout_sweep(params_a, params_b, config.scenario,
                          n_layouts=args.n_layouts, steps=args.steps,
                          seed=config.seed, jobs=args.jobs)
    write_layouts_csv(os.path.join(out, "layouts.csv"), result)
    if not args.no_figures:
        from .figures import layouts_figure
        layouts_figure(result, os.path.join(out, "layouts.png"))
    write_manifest(out, "layouts", snapshot, config.seed, started)
    print("compared %d layouts -> %s (A wins %.0f%%)"
          % (len(result.rows), out, 100.0 * result.win_fraction))
    return 0


def cmd_oracle(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    spec = GridSpec(xy_step=args.grid_step,
                    h_levels=tuple(_floats(args.h_levels, "--h-levels")),
                    alpha_step=args.alpha_step, w_r=config.weights.w_r,
                    w_f=config.weights.w_f,
                    r_min_bps=config.scenario.r_min_bps)
    out = _out_dir(args)
    result = grid_search_oracle(config.scenario, spec)
    write_oracle_csv(os.path.join(out, "oracle.csv"), result,
                     config.scenario.n_clusters, config.scenario.n_ue)
    write_manifest(out, "oracle", snapshot, config.seed, started)
    if result is None:
        print("no feasible grid point -> %s" % out)
    else:
        print("oracle optimum at (%.1f, %.1f, %.1f) -> %s (objective %.6g)"
              % (result.x, result.y, result.h, out, result.objective))
    return 0


def cmd_baseline(args) -> int:
    started = time.perf_counter()
    config, snapshot = load_config(args.config, _overrides(args))
    position = None
    if args.position is not None:
        position = _floats(args.position, "--position")
        if len(position) != 3:
            raise ConfigError("--position expects 'x,y,h'")
    out = _out_dir(args)
    result = static_hover_eval(config.scenario, steps=args.steps,
                               seed=config.seed,
                               strong_alpha=args.strong_alpha,
                               position=position)
    write_baseline_csv(os.path.join(out, "baseline.csv"), result)
    write_manifest(out, "baseline", snapshot, config.seed, started)
    print("hover baseline %d steps -> %s (avg rate %.3f Mbps, jain %.3f)"
          % (result.steps, out, result.avg_rate_bps / 1e6, result.avg_jain))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="config file; defaults apply when omitted")
    common.add_argument("--seed", type=int, metavar="N",
                        help="root seed (shorthand for train.seed=N)")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default: $%s/<command>-<utc>)"
                        % OUT_ROOT_ENV)
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker threads for sweep/layouts fan-out")
    common.add_argument("--no-figures", action="store_true",
                        help="write CSVs only, skip PNG rendering")
    common.add_argument("--log-every", type=int, default=0, metavar="N",
                        help="progress line every N episodes (0 = silent)")
    common.add_argument("overrides", nargs="*", metavar="section.key=value",
                        help="dotted-path config overrides")

    parser = argparse.ArgumentParser(
        prog="skynoma",
        description="UAV base-station placement + NOMA power allocation: "
                    "train, evaluate and sweep a dueling deep-Q agent.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common],
                       help="train an agent; writes episodes.csv + checkpoint")
    p.add_argument("--episodes", type=int, metavar="N",
                   help="shorthand for train.episodes=N")
    p.add_argument("--steps", type=int, dest="steps_per_episode", metavar="N",
                   help="shorthand for train.steps_per_episode=N")
    p.add_argument("--trace", action="store_true",
                   help="also write a per-step trace.csv")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common],
                       help="greedy rollout of a checkpoint; writes eval.csv")
    p.add_argument("--checkpoint", required=True, metavar="PATH")
    p.add_argument("--steps", type=int, default=1000, metavar="N")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", parents=[common],
                       help="train across rate-floor ratios; writes sweep.csv")
    p.add_argument("--ratios", default=DEFAULT_SWEEP_RATIOS, metavar="R,R,...",
                   help="rate floor / bandwidth points (default %s)"
                   % DEFAULT_SWEEP_RATIOS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("layouts", parents=[common],
                       help="compare two checkpoints on random user layouts")
    p.add_argument("--checkpoint-a", required=True, metavar="PATH")
    p.add_argument("--checkpoint-b", required=True, metavar="PATH")
    p.add_argument("--n-layouts", type=int, default=100, metavar="N")
    p.add_argument("--steps", type=int, default=1000, metavar="N")
    p.set_defaults(func=cmd_layouts)

    p = sub.add_parser("oracle", parents=[common],
                       help="exhaustive grid search; writes oracle.csv")
    p.add_argument("--grid-step", type=float, default=5.0, metavar="M")
    p.add_argument("--h-levels", default=DEFAULT_H_LEVELS, metavar="H,H,...")
    p.add_argument("--alpha-step", type=float, default=0.05, metavar="A")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("baseline", parents=[common],
                       help="static hover baseline; writes baseline.csv")
    p.add_argument("--steps", type=int, default=1000, metavar="N")
    p.add_argument("--strong-alpha", type=float, default=0.3, metavar="A")
    p.add_argument("--position", metavar="X,Y,H",
                   help="hover position (default: area center at h_init)")
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
