"""Command-line entry points: serve, sim, replay, metrics, configs.

Settings are merged from four layers, lowest to highest precedence:
built-in defaults, a JSON config file (--config), UARM_* environment
variables, then explicit flags. Exit codes: 0 ok, 1 runtime fault, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .configs import all_config_ids, load_config
from .errors import TeleopError
from .mapping import MappingParams

DEFAULTS = {
    "config_id": "config1",
    "source": "virtual",
    "backend": "sim",
    "bind": "127.0.0.1:8787",
    "tau": 0.5,
    "steps": 5,
    "alpha": 0.3,
    "rate": 50.0,
    "vmax": 90.0,
    "data_dir": "episodes",
}

ENV_PREFIX = "UARM_"

_FLOAT_KEYS = ("tau", "alpha", "rate", "vmax")
_INT_KEYS = ("steps",)


def _coerce(key: str, value):
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    return str(value)


def merged_settings(args: argparse.Namespace) -> dict:
    """defaults <- config file <- environment <- flags, highest wins."""
    merged = dict(DEFAULTS)
    config_path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
    if config_path:
        try:
            file_cfg = json.loads(Path(config_path).read_text())
        except FileNotFoundError:
            raise TeleopError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise TeleopError(f"config file {config_path} is not valid JSON: {exc.msg}") from None
        for key, value in file_cfg.items():
            if key in merged:
                merged[key] = _coerce(key, value)
    for key in merged:
        env_val = os.environ.get(ENV_PREFIX + key.upper())
        if env_val is not None:
            merged[key] = _coerce(key, env_val)
    for key in merged:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = _coerce(key, flag_val)
    return merged


def params_from(merged: dict) -> MappingParams:
    return MappingParams(
        deadband_tau=merged["tau"],
        interp_steps=merged["steps"],
        ema_alpha=merged["alpha"],
        rate_hz=merged["rate"],
    )


def _add_shared_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON settings file (low-precedence layer)")
    p.add_argument("--config-id", dest="config_id", choices=[c.value for c in all_config_ids()])
    p.add_argument("--tau", type=float, help="deadband in degrees")
    p.add_argument("--steps", type=int, help="interpolation steps per tick")
    p.add_argument("--alpha", type=float, help="smoothing weight in (0, 1]; 1 disables")
    p.add_argument("--rate", type=float, help="control loop Hz")
    p.add_argument("--vmax", type=float, help="follower joint speed cap, deg/s")
    p.add_argument("--data-dir", dest="data_dir", help="episode output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uarm",
        description="Leader-follower arm teleoperation: run sessions, simulate, replay, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the session service (WebSocket + console)")
    _add_shared_flags(p_serve)
    p_serve.add_argument("--bind", help="host:port (default 127.0.0.1:8787)")
    p_serve.add_argument("--source", choices=["serial", "mock", "virtual"])
    p_serve.add_argument("--backend", choices=["sim", "loopback", "external"])
    p_serve.add_argument("--script", help="mock-bus script file (source=mock)")
    p_serve.add_argument("--serial-device", help="serial port (source=serial)")
    p_serve.add_argument("--console-dir", help="static console build to mount at /console")

    p_sim = sub.add_parser("sim", help="run a scripted mock-bus session headlessly")
    _add_shared_flags(p_sim)
    p_sim.add_argument("--script", required=True, help="JSON waypoint script for the mock bus")
    p_sim.add_argument("--out", required=True, help="episode output file (.jsonl)")
    p_sim.add_argument("--ticks", type=int, help="override the script-derived tick count")
    p_sim.add_argument("--seed", type=int, default=0, help="mock-bus fault RNG seed")
    p_sim.add_argument("--bit-flip-rate", type=float, default=0.0)
    p_sim.add_argument("--drop-rate", type=float, default=0.0)
    p_sim.add_argument("--task", help="task label stored in the episode header")
    p_sim.add_argument("--outcome", choices=["success", "failure"], default="success")
    p_sim.add_argument("--episode-id", help="fixed episode id (default: random)")

    p_replay = sub.add_parser("replay", help="re-execute a recorded episode against the simulator")
    p_replay.add_argument("episode", help="episode .jsonl file")
    p_replay.add_argument("--format", choices=["text", "json"], default="text")

    p_metrics = sub.add_parser("metrics", help="metric reports over episodes or benchmark fixtures")
    p_metrics.add_argument("paths", nargs="*", help="episode files or directories")
    p_metrics.add_argument("--table5", metavar="FILE", help="two-device comparison fixture (per-task times)")
    p_metrics.add_argument("--format", choices=["text", "json"], default="text")

    p_configs = sub.add_parser("configs", help="print the built-in arm configurations")
    p_configs.add_argument("--id", dest="only_id", choices=[c.value for c in all_config_ids()])
    p_configs.add_argument("--format", choices=["text", "json"], default="text")

    return parser


def cmd_serve(args: argparse.Namespace) -> int:  # pragma: no cover - blocking
    from .service import ServiceSettings, serve

    merged = merged_settings(args)
    settings = ServiceSettings(
        config_id=merged["config_id"],
        source=merged["source"],
        backend=merged["backend"],
        bind=merged["bind"],
        params=params_from(merged),
        vmax_dps=merged["vmax"],
        data_dir=merged["data_dir"],
        script_path=args.script,
        serial_device=args.serial_device,
        console_dir=args.console_dir,
    )
    serve(settings)
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    from .encoder import MockScript
    from .session import run_scripted_session

    merged = merged_settings(args)
    config = load_config(merged["config_id"])
    script = MockScript.from_file(args.script)
    session = run_scripted_session(
        config,
        script,
        params=params_from(merged),
        vmax_dps=merged["vmax"],
        out_path=args.out,
        episode_id=args.episode_id,
        task=args.task,
        outcome=args.outcome,
        ticks=args.ticks,
        seed=args.seed,
        bit_flip_rate=args.bit_flip_rate,
        drop_rate=args.drop_rate,
    )
    print(
        f"episode {session.state.episode_id}: {session.state.tick_count} ticks, "
        f"{session.skipped_readings} skipped readings, phase {session.phase.value} -> {args.out}"
    )
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    from .episodes import read_episode, replay_report

    episode = read_episode(args.episode)
    report = replay_report(episode)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "ok": report.ok,
                    "ticks": report.ticks,
                    "max_abs_diff_deg": report.max_abs_diff_deg,
                    "first_divergent_tick": report.first_divergent_tick,
                }
            )
        )
    else:
        print(report.summary())
    return 0 if report.ok else 1


def _iter_episode_paths(paths) -> list[Path]:
    out = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("*.jsonl")))
        else:
            out.append(p)
    return out


def cmd_metrics(args: argparse.Namespace) -> int:
    from .episodes import read_episode
    from .metrics import aligned_text, comparison_report, episode_report, load_comparison_fixture

    reports = []
    if args.table5:
        reports.append(comparison_report(load_comparison_fixture(args.table5)))
    for path in _iter_episode_paths(args.paths):
        reports.append(episode_report(read_episode(path)))
    if not reports:
        raise TeleopError("nothing to report: pass episode paths and/or --table5 FILE")
    if args.format == "json":
        print(json.dumps(reports if len(reports) > 1 else reports[0], indent=2))
    else:
        blocks = []
        for rep in reports:
            flat = {k: v for k, v in rep.items() if not isinstance(v, (list, dict))}
            title = rep.get("episode_id") or "comparison"
            body = aligned_text(flat, indent=2)
            if "time_reduction_pct" in rep:
                body += f"\n  -> arm reduces completion time by {rep['time_reduction_pct']:.2f}%"
            blocks.append(f"{title}\n{body}")
        print("\n\n".join(blocks))
    return 0


def cmd_configs(args: argparse.Namespace) -> int:
    ids = [args.only_id] if args.only_id else [c.value for c in all_config_ids()]
    descriptors = [load_config(i) for i in ids]
    if args.format == "json":
        print(json.dumps([d.to_dict() for d in descriptors], indent=2))
        return 0
    blocks = []
    for d in descriptors:
        axis_names = {(1.0, 0.0, 0.0): "X", (0.0, 1.0, 0.0): "Y", (0.0, 0.0, 1.0): "Z",
                      (-1.0, 0.0, 0.0): "-X", (0.0, -1.0, 0.0): "-Y", (0.0, 0.0, -1.0): "-Z"}
        lines = [f"{d.id.value} ({d.dof} DoF)"]
        lines.append("  robots: " + ", ".join(d.compatible_robots))
        for j in d.joints:
            lines.append(
                f"  joint {j.index}: axis {axis_names[j.axis]:>2}, "
                f"range [{j.range_min:g}, {j.range_max:g}] deg"
            )
        if d.swap_pairs:
            swaps = ", ".join(
                f"leader {a} -> follower {b} (sign {s:+d})" for a, b, s in d.swap_pairs
            )
            lines.append(f"  swaps: {swaps}")
        blocks.append("\n".join(lines))
    print("\n\n".join(blocks))
    return 0


COMMANDS = {
    "serve": cmd_serve,
    "sim": cmd_sim,
    "replay": cmd_replay,
    "metrics": cmd_metrics,
    "configs": cmd_configs,
}


def _fail(exc: Exception) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "tau"):
        # Make parameter-validation mistakes a usage error, not a stack trace.
        try:
            params_from(merged_settings(args))
        except ValueError as exc:
            parser.error(str(exc))
        except TeleopError as exc:
            return _fail(exc)
    try:
        return COMMANDS[args.command](args)
    except (TeleopError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
