#!/usr/bin/env python3
# Record a scripted teleop episode, read it back, replay it bit-exactly.
#
# Every control tick appends one JSON line: the leader reading, the (sparse)
# emitted targets, and the follower pose after dispatch. Replay re-expands the
# sparse targets through the same interpolation and integrates them with the
# same sub-step clock, so a faithful file reproduces follower_q to the bit.

import sys
import tempfile
from pathlib import Path

from armteleop import MockScript, load_config, read_episode, replay_report, run_scripted_session

out = Path(tempfile.mkdtemp()) / "demo.jsonl"

config = load_config("config1")
script = MockScript.from_file(Path(__file__).resolve().parents[1] / "fixtures" / "wave.json")

session = run_scripted_session(
    config,
    script,
    out_path=out,
    episode_id="demo-wave",
    task="wave hello",
)
print(f"recorded {session.state.tick_count} ticks -> {out}")

episode = read_episode(out)
print(f"header: episode {episode.header.episode_id}, config {episode.header.config_id.value}, "
      f"tau={episode.header.params.deadband_tau}, N={episode.header.params.interp_steps}")
print(f"footer: outcome={episode.footer.outcome}, duration={episode.footer.duration_s:.2f}s")

emitting = sum(1 for s in episode.steps if s.emitted_targets)
print(f"{emitting}/{len(episode.steps)} ticks emitted commands")

report = replay_report(episode)
print(report.summary())
sys.exit(0 if report.ok else 1)
