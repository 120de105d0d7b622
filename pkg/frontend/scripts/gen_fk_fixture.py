"""Regenerate fixtures/fk_cases.json for the console's kinematics tests.

Samples random in-range joint vectors for every built-in arm and stores the
service-side forward kinematics result next to the exact config document the
service would return from /api/config. The TypeScript FK must reproduce these
poses from the config document alone.

Run from anywhere:  python3 frontend/scripts/gen_fk_fixture.py
"""

import json
from pathlib import Path

import numpy as np

from armteleop import all_config_ids, forward_kinematics, load_config

SEED = 20260823
CASES_PER_CONFIG = 100

out = Path(__file__).resolve().parents[1] / "fixtures" / "fk_cases.json"
rng = np.random.default_rng(SEED)

doc = {"seed": SEED, "cases_per_config": CASES_PER_CONFIG, "configs": []}
for cid in all_config_ids():
    cfg = load_config(cid)
    cases = []
    for _ in range(CASES_PER_CONFIG):
        q = [float(rng.uniform(j.range_min, j.range_max)) for j in cfg.joints]
        pose = forward_kinematics(cfg, q)
        cases.append(
            {
                "q": q,
                "position": list(pose.position),
                "orientation": list(pose.orientation),
            }
        )
    doc["configs"].append({"config": cfg.to_dict(), "cases": cases})

out.parent.mkdir(parents=True, exist_ok=True)
out.write_text(json.dumps(doc) + "\n")
print(f"wrote {out} ({sum(len(c['cases']) for c in doc['configs'])} cases)")
