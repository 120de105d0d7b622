#!/usr/bin/env python3
"""Trajectory and benchmark metrics.

path_length sums the EE's travelled distance; smoothness is mean squared jerk
(third difference), zero for constant-velocity or constant-acceleration
motion. The comparison fixture reproduces the two-device benchmark
arithmetic, and proficiency_curve buckets trial outcomes over practice.
"""

from pathlib import Path

import numpy as np

from armteleop.metrics import (
    TrialSeries,
    aligned_text,
    comparison_report,
    load_comparison_fixture,
    path_length,
    proficiency_curve,
    smoothness,
)

# -- synthetic paths -------------------------------------------------------
t = np.linspace(0, 2, 400)
straight = np.stack([0.2 * t, np.zeros_like(t), np.zeros_like(t)], axis=1)
wiggly = straight + 0.003 * np.stack(
    [np.zeros_like(t), np.sin(25 * t), np.cos(25 * t)], axis=1
)
dt = float(t[1] - t[0])

print("straight:  length %.4f m   jerk %.3g" % (path_length(straight), smoothness(straight, dt)))
print("wiggly  :  length %.4f m   jerk %.3g" % (path_length(wiggly), smoothness(wiggly, dt)))

# -- the shipped two-device comparison fixture -----------------------------
fixture = load_comparison_fixture(Path(__file__).resolve().parents[1] / "fixtures" / "table5.json")
report = comparison_report(fixture)
print()
print(aligned_text({k: v for k, v in report.items() if not isinstance(v, list)}))
print(f"-> the arm interface cuts completion time by {report['time_reduction_pct']:.2f}%")

# -- proficiency over practice ---------------------------------------------
rng = np.random.default_rng(5)
series = TrialSeries("can stacking", bucket_width=10)
for i in range(60):
    p_success = 0.3 + 0.6 * i / 59  # operators get better with reps
    series.add(20.0 - 0.1 * i, "success" if rng.random() < p_success else "failure")
curve = proficiency_curve(series)
print()
print("success rate per 10-trial bucket:", [f"{v:.0%}" for v in curve])
