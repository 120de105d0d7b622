"""Metric oracles: closed-form paths and hand-done benchmark arithmetic."""

import math

import numpy as np
import pytest

from armteleop.errors import MetricError
from armteleop.metrics import (
    TrialSeries,
    aligned_text,
    comparison_report,
    load_comparison_fixture,
    path_length,
    proficiency_curve,
    smoothness,
    time_reduction,
)

FIXTURE = "fixtures/table5.json"


# ---------------------------------------------------------------------------
# path length


def test_path_length_two_points():
    assert path_length([(0.0, 0.0, 0.0), (0.3, 0.0, 0.0)]) == pytest.approx(0.3)


def test_path_length_single_point_is_zero():
    assert path_length([(0.1, 0.2, 0.3)]) == 0.0


def test_path_length_empty_trace_rejected():
    with pytest.raises(MetricError):
        path_length([])


def test_path_length_l_shape():
    pts = [(0, 0, 0), (1, 0, 0), (1, 1, 0)]
    assert path_length(pts) == pytest.approx(2.0)
    assert path_length(pts) > path_length([(0, 0, 0), (1, 1, 0)])


def test_path_length_arc_converges_to_circumference():
    """A polyline over a quarter circle lands within 0.1% of r*pi/2."""
    r = 0.25
    theta = np.linspace(0, math.pi / 2, 1000)
    pts = np.stack([r * np.cos(theta), r * np.sin(theta), np.zeros_like(theta)], axis=1)
    exact = r * math.pi / 2
    assert abs(path_length(pts) - exact) / exact < 1e-3


def test_path_length_rigid_transform_invariant(rng):
    pts = rng.uniform(-1, 1, size=(50, 3))
    # random rotation via QR of a Gaussian matrix
    q_mat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    moved = pts @ q_mat.T + np.array([0.4, -1.2, 7.0])
    assert path_length(moved) == pytest.approx(path_length(pts), rel=1e-12)


# ---------------------------------------------------------------------------
# smoothness (mean squared jerk)


def test_smoothness_linear_motion_is_zero():
    t = np.linspace(0, 1, 100)[:, None]
    pts = t * np.array([0.5, -0.2, 0.1])
    assert smoothness(pts, dt=0.01) <= 1e-12


def test_smoothness_constant_acceleration_is_zero():
    t = np.linspace(0, 1, 100)
    pts = np.stack([0.5 * 3.0 * t**2, np.zeros_like(t), np.zeros_like(t)], axis=1)
    assert smoothness(pts, dt=0.01) <= 1e-9


def test_smoothness_needs_four_samples():
    with pytest.raises(MetricError):
        smoothness([(0, 0, 0)] * 3, dt=0.01)
    assert smoothness([(0, 0, 0)] * 4, dt=0.01) == 0.0


def test_smoothness_positive_dt_required():
    with pytest.raises(MetricError):
        smoothness([(0, 0, 0)] * 5, dt=0.0)


def test_smoothness_ranks_jerky_above_smooth():
    t = np.linspace(0, 1, 200)
    smooth_x = np.sin(math.pi * t)
    jerky_x = smooth_x + 0.01 * np.sign(np.sin(40 * math.pi * t))
    mk = lambda x: np.stack([x, np.zeros_like(x), np.zeros_like(x)], axis=1)
    dt = t[1] - t[0]
    assert smoothness(mk(jerky_x), dt) > 10 * smoothness(mk(smooth_x), dt)


def test_smoothness_cubic_matches_hand_value():
    """x(t) = t^3 has constant jerk 6, so mean squared jerk is 36."""
    t = np.arange(0, 1, 0.01)
    pts = np.stack([t**3, np.zeros_like(t), np.zeros_like(t)], axis=1)
    assert smoothness(pts, dt=0.01) == pytest.approx(36.0, rel=1e-6)


# ---------------------------------------------------------------------------
# completion-time reduction


def test_time_reduction_identical_is_zero():
    assert time_reduction([5, 5, 5], [5, 5, 5]) == 0.0


def test_time_reduction_half_is_fifty():
    assert time_reduction([2, 4], [4, 8]) == pytest.approx(50.0)


def test_time_reduction_negative_when_slower():
    assert time_reduction([10.0], [5.0]) == pytest.approx(-100.0)


def test_time_reduction_empty_rejected():
    with pytest.raises(MetricError):
        time_reduction([], [1.0])


def test_benchmark_fixture_means_and_reduction():
    """Hand-checked arithmetic over the shipped two-device benchmark numbers."""
    fixture = load_comparison_fixture(FIXTURE)
    report = comparison_report(fixture)
    # 14.43+11.28+19.88+20.93+21.99 = 88.51; /5 = 17.702
    assert report["arm_mean_s"] == pytest.approx(17.702, abs=0.005)
    # 27.85+22.23+31.90+31.35+31.89 = 145.22; /5 = 29.044
    assert report["joycon_mean_s"] == pytest.approx(29.044, abs=0.005)
    # 100 * (29.044 - 17.702) / 29.044 = 39.0511...
    assert report["time_reduction_pct"] == pytest.approx(39.05, abs=0.1)
    assert report["arm_mean_success_pct"] == pytest.approx(75.82, abs=0.005)
    assert report["joycon_mean_success_pct"] == pytest.approx(82.8, abs=0.005)
    assert len(report["tasks"]) == 5


def test_comparison_report_rejects_mismatched_lengths():
    with pytest.raises(MetricError):
        comparison_report({"arm": {"time_s": [1.0]}, "joycon": {"time_s": [1.0, 2.0]}})


# ---------------------------------------------------------------------------
# proficiency curve


def test_proficiency_all_success():
    series = TrialSeries("stack")
    for _ in range(30):
        series.add(10.0, "success")
    assert proficiency_curve(series) == [1.0, 1.0, 1.0]


def test_proficiency_alternating_is_half():
    series = TrialSeries("stack")
    for i in range(20):
        series.add(10.0, "success" if i % 2 == 0 else "failure")
    assert proficiency_curve(series) == [0.5, 0.5]


def test_proficiency_partial_last_bucket_own_denominator():
    series = TrialSeries("stack", bucket_width=4)
    for outcome in ["success"] * 4 + ["success", "failure"]:
        series.add(5.0, outcome)
    assert proficiency_curve(series) == [1.0, 0.5]


def test_proficiency_learning_ramp(rng):
    """Success odds that rise with practice produce a rising first-to-last
    bucket trend almost surely over 400 trials."""
    series = TrialSeries("litterbox", bucket_width=50)
    for i in range(400):
        p = 0.2 + 0.7 * (i / 399)
        series.add(8.0, "success" if rng.random() < p else "failure")
    curve = proficiency_curve(series)
    assert len(curve) == 8
    assert curve[-1] > curve[0]
    assert all(0.0 <= v <= 1.0 for v in curve)


def test_proficiency_no_trials_rejected():
    with pytest.raises(MetricError):
        proficiency_curve(TrialSeries("idle"))


def test_trial_series_validates_bucket_width():
    with pytest.raises(ValueError):
        TrialSeries("x", bucket_width=0)


# ---------------------------------------------------------------------------
# report rendering


def test_aligned_text_pads_keys():
    text = aligned_text({"alpha": 1.5, "much_longer_key": "ok"})
    lines = text.splitlines()
    assert "alpha" in lines[0] and "1.5000" in lines[0]
    assert lines[0].index("1.5000") == lines[1].index("ok")
