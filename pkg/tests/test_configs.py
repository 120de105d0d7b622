"""Built-in configuration registry: joint ranges, robot lists, swap table,
clamping and the override-file loader."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from armteleop.configs import (
    ConfigId,
    JointVector,
    all_config_ids,
    clamp_joint,
    clamp_to_limits,
    compatible_robots,
    in_limits,
    load_config,
    load_config_file,
)
from armteleop.errors import ConfigNotFound, DimensionError

# (config, joint) -> (range_min, range_max), degrees. These 19 rows are the
# contract; any edit to the data file must show up here as a failure.
EXPECTED_RANGES = {
    ("config1", 1): (-87, 87),
    ("config1", 2): (-75, 105),
    ("config1", 3): (-180, 90),
    ("config1", 4): (-72, 72),
    ("config1", 5): (-122, 82),
    ("config1", 6): (-115, 115),
    ("config2", 1): (-87, 87),
    ("config2", 2): (-75, 105),
    ("config2", 3): (-180, 90),
    ("config2", 4): (-76, 50),
    ("config2", 5): (-74, 74),
    ("config2", 6): (-120, 120),
    ("config3", 1): (-87, 87),
    ("config3", 2): (-70, 108),
    ("config3", 3): (-70, 70),
    ("config3", 4): (-180, 90),
    ("config3", 5): (-72, 72),
    ("config3", 6): (-122, 125),
    ("config3", 7): (-115, 115),
}

EXPECTED_ROBOTS = {
    "config1": [
        "xArm6",
        "Fanuc LR Mate 200iD",
        "Trossen ALOHA",
        "Agile PIPER",
        "Realman RM65B",
        "KUKA LBR iiSY Cobot",
    ],
    "config2": ["Dobot CR5", "UR5", "ARX RS5S", "AUBO i5", "JAKA Zu7"],
    "config3": ["Franka FR3", "Franka Emika Panda", "Flexiv Rizon", "Realman RM75B"],
}


@pytest.mark.parametrize("key,expected", sorted(EXPECTED_RANGES.items()))
def test_joint_ranges_verbatim(key, expected):
    config_id, joint = key
    spec = load_config(config_id).joints[joint - 1]
    assert (spec.range_min, spec.range_max) == expected


def test_range_row_count_is_19():
    assert len(EXPECTED_RANGES) == 19
    total = sum(load_config(c).dof for c in all_config_ids())
    assert total == 19


@pytest.mark.parametrize("config_id", ["config1", "config2", "config3"])
def test_robot_registry_verbatim(config_id):
    got = compatible_robots(load_config(config_id))
    assert got == EXPECTED_ROBOTS[config_id]


def test_dofs():
    assert load_config("config1").dof == 6
    assert load_config("config2").dof == 6
    assert load_config("config3").dof == 7


def test_config2_swap_table():
    swap = load_config("config2").swap_map()
    assert swap[5] == (6, -1)
    assert swap[6] == (5, -1)
    for j in range(1, 5):
        assert swap[j] == (j, 1)


def test_configs_without_swaps(config1):
    assert load_config("config1").swap_pairs == ()
    assert load_config("config3").swap_pairs == ()


def test_unknown_config_rejected():
    with pytest.raises(ConfigNotFound):
        load_config("config9")
    with pytest.raises(ConfigNotFound):
        load_config("")


def test_load_config_caches():
    assert load_config("config1") is load_config(ConfigId.CONFIG1)


# ---------------------------------------------------------------------------
# clamping


def test_clamp_examples(config1):
    assert clamp_joint(config1, 1, 100.0) == 87.0
    assert clamp_joint(config1, 1, -100.0) == -87.0
    assert clamp_joint(config1, 3, -200.0) == -180.0
    assert clamp_joint(config1, 2, 12.0) == 12.0


@given(st.lists(st.floats(-400, 400, allow_nan=False), min_size=6, max_size=6))
@settings(max_examples=200, deadline=None)
def test_clamp_idempotent_and_in_range(values):
    config = load_config("config1")
    q = config.vector(values)
    clamped = clamp_to_limits(config, q)
    assert in_limits(config, clamped)
    again = clamp_to_limits(config, clamped)
    assert np.array_equal(again.as_array(), clamped.as_array())
    # already-legal vectors pass through untouched
    if in_limits(config, q):
        assert np.array_equal(clamped.as_array(), q.as_array())


def test_joint_vector_basics(config1):
    v = config1.vector([1, 2, 3, 4, 5, 6])
    assert len(v) == 6
    assert v[2] == 3.0
    assert list(v) == [1, 2, 3, 4, 5, 6]
    assert v == config1.vector([1, 2, 3, 4, 5, 6])
    with pytest.raises(DimensionError):
        config1.vector([1, 2, 3])
    with pytest.raises(ValueError):
        config1.vector([np.nan] * 6)
    arr = v.as_array()
    with pytest.raises(ValueError):
        arr[0] = 9  # read-only view


def test_joint_vector_cross_config_not_equal():
    a = JointVector("config1", [0] * 6)
    b = JointVector("config2", [0] * 6)
    assert a != b


# ---------------------------------------------------------------------------
# override files


def test_override_file_round_trip(tmp_path, config1):
    path = tmp_path / "override.json"
    path.write_text(json.dumps(config1.to_dict()))
    loaded = load_config_file(path)
    assert loaded == config1


def test_override_file_can_change_ranges(tmp_path, config1):
    raw = config1.to_dict()
    raw["joints"][0]["range_min"] = -45
    raw["joints"][0]["range_max"] = 45
    path = tmp_path / "narrow.json"
    path.write_text(json.dumps(raw))
    loaded = load_config_file(path)
    assert loaded.joints[0].range_min == -45
    assert clamp_joint(loaded, 1, 80.0) == 45.0


def test_override_file_schema_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"id": "config1", "joints": [{"axis": "Q"}]}))
    import jsonschema

    with pytest.raises(jsonschema.ValidationError):
        load_config_file(path)


def test_override_file_rejects_inverted_range(tmp_path, config1):
    raw = config1.to_dict()
    raw["joints"][0]["range_min"] = 90
    raw["joints"][0]["range_max"] = -90
    path = tmp_path / "inverted.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(ValueError):
        load_config_file(path)
