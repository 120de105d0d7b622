"""Leader-arm configurations: joint limits, axis layout, swap tables, robot registry.

The three built-in configurations (two 6-DoF, one 7-DoF) are loaded from
``data/builtin_configs.json``; the same schema can be supplied from a user JSON
file to override axes, limits, or link offsets without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigNotFound, DimensionError

AXIS_VECTORS = {
    "X": (1.0, 0.0, 0.0),
    "Y": (0.0, 1.0, 0.0),
    "Z": (0.0, 0.0, 1.0),
    "-X": (-1.0, 0.0, 0.0),
    "-Y": (0.0, -1.0, 0.0),
    "-Z": (0.0, 0.0, -1.0),
}


class ConfigId(str, Enum):
    """The three built-in leader-arm configurations."""

    CONFIG1 = "config1"
    CONFIG2 = "config2"
    CONFIG3 = "config3"


def _coerce_id(config_id) -> ConfigId:
    if isinstance(config_id, ConfigId):
        return config_id
    try:
        return ConfigId(str(config_id).lower())
    except ValueError:
        raise ConfigNotFound(f"unknown config id {config_id!r}") from None


@dataclass(frozen=True)
class JointSpec:
    """One revolute joint: rotation axis, travel limits, and the translation
    from the previous joint frame at the zero pose.

    Angles are degrees throughout; link_offset is meters in the parent frame.
    """

    index: int  # 1-based ordinal along the chain
    axis: tuple[float, float, float]
    range_min: float
    range_max: float
    link_offset: tuple[float, float, float]

    def __post_init__(self):
        if not self.range_min < self.range_max:
            raise ValueError(
                f"joint {self.index}: range_min {self.range_min} must be below "
                f"range_max {self.range_max}"
            )
        nonzero = [c for c in self.axis if c != 0.0]
        if len(nonzero) != 1 or abs(nonzero[0]) != 1.0:
            raise ValueError(f"joint {self.index}: axis must be a signed unit axis, got {self.axis}")


@dataclass(frozen=True)
class ConfigDescriptor:
    """Full kinematic description of one arm configuration."""

    id: ConfigId
    dof: int
    joints: tuple[JointSpec, ...]
    swap_pairs: tuple[tuple[int, int, int], ...]  # (leader_index, follower_index, sign)
    compatible_robots: tuple[str, ...]

    def __post_init__(self):
        if self.dof != len(self.joints):
            raise ValueError(f"dof {self.dof} != joint count {len(self.joints)}")
        for leader, follower, sign in self.swap_pairs:
            if not (1 <= leader <= self.dof and 1 <= follower <= self.dof):
                raise ValueError(f"swap pair ({leader},{follower}) outside 1..{self.dof}")
            if sign not in (-1, 1):
                raise ValueError(f"swap sign must be +/-1, got {sign}")
        # Applying the swap twice must be the identity with sign +1.
        mapping = self.swap_map()
        for j in range(1, self.dof + 1):
            k, s1 = mapping[j]
            j2, s2 = mapping[k]
            if j2 != j or s1 * s2 != 1:
                raise ValueError("swap table is not an involution")

    def swap_map(self) -> dict[int, tuple[int, int]]:
        """leader joint index -> (follower joint index, sign), identity where unswapped."""
        mapping = {j: (j, 1) for j in range(1, self.dof + 1)}
        for leader, follower, sign in self.swap_pairs:
            mapping[leader] = (follower, sign)
        return mapping

    def vector(self, values) -> "JointVector":
        """Build a JointVector for this config, checking length and finiteness."""
        return JointVector(self.id, values, dof=self.dof)

    def limits(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([j.range_min for j in self.joints], dtype=float)
        hi = np.array([j.range_max for j in self.joints], dtype=float)
        return lo, hi

    def contains(self, q: "JointVector") -> bool:
        lo, hi = self.limits()
        v = q.as_array()
        return bool(np.all(v >= lo) and np.all(v <= hi))

    def to_dict(self) -> dict:
        """JSON-ready form (same schema as the override config file)."""
        axis_names = {v: k for k, v in AXIS_VECTORS.items()}
        return {
            "id": self.id.value,
            "dof": self.dof,
            "joints": [
                {
                    "axis": axis_names[j.axis],
                    "range_min": j.range_min,
                    "range_max": j.range_max,
                    "link_offset": list(j.link_offset),
                }
                for j in self.joints
            ],
            "swap_pairs": [list(p) for p in self.swap_pairs],
            "compatible_robots": list(self.compatible_robots),
        }


class JointVector:
    """An ordered vector of joint angles (degrees) tied to a configuration."""

    __slots__ = ("config_id", "_values")

    def __init__(self, config_id, values, dof: int | None = None):
        self.config_id = _coerce_id(config_id)
        arr = np.asarray(values, dtype=float).copy()
        if arr.ndim != 1:
            raise DimensionError(f"joint vector must be 1-D, got shape {arr.shape}")
        if dof is not None and arr.shape[0] != dof:
            raise DimensionError(f"expected {dof} joints, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("joint angles must be finite")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self._values)

    def as_array(self) -> np.ndarray:
        return self._values

    def __len__(self):
        return self._values.shape[0]

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return float(self._values[i])

    def __eq__(self, other):
        if not isinstance(other, JointVector):
            return NotImplemented
        return self.config_id == other.config_id and np.array_equal(
            self._values, other._values
        )

    def __repr__(self):
        return f"JointVector({self.config_id.value}, {list(self._values)})"


def _descriptor_from_dict(config_id: ConfigId, raw: dict) -> ConfigDescriptor:
    joints = []
    for i, spec in enumerate(raw["joints"], start=1):
        axis_name = str(spec["axis"]).upper()
        if axis_name not in AXIS_VECTORS:
            raise ValueError(f"joint {i}: unknown axis {spec['axis']!r}")
        joints.append(
            JointSpec(
                index=i,
                axis=AXIS_VECTORS[axis_name],
                range_min=float(spec["range_min"]),
                range_max=float(spec["range_max"]),
                link_offset=tuple(float(c) for c in spec["link_offset"]),
            )
        )
    return ConfigDescriptor(
        id=config_id,
        dof=int(raw.get("dof", len(joints))),
        joints=tuple(joints),
        swap_pairs=tuple(tuple(int(x) for x in p) for p in raw.get("swap_pairs", [])),
        compatible_robots=tuple(raw.get("compatible_robots", [])),
    )


@lru_cache(maxsize=None)
def _builtin_data() -> dict:
    text = resources.files("armteleop.data").joinpath("builtin_configs.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _load_config_cached(value: str) -> ConfigDescriptor:
    return _descriptor_from_dict(ConfigId(value), _builtin_data()[value])


def load_config(config_id) -> ConfigDescriptor:
    """Return the built-in descriptor for one of the three configurations.

    Cached: repeated loads (str or ConfigId argument) return the same object.
    """
    return _load_config_cached(_coerce_id(config_id).value)


def load_config_file(path) -> ConfigDescriptor:
    """Load a descriptor override from a JSON file (same schema as the built-ins,
    plus a top-level "id" field). Validated against schemas/config_override.schema.json.
    """
    import jsonschema

    raw = json.loads(Path(path).read_text())
    schema = json.loads(
        resources.files("armteleop.schemas").joinpath("config_override.schema.json").read_text()
    )
    jsonschema.validate(raw, schema)
    return _descriptor_from_dict(_coerce_id(raw["id"]), raw)


def all_config_ids() -> list[ConfigId]:
    return list(ConfigId)


def compatible_robots(config: ConfigDescriptor) -> list[str]:
    """Commercial robots whose joint arrangement matches this configuration."""
    return list(config.compatible_robots)


def clamp_to_limits(config: ConfigDescriptor, q: JointVector) -> JointVector:
    """Clamp every joint angle into the configuration's travel range. Idempotent."""
    if len(q) != config.dof:
        raise DimensionError(f"expected {config.dof} joints, got {len(q)}")
    lo, hi = config.limits()
    return config.vector(np.clip(q.as_array(), lo, hi))


def clamp_joint(config: ConfigDescriptor, index: int, angle_deg: float) -> float:
    """Clamp one angle to the limits of joint ``index`` (1-based)."""
    spec = config.joints[index - 1]
    return min(max(angle_deg, spec.range_min), spec.range_max)


def in_limits(config: ConfigDescriptor, q: JointVector) -> bool:
    if len(q) != config.dof:
        raise DimensionError(f"expected {config.dof} joints, got {len(q)}")
    return config.contains(q)
