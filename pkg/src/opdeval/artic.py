"""Articulated objects: parts, joint motions and their kinematics."""

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidMotionError, SchemaError
from .geom import (
    RigidTransform,
    SemanticOBB,
    as_vec3,
    rotation_about_axis,
    transform_direction,
    transform_point,
    unit,
)


class MotionType(str, enum.Enum):
    PRISMATIC = "prismatic"
    REVOLUTE = "revolute"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        v = {"translation": "prismatic", "rotation": "revolute"}.get(v, v)
        try:
            return cls(v)
        except ValueError:
            raise InvalidMotionError(f"unknown motion type {value!r}") from None


class PartLabel(str, enum.Enum):
    DRAWER = "drawer"
    DOOR = "door"
    LID = "lid"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise SchemaError("label", f"unknown part label {value!r}") from None


MOTION_TYPES = tuple(MotionType)
PART_LABELS = tuple(PartLabel)


def _frozen_vec(v, name):
    arr = as_vec3(v, name).copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MotionSpec:
    """A single joint: type, unit axis, origin on the axis line, value range.

    Ranges are meters for prismatic joints and radians for revolute ones.
    ``range`` may be ``None`` for predicted motions, and so may ``origin``
    unless ``strict`` is set for a revolute joint.
    """

    type: MotionType
    axis: np.ndarray
    origin: Optional[np.ndarray] = None
    range: Optional[tuple] = None
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "type", MotionType.parse(self.type))
        object.__setattr__(self, "axis", _frozen_vec(unit(self.axis, "axis"), "axis"))
        if self.origin is not None:
            object.__setattr__(self, "origin", _frozen_vec(self.origin, "origin"))
        elif self.strict and self.type is MotionType.REVOLUTE:
            raise InvalidMotionError("revolute motion requires an origin")
        if self.range is not None:
            lo, hi = (float(x) for x in self.range)
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise InvalidMotionError(f"invalid motion range [{lo}, {hi}]")
            object.__setattr__(self, "range", (lo, hi))

    @property
    def is_revolute(self):
        return self.type is MotionType.REVOLUTE

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def allclose(self, other, atol=1e-9):
        if self.type is not other.type or not np.allclose(self.axis, other.axis, rtol=0, atol=atol):
            return False
        if (self.origin is None) != (other.origin is None):
            return False
        if self.origin is not None and not np.allclose(self.origin, other.origin, rtol=0, atol=atol):
            return False
        if (self.range is None) != (other.range is None):
            return False
        return self.range is None or np.allclose(self.range, other.range, rtol=0, atol=atol)

    def __repr__(self):
        origin = None if self.origin is None else self.origin.tolist()
        return f"MotionSpec({self.type.value}, axis={self.axis.tolist()}, origin={origin}, range={self.range})"


@dataclass(frozen=True, eq=False)
class OpenablePart:
    part_id: str
    label: PartLabel
    motion: MotionSpec

    def __post_init__(self):
        if not self.part_id:
            raise SchemaError("part_id", "must be non-empty")
        object.__setattr__(self, "label", PartLabel.parse(self.label))


@dataclass(frozen=True, eq=False)
class ArticulatedObject:
    object_id: str
    category: str
    obb: SemanticOBB
    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        ids = [p.part_id for p in parts]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"objects[{self.object_id}].parts", "duplicate part_id")
        object.__setattr__(self, "parts", parts)

    def part(self, part_id):
        for p in self.parts:
            if p.part_id == part_id:
                return p
        raise KeyError(part_id)

    @property
    def diagonal(self):
        return object_diagonal(self.obb)


def apply_motion(motion, value):
    """Rigid transform that moves a part by ``value`` along/about its joint."""
    value = float(value)
    if not np.isfinite(value):
        raise InvalidMotionError("motion value must be finite")
    if motion.type is MotionType.PRISMATIC:
        return RigidTransform(np.eye(3), motion.axis * value)
    if motion.origin is None:
        raise InvalidMotionError("revolute motion requires an origin")
    R = rotation_about_axis(motion.axis, value)
    # rotate about the line through origin: p -> R (p - o) + o
    return RigidTransform(R, motion.origin - R @ motion.origin)


def motion_to_frame(motion, t):
    """Express ``motion`` in the frame that ``t`` maps into."""
    axis = transform_direction(t, motion.axis)
    origin = None if motion.origin is None else transform_point(t, motion.origin)
    return dataclasses.replace(motion, axis=axis / np.linalg.norm(axis), origin=origin)


def object_diagonal(obb):
    return float(2.0 * np.linalg.norm(obb.half_extents))


def motion_state_schedule(obj, n_random=3, seed=None, rng=None):
    """Motion states to render for ``obj``.

    One state with every part at its minimum, then for each part
    ``n_random`` uniform draws plus the maximum while the others stay at
    their minimum: ``1 + (n_random + 1) * len(parts)`` states in total.
    Each state maps ``part_id`` to a joint value.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    lows = {}
    for p in obj.parts:
        if p.motion.range is None:
            raise InvalidMotionError(f"part {p.part_id} has no motion range")
        lows[p.part_id] = p.motion.range[0]
    states = [dict(lows)]
    for p in obj.parts:
        lo, hi = p.motion.range
        values = [float(x) for x in rng.uniform(lo, hi, size=n_random)] if hi > lo else [lo] * n_random
        for v in values + [hi]:
            s = dict(lows)
            s[p.part_id] = v
            states.append(s)
    return states
