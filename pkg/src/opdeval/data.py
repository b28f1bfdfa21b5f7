"""Ground-truth and prediction files, frame filtering and report output.

Both file kinds are JSON. Loading validates every field and reports the
offending field path; saving is deterministic so that a load/save cycle
is a fixed point.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .artic import ArticulatedObject, MotionSpec, MotionType, OpenablePart, PartLabel, object_diagonal
from .errors import DanglingReferenceError, OPDError, ParseError, RLEError, SchemaError
from .geom import RigidTransform, SemanticOBB, is_rotation, rotation_from_vec9
from .rle import MaskRLE, rle_decode

FRAME_TAGS = ("camera", "object")


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise SchemaError("intrinsics", "width and height must be positive")
        if self.fx <= 0 or self.fy <= 0:
            raise SchemaError("intrinsics", "focal lengths must be positive")
        if not (0 <= self.cx <= self.width and 0 <= self.cy <= self.height):
            raise SchemaError("intrinsics", "principal point outside the image")

    def to_dict(self):
        return {
            "fx": float(self.fx),
            "fy": float(self.fy),
            "cx": float(self.cx),
            "cy": float(self.cy),
            "width": int(self.width),
            "height": int(self.height),
        }


@dataclass(frozen=True)
class PartState:
    open: bool
    value: float = 0.0


@dataclass(frozen=True, eq=False)
class PartAnnotation2D:
    part_id: str
    label: PartLabel
    bbox: tuple
    mask: MaskRLE
    motion: MotionSpec  # camera frame
    state: Optional[PartState] = None


@dataclass(frozen=True, eq=False)
class FrameGT:
    frame_id: str
    object_id: str
    intrinsics: CameraIntrinsics
    extrinsics: RigidTransform  # object -> camera
    annotations: tuple
    diagonal: float


@dataclass(frozen=True, eq=False)
class Detection:
    label: PartLabel
    score: float
    bbox: tuple
    motion: MotionSpec
    frame_tag: str = "camera"
    mask: Optional[MaskRLE] = None
    state_open_prob: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "label", PartLabel.parse(self.label))
        if not 0.0 <= self.score <= 1.0:
            raise SchemaError("score", "must lie in [0, 1]")
        if self.state_open_prob is not None and not 0.0 <= self.state_open_prob <= 1.0:
            raise SchemaError("state_open_prob", "must lie in [0, 1]")
        if self.frame_tag not in FRAME_TAGS:
            raise SchemaError("frame_tag", f"must be one of {FRAME_TAGS}")


@dataclass(frozen=True, eq=False)
class PredFrame:
    frame_id: str
    detections: tuple = ()
    predicted_extrinsics: Optional[RigidTransform] = None

    def __post_init__(self):
        object.__setattr__(self, "detections", tuple(self.detections))
        if self.predicted_extrinsics is None and any(d.frame_tag == "object" for d in self.detections):
            raise SchemaError(f"frames[{self.frame_id}]", "object-frame detections need predicted_extrinsics")


@dataclass(frozen=True, eq=False)
class GTDataset:
    objects: dict = field(default_factory=dict)
    frames: tuple = ()

    def object_for(self, frame):
        return self.objects[frame.object_id]

    def frame_index(self):
        return {f.frame_id: f for f in self.frames}


# ---------------------------------------------------------------- parsing


def _read_json(path):
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.colno, exc.msg) from None


def _get(d, key, where, default=KeyError):
    if not isinstance(d, dict):
        raise SchemaError(where, "expected an object")
    if key not in d:
        if default is KeyError:
            raise SchemaError(f"{where}.{key}", "missing required field")
        return default
    return d[key]


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(where, "expected a finite number")
    return float(v)


def _vec(v, n, where):
    if not isinstance(v, list) or len(v) != n:
        raise SchemaError(where, f"expected a list of {n} numbers")
    return [_num(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _str(v, where):
    if not isinstance(v, str) or not v:
        raise SchemaError(where, "expected a non-empty string")
    return v


def _wrap(where, fn, *args):
    try:
        return fn(*args)
    except SchemaError as exc:
        if exc.field.startswith("$"):
            raise
        raise SchemaError(where, str(exc)) from None
    except (OPDError, ValueError) as exc:
        raise SchemaError(where, str(exc)) from None


def _parse_motion(d, where, strict):
    mtype = _wrap(f"{where}.type", MotionType.parse, _get(d, "type", where))
    axis = _vec(_get(d, "axis", where), 3, f"{where}.axis")
    origin = _get(d, "origin", where, None)
    if origin is not None:
        origin = _vec(origin, 3, f"{where}.origin")
    rng = _get(d, "range", where, None)
    unit_name = _get(d, "angle_unit", where, "radians")
    if unit_name not in ("radians", "degrees"):
        raise SchemaError(f"{where}.angle_unit", "must be 'radians' or 'degrees'")
    to_rad = mtype is MotionType.REVOLUTE and unit_name == "degrees"
    if rng is not None:
        rng = _vec(rng, 2, f"{where}.range")
        if to_rad:
            rng = [math.radians(x) for x in rng]
    return _wrap(where, MotionSpec, mtype, axis, origin, rng, strict), to_rad


def _parse_obb(d, where):
    return _wrap(
        where,
        SemanticOBB,
        _vec(_get(d, "center", where), 3, f"{where}.center"),
        _vec(_get(d, "up", where), 3, f"{where}.up"),
        _vec(_get(d, "front", where), 3, f"{where}.front"),
        _vec(_get(d, "half_extents", where), 3, f"{where}.half_extents"),
    )


def _parse_transform(d, where, repair):
    rot = _vec(_get(d, "rotation", where), 9, f"{where}.rotation")
    trans = _vec(_get(d, "translation", where), 3, f"{where}.translation")
    R = np.asarray(rot).reshape(3, 3)
    if not repair and not is_rotation(R, tol=1e-6):
        raise SchemaError(f"{where}.rotation", "not a rotation matrix")
    R = _wrap(f"{where}.rotation", rotation_from_vec9, rot)
    return RigidTransform(R, trans)


def _parse_bbox(v, where, width=None, height=None):
    x, y, w, h = _vec(v, 4, where)
    if w < 0 or h < 0:
        raise SchemaError(where, "width and height must be non-negative")
    if width is not None:
        x0, y0 = min(max(x, 0.0), width), min(max(y, 0.0), height)
        x1, y1 = min(max(x + w, 0.0), width), min(max(y + h, 0.0), height)
        x, y, w, h = x0, y0, x1 - x0, y1 - y0
    return (x, y, w, h)


def _parse_mask(d, where, shape=None):
    size = _get(d, "size", where)
    counts = _get(d, "counts", where)
    if not isinstance(size, list) or len(size) != 2 or not all(isinstance(s, int) for s in size):
        raise SchemaError(f"{where}.size", "expected [height, width] integers")
    if not isinstance(counts, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in counts):
        raise SchemaError(f"{where}.counts", "expected a list of integers")
    try:
        rle = MaskRLE(tuple(size), tuple(counts))
    except RLEError as exc:
        raise SchemaError(where, str(exc)) from None
    if shape is not None and rle.size != shape:
        raise SchemaError(f"{where}.size", f"mask size {list(rle.size)} differs from image {list(shape)}")
    return rle


def _parse_object(d, where):
    object_id = _str(_get(d, "object_id", where), f"{where}.object_id")
    category = _str(_get(d, "category", where), f"{where}.category")
    obb = _parse_obb(_get(d, "obb", where), f"{where}.obb")
    parts = []
    for j, pd in enumerate(_get(d, "parts", where)):
        pw = f"{where}.parts[{j}]"
        motion, _ = _parse_motion(_get(pd, "motion", pw), f"{pw}.motion", strict=True)
        if motion.range is None:
            raise SchemaError(f"{pw}.motion.range", "missing required field")
        parts.append(
            OpenablePart(
                _str(_get(pd, "part_id", pw), f"{pw}.part_id"),
                _wrap(f"{pw}.label", PartLabel.parse, _get(pd, "label", pw)),
                motion,
            )
        )
    ids = [p.part_id for p in parts]
    if len(set(ids)) != len(ids):
        raise SchemaError(f"{where}.parts", "duplicate part_id")
    return ArticulatedObject(object_id, category, obb, tuple(parts))


def _parse_intrinsics(d, where):
    width, height = _get(d, "width", where), _get(d, "height", where)
    if not isinstance(width, int) or not isinstance(height, int):
        raise SchemaError(where, "width and height must be integers")
    return _wrap(
        where,
        CameraIntrinsics,
        _num(_get(d, "fx", where), f"{where}.fx"),
        _num(_get(d, "fy", where), f"{where}.fy"),
        _num(_get(d, "cx", where), f"{where}.cx"),
        _num(_get(d, "cy", where), f"{where}.cy"),
        width,
        height,
    )


def _parse_frame(d, where, objects):
    frame_id = _str(_get(d, "frame_id", where), f"{where}.frame_id")
    object_id = _str(_get(d, "object_id", where), f"{where}.object_id")
    if object_id not in objects:
        raise DanglingReferenceError(f"{where}.object_id", f"unknown object {object_id!r}")
    obj = objects[object_id]
    intr = _parse_intrinsics(_get(d, "intrinsics", where), f"{where}.intrinsics")
    extr = _parse_transform(_get(d, "extrinsics", where), f"{where}.extrinsics", repair=False)
    shape = (intr.height, intr.width)
    anns = []
    for j, ad in enumerate(_get(d, "annotations", where)):
        aw = f"{where}.annotations[{j}]"
        part_id = _str(_get(ad, "part_id", aw), f"{aw}.part_id")
        if part_id not in {p.part_id for p in obj.parts}:
            raise DanglingReferenceError(f"{aw}.part_id", f"unknown part {part_id!r} of object {object_id!r}")
        motion, to_rad = _parse_motion(_get(ad, "motion_camera", aw), f"{aw}.motion_camera", strict=True)
        state = _get(ad, "state", aw, None)
        if state is not None:
            is_open = _get(state, "open", f"{aw}.state")
            if not isinstance(is_open, bool):
                raise SchemaError(f"{aw}.state.open", "expected a boolean")
            value = _num(_get(state, "value", f"{aw}.state", 0.0), f"{aw}.state.value")
            state = PartState(is_open, math.radians(value) if to_rad else value)
        anns.append(
            PartAnnotation2D(
                part_id,
                _wrap(f"{aw}.label", PartLabel.parse, _get(ad, "label", aw)),
                _parse_bbox(_get(ad, "bbox", aw), f"{aw}.bbox", intr.width, intr.height),
                _parse_mask(_get(ad, "mask", aw), f"{aw}.mask", shape),
                motion,
                state,
            )
        )
    diagonal = _get(d, "diagonal", where, None)
    diagonal = object_diagonal(obj.obb) if diagonal is None else _num(diagonal, f"{where}.diagonal")
    if diagonal <= 0:
        raise SchemaError(f"{where}.diagonal", "must be positive")
    return FrameGT(frame_id, object_id, intr, extr, tuple(anns), diagonal)


def parse_ground_truth(doc, where="$"):
    objects = {}
    for i, od in enumerate(_get(doc, "objects", where, [])):
        obj = _parse_object(od, f"{where}.objects[{i}]")
        if obj.object_id in objects:
            raise SchemaError(f"{where}.objects[{i}].object_id", "duplicate object_id")
        objects[obj.object_id] = obj
    frames = []
    seen = set()
    for i, fd in enumerate(_get(doc, "frames", where)):
        frame = _parse_frame(fd, f"{where}.frames[{i}]", objects)
        if frame.frame_id in seen:
            raise SchemaError(f"{where}.frames[{i}].frame_id", "duplicate frame_id")
        seen.add(frame.frame_id)
        frames.append(frame)
    return GTDataset(objects, tuple(frames))


def _parse_detection(d, where):
    label = _wrap(f"{where}.label", PartLabel.parse, _get(d, "label", where))
    score = _num(_get(d, "score", where), f"{where}.score")
    if not 0.0 <= score <= 1.0:
        raise SchemaError(f"{where}.score", "must lie in [0, 1]")
    bbox = _parse_bbox(_get(d, "bbox", where), f"{where}.bbox")
    mask = _get(d, "mask", where, None)
    if mask is not None:
        mask = _parse_mask(mask, f"{where}.mask")
    motion, _ = _parse_motion(_get(d, "motion", where), f"{where}.motion", strict=False)
    tag = _get(d, "frame_tag", where, "camera")
    if tag not in FRAME_TAGS:
        raise SchemaError(f"{where}.frame_tag", f"must be one of {list(FRAME_TAGS)}")
    prob = _get(d, "state_open_prob", where, None)
    if prob is not None:
        prob = _num(prob, f"{where}.state_open_prob")
        if not 0.0 <= prob <= 1.0:
            raise SchemaError(f"{where}.state_open_prob", "must lie in [0, 1]")
    return Detection(label, score, bbox, motion, tag, mask, prob)


def parse_predictions(doc, where="$"):
    frames = []
    seen = set()
    for i, fd in enumerate(_get(doc, "frames", where)):
        fw = f"{where}.frames[{i}]"
        frame_id = _str(_get(fd, "frame_id", fw), f"{fw}.frame_id")
        if frame_id in seen:
            raise SchemaError(f"{fw}.frame_id", "duplicate frame_id")
        seen.add(frame_id)
        extr = _get(fd, "predicted_extrinsics", fw, None)
        if extr is not None:
            extr = _parse_transform(extr, f"{fw}.predicted_extrinsics", repair=True)
        dets = [_parse_detection(dd, f"{fw}.detections[{j}]") for j, dd in enumerate(_get(fd, "detections", fw))]
        if extr is None and any(d.frame_tag == "object" for d in dets):
            raise SchemaError(f"{fw}.predicted_extrinsics", "required by object-frame detections")
        frames.append(PredFrame(frame_id, tuple(dets), extr))
    return frames


def load_ground_truth(path):
    return parse_ground_truth(_read_json(path))


def load_predictions(path):
    return parse_predictions(_read_json(path))


# ---------------------------------------------------------- serialization


def _floats(v):
    return [float(x) for x in np.asarray(v).reshape(-1)]


def motion_to_dict(m, with_range=True):
    d = {
        "type": m.type.value,
        "axis": _floats(m.axis),
        "origin": None if m.origin is None else _floats(m.origin),
    }
    if with_range and m.range is not None:
        d["range"] = [float(m.range[0]), float(m.range[1])]
        d["angle_unit"] = "radians"
    return d


def transform_to_dict(t):
    return {"rotation": _floats(t.rotation), "translation": _floats(t.translation)}


def obb_to_dict(obb):
    return {
        "center": _floats(obb.center),
        "up": _floats(obb.up),
        "front": _floats(obb.front),
        "half_extents": _floats(obb.half_extents),
    }


def object_to_dict(obj):
    return {
        "object_id": obj.object_id,
        "category": obj.category,
        "obb": obb_to_dict(obj.obb),
        "parts": [
            {"part_id": p.part_id, "label": p.label.value, "motion": motion_to_dict(p.motion)} for p in obj.parts
        ],
    }


def annotation_to_dict(a):
    d = {
        "part_id": a.part_id,
        "label": a.label.value,
        "bbox": _floats(a.bbox),
        "mask": a.mask.to_dict(),
        "motion_camera": motion_to_dict(a.motion),
    }
    if a.state is not None:
        d["state"] = {"open": bool(a.state.open), "value": float(a.state.value)}
    return d


def ground_truth_to_dict(gt):
    return {
        "objects": [object_to_dict(o) for o in gt.objects.values()],
        "frames": [
            {
                "frame_id": f.frame_id,
                "object_id": f.object_id,
                "intrinsics": f.intrinsics.to_dict(),
                "extrinsics": transform_to_dict(f.extrinsics),
                "diagonal": float(f.diagonal),
                "annotations": [annotation_to_dict(a) for a in f.annotations],
            }
            for f in gt.frames
        ],
    }


def detection_to_dict(det):
    d = {
        "label": det.label.value,
        "score": float(det.score),
        "bbox": _floats(det.bbox),
        "motion": motion_to_dict(det.motion, with_range=False),
        "frame_tag": det.frame_tag,
    }
    if det.motion.origin is None:
        del d["motion"]["origin"]
    if det.mask is not None:
        d["mask"] = det.mask.to_dict()
    if det.state_open_prob is not None:
        d["state_open_prob"] = float(det.state_open_prob)
    return d


def predictions_to_dict(frames):
    out = []
    for f in frames:
        fd = {"frame_id": f.frame_id}
        if f.predicted_extrinsics is not None:
            fd["predicted_extrinsics"] = transform_to_dict(f.predicted_extrinsics)
        fd["detections"] = [detection_to_dict(d) for d in f.detections]
        out.append(fd)
    return {"frames": out}


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(doc, path):
    Path(path).write_text(dumps(doc), encoding="utf-8")


def save_ground_truth(gt, path):
    write_json(ground_truth_to_dict(gt), path)


def save_predictions(frames, path):
    write_json(predictions_to_dict(frames), path)


# ------------------------------------------------------------ frame filter


def frame_filter(frame, obj=None, min_pixel_frac=0.01, min_visible_frac=0.20):
    """Keep a frame if enough pixels are openable and enough parts are visible.

    A part counts as visible when its mask has at least one pixel. Parts of
    ``obj`` without an annotation in the frame count as invisible. Both
    thresholds are inclusive.
    """
    h, w = frame.intrinsics.height, frame.intrinsics.width
    union = np.zeros((h, w), dtype=bool)
    visible = set()
    for a in frame.annotations:
        if a.mask.area > 0:
            union |= rle_decode(a.mask)
            visible.add(a.part_id)
    n_parts = len(obj.parts) if obj is not None else len(frame.annotations)
    if n_parts == 0 or h * w == 0:
        return False
    pixel_frac = union.sum() / (h * w)
    visible_frac = len(visible) / n_parts
    eps = 1e-12
    return bool(pixel_frac >= min_pixel_frac - eps and visible_frac >= min_visible_frac - eps)


# ----------------------------------------------------------------- reports


def format_report(report, format="json"):
    """Render a :class:`~opdeval.metrics.MetricsReport` as JSON or CSV text."""
    if format == "json":
        return dumps(report.to_dict())
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "family", "group", "level", "metric", "value"])
        for row in report.rows():
            writer.writerow(["" if v is None else v for v in row])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def write_report(report, path, format="json"):
    Path(path).write_text(format_report(report, format), encoding="utf-8")
