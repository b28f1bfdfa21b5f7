"""Deterministic synthetic datasets for tests, demos and benchmarks.

Objects are boxes with drawers (prismatic along ``front``), doors
(revolute about a vertical front edge) and lids (revolute about the top
back edge). Frames use cameras from :mod:`opdeval.sampler`; part boxes
are laid out side by side in the image with filled-rectangle masks.
"""

import numpy as np

from .artic import ArticulatedObject, MotionSpec, OpenablePart, PartLabel, motion_to_frame, object_diagonal
from .data import Detection, FrameGT, GTDataset, PartAnnotation2D, PartState, PredFrame
from .geom import SemanticOBB
from .rle import rle_from_box
from .sampler import SamplerConfig, camera_from_view, intrinsics_from_fov, sample_view

CATEGORIES = ("StorageFurniture", "Table", "Refrigerator", "WashingMachine", "Oven", "Dishwasher", "Microwave", "Box")

# 54.7 degrees from every canonical axis
_TILTED = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)


def _part_motion(label, half, rng, axis_mode):
    hx, hy, hz = half
    if label is PartLabel.DRAWER:
        axis = np.array([0.0, 0.0, 1.0])
        origin = np.array([0.0, rng.uniform(-hy, hy) * 0.5, hz])
        rng_ = (0.0, float(rng.uniform(0.5, 1.5) * hz))
        mtype = "prismatic"
    elif label is PartLabel.DOOR:
        axis = np.array([0.0, 1.0, 0.0])
        origin = np.array([hx * rng.choice([-1.0, 1.0]), 0.0, hz])
        rng_ = (0.0, float(np.pi / 2))
        mtype = "revolute"
    else:
        axis = np.array([1.0, 0.0, 0.0])
        origin = np.array([0.0, hy, -hz])
        rng_ = (0.0, float(np.pi / 2))
        mtype = "revolute"
    if axis_mode == "tilted":
        axis = _TILTED * rng.choice([-1.0, 1.0])
    return MotionSpec(mtype, axis, origin, rng_)


def make_object(object_id, rng, n_parts=None, labels=None, axis_mode="canonical", max_parts=4):
    half = rng.uniform(0.2, 0.6, size=3)
    obb = SemanticOBB(np.zeros(3), [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], half)
    if labels is None:
        n = int(n_parts if n_parts is not None else rng.integers(1, max_parts + 1))
        labels = [PartLabel(str(rng.choice(["drawer", "door", "lid"]))) for _ in range(n)]
    parts = [
        OpenablePart(f"{object_id}_p{k}", PartLabel.parse(lab), _part_motion(PartLabel.parse(lab), half, rng, axis_mode))
        for k, lab in enumerate(labels)
    ]
    return ArticulatedObject(object_id, str(rng.choice(CATEGORIES)), obb, tuple(parts))


def make_frame(frame_id, obj, rng, image_size=64, sampler=None):
    sampler = sampler or SamplerConfig()
    theta, phi, d = sample_view(sampler, rng)
    extr = camera_from_view(theta, phi, d, obj.obb.center, obj.obb.up, obj.obb.front)
    intr = intrinsics_from_fov(sampler.vfov_deg, image_size, image_size)
    n = len(obj.parts)
    cell = image_size / max(n, 1)
    anns = []
    for k, part in enumerate(obj.parts):
        x0 = k * cell + rng.uniform(0, 0.2) * cell
        w = cell * rng.uniform(0.5, 0.75)
        y0 = rng.uniform(0, 0.3) * image_size
        h = image_size * rng.uniform(0.3, 0.6)
        bbox = (float(np.floor(x0)), float(np.floor(y0)), float(np.floor(w)), float(np.floor(h)))
        lo, hi = part.motion.range
        is_open = bool(rng.random() < 0.5)
        value = float(rng.uniform(lo + 0.5 * (hi - lo), hi)) if is_open else lo
        anns.append(
            PartAnnotation2D(
                part.part_id,
                part.label,
                bbox,
                rle_from_box(bbox, image_size, image_size),
                motion_to_frame(part.motion, extr),
                PartState(is_open, value),
            )
        )
    return FrameGT(frame_id, obj.object_id, intr, extr, tuple(anns), object_diagonal(obj.obb))


def make_dataset(n_objects=4, frames_per_object=3, seed=0, image_size=64, axis_mode="canonical", labels=None, max_parts=4):
    """Build a :class:`GTDataset`. ``labels`` fixes every object's part labels."""
    rng = np.random.default_rng(seed)
    objects, frames = {}, []
    for i in range(n_objects):
        obj = make_object(f"obj{i:04d}", rng, labels=labels, axis_mode=axis_mode, max_parts=max_parts)
        objects[obj.object_id] = obj
        for j in range(frames_per_object):
            frames.append(make_frame(f"{obj.object_id}_f{j:03d}", obj, rng, image_size))
    return GTDataset(objects, tuple(frames))


def predictions_from_gt(gt, score=1.0, frame_tag="camera"):
    """Turn ground truth into a perfect prediction set.

    With ``frame_tag="object"`` motions are expressed in object
    coordinates and the GT extrinsics are attached as predicted ones.
    """
    frames = []
    for f in gt.frames:
        obj = gt.objects[f.object_id]
        dets = []
        for a in f.annotations:
            motion = obj.part(a.part_id).motion if frame_tag == "object" else a.motion
            prob = None if a.state is None else (1.0 if a.state.open else 0.0)
            dets.append(
                Detection(a.label, score, a.bbox, motion.replace(range=None, strict=False), frame_tag, a.mask, prob)
            )
        frames.append(PredFrame(f.frame_id, tuple(dets), f.extrinsics))
    return frames
