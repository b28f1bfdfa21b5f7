"""Heuristic motion predictors built on canonical object coordinates.

Both baselines take detections (boxes, labels, scores) plus predicted
object poses and fill in the motion of every detection by choosing among
three box axes and 19 candidate origins of the object's semantic OBB:
12 edge midpoints, 6 face centers and the center.

``RandMot`` draws everything uniformly. ``MostFreq`` learns, per part
label, the most frequent motion type, axis and origin from training
objects.
"""

import dataclasses
import itertools
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .artic import MOTION_TYPES, PART_LABELS, MotionSpec, MotionType, PartLabel, motion_to_frame
from .data import GTDataset, PredFrame
from .errors import MissingExtrinsicsError, MissingStatsError, OPDError
from .geom import from_anocs, to_anocs


def _anocs_candidates():
    pts = [np.array(p) for p in itertools.product((-0.5, 0.0, 0.5), repeat=3)]
    edges = [p for p in pts if np.count_nonzero(p == 0) == 1]
    faces = [p for p in pts if np.count_nonzero(p == 0) == 2]
    center = [p for p in pts if np.count_nonzero(p == 0) == 3]
    return np.array(edges + faces + center, dtype=float)


ANOCS_ORIGINS = _anocs_candidates()
CENTER_INDEX = len(ANOCS_ORIGINS) - 1


def candidate_origins(obb, anocs=ANOCS_ORIGINS):
    """Candidate motion origins in object coordinates, scaled by the box extents."""
    return np.array([from_anocs(q, obb) for q in anocs])


def candidate_axes(obb):
    """The box axes as rows, in object coordinates."""
    return obb.basis.T.copy()


def snap_axis(axis, obb):
    """Index of the box axis closest to ``axis`` ignoring sign; lowest index on ties."""
    local = obb.basis.T @ (np.asarray(axis, dtype=float) / np.linalg.norm(axis))
    return int(np.argmax(np.abs(local)))


def snap_origin(origin, obb, anocs=ANOCS_ORIGINS):
    """Index of the candidate nearest to ``origin`` in normalized box coordinates."""
    q = to_anocs(origin, obb)
    return int(np.argmin(np.linalg.norm(anocs - q, axis=1)))


def _frame_rng(seed, frame_id, index):
    return np.random.default_rng([int(seed), zlib.crc32(frame_id.encode("utf-8")), int(index)])


def _gt_objects(gt):
    frames = gt.frame_index()
    return lambda frame_id: gt.objects[frames[frame_id].object_id]


def _with_motion(det, label, mtype, axis_obj, origin_obj, pose):
    motion = MotionSpec(mtype, axis_obj, origin_obj, strict=False)
    motion = motion_to_frame(motion, pose)
    return dataclasses.replace(det, label=label, motion=motion, frame_tag="camera")


def _pose(frame):
    if frame.predicted_extrinsics is None:
        raise MissingExtrinsicsError(f"frame {frame.frame_id}: baselines need predicted extrinsics")
    return frame.predicted_extrinsics


class RandMot(BaseEstimator):
    """Uniformly random part label, motion type, axis and origin per detection.

    Draws depend only on ``(seed, frame_id, detection index)``.
    """

    def __init__(self, seed=17):
        self.seed = seed

    def fit(self, X=None, y=None):
        return self

    def predict(self, pred_frames, gt):
        object_of = _gt_objects(gt)
        out = []
        for frame in pred_frames:
            obj = object_of(frame.frame_id)
            pose = _pose(frame)
            origins = candidate_origins(obj.obb)
            axes = candidate_axes(obj.obb)
            dets = []
            for i, det in enumerate(frame.detections):
                rng = _frame_rng(self.seed, frame.frame_id, i)
                label = PART_LABELS[int(rng.integers(len(PART_LABELS)))]
                mtype = MOTION_TYPES[int(rng.integers(len(MOTION_TYPES)))]
                axis = axes[int(rng.integers(3))]
                origin = origins[int(rng.integers(len(origins)))]
                dets.append(_with_motion(det, label, mtype, axis, origin, pose))
            out.append(PredFrame(frame.frame_id, tuple(dets), frame.predicted_extrinsics))
        return out


@dataclass
class FreqStats:
    """Per-label counts and modes of snapped training motions."""

    type_counts: dict = field(default_factory=dict)
    axis_counts: dict = field(default_factory=dict)
    origin_counts: dict = field(default_factory=dict)

    def mode(self, label):
        label = PartLabel.parse(label).value
        if label not in self.type_counts:
            raise MissingStatsError(f"no training statistics for label {label!r}")
        mtype = MOTION_TYPES[int(np.argmax(self.type_counts[label]))]
        axis = int(np.argmax(self.axis_counts[label]))
        if mtype is MotionType.REVOLUTE and sum(self.origin_counts[label]) > 0:
            origin = int(np.argmax(self.origin_counts[label]))
        else:
            origin = CENTER_INDEX
        return mtype, axis, origin

    def to_dict(self):
        labels = [lab.value for lab in PART_LABELS if lab.value in self.type_counts]
        out = {}
        for lab in labels:
            mtype, axis, origin = self.mode(lab)
            out[lab] = {
                "type": mtype.value,
                "axis_index": axis,
                "origin_index": origin,
                "type_counts": list(self.type_counts[lab]),
                "axis_counts": list(self.axis_counts[lab]),
                "origin_counts": list(self.origin_counts[lab]),
            }
        return {"labels": out}

    @classmethod
    def from_dict(cls, d):
        stats = cls()
        for lab, entry in d["labels"].items():
            lab = PartLabel.parse(lab).value
            stats.type_counts[lab] = [int(c) for c in entry["type_counts"]]
            stats.axis_counts[lab] = [int(c) for c in entry["axis_counts"]]
            stats.origin_counts[lab] = [int(c) for c in entry["origin_counts"]]
        return stats

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def mostfreq_fit(train):
    """Count snapped motions of every training part, grouped by part label.

    The axis mode is taken among parts of the label's modal motion type,
    the origin mode among its revolute parts. ``train`` is a
    :class:`GTDataset` or an iterable of :class:`ArticulatedObject`.
    """
    objects = list(train.objects.values()) if isinstance(train, GTDataset) else list(train)
    parts = [(obj, p) for obj in objects for p in obj.parts]
    if not parts:
        raise OPDError("training set has no parts")
    stats = FreqStats()
    for lab in PART_LABELS:
        mine = [(obj, p) for obj, p in parts if p.label is lab]
        if not mine:
            continue
        tcounts = [sum(p.motion.type is t for _, p in mine) for t in MOTION_TYPES]
        modal = MOTION_TYPES[int(np.argmax(tcounts))]
        acounts = [0, 0, 0]
        ocounts = [0] * len(ANOCS_ORIGINS)
        for obj, p in mine:
            if p.motion.type is not modal:
                continue
            acounts[snap_axis(p.motion.axis, obj.obb)] += 1
            if p.motion.type is MotionType.REVOLUTE:
                ocounts[snap_origin(p.motion.origin, obj.obb)] += 1
        stats.type_counts[lab.value] = tcounts
        stats.axis_counts[lab.value] = acounts
        stats.origin_counts[lab.value] = ocounts
    return stats


class MostFreq(BaseEstimator):
    """Assign each detection the most frequent training motion of its label."""

    def __init__(self, stats=None):
        self.stats = stats

    def fit(self, train=None, y=None):
        if train is None:
            if self.stats is None:
                raise OPDError("MostFreq needs training data or precomputed stats")
            self.stats_ = self.stats
        else:
            self.stats_ = mostfreq_fit(train)
        return self

    def predict(self, pred_frames, gt):
        check_is_fitted(self, "stats_")
        object_of = _gt_objects(gt)
        out = []
        for frame in pred_frames:
            obj = object_of(frame.frame_id)
            pose = _pose(frame)
            origins = candidate_origins(obj.obb)
            axes = candidate_axes(obj.obb)
            dets = []
            for det in frame.detections:
                mtype, ai, oi = self.stats_.mode(det.label)
                dets.append(_with_motion(det, det.label, mtype, axes[ai], origins[oi], pose))
            out.append(PredFrame(frame.frame_id, tuple(dets), frame.predicted_extrinsics))
        return out


def randmot(pred_frames, gt, seed=17):
    return RandMot(seed=seed).predict(pred_frames, gt)


def mostfreq(pred_frames, stats, gt):
    return MostFreq(stats=stats).fit().predict(pred_frames, gt)
