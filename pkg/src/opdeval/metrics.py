"""Part- and motion-averaged mAP cascades and motion error metrics.

Two families of detection AP are computed in one pass:

* part-averaged: classes are part labels, a detection must carry the GT's
  label;
* motion-averaged: classes are motion types, a detection must carry the
  GT's motion type and its label is ignored.

Each family is evaluated at the nested levels ``Det``, ``DetM`` (motion
type), ``DetMA`` (+ axis within ``axis_thresh_deg``), ``DetMAO`` (+ origin
within ``origin_thresh_frac`` of the object diagonal, prismatic joints
always pass) and ``DetState`` (motion type + binary open state). The
criteria of a level are part of the matching predicate, so a detection
that fails them cannot take a GT away from one that passes.
"""

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .artic import MOTION_TYPES, PART_LABELS, MotionType, motion_to_frame
from .data import PredFrame
from .errors import FrameAlignmentError, MissingExtrinsicsError
from .geom import angle_between_axes, point_to_line_distance
from .match import box_iou, box_iou_matrix, greedy_match_masked, greedy_nms, mask_iou

logger = logging.getLogger(__name__)

LEVELS = ("Det", "DetM", "DetMA", "DetMAO", "DetState")
FAMILIES = ("part", "motion")
RECALL_GRID = np.linspace(0.0, 1.0, 101)
SWEEP_IOUS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

# slack on the inclusive axis threshold so that an angle built as exactly
# the threshold is not rejected by last-bit rounding
ANGLE_SLACK_DEG = 1e-9


@dataclass(frozen=True)
class EvalConfig:
    iou_thresholds: tuple = (0.5,)
    axis_thresh_deg: float = 10.0
    origin_thresh_frac: float = 0.25
    max_det: int = 100
    score_thresh: float = 0.05
    nms_iou: Optional[float] = 0.5
    undirected_axes: bool = True
    iou_type: str = "bbox"
    levels: tuple = LEVELS
    errors: str = "both"
    error_iou: float = 0.5
    sweep_iou_thresholds: tuple = SWEEP_IOUS
    state_prob_thresh: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "iou_thresholds", tuple(float(t) for t in self.iou_thresholds))
        object.__setattr__(self, "sweep_iou_thresholds", tuple(float(t) for t in self.sweep_iou_thresholds))
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.iou_thresholds or any(not 0 < t <= 1 for t in self.iou_thresholds):
            raise ValueError("iou_thresholds must lie in (0, 1]")
        if self.axis_thresh_deg <= 0 or self.origin_thresh_frac <= 0:
            raise ValueError("axis and origin thresholds must be positive")
        if self.max_det < 1:
            raise ValueError("max_det must be at least 1")
        if self.iou_type not in ("bbox", "segm"):
            raise ValueError("iou_type must be 'bbox' or 'segm'")
        if self.errors not in ("none", "micro", "sweep", "both"):
            raise ValueError("errors must be one of none, micro, sweep, both")
        unknown = set(self.levels) - set(LEVELS)
        if unknown:
            raise ValueError(f"unknown match levels {sorted(unknown)}")

    def to_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


# -------------------------------------------------------------- predicates


def resolve_motions(pred, gt=None):
    """Return ``pred`` with every detection's motion in camera coordinates.

    Object-frame detections are mapped with the frame's predicted
    extrinsics. ``gt`` is accepted for symmetry with the evaluator and is
    not consulted.
    """
    if all(d.frame_tag == "camera" for d in pred.detections):
        return pred
    if pred.predicted_extrinsics is None:
        raise MissingExtrinsicsError(f"frame {pred.frame_id}: object-frame detections without extrinsics")
    dets = []
    for d in pred.detections:
        if d.frame_tag == "object":
            d = _replace_det(d, motion=motion_to_frame(d.motion, pred.predicted_extrinsics), frame_tag="camera")
        dets.append(d)
    return PredFrame(pred.frame_id, tuple(dets), pred.predicted_extrinsics)


def _replace_det(d, **changes):
    return dataclasses.replace(d, **changes)


def pair_iou(det, ann, iou_type="bbox"):
    if iou_type == "segm" and det.mask is not None:
        return mask_iou(det.mask, ann.mask)
    return box_iou(det.bbox, ann.bbox)


def match_predicate(level, det, ann, config, diagonal, family="part"):
    """Whether ``det`` may match GT annotation ``ann`` at ``level``.

    Returns ``(passed, iou)`` for the lowest IoU threshold of ``config``.
    Motions must already be in camera coordinates.
    """
    iou = pair_iou(det, ann, config.iou_type)
    ok = iou >= min(config.iou_thresholds)
    if family == "part":
        ok = ok and det.label == ann.label
    else:
        ok = ok and det.motion.type == ann.motion.type
    if level == "Det":
        return ok, iou
    ok = ok and det.motion.type == ann.motion.type
    if level == "DetState":
        if det.state_open_prob is None or ann.state is None:
            return False, iou
        return ok and (det.state_open_prob >= config.state_prob_thresh) == bool(ann.state.open), iou
    angle = angle_between_axes(det.motion.axis, ann.motion.axis, undirected=config.undirected_axes)
    if level in ("DetMA", "DetMAO"):
        ok = ok and angle <= config.axis_thresh_deg + ANGLE_SLACK_DEG
    if level == "DetMAO" and ann.motion.type is MotionType.REVOLUTE:
        if det.motion.origin is None:
            return False, iou
        dist = point_to_line_distance(det.motion.origin, ann.motion.origin, ann.motion.axis)
        ok = ok and dist <= config.origin_thresh_frac * diagonal
    return ok, iou


# ---------------------------------------------------------- average precision


def average_precision(tps, n_gt, scores=None):
    """101-point interpolated AP of a ranked list of true/false positives.

    ``tps`` must be in descending score order unless ``scores`` is given,
    in which case it is sorted stably. Returns ``None`` when there is
    neither GT nor detection and ``0.0`` for detections without GT.
    """
    tps = np.asarray(tps, dtype=bool).reshape(-1)
    if scores is not None:
        tps = tps[np.argsort(-np.asarray(scores, dtype=float), kind="stable")]
    if n_gt == 0:
        return None if tps.size == 0 else 0.0
    if tps.size == 0:
        return 0.0
    tp = np.cumsum(tps)
    precision = tp / np.arange(1, tp.size + 1)
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    # first rank whose recall reaches i/100, in integers to avoid grid rounding
    need = -((-np.arange(RECALL_GRID.size) * n_gt) // (RECALL_GRID.size - 1))
    idx = np.searchsorted(tp, need, side="left")
    q = np.zeros(RECALL_GRID.size)
    valid = idx < precision.size
    q[valid] = precision[idx[valid]]
    return float(q.mean())


# ------------------------------------------------------------ per-frame work


def prepare_detections(pred, config):
    """Score filter, class-wise NMS and ``max_det`` truncation, sorted by score."""
    dets = [d for d in pred.detections if d.score >= config.score_thresh]
    if config.nms_iou is not None:
        dets = greedy_nms(dets, config.nms_iou)
    else:
        dets = [dets[i] for i in sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))]
    return dets[: config.max_det]


_LABEL_IDX = {lab: i for i, lab in enumerate(PART_LABELS)}
_TYPE_IDX = {t: i for i, t in enumerate(MOTION_TYPES)}


def _axes(motions):
    return np.array([m.axis for m in motions], dtype=float).reshape(-1, 3)


def _origins(motions):
    out = np.zeros((len(motions), 3))
    has = np.zeros(len(motions), dtype=bool)
    for i, m in enumerate(motions):
        if m.origin is not None:
            out[i] = m.origin
            has[i] = True
    return out, has


def _pairwise(dets, anns, diagonal, config):
    """Criterion matrices of shape ``(n_dets, n_gts)`` shared by every level."""
    D, G = len(dets), len(anns)
    if config.iou_type == "segm":
        iou = np.array([[pair_iou(d, a, "segm") for a in anns] for d in dets]).reshape(D, G)
    else:
        iou = box_iou_matrix([d.bbox for d in dets], [a.bbox for a in anns])
    d_lab = np.array([_LABEL_IDX[d.label] for d in dets])
    g_lab = np.array([_LABEL_IDX[a.label] for a in anns])
    d_typ = np.array([_TYPE_IDX[d.motion.type] for d in dets])
    g_typ = np.array([_TYPE_IDX[a.motion.type] for a in anns])
    label_eq = d_lab[:, None] == g_lab[None, :]
    type_eq = d_typ[:, None] == g_typ[None, :]

    da = _axes([d.motion for d in dets])
    ga = _axes([a.motion for a in anns])
    da = da / np.linalg.norm(da, axis=1, keepdims=True)
    ga = ga / np.linalg.norm(ga, axis=1, keepdims=True)
    cross = np.linalg.norm(np.cross(da[:, None, :], ga[None, :, :]), axis=2)
    dot = da @ ga.T
    angle = np.degrees(np.arctan2(cross, dot))
    if config.undirected_axes:
        angle = np.minimum(angle, 180.0 - angle)

    do, d_has = _origins([d.motion for d in dets])
    go, _ = _origins([a.motion for a in anns])
    diff = do[:, None, :] - go[None, :, :]
    along = np.sum(diff * ga[None, :, :], axis=2)
    dist = np.linalg.norm(diff - along[:, :, None] * ga[None, :, :], axis=2) / diagonal
    g_rev = g_typ == _TYPE_IDX[MotionType.REVOLUTE]
    origin_ok = ~g_rev[None, :] | (d_has[:, None] & (dist <= config.origin_thresh_frac))

    d_state = np.array(
        [-1 if d.state_open_prob is None else int(d.state_open_prob >= config.state_prob_thresh) for d in dets]
    )
    g_state = np.array([-2 if a.state is None else int(bool(a.state.open)) for a in anns])
    state_ok = d_state[:, None] == g_state[None, :]

    axis_ok = type_eq & (angle <= config.axis_thresh_deg + ANGLE_SLACK_DEG)
    levels = {
        "Det": np.ones((D, G), dtype=bool),
        "DetM": type_eq,
        "DetMA": axis_ok,
        "DetMAO": axis_ok & origin_ok,
        "DetState": type_eq & state_ok,
    }
    return {
        "iou": iou,
        "family": {"part": label_eq, "motion": type_eq},
        "levels": levels,
        "angle": angle,
        "dist": dist,
        "d_has_origin": d_has,
        "g_typ": g_typ,
        "d_lab": d_lab,
        "d_typ": d_typ,
    }


def _error_thresholds(config):
    ts = set()
    if config.errors in ("micro", "both"):
        ts.add(config.error_iou)
    if config.errors in ("sweep", "both"):
        ts.update(config.sweep_iou_thresholds)
    return tuple(sorted(ts))


def evaluate_frame(gt_frame, pred, config):
    """Match one frame at every family/level/threshold.

    Returns a dict of small arrays that :func:`evaluate` concatenates:
    detection scores and class indices, TP flags per (family, level,
    threshold) key, GT class counts and matched-pair errors.
    """
    anns = gt_frame.annotations
    dets = prepare_detections(resolve_motions(pred), config) if pred is not None else []
    D, G = len(dets), len(anns)
    keys = [(f, lv, ti) for f in FAMILIES for lv in config.levels for ti in range(len(config.iou_thresholds))]
    out = {
        "scores": np.array([d.score for d in dets], dtype=float),
        "cls": {"part": np.zeros(D, dtype=int), "motion": np.zeros(D, dtype=int)},
        "tp": np.zeros((len(keys), D), dtype=bool),
        "n_gt": {
            "part": np.bincount([_LABEL_IDX[a.label] for a in anns], minlength=len(PART_LABELS)),
            "motion": np.bincount([_TYPE_IDX[a.motion.type] for a in anns], minlength=len(MOTION_TYPES)),
        },
        "errors": {},
    }
    err_ts = _error_thresholds(config)
    if D == 0:
        for t in err_ts:
            out["errors"][t] = np.zeros((0, 3))
        return out
    if G == 0:
        out["cls"] = {
            "part": np.array([_LABEL_IDX[d.label] for d in dets]),
            "motion": np.array([_TYPE_IDX[d.motion.type] for d in dets]),
        }
        for t in err_ts:
            out["errors"][t] = np.zeros((0, 3))
        return out

    P = _pairwise(dets, anns, gt_frame.diagonal, config)
    out["cls"] = {"part": P["d_lab"], "motion": P["d_typ"]}
    iou = P["iou"]
    over = {t: iou >= t for t in set(config.iou_thresholds) | set(err_ts)}
    for k, (fam, lv, ti) in enumerate(keys):
        passing = over[config.iou_thresholds[ti]] & P["family"][fam] & P["levels"][lv]
        matched = greedy_match_masked(iou, passing)
        out["tp"][k] = np.array(matched) >= 0
    for t in err_ts:
        matched = greedy_match_masked(iou, over[t] & P["family"]["motion"])
        rows = []
        for d, g in enumerate(matched):
            if g < 0:
                continue
            origin = np.nan
            if P["g_typ"][g] == _TYPE_IDX[MotionType.REVOLUTE] and P["d_has_origin"][d]:
                origin = P["dist"][d, g]
            rows.append((P["g_typ"][g], P["angle"][d, g], origin))
        out["errors"][t] = np.array(rows, dtype=float).reshape(-1, 3)
    return out


def _evaluate_chunk(args):
    pairs, config = args
    return [evaluate_frame(g, p, config) for g, p in pairs]


# ------------------------------------------------------------------ report


def _pct(v):
    return None if v is None else 100.0 * v


def _mean(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _round(v, nd):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return None
    return round(float(v), nd)


@dataclass
class MetricsReport:
    """All evaluation results. mAP/AP values are percentages, ``None`` when undefined."""

    part_averaged: dict = field(default_factory=dict)
    motion_averaged: dict = field(default_factory=dict)
    per_part_category: dict = field(default_factory=dict)
    per_motion_type: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        def r4(d):
            return {k: _round(v, 4) for k, v in d.items()}

        errors = {}
        for name, block in self.errors.items():
            errors[name] = _round_tree(block)
        return {
            "part_averaged": r4(self.part_averaged),
            "motion_averaged": r4(self.motion_averaged),
            "per_part_category": {k: r4(v) for k, v in self.per_part_category.items()},
            "per_motion_type": {k: r4(v) for k, v in self.per_motion_type.items()},
            "errors": errors,
            "counts": self.counts,
            "config": self.config,
        }

    def rows(self):
        """Flat ``(section, family, group, level, metric, value)`` rows for CSV output."""
        d = self.to_dict()
        rows = []
        for fam, key in (("part", "part_averaged"), ("motion", "motion_averaged")):
            for lv, v in d[key].items():
                rows.append(("map", fam, "all", lv, "mAP", v))
        for fam, key in (("part", "per_part_category"), ("motion", "per_motion_type")):
            for group, levels in d[key].items():
                for lv, v in levels.items():
                    rows.append(("ap", fam, group, lv, "AP", v))
        for name, block in d["errors"].items():
            for path, v in _flatten(block):
                if isinstance(v, list):
                    continue
                rows.append(("errors", name, path[0] if len(path) > 1 else "all", "", path[-1], v))
        return rows


def _round_tree(block):
    if isinstance(block, dict):
        return {k: _round_tree(v) for k, v in block.items()}
    if isinstance(block, (list, tuple)):
        return [_round_tree(v) for v in block]
    if isinstance(block, float):
        return _round(block, 6)
    return block


def _flatten(block, prefix=()):
    for k, v in block.items():
        if isinstance(v, dict):
            yield from _flatten(v, prefix + (k,))
        else:
            yield prefix + (k,), v


def _mean_or_none(a):
    a = np.asarray(a, dtype=float)
    a = a[~np.isnan(a)]
    return float(a.mean()) if a.size else None


def _micro_errors(err, iou):
    prism = err[:, 0] == _TYPE_IDX[MotionType.PRISMATIC]
    rev = ~prism
    origin = err[rev, 2]
    return {
        "iou": iou,
        "axis_all": _mean_or_none(err[:, 1]),
        "axis_t": _mean_or_none(err[prism, 1]),
        "axis_r": _mean_or_none(err[rev, 1]),
        "origin_r": _mean_or_none(origin),
        "count_all": int(err.shape[0]),
        "count_t": int(prism.sum()),
        "count_r": int(rev.sum()),
        "count_origin": int((~np.isnan(origin)).sum()),
    }


def _per_type_errors(err):
    out = {}
    for mt in MOTION_TYPES:
        sel = err[err[:, 0] == _TYPE_IDX[mt]]
        entry = {"axis": _mean_or_none(sel[:, 1]), "count": int(sel.shape[0])}
        if mt is MotionType.REVOLUTE:
            entry["origin"] = _mean_or_none(sel[:, 2])
        out[mt.value] = entry
    return out


def _sweep_errors(errs_by_t, thresholds):
    per_t = [_per_type_errors(errs_by_t[t]) for t in thresholds]
    per_type = {}
    for mt in MOTION_TYPES:
        name = mt.value
        entry = {
            "axis": _mean([p[name]["axis"] for p in per_t]),
            "count": float(np.mean([p[name]["count"] for p in per_t])),
        }
        if mt is MotionType.REVOLUTE:
            entry["origin"] = _mean([p[name]["origin"] for p in per_t])
        per_type[name] = entry
    return {
        "iou_thresholds": list(thresholds),
        "axis": _mean([per_type[m.value]["axis"] for m in MOTION_TYPES]),
        "origin": per_type[MotionType.REVOLUTE.value]["origin"],
        "per_type": per_type,
    }


def _aligned_pairs(gt_set, pred_set):
    preds = {}
    for p in pred_set:
        preds[p.frame_id] = p
    gt_ids = {f.frame_id for f in gt_set.frames}
    unknown = sorted(set(preds) - gt_ids)
    if unknown:
        raise FrameAlignmentError(f"predictions reference unknown frames: {unknown[:5]}")
    return [(f, preds.get(f.frame_id)) for f in gt_set.frames]


def evaluate(gt_set, pred_set, config=None, n_jobs=1):
    """Evaluate predictions against ground truth and build a :class:`MetricsReport`.

    Frames are aligned by ``frame_id``; GT frames without predictions
    count as frames with no detections. The result does not depend on
    frame order or ``n_jobs``.
    """
    config = config or EvalConfig()
    pairs = _aligned_pairs(gt_set, pred_set)
    if n_jobs > 1 and len(pairs) > 1:
        size = max(1, math.ceil(len(pairs) / (n_jobs * 4)))
        chunks = [(pairs[i : i + size], config) for i in range(0, len(pairs), size)]
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            results = [r for chunk in ex.map(_evaluate_chunk, chunks) for r in chunk]
    else:
        results = [evaluate_frame(g, p, config) for g, p in pairs]
    return _accumulate(pairs, results, config)


def _accumulate(pairs, results, config):
    n_thr = len(config.iou_thresholds)
    keys = [(f, lv, ti) for f in FAMILIES for lv in config.levels for ti in range(n_thr)]
    frame_rank = {fid: i for i, fid in enumerate(sorted(g.frame_id for g, _ in pairs))}

    scores = np.concatenate([r["scores"] for r in results]) if results else np.zeros(0)
    fr = np.concatenate([np.full(r["scores"].size, frame_rank[g.frame_id]) for (g, _), r in zip(pairs, results)]) if results else np.zeros(0)
    dr = np.concatenate([np.arange(r["scores"].size) for r in results]) if results else np.zeros(0)
    cls = {f: np.concatenate([r["cls"][f] for r in results]) if results else np.zeros(0, int) for f in FAMILIES}
    tp = np.concatenate([r["tp"] for r in results], axis=1) if results else np.zeros((len(keys), 0), bool)
    n_gt = {f: sum((r["n_gt"][f] for r in results), np.zeros(len(PART_LABELS if f == "part" else MOTION_TYPES), int)) for f in FAMILIES}

    order = np.lexsort((dr, fr, -scores))
    class_names = {"part": [c.value for c in PART_LABELS], "motion": [c.value for c in MOTION_TYPES]}
    per_class = {f: {name: {} for name in class_names[f]} for f in FAMILIES}
    for fam in FAMILIES:
        cls_sorted = cls[fam][order]
        for ci, name in enumerate(class_names[fam]):
            sel = order[cls_sorted == ci]
            for lv in config.levels:
                aps = []
                for ti in range(n_thr):
                    k = keys.index((fam, lv, ti))
                    aps.append(average_precision(tp[k, sel], int(n_gt[fam][ci])))
                per_class[fam][name][lv] = None if any(a is None for a in aps) else _pct(float(np.mean(aps)))

    report = MetricsReport()
    for fam, target in (("part", report.part_averaged), ("motion", report.motion_averaged)):
        for lv in config.levels:
            target[lv] = _mean([per_class[fam][name][lv] for name in class_names[fam]])
    report.per_part_category = per_class["part"]
    report.per_motion_type = per_class["motion"]

    err_ts = _error_thresholds(config)
    errs = {t: np.concatenate([r["errors"][t] for r in results]) if results else np.zeros((0, 3)) for t in err_ts}
    if config.errors in ("micro", "both"):
        report.errors["micro"] = _micro_errors(errs[config.error_iou], config.error_iou)
    if config.errors in ("sweep", "both"):
        report.errors["sweep"] = _sweep_errors(errs, config.sweep_iou_thresholds)

    report.counts = {
        "frames": len(pairs),
        "gt_parts": int(n_gt["part"].sum()),
        "detections": int(scores.size),
        "gt_per_label": {name: int(n_gt["part"][i]) for i, name in enumerate(class_names["part"])},
        "gt_per_motion_type": {name: int(n_gt["motion"][i]) for i, name in enumerate(class_names["motion"])},
    }
    report.config = config.to_dict()
    return report


def error_metrics_micro(gt_set, pred_set, iou=0.5, config=None):
    """Micro-averaged axis/origin errors over pairs matched at ``iou`` with equal motion type."""
    base = config or EvalConfig()
    cfg = EvalConfig(**{**asdict(base), "errors": "micro", "error_iou": iou, "levels": ("Det",)})
    return evaluate(gt_set, pred_set, cfg).errors["micro"]


def error_metrics_sweep(gt_set, pred_set, thresholds=SWEEP_IOUS, config=None):
    """Per-type errors averaged over IoU thresholds, then macro-averaged over motion types."""
    base = config or EvalConfig()
    cfg = EvalConfig(**{**asdict(base), "errors": "sweep", "sweep_iou_thresholds": tuple(thresholds), "levels": ("Det",)})
    return evaluate(gt_set, pred_set, cfg).errors["sweep"]


class OPDEvaluator(BaseEstimator):
    """Estimator-style wrapper: ``fit`` on ground truth, ``evaluate``/``score`` predictions."""

    def __init__(
        self,
        iou_thresholds=(0.5,),
        axis_thresh_deg=10.0,
        origin_thresh_frac=0.25,
        max_det=100,
        score_thresh=0.05,
        nms_iou=0.5,
        undirected_axes=True,
        iou_type="bbox",
        errors="both",
        n_jobs=1,
    ):
        self.iou_thresholds = iou_thresholds
        self.axis_thresh_deg = axis_thresh_deg
        self.origin_thresh_frac = origin_thresh_frac
        self.max_det = max_det
        self.score_thresh = score_thresh
        self.nms_iou = nms_iou
        self.undirected_axes = undirected_axes
        self.iou_type = iou_type
        self.errors = errors
        self.n_jobs = n_jobs

    def config(self):
        params = self.get_params()
        params.pop("n_jobs")
        return EvalConfig(**params)

    def fit(self, gt_set, y=None):
        self.config_ = self.config()
        self.gt_ = gt_set
        return self

    def evaluate(self, pred_set):
        check_is_fitted(self, "gt_")
        return evaluate(self.gt_, pred_set, self.config_, n_jobs=self.n_jobs)

    def score(self, pred_set, y=None):
        """Part-averaged detection mAP as a fraction in ``[0, 1]``."""
        v = self.evaluate(pred_set).part_averaged.get("Det")
        return 0.0 if v is None else v / 100.0
