"""Command-line entry point: ``opdeval {eval,baseline,validate,stats,sample-views}``.

Exit codes: 0 success, 1 unexpected failure, 2 invalid input file,
3 prediction/GT frame misalignment, 64 usage error. Set ``OPD_LOG`` to a
logging level name (e.g. ``DEBUG``) for verbose output.
"""

import argparse
import json
import logging
import os
import sys
from collections import Counter

import numpy as np

from . import data
from .artic import MOTION_TYPES, PART_LABELS, motion_to_frame
from .baselines import FreqStats, MostFreq, RandMot
from .errors import FrameAlignmentError, MissingExtrinsicsError, MissingStatsError, OPDError
from .geom import angle_between_axes, point_to_line_distance
from .metrics import EvalConfig, evaluate
from .rle import rle_decode
from .sampler import SamplerConfig, view_schedule

logger = logging.getLogger("opdeval")

EXIT_OK, EXIT_OTHER, EXIT_SCHEMA, EXIT_ALIGN, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(doc, out):
    if out:
        data.write_json(doc, out)
    else:
        sys.stdout.write(data.dumps(doc))


def cmd_eval(args):
    gt = data.load_ground_truth(args.gt)
    preds = data.load_predictions(args.pred)
    config = EvalConfig(
        iou_thresholds=tuple(args.iou),
        axis_thresh_deg=args.axis_thresh,
        origin_thresh_frac=args.origin_thresh,
        max_det=args.max_det,
        score_thresh=args.score_thresh,
        nms_iou=None if args.nms_iou is not None and args.nms_iou < 0 else args.nms_iou,
        undirected_axes=args.undirected_axes,
        iou_type=args.iou_type,
        errors=args.errors,
    )
    report = evaluate(gt, preds, config, n_jobs=args.jobs)
    if args.out:
        data.write_report(report, args.out, args.format)
    else:
        sys.stdout.write(data.format_report(report, args.format))
    return EXIT_OK


def cmd_baseline(args):
    gt = data.load_ground_truth(args.gt)
    dets = data.load_predictions(args.detections)
    known = {f.frame_id for f in gt.frames}
    missing = sorted({f.frame_id for f in dets} - known)
    if missing:
        raise FrameAlignmentError(f"detections reference unknown frames: {missing[:5]}")
    if args.mode == "randmot":
        model = RandMot(seed=args.seed).fit()
    else:
        if args.train_stats:
            model = MostFreq(stats=FreqStats.load(args.train_stats)).fit()
        elif args.gt_train:
            model = MostFreq().fit(data.load_ground_truth(args.gt_train))
        else:
            raise UsageError("--mode mostfreq needs --train-stats or --gt-train")
        if args.save_stats:
            model.stats_.save(args.save_stats)
    out = model.predict(dets, gt)
    _emit(data.predictions_to_dict(out), args.out)
    return EXIT_OK


def _mask_bounds(rle):
    m = rle_decode(rle)
    ys, xs = np.nonzero(m)
    if ys.size == 0:
        return None
    return xs.min(), ys.min(), xs.max() + 1, ys.max() + 1


def validate_dataset(gt, frame_filter=False, min_pixel_frac=0.01, min_visible_frac=0.20, tol=1e-6):
    """Semantic checks beyond the file schema. Returns ``(violations, filter_failures)``."""
    violations = []
    for f in gt.frames:
        obj = gt.objects[f.object_id]
        expected_diag = obj.diagonal
        if abs(f.diagonal - expected_diag) > tol * max(1.0, expected_diag):
            violations.append(f"{f.frame_id}: diagonal {f.diagonal} differs from object OBB diagonal {expected_diag}")
        for a in f.annotations:
            where = f"{f.frame_id}/{a.part_id}"
            part = obj.part(a.part_id)
            if a.label != part.label:
                violations.append(f"{where}: label {a.label.value} differs from object part label {part.label.value}")
            expected = motion_to_frame(part.motion, f.extrinsics)
            if a.motion.type != expected.type:
                violations.append(f"{where}: motion type differs from object part")
            elif angle_between_axes(a.motion.axis, expected.axis, undirected=False) > 1e-4:
                violations.append(f"{where}: camera-frame axis inconsistent with extrinsics")
            elif expected.origin is not None and a.motion.origin is not None and a.motion.is_revolute:
                if point_to_line_distance(a.motion.origin, expected.origin, expected.axis) > tol * max(1.0, f.diagonal):
                    violations.append(f"{where}: camera-frame origin inconsistent with extrinsics")
            bounds = _mask_bounds(a.mask)
            if bounds is not None:
                x, y, w, h = a.bbox
                x0, y0, x1, y1 = bounds
                if x0 < x - 1 or y0 < y - 1 or x1 > x + w + 1 or y1 > y + h + 1:
                    violations.append(f"{where}: mask extends outside bbox")
    failures = []
    if frame_filter:
        for f in gt.frames:
            if not data.frame_filter(f, gt.objects[f.object_id], min_pixel_frac, min_visible_frac):
                failures.append(f.frame_id)
    return violations, failures


def cmd_validate(args):
    gt = data.load_ground_truth(args.gt)
    violations, failures = validate_dataset(gt, args.frame_filter, args.min_pixel_frac, args.min_visible_frac)
    doc = {"violations": violations}
    if args.frame_filter:
        doc["filter_failures"] = failures
    _emit(doc, args.out)
    return EXIT_SCHEMA if violations else EXIT_OK


def dataset_stats(gt):
    """Object, part and image counts per category, plus label and motion-type totals."""
    per_cat = {}
    for obj in gt.objects.values():
        entry = per_cat.setdefault(
            obj.category,
            {"objects": 0, "parts": 0, "images": 0, "labels": Counter(), "motion_types": Counter()},
        )
        entry["objects"] += 1
        entry["parts"] += len(obj.parts)
        entry["labels"].update(p.label.value for p in obj.parts)
        entry["motion_types"].update(p.motion.type.value for p in obj.parts)
    for f in gt.frames:
        per_cat[gt.objects[f.object_id].category]["images"] += 1

    def full(counter, names):
        return {n: int(counter.get(n, 0)) for n in names}

    labels = [lab.value for lab in PART_LABELS]
    types = [t.value for t in MOTION_TYPES]
    total_labels, total_types = Counter(), Counter()
    categories = {}
    for cat in sorted(per_cat):
        e = per_cat[cat]
        total_labels.update(e["labels"])
        total_types.update(e["motion_types"])
        categories[cat] = {
            "objects": e["objects"],
            "parts": e["parts"],
            "images": e["images"],
            "labels": full(e["labels"], labels),
            "motion_types": full(e["motion_types"], types),
        }
    return {
        "objects": len(gt.objects),
        "parts": sum(len(o.parts) for o in gt.objects.values()),
        "images": len(gt.frames),
        "labels": full(total_labels, labels),
        "motion_types": full(total_types, types),
        "categories": categories,
    }


def cmd_stats(args):
    _emit(dataset_stats(data.load_ground_truth(args.gt)), args.out)
    return EXIT_OK


def cmd_sample_views(args):
    gt = data.load_ground_truth(args.gt)
    if args.object not in gt.objects:
        raise UsageError(f"unknown object {args.object!r}")
    config = SamplerConfig(
        views_per_state=args.views_per_state,
        backgrounds_per_image=args.backgrounds,
        n_random_states=args.random_states,
    )
    _emit(view_schedule(gt.objects[args.object], config, seed=args.seed), args.out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="opdeval", description="Openable part detection evaluation toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate predictions against ground truth")
    e.add_argument("--gt", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--iou", type=float, nargs="+", default=[0.5])
    e.add_argument("--axis-thresh", type=float, default=10.0, help="degrees")
    e.add_argument("--origin-thresh", type=float, default=0.25, help="fraction of object diagonal")
    e.add_argument("--max-det", type=int, default=100)
    e.add_argument("--score-thresh", type=float, default=0.05)
    e.add_argument("--nms-iou", type=float, default=0.5, help="negative disables NMS")
    axes = e.add_mutually_exclusive_group()
    axes.add_argument("--undirected-axes", dest="undirected_axes", action="store_true", default=True)
    axes.add_argument("--directed-axes", dest="undirected_axes", action="store_false")
    e.add_argument("--iou-type", choices=["bbox", "segm"], default="bbox")
    e.add_argument("--errors", choices=["micro", "sweep", "both", "none"], default="both")
    e.add_argument("--out")
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("baseline", help="fill detection motions with RandMot or MostFreq")
    b.add_argument("--mode", choices=["randmot", "mostfreq"], required=True)
    b.add_argument("--gt", required=True, help="GT file providing object boxes for the frames")
    b.add_argument("--detections", required=True)
    b.add_argument("--train-stats")
    b.add_argument("--gt-train")
    b.add_argument("--save-stats")
    b.add_argument("--seed", type=int, default=17)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline)

    v = sub.add_parser("validate", help="check a GT file")
    v.add_argument("--gt", required=True)
    v.add_argument("--frame-filter", action="store_true")
    v.add_argument("--min-pixel-frac", type=float, default=0.01)
    v.add_argument("--min-visible-frac", type=float, default=0.20)
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("stats", help="dataset statistics")
    s.add_argument("--gt", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    sv = sub.add_parser("sample-views", help="camera/state render schedule for one object")
    sv.add_argument("--gt", required=True)
    sv.add_argument("--object", required=True)
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--views-per-state", type=int, default=5)
    sv.add_argument("--backgrounds", type=int, default=4)
    sv.add_argument("--random-states", type=int, default=3)
    sv.add_argument("--out")
    sv.set_defaults(func=cmd_sample_views)
    return p


def main(argv=None):
    level = os.environ.get("OPD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"opdeval: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FrameAlignmentError as exc:
        print(f"opdeval: alignment error: {exc}", file=sys.stderr)
        return EXIT_ALIGN
    except (MissingExtrinsicsError, MissingStatsError) as exc:
        print(f"opdeval: error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OPDError as exc:
        print(f"opdeval: invalid input: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"opdeval: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
