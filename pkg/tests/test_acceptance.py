"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary block
at the end of the run lists every criterion.
"""

import dataclasses
import itertools
import time

import numpy as np
import pytest
from scipy import stats as sps

import oracle
from baseline_oracle import mostfreq_modes
from scenes import random_scene, random_unit, tilt
from test_baselines import random_training_set
from test_match import brute_force
from opdeval import data, synth
from opdeval.artic import MotionSpec, PartLabel
from opdeval.baselines import RandMot, mostfreq_fit
from opdeval.cli import main as cli_main
from opdeval.data import CameraIntrinsics, Detection, FrameGT, GTDataset, PartAnnotation2D, PartState, PredFrame
from opdeval.geom import RigidTransform
from opdeval.losses import cross_entropy, extrinsic_loss, motion_loss, smooth_l1
from opdeval.match import hungarian
from opdeval.metrics import LEVELS, EvalConfig, evaluate
from opdeval.rle import rle_decode, rle_encode, rle_from_box
from opdeval.sampler import SamplerConfig, bates, sample_view, view_schedule

RAW = EvalConfig(score_thresh=0.0, nms_iou=None)
CASCADE = ("Det", "DetM", "DetMA", "DetMAO")


def perturb_axes(preds, deg, seed=0):
    rng = np.random.default_rng(seed)
    return [
        PredFrame(
            p.frame_id,
            tuple(dataclasses.replace(d, motion=d.motion.replace(axis=tilt(d.motion.axis, deg, rng))) for d in p.detections),
            p.predicted_extrinsics,
        )
        for p in preds
    ]


def test_ac01_ap_oracle(criterion):
    rng = np.random.default_rng(1)
    scenes = [random_scene(rng) for _ in range(200)]
    t0 = time.perf_counter()
    reports = [evaluate(gt, preds, RAW) for gt, preds in scenes]
    elapsed = time.perf_counter() - t0
    worst, mismatches, compared = 0.0, 0, 0
    for (gt, preds), r in zip(scenes, reports):
        for fam, per in (("part", r.per_part_category), ("motion", r.per_motion_type)):
            for lv in LEVELS:
                for cls, want in oracle.class_aps(gt, preds, lv, fam).items():
                    got = per[cls][lv]
                    compared += 1
                    if (got is None) != (want is None):
                        mismatches += 1
                    elif want is not None:
                        worst = max(worst, abs(got / 100 - want))
    ok = mismatches == 0 and worst <= 1e-9 and elapsed < 5.0
    criterion(1, "AP equals brute-force PR oracle", ok,
              f"{compared} class APs, max |diff| {worst:.1e}, null mismatches {mismatches}, {elapsed:.2f}s")


def test_ac02_perfect_predictor(criterion):
    gt = synth.make_dataset(20, 4, seed=2)
    n_parts = sum(len(f.annotations) for f in gt.frames)
    problems = []
    for tag in ("camera", "object"):
        r = evaluate(gt, synth.predictions_from_gt(gt, frame_tag=tag))
        maps = list(r.part_averaged.values()) + list(r.motion_averaged.values())
        if any(abs(v - 100.0) > 1e-6 for v in maps):
            problems.append(f"{tag}: mAP {maps}")
        micro, sweep = r.errors["micro"], r.errors["sweep"]
        if max(micro["axis_all"], micro["origin_r"], sweep["axis"], sweep["origin"]) > 1e-6:
            problems.append(f"{tag}: nonzero errors")
        if micro["count_all"] != n_parts or micro["count_t"] + micro["count_r"] != n_parts:
            problems.append(f"{tag}: counts {micro['count_all']} != {n_parts}")
    criterion(2, "perfect predictor gives 100 mAP and zero errors", not problems, "; ".join(problems) or f"{n_parts} parts")


def test_ac03_threshold_sharpness(criterion):
    gt = synth.make_dataset(20, 3, seed=3)
    perfect = synth.predictions_from_gt(gt)
    below = evaluate(gt, perturb_axes(perfect, 9.9))
    above = evaluate(gt, perturb_axes(perfect, 10.1))
    ok = True
    for fam in ("part_averaged", "motion_averaged"):
        b, a = getattr(below, fam), getattr(above, fam)
        ok &= b["DetMA"] == b["DetM"] == 100.0
        ok &= a["DetMA"] == 0.0 and a["DetMAO"] == 0.0 and a["DetM"] == 100.0
    criterion(3, "inclusive 10 degree axis rule", ok,
              f"9.9: +MA {below.part_averaged['DetMA']}/{below.motion_averaged['DetMA']}, "
              f"10.1: +MA {above.part_averaged['DetMA']}/{above.motion_averaged['DetMA']}")


def test_ac04_prismatic_origins(criterion):
    rng = np.random.default_rng(4)
    diffs = 0
    for _ in range(40):
        gt, preds = random_scene(rng, n_frames=3)

        def scramble(m):
            if m.type.value == "prismatic":
                return m.replace(origin=rng.normal(scale=100.0, size=3))
            return m

        gt2 = GTDataset(gt.objects, tuple(
            dataclasses.replace(f, annotations=tuple(dataclasses.replace(a, motion=scramble(a.motion)) for a in f.annotations))
            for f in gt.frames))
        preds2 = [PredFrame(p.frame_id, tuple(dataclasses.replace(d, motion=scramble(d.motion)) for d in p.detections))
                  for p in preds]
        diffs += evaluate(gt, preds, RAW).to_dict() != evaluate(gt2, preds2, RAW).to_dict()
    criterion(4, "prismatic origins never affect any metric", diffs == 0, f"{diffs} of 40 reports changed")


def test_ac05_baselines(criterion):
    gt = synth.make_dataset(1800, 3, seed=5)
    dets = synth.predictions_from_gt(gt, score=0.9)
    out = RandMot(seed=17).predict(dets, gt)
    hits = total = 0
    for frame, pred in zip(gt.frames, out):
        for a, d in zip(frame.annotations, pred.detections):
            total += 1
            hits += oracle.axis_angle(a.motion.axis, d.motion.axis) <= 10.0
    rate = hits / total

    tilted = synth.make_dataset(60, 3, seed=6, axis_mode="tilted")
    rt = evaluate(tilted, RandMot(seed=17).predict(synth.predictions_from_gt(tilted), tilted))
    tilted_zero = all(rt.part_averaged[lv] == 0.0 and rt.motion_averaged[lv] == 0.0 for lv in ("DetMA", "DetMAO"))

    rng = np.random.default_rng(5)
    oracle_ok = 0
    for _ in range(50):
        objects = random_training_set(rng, int(rng.integers(1, 15)))
        stats = mostfreq_fit(objects)
        want = mostfreq_modes(objects)
        got = {lab: (m.value, a, o) for lab in want for m, a, o in [stats.mode(lab)]}
        oracle_ok += got == want
    ok = total >= 10_000 and abs(rate - 1 / 3) <= 0.03 and tilted_zero and oracle_ok == 50
    criterion(5, "baseline statistics", ok,
              f"RandMot axis rate {rate:.4f} over {total} parts; tilted +MA/+MAO zero: {tilted_zero}; "
              f"MostFreq oracle {oracle_ok}/50")


def test_ac06_hungarian(criterion):
    rng = np.random.default_rng(6)
    failures = 0
    for i in range(1000):
        n, m = (int(v) for v in rng.integers(1, 7, size=2))
        cost = rng.integers(0, 6, size=(n, m)) if i % 2 else rng.normal(size=(n, m))
        pairs, total = hungarian(cost)
        want_pairs, want_total = brute_force(cost)
        exact = total == want_total if i % 2 else abs(total - want_total) <= 1e-12
        failures += not (exact and sorted(pairs) == list(want_pairs))
    criterion(6, "Hungarian equals permutation brute force", failures == 0, f"{failures} failures in 1000 matrices")


def _fd(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


def _off_kink(rng, n):
    x = rng.uniform(-3, 3, size=n)
    x[np.abs(np.abs(x) - 1.0) < 1e-3] += 3e-3
    return x


def test_ac07_gradients(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    ext_gt = RigidTransform(np.eye(3), [0.1, 0.2, 0.3])
    for i in range(100):
        x = _off_kink(rng, 6)
        worst = max(worst, _rel(smooth_l1(x)[1], _fd(lambda v: smooth_l1(v)[0], x)))
        z = rng.normal(scale=3, size=4)
        worst = max(worst, _rel(cross_entropy(z, i % 4)[1], _fd(lambda v: cross_entropy(v, i % 4)[0], z)))
        gt = MotionSpec("revolute" if i % 2 else "prismatic", random_unit(rng), rng.normal(size=3))
        logits, axis, origin = rng.normal(size=2), gt.axis + _off_kink(rng, 3) / 2, gt.origin + _off_kink(rng, 3)
        _, g = motion_loss(logits, axis, origin, gt, return_grad=True)
        worst = max(worst, _rel(g["type_logits"], _fd(lambda v: motion_loss(v, axis, origin, gt), logits)))
        worst = max(worst, _rel(g["axis"], _fd(lambda v: motion_loss(logits, v, origin, gt), axis)))
        worst = max(worst, _rel(g["origin"], _fd(lambda v: motion_loss(logits, axis, v, gt), origin)))
        p = ext_gt.to_vec12() + _off_kink(rng, 12)
        worst = max(worst, _rel(extrinsic_loss(p, ext_gt, return_grad=True)[1], _fd(lambda v: extrinsic_loss(v, ext_gt), p)))
    criterion(7, "loss gradients match central differences", worst < 1e-4, f"max relative error {worst:.1e}")


def test_ac08_sampler(criterion):
    rng = np.random.default_rng(8)
    x = bates(2, -60, 60, rng, size=10**6)
    mean_ok = abs(x.mean()) <= 0.5
    var_ok = abs(x.var() / 600 - 1) <= 0.02
    cfg = SamplerConfig()
    cases = np.array([sample_view(cfg, rng, return_case=True)[3] for _ in range(10**5)])
    freq = np.bincount(cases, minlength=3) / cases.size
    freq_ok = np.all(np.abs(freq - [0.6, 0.2, 0.2]) <= 0.01)
    counts = []
    for n in (1, 2, 3):
        obj = synth.make_object("o", np.random.default_rng(n), n_parts=n)
        s = view_schedule(obj, cfg, seed=n)
        counts.append((len(s["views"]), len(s["images"])) == (5 + 20 * n, 25 + 100 * n))
    ok = mean_ok and var_ok and freq_ok and all(counts)
    criterion(8, "sampler statistics and schedule counts", ok,
              f"mean {x.mean():.3f}, var {x.var():.1f}, cases {np.round(freq, 4).tolist()}, counts ok {all(counts)}")


def test_ac09_round_trips(criterion, tmp_path, capsys):
    rng = np.random.default_rng(9)
    rle_ok = True
    for _ in range(1000):
        h, w = (int(v) for v in rng.integers(1, 40, size=2))
        m = rng.random((h, w)) < rng.random()
        rle_ok &= bool(np.array_equal(rle_decode(rle_encode(m)), m))
    gt = synth.make_dataset(10, 3, seed=9)
    paths = {k: tmp_path / f"{k}.json" for k in ("gt", "gt2", "pred", "pred2")}
    data.save_ground_truth(gt, paths["gt"])
    data.save_ground_truth(data.load_ground_truth(paths["gt"]), paths["gt2"])
    preds = perturb_axes(synth.predictions_from_gt(gt, score=0.8, frame_tag="object"), 5.0)
    data.save_predictions(preds, paths["pred"])
    data.save_predictions(data.load_predictions(paths["pred"]), paths["pred2"])
    fixed = paths["gt"].read_bytes() == paths["gt2"].read_bytes() and paths["pred"].read_bytes() == paths["pred2"].read_bytes()
    outs = []
    for jobs in (1, 8):
        out = tmp_path / f"report{jobs}.json"
        code = cli_main(["eval", "--gt", str(paths["gt"]), "--pred", str(paths["pred"]), "--jobs", str(jobs), "--out", str(out)])
        outs.append(out.read_bytes() if code == 0 else None)
    capsys.readouterr()
    jobs_ok = outs[0] is not None and outs[0] == outs[1]
    criterion(9, "RLE, load/save fixed point, --jobs determinism", rle_ok and fixed and jobs_ok,
              f"rle {rle_ok}, fixed point {fixed}, jobs 1 vs 8 identical {jobs_ok}")


def test_ac10_monotone_cascade(criterion):
    rng = np.random.default_rng(10)
    violations, checked = [], 0
    for s in range(100):
        gt, preds = random_scene(rng)
        r = evaluate(gt, preds, RAW)
        for fam, per in (("part", r.per_part_category), ("motion", r.per_motion_type)):
            for cls, aps in per.items():
                vals = [aps[lv] for lv in CASCADE]
                if vals[0] is None:
                    continue
                checked += 1
                if any(a < b - 1e-9 for a, b in zip(vals, vals[1:])):
                    violations.append(f"scene {s} {fam}/{cls} {vals}")
    criterion(10, "AP(Det) >= AP(+M) >= AP(+MA) >= AP(+MAO)", not violations,
              f"{checked} class cascades, {len(violations)} violations" + (f": {violations[:3]}" if violations else ""))


def _throughput_set(n_frames=10_000, per_frame=5, seed=11):
    rng = np.random.default_rng(seed)
    intr = CameraIntrinsics(100.0, 100.0, 50.0, 50.0, 100, 100)
    labels = list(PartLabel)
    frames, preds = [], []
    for i in range(n_frames):
        anns, dets = [], []
        for k in range(per_frame):
            box = (float(20 * k), float(rng.uniform(0, 50)), 18.0, float(rng.uniform(20, 50)))
            mtype = "revolute" if rng.random() < 0.5 else "prismatic"
            motion = MotionSpec(mtype, random_unit(rng), rng.normal(size=3), (0.0, 1.0))
            label = labels[int(rng.integers(3))]
            anns.append(PartAnnotation2D(f"p{k}", label, box, rle_from_box(box, 100, 100), motion, PartState(bool(k % 2))))
            jb = (box[0] + rng.uniform(-3, 3), box[1] + rng.uniform(-3, 3), box[2], box[3])
            dm = motion.replace(axis=tilt(motion.axis, rng.uniform(0, 20), rng), range=None)
            dets.append(Detection(label, float(rng.uniform(0.1, 1)), jb, dm, state_open_prob=float(rng.random())))
        frames.append(FrameGT(f"f{i:05d}", "o", intr, RigidTransform(), tuple(anns), 1.5))
        preds.append(PredFrame(f"f{i:05d}", tuple(dets)))
    return GTDataset({}, tuple(frames)), preds


@pytest.mark.slow
def test_ac11_throughput(criterion):
    gt, preds = _throughput_set()
    t0 = time.perf_counter()
    r = evaluate(gt, preds)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 10.0 and r.counts["detections"] == 50_000
    criterion(11, "10,000 frames x 5 detections in under 10 s", ok, f"{elapsed:.2f}s single-threaded")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
