"""Overlap measures, non-maximum suppression and detection/GT assignment.

Boxes are ``[x, y, w, h]`` in pixels.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RLEError
from .rle import foreground_intervals


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple  # (det_index, gt_index)
    unmatched_dets: tuple
    unmatched_gts: tuple


def box_iou(a, b):
    ax, ay, aw, ah = (float(v) for v in a)
    bx, by, bw, bh = (float(v) for v in b)
    iw = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    # the clamp keeps rounding in (x + w) - x from pushing IoU above 1
    inter = min(iw * ih, aw * ah, bw * bh)
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0 else 0.0


def box_iou_matrix(a, b):
    """Pairwise IoU between ``(n, 4)`` and ``(m, 4)`` box arrays."""
    a = np.asarray(a, dtype=float).reshape(-1, 4)
    b = np.asarray(b, dtype=float).reshape(-1, 4)
    ax1, ay1 = a[:, 0:1], a[:, 1:2]
    ax2, ay2 = ax1 + a[:, 2:3], ay1 + a[:, 3:4]
    bx1, by1 = b[:, 0], b[:, 1]
    bx2, by2 = bx1 + b[:, 2], by1 + b[:, 3]
    iw = np.clip(np.minimum(ax2, bx2) - np.maximum(ax1, bx1), 0.0, None)
    ih = np.clip(np.minimum(ay2, by2) - np.maximum(ay1, by1), 0.0, None)
    area_a, area_b = (a[:, 2] * a[:, 3])[:, None], (b[:, 2] * b[:, 3])[None, :]
    inter = np.minimum(iw * ih, np.minimum(area_a, area_b))
    union = area_a + area_b - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0)
    return out


def giou(a, b):
    """Generalized IoU: IoU minus the share of the enclosing box not covered by the union."""
    ax, ay, aw, ah = (float(v) for v in a)
    bx, by, bw, bh = (float(v) for v in b)
    iw = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    # the clamp keeps rounding in (x + w) - x from pushing IoU above 1
    inter = min(iw * ih, aw * ah, bw * bh)
    union = aw * ah + bw * bh - inter
    enclosing = (max(ax + aw, bx + bw) - min(ax, bx)) * (max(ay + ah, by + bh) - min(ay, by))
    iou = inter / union if union > 0 else 0.0
    if enclosing <= 0:
        return iou
    return iou - max(enclosing - union, 0.0) / enclosing


def mask_iou(a, b):
    """IoU of two RLE masks computed on their runs; two empty masks give 0."""
    if tuple(a.size) != tuple(b.size):
        raise RLEError(f"mask sizes differ: {a.size} vs {b.size}")
    sa, ea = foreground_intervals(a)
    sb, eb = foreground_intervals(b)
    inter = 0
    i = j = 0
    while i < len(sa) and j < len(sb):
        lo = max(sa[i], sb[j])
        hi = min(ea[i], eb[j])
        if hi > lo:
            inter += hi - lo
        if ea[i] < eb[j]:
            i += 1
        else:
            j += 1
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def _score_order(scores):
    # descending score, input index breaks ties
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def greedy_nms(dets, iou_thresh=0.5):
    """Class-wise greedy NMS over detections with ``label``, ``score`` and ``bbox``.

    Returns the kept detections in descending score order. A detection is
    suppressed when its IoU with a kept box of the same label exceeds
    ``iou_thresh``.
    """
    dets = list(dets)
    order = _score_order([d.score for d in dets])
    kept = []
    for i in order:
        d = dets[i]
        if all(k.label != d.label or box_iou(k.bbox, d.bbox) <= iou_thresh for k in kept):
            kept.append(d)
    return kept


def greedy_match(n_gts, n_dets, predicate):
    """COCO-style greedy matching.

    Detections are visited in index order (callers sort them by descending
    score). ``predicate(det_index, gt_index)`` returns the pair's IoU when
    every criterion passes and ``None`` otherwise. Each detection takes the
    unmatched GT with the highest passing IoU, lowest GT index on ties.
    """
    taken = [False] * n_gts
    pairs = []
    unmatched_dets = []
    for d in range(n_dets):
        best, best_iou = -1, -np.inf
        for g in range(n_gts):
            if taken[g]:
                continue
            iou = predicate(d, g)
            if iou is not None and iou > best_iou:
                best, best_iou = g, iou
        if best < 0:
            unmatched_dets.append(d)
        else:
            taken[best] = True
            pairs.append((d, best))
    return MatchResult(tuple(pairs), tuple(unmatched_dets), tuple(g for g in range(n_gts) if not taken[g]))


def greedy_match_masked(iou, passing):
    """Array form of :func:`greedy_match` used by the evaluator.

    ``iou`` and ``passing`` are ``(n_dets, n_gts)``; returns the matched GT
    index per detection, ``-1`` when unmatched.
    """
    n_dets, n_gts = iou.shape
    out = [-1] * n_dets
    if n_gts == 0:
        return out
    taken = [False] * n_gts
    rows = iou.tolist()
    ok = passing.tolist()
    for d in range(n_dets):
        row, prow = rows[d], ok[d]
        best, best_iou = -1, -1.0
        for g in range(n_gts):
            if prow[g] and not taken[g] and row[g] > best_iou:
                best, best_iou = g, row[g]
        if best >= 0:
            taken[best] = True
            out[d] = best
    return out


# ----------------------------------------------------------- assignment


def _solve_square(C):
    """Shortest augmenting path assignment (Jonker-Volgenant style) on a square matrix.

    Returns the row->column assignment and the dual potentials ``u, v``
    with ``C[i, j] - u[i] - v[j] >= 0`` and equality on assigned pairs.
    """
    n = C.shape[0]
    INF = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[j]: row (1-based) assigned to column j
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, INF)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = C[i0 - 1, :] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], INF)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            used_idx = np.flatnonzero(used)
            u[p[used_idx]] += delta
            v[used_idx] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col, u[1:], v[1:]


def _has_matching(adj, rows, banned):
    """Kuhn's algorithm: can every row in ``rows`` get a distinct column not in ``banned``?"""
    owner = {}

    def augment(r, seen):
        for c in adj[r]:
            if c in banned or c in seen:
                continue
            seen.add(c)
            if c not in owner or augment(owner[c], seen):
                owner[c] = r
                return True
        return False

    return all(augment(r, set()) for r in rows)


def _lexmin_perfect_matching(tight):
    """Lexicographically smallest row->column perfect matching using only ``tight`` edges."""
    n = tight.shape[0]
    adj = [np.flatnonzero(tight[i]).tolist() for i in range(n)]
    result = []
    fixed = set()
    for r in range(n):
        for c in adj[r]:
            if c not in fixed and _has_matching(adj, range(r + 1, n), fixed | {c}):
                result.append(c)
                fixed.add(c)
                break
        else:
            raise RuntimeError("tight graph has no perfect matching")
    return result


def hungarian(cost):
    """Minimum-cost assignment for a rectangular cost matrix.

    Returns ``(pairs, total)`` where ``pairs`` lists ``(row, col)`` for
    the ``min(rows, cols)`` assigned rows in row order. Among equal-cost
    optima the lexicographically smallest row->column map is returned.
    """
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix must be finite")
    n_rows, n_cols = C.shape
    if n_rows == 0 or n_cols == 0:
        return [], 0.0
    n = max(n_rows, n_cols)
    S = np.zeros((n, n))
    S[:n_rows, :n_cols] = C
    _, u, v = _solve_square(S)
    reduced = S - u[:, None] - v[None, :]
    scale = max(1.0, float(np.max(np.abs(S))))
    tight = reduced <= 1e-9 * scale * n
    assign = _lexmin_perfect_matching(tight)
    pairs = [(i, assign[i]) for i in range(n_rows) if assign[i] < n_cols]
    total = float(sum(C[i, j] for i, j in pairs))
    return pairs, total
