"""Run-length coding of binary masks.

Runs are taken in column-major order and always start with a background
run (which may be empty), the same convention as uncompressed COCO RLE.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RLEError


@dataclass(frozen=True)
class MaskRLE:
    size: tuple
    counts: tuple

    def __post_init__(self):
        h, w = (int(x) for x in self.size)
        counts = tuple(int(c) for c in self.counts)
        if h < 0 or w < 0:
            raise RLEError("mask size must be non-negative")
        if any(c < 0 for c in counts):
            raise RLEError("run lengths must be non-negative")
        if sum(counts) != h * w:
            raise RLEError(f"run lengths sum to {sum(counts)}, expected {h * w}")
        object.__setattr__(self, "size", (h, w))
        object.__setattr__(self, "counts", counts)

    @property
    def area(self):
        return sum(self.counts[1::2])

    def to_dict(self):
        return {"size": list(self.size), "counts": list(self.counts)}


def rle_encode(mask):
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise RLEError("mask must be 2-D")
    h, w = mask.shape
    flat = mask.astype(bool).ravel(order="F")
    if flat.size == 0:
        return MaskRLE((h, w), (0,))
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    counts = np.diff(bounds).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return MaskRLE((h, w), tuple(counts))


def rle_decode(rle):
    h, w = rle.size
    if sum(rle.counts) != h * w:
        raise RLEError("run lengths do not match mask size")
    values = np.arange(len(rle.counts)) % 2 == 1
    flat = np.repeat(values, rle.counts)
    return flat.reshape((w, h)).T.copy()


def foreground_intervals(rle):
    """Half-open ``[start, stop)`` flat-index intervals of foreground runs."""
    ends = np.cumsum(rle.counts)
    starts = ends - np.asarray(rle.counts)
    return starts[1::2], ends[1::2]


def rle_from_box(bbox, height, width):
    """Filled-rectangle mask for an ``[x, y, w, h]`` pixel box."""
    x, y, bw, bh = bbox
    m = np.zeros((height, width), dtype=bool)
    x0, y0 = max(int(round(x)), 0), max(int(round(y)), 0)
    x1, y1 = min(int(round(x + bw)), width), min(int(round(y + bh)), height)
    m[y0:y1, x0:x1] = True
    return rle_encode(m)
