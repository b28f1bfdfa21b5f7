"""Camera viewpoint sampling and render schedules for synthetic data.

Views are drawn from a three-case mixture of Bates distributions over
elevation ``theta``, azimuth ``phi`` (degrees, ``phi = 0`` in front of the
object) and distance (meters). A schedule pairs every motion state of an
object with ``views_per_state`` cameras and each view with several
background indices; no pixels are produced.
"""

from dataclasses import dataclass, field

import numpy as np

from .artic import motion_state_schedule
from .data import CameraIntrinsics, transform_to_dict
from .geom import RigidTransform, as_vec3


@dataclass(frozen=True)
class ViewCase:
    probability: float
    k_theta: int
    theta_range: tuple
    k_phi: int
    phi_range: tuple
    k_d: int
    d_range: tuple

    def __post_init__(self):
        for name in ("theta_range", "phi_range", "d_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must be ordered")
        if min(self.k_theta, self.k_phi, self.k_d) < 1:
            raise ValueError("Bates orders must be >= 1")


DEFAULT_CASES = (
    ViewCase(0.6, 2, (30.0, 70.0), 2, (-60.0, 60.0), 2, (1.8, 2.8)),
    ViewCase(0.2, 3, (-35.0, 35.0), 2, (-60.0, 60.0), 2, (1.8, 2.8)),
    ViewCase(0.2, 3, (-35.0, 35.0), 3, (-90.0, 90.0), 2, (1.6, 3.1)),
)


@dataclass(frozen=True)
class SamplerConfig:
    cases: tuple = DEFAULT_CASES
    vfov_deg: float = 50.0
    width: int = 256
    height: int = 256
    views_per_state: int = 5
    backgrounds_per_image: int = 4
    n_random_states: int = 3
    background_pool: int = 1000
    include_plain: bool = True  # also emit the un-composited render of every view

    def __post_init__(self):
        total = sum(c.probability for c in self.cases)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"case probabilities sum to {total}, not 1")
        if not 0 < self.vfov_deg < 180:
            raise ValueError("vfov_deg must lie in (0, 180)")


def bates(k, a, b, rng, size=None):
    """Draw from ``B_k(a, b) = a + (b - a) / k * sum of k standard uniforms``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if a > b:
        raise ValueError("a must not exceed b")
    shape = (k,) if size is None else (k,) + tuple(np.atleast_1d(size))
    u = rng.random(shape).sum(axis=0)
    out = a + (b - a) / k * u
    return float(out) if size is None else out


def sample_view(config, rng, return_case=False):
    """Pick a mixture case, then draw ``(theta, phi, distance)`` independently."""
    probs = np.array([c.probability for c in config.cases])
    ci = int(rng.choice(len(probs), p=probs))
    case = config.cases[ci]
    theta = bates(case.k_theta, *case.theta_range, rng)
    phi = bates(case.k_phi, *case.phi_range, rng)
    d = bates(case.k_d, *case.d_range, rng)
    if return_case:
        return theta, phi, d, ci
    return theta, phi, d


def camera_from_view(theta, phi, distance, target=(0.0, 0.0, 0.0), up=(0.0, 1.0, 0.0), front=(0.0, 0.0, 1.0)):
    """Object-to-camera extrinsics for a zero-roll look-at camera.

    The eye sits at ``distance`` from ``target`` at elevation ``theta`` and
    azimuth ``phi`` (degrees); positive azimuth turns towards
    ``up x front``. Camera axes follow the x-right, y-down, z-forward
    convention.
    """
    if distance <= 0:
        raise ValueError("eye coincides with target")
    target = as_vec3(target, "target")
    up = as_vec3(up, "up")
    up = up / np.linalg.norm(up)
    front = as_vec3(front, "front")
    front = front - np.dot(front, up) * up
    front = front / np.linalg.norm(front)
    right = np.cross(up, front)
    th, ph = np.radians(theta), np.radians(phi)
    direction = np.cos(th) * np.cos(ph) * front + np.cos(th) * np.sin(ph) * right + np.sin(th) * up
    eye = target + distance * direction
    z = target - eye
    z = z / np.linalg.norm(z)
    x = np.cross(z, up)
    nx = np.linalg.norm(x)
    if nx < 1e-9:
        raise ValueError("view direction is parallel to up; roll is undefined")
    x = x / nx
    y = np.cross(z, x)
    R = np.vstack([x, y, z])
    return RigidTransform(R, -R @ eye)


def intrinsics_from_fov(vfov_deg, width, height):
    fy = (height / 2.0) / np.tan(np.radians(vfov_deg) / 2.0)
    return CameraIntrinsics(float(fy), float(fy), width / 2.0, height / 2.0, int(width), int(height))


def view_schedule(obj, config=None, seed=0):
    """Render schedule for ``obj``: one record per (state, camera) view and
    one per output image.

    Every view yields its plain render (``background_index`` ``None``) and
    one composite per sampled background. With ``n`` parts and default
    settings this gives ``5 + 20 n`` views and ``25 + 100 n`` images.
    """
    config = config or SamplerConfig()
    root = np.random.SeedSequence(seed)
    state_seq, view_seq, bg_seq = root.spawn(3)
    states = motion_state_schedule(obj, config.n_random_states, rng=np.random.default_rng(state_seq))
    intr = intrinsics_from_fov(config.vfov_deg, config.width, config.height)
    view_rngs = view_seq.spawn(len(states) * config.views_per_state)
    bg_rng = np.random.default_rng(bg_seq)
    views, images = [], []
    for si, state in enumerate(states):
        for k in range(config.views_per_state):
            vi = si * config.views_per_state + k
            rng = np.random.default_rng(view_rngs[vi])
            theta, phi, d, case = sample_view(config, rng, return_case=True)
            extr = camera_from_view(theta, phi, d, obj.obb.center, obj.obb.up, obj.obb.front)
            views.append(
                {
                    "view_index": vi,
                    "state_index": si,
                    "state": {pid: float(v) for pid, v in state.items()},
                    "case": case,
                    "theta": theta,
                    "phi": phi,
                    "distance": d,
                    "extrinsics": transform_to_dict(extr),
                    "intrinsics": intr.to_dict(),
                }
            )
            if config.include_plain:
                images.append({"view_index": vi, "background_index": None})
            bgs = bg_rng.choice(config.background_pool, size=config.backgrounds_per_image, replace=False)
            for b in bgs:
                images.append({"view_index": vi, "background_index": int(b)})
    return {"object_id": obj.object_id, "views": views, "images": images}
