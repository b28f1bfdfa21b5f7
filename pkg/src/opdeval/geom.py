"""Vectors, rotations, rigid transforms and oriented boxes.

Vectors are plain ``(3,)`` float arrays and rotations ``(3, 3)`` arrays.
Transforms map points as ``R @ p + t``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidAxisError, InvalidOBBError, NonOrthonormalizableError

GEOM_TOL = 1e-9


def as_vec3(v, name="vector"):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


def unit(v, name="axis"):
    """Return ``v / |v|``; raises :class:`InvalidAxisError` for zero-length input."""
    v = as_vec3(v, name)
    n = float(np.linalg.norm(v))
    if n == 0.0 or not np.isfinite(n):
        raise InvalidAxisError(f"{name} has zero length")
    return v / n


def angle_between_axes(a, b, undirected=True):
    """Angle between two axis directions in degrees.

    Inputs need not be normalized. With ``undirected`` the sign of either
    axis is ignored and the result lies in ``[0, 90]``; otherwise it lies
    in ``[0, 180]``.
    """
    a = unit(a, "a")
    b = unit(b, "b")
    # atan2 keeps precision near 0 and 180 where arccos loses it
    theta = float(np.degrees(np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b))))
    if undirected:
        return min(theta, 180.0 - theta)
    return theta


def point_to_line_distance(p, line_point, line_dir):
    """Euclidean distance from ``p`` to the infinite line through ``line_point``."""
    d = unit(line_dir, "line_dir")
    diff = as_vec3(p, "p") - as_vec3(line_point, "line_point")
    return float(np.linalg.norm(diff - np.dot(diff, d) * d))


def is_rotation(R, tol=GEOM_TOL):
    R = np.asarray(R, dtype=float)
    return (
        R.shape == (3, 3)
        and bool(np.all(np.isfinite(R)))
        and np.max(np.abs(R @ R.T - np.eye(3))) <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def rotation_from_vec9(v):
    """Repair a row-major 9-vector into a proper rotation matrix.

    Rows are orthonormalized by Gram-Schmidt and the last row is flipped if
    the result is a reflection. Input that is already a rotation (within
    ``GEOM_TOL``) is returned unchanged.
    """
    M = np.asarray(v, dtype=float).reshape(-1)
    if M.shape != (9,) or not np.all(np.isfinite(M)):
        raise NonOrthonormalizableError("rotation needs 9 finite entries")
    M = M.reshape(3, 3)
    if is_rotation(M):
        return M.copy()
    scale = max(float(np.max(np.abs(M))), 1e-300)
    rows = []
    for r in M:
        w = r.copy()
        for q in rows:
            w = w - np.dot(w, q) * q
        n = np.linalg.norm(w)
        if n <= 1e-9 * scale:
            raise NonOrthonormalizableError("rotation block is rank-deficient")
        rows.append(w / n)
    R = np.vstack(rows)
    if np.linalg.det(R) < 0:
        R[2] = -R[2]
    return R


def rotation_about_axis(axis, angle):
    """Rodrigues rotation matrix for ``angle`` radians about ``axis``."""
    k = unit(axis)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Rotation followed by translation: ``p -> R @ p + t``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if R.shape == (9,):
            R = R.reshape(3, 3)
        if not is_rotation(R):
            raise NonOrthonormalizableError("rotation is not orthonormal with det +1")
        object.__setattr__(self, "rotation", _frozen(R))
        object.__setattr__(self, "translation", _frozen(as_vec3(self.translation, "translation")))

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def from_vec12(cls, v):
        """Build from 9 row-major rotation entries then 3 translation entries,
        repairing the rotation block if needed."""
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.shape != (12,):
            raise ValueError("extrinsic vector must have 12 entries")
        return cls(rotation_from_vec9(v[:9]), v[9:])

    def to_vec12(self):
        return np.concatenate([self.rotation.reshape(-1), self.translation])

    def matrix(self):
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T

    def inverse(self):
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def compose(self, other):
        """``self ∘ other``: apply ``other`` first."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def allclose(self, other, atol=GEOM_TOL):
        return np.allclose(self.rotation, other.rotation, rtol=0, atol=atol) and np.allclose(
            self.translation, other.translation, rtol=0, atol=atol
        )

    def __repr__(self):
        return f"RigidTransform(rotation={self.rotation.tolist()}, translation={self.translation.tolist()})"


def transform_point(t, v):
    return t.rotation @ as_vec3(v) + t.translation


def transform_direction(t, v):
    return t.rotation @ as_vec3(v)


@dataclass(frozen=True, eq=False)
class SemanticOBB:
    """Oriented box with annotated ``up`` and ``front`` directions.

    The box frame has columns ``(up x front, up, front)``, a right-handed
    basis; ``half_extents`` are given along those three axes.
    """

    center: np.ndarray
    up: np.ndarray
    front: np.ndarray
    half_extents: np.ndarray

    def __post_init__(self):
        center = as_vec3(self.center, "center")
        up = as_vec3(self.up, "up")
        front = as_vec3(self.front, "front")
        half = as_vec3(self.half_extents, "half_extents")
        if abs(np.linalg.norm(up) - 1.0) > GEOM_TOL or abs(np.linalg.norm(front) - 1.0) > GEOM_TOL:
            raise InvalidOBBError("up and front must be unit vectors")
        if abs(np.dot(up, front)) > GEOM_TOL:
            raise InvalidOBBError("up and front must be orthogonal")
        if np.any(half <= 0):
            raise InvalidOBBError("half_extents must be positive")
        for name, val in (("center", center), ("up", up), ("front", front), ("half_extents", half)):
            object.__setattr__(self, name, _frozen(val))

    @classmethod
    def from_unnormalized(cls, center, up, front, half_extents):
        """Normalize ``up`` and make ``front`` orthogonal to it before validating."""
        u = unit(up, "up")
        f = as_vec3(front, "front")
        f = unit(f - np.dot(f, u) * u, "front")
        return cls(center, u, f, half_extents)

    @property
    def basis(self):
        """Rotation whose columns are the box axes in the enclosing frame."""
        return np.column_stack([np.cross(self.up, self.front), self.up, self.front])

    @property
    def pose(self):
        """Transform from box-local coordinates to the enclosing frame."""
        return RigidTransform(self.basis, self.center)

    def corners(self):
        signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float)
        return self.center + (signs * self.half_extents) @ self.basis.T

    def __repr__(self):
        return (
            f"SemanticOBB(center={self.center.tolist()}, up={self.up.tolist()}, "
            f"front={self.front.tolist()}, half_extents={self.half_extents.tolist()})"
        )


def to_anocs(p, obb):
    """Map a point to anisotropically normalized box coordinates in ``[-0.5, 0.5]^3``."""
    if np.any(np.asarray(obb.half_extents) <= 0):
        raise InvalidOBBError("degenerate box extent")
    local = obb.basis.T @ (as_vec3(p) - obb.center)
    return local / (2.0 * obb.half_extents)


def from_anocs(q, obb):
    if np.any(np.asarray(obb.half_extents) <= 0):
        raise InvalidOBBError("degenerate box extent")
    return obb.basis @ (as_vec3(q) * 2.0 * obb.half_extents) + obb.center
