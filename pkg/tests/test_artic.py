import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from opdeval.artic import (
    ArticulatedObject,
    MotionSpec,
    OpenablePart,
    apply_motion,
    motion_state_schedule,
    motion_to_frame,
    object_diagonal,
)
from opdeval.errors import InvalidMotionError, SchemaError
from opdeval.geom import RigidTransform, SemanticOBB, transform_direction, transform_point

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def rand_transform(seed):
    rng = np.random.default_rng(seed)
    return RigidTransform(Rotation.random(random_state=seed).as_matrix(), rng.normal(size=3))


def revolute(axis=(0, 0, 1), origin=(0, 0, 0)):
    return MotionSpec("revolute", axis, origin, (0.0, np.pi))


def prismatic(axis=(0, 0, 1)):
    return MotionSpec("prismatic", axis, None, (0.0, 0.5))


def make_object(ranges):
    obb = SemanticOBB([0, 0, 0], [0, 1, 0], [0, 0, 1], [0.5, 0.5, 0.5])
    parts = [OpenablePart(f"p{i}", "drawer", MotionSpec("prismatic", [0, 0, 1], None, r)) for i, r in enumerate(ranges)]
    return ArticulatedObject("o", "cabinet", obb, parts)


class TestApplyMotion:
    def test_prismatic(self):
        t = apply_motion(prismatic(), 0.3)
        np.testing.assert_allclose(t.translation, [0, 0, 0.3])
        np.testing.assert_array_equal(t.rotation, np.eye(3))

    def test_revolute_quarter(self):
        t = apply_motion(revolute(), np.pi / 2)
        np.testing.assert_allclose(transform_point(t, [1, 0, 0]), [0, 1, 0], atol=1e-15)

    def test_revolute_offset_pivot(self):
        t = apply_motion(revolute(origin=(1, 0, 0)), np.pi)
        np.testing.assert_allclose(transform_point(t, [2, 0, 0]), [0, 0, 0], atol=1e-15)

    def test_zero_is_identity(self):
        for m in (prismatic([1, 2, 3]), revolute([1, 1, 0], [3, 2, 1])):
            assert apply_motion(m, 0.0).allclose(RigidTransform(), atol=1e-15)

    def test_missing_origin(self):
        m = MotionSpec("revolute", [0, 0, 1], None, strict=False)
        with pytest.raises(InvalidMotionError):
            apply_motion(m, 0.1)
        with pytest.raises(InvalidMotionError):
            MotionSpec("revolute", [0, 0, 1], None)

    @given(angles, angles)
    def test_revolute_composition(self, a, b):
        m = revolute([0.3, -0.5, 0.8], [0.2, 1.0, -0.4])
        assert apply_motion(m, a).compose(apply_motion(m, b)).allclose(apply_motion(m, a + b), atol=1e-9)

    @given(angles, st.floats(-5, 5))
    def test_axis_line_fixed(self, a, s):
        m = revolute([0.3, -0.5, 0.8], [0.2, 1.0, -0.4])
        p = m.origin + s * m.axis
        np.testing.assert_allclose(transform_point(apply_motion(m, a), p), p, atol=1e-9)

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_prismatic_composition(self, a, b):
        m = prismatic([1, 2, 2])
        composed = apply_motion(m, a).compose(apply_motion(m, b))
        assert composed.allclose(apply_motion(m, a + b), atol=1e-9)
        d = np.array([0.1, -0.7, 0.2])
        np.testing.assert_allclose(transform_direction(composed, d), d, atol=1e-15)


class TestMotionToFrame:
    def test_identity(self):
        m = revolute([0, 1, 0], [1, 2, 3])
        assert motion_to_frame(m, RigidTransform()).allclose(m, atol=0)

    def test_translation(self):
        m = revolute([0, 1, 0], [1, 2, 3])
        out = motion_to_frame(m, RigidTransform(np.eye(3), [1, 1, 1]))
        np.testing.assert_array_equal(out.axis, m.axis)
        np.testing.assert_allclose(out.origin, [2, 3, 4])
        assert out.range == m.range and out.type == m.type

    @pytest.mark.parametrize("seed", range(20))
    def test_round_trip(self, seed):
        t = rand_transform(seed)
        m = revolute([0.3, -0.5, 0.8], [0.2, 1.0, -0.4])
        assert motion_to_frame(motion_to_frame(m, t), t.inverse()).allclose(m, atol=1e-9)

    @pytest.mark.parametrize("seed", range(20))
    def test_commutes_with_composition(self, seed):
        t1, t2 = rand_transform(seed), rand_transform(seed + 1000)
        m = revolute([0.3, -0.5, 0.8], [0.2, 1.0, -0.4])
        a = motion_to_frame(m, t2.compose(t1))
        b = motion_to_frame(motion_to_frame(m, t1), t2)
        assert a.allclose(b, atol=1e-9)
        assert np.linalg.norm(a.axis) == pytest.approx(1.0, abs=1e-12)


class TestDiagonal:
    def test_unit_cube(self):
        obb = SemanticOBB([0, 0, 0], [0, 1, 0], [0, 0, 1], [0.5, 0.5, 0.5])
        assert object_diagonal(obb) == pytest.approx(np.sqrt(3))

    def test_thin(self):
        obb = SemanticOBB([0, 0, 0], [0, 1, 0], [0, 0, 1], [3, 4, 1e-4])
        assert object_diagonal(obb) == pytest.approx(2 * np.sqrt(9 + 16 + 1e-8), rel=1e-15)


class TestSchedule:
    def test_counts(self):
        assert len(motion_state_schedule(make_object([(0, 1)]), seed=0)) == 5
        assert len(motion_state_schedule(make_object([(0, 1)] * 3), seed=0)) == 13

    def test_structure(self):
        obj = make_object([(0.0, 1.0), (0.2, 0.4)])
        states = motion_state_schedule(obj, seed=3)
        assert states[0] == {"p0": 0.0, "p1": 0.2}
        for k, part in enumerate(["p0", "p1"]):
            block = states[1 + 4 * k : 5 + 4 * k]
            other = "p1" if part == "p0" else "p0"
            lo, hi = obj.part(part).motion.range
            assert all(s[other] == obj.part(other).motion.range[0] for s in block)
            assert all(lo <= s[part] <= hi for s in block)
            assert block[-1][part] == hi

    def test_degenerate_range(self):
        states = motion_state_schedule(make_object([(0.3, 0.3)]), seed=0)
        assert [s["p0"] for s in states] == [0.3] * 5

    def test_deterministic(self):
        obj = make_object([(0, 1), (0, 2)])
        assert motion_state_schedule(obj, seed=5) == motion_state_schedule(obj, seed=5)
        assert motion_state_schedule(obj, seed=5) != motion_state_schedule(obj, seed=6)

    def test_n_random(self):
        assert len(motion_state_schedule(make_object([(0, 1)] * 2), n_random=5, seed=0)) == 1 + 6 * 2


def test_duplicate_part_ids():
    obb = SemanticOBB([0, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1])
    p = OpenablePart("a", "door", revolute())
    with pytest.raises(SchemaError):
        ArticulatedObject("o", "c", obb, [p, p])


def test_motion_range_order():
    with pytest.raises(InvalidMotionError):
        MotionSpec("prismatic", [0, 0, 1], None, (1.0, 0.0))
