import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectionreg.so2 import NotARotationError, angle_of, conjugate, refl, rot, wrap_angle

angles = st.floats(-20.0, 20.0, allow_nan=False)


def test_rot_examples():
    assert np.array_equal(rot(0.0), np.eye(2))
    np.testing.assert_allclose(rot(math.pi / 2), [[0, -1], [1, 0]], atol=1e-16)
    c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
    np.testing.assert_allclose(rot(math.pi / 6), [[c, -s], [s, c]], rtol=0, atol=1e-15)


def test_refl_examples():
    assert np.array_equal(refl(0.0), [[1, 0], [0, -1]])
    np.testing.assert_allclose(refl(math.pi / 4), [[0, 1], [1, 0]], atol=1e-16)
    c, s = math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)
    np.testing.assert_allclose(refl(math.pi / 3), [[c, s], [s, -c]], rtol=0, atol=1e-15)


@given(angles)
def test_rot_and_refl_are_orthogonal(t):
    for m, det in ((rot(t), 1.0), (refl(t), -1.0)):
        np.testing.assert_allclose(m.T @ m, np.eye(2), atol=1e-15)
        assert np.linalg.det(m) == pytest.approx(det, abs=1e-15)


def test_angle_of_examples():
    assert angle_of(np.eye(2)) == 0.0
    assert angle_of(rot(2.0)) == pytest.approx(2.0, abs=1e-15)
    # atan2 of the entries of rot(3.5) lands in (-pi, pi]
    expected = math.atan2(math.sin(3.5), math.cos(3.5))
    assert expected == pytest.approx(3.5 - 2 * math.pi, abs=1e-15)
    assert angle_of(rot(3.5)) == pytest.approx(expected, abs=1e-15)


def test_angle_of_rejects_non_rotations():
    with pytest.raises(NotARotationError):
        angle_of(refl(0.3))
    with pytest.raises(NotARotationError):
        angle_of(2 * np.eye(2))


def test_wrap_angle_half_open():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    arr = wrap_angle(np.array([-math.pi, 0.5, 7.0]))
    assert arr[0] == math.pi
    assert np.all((arr > -math.pi) & (arr <= math.pi))


def test_angle_of_roundtrip_many():
    rng = np.random.default_rng(11)
    for t in rng.uniform(-10, 10, 1000):
        d = angle_of(rot(t)) - t
        assert abs(math.remainder(d, 2 * math.pi)) < 1e-12


def test_conjugate_examples():
    np.testing.assert_allclose(conjugate(rot(1.0), rot(0.7)), rot(0.7), atol=1e-15)
    # refl(0) = diag(1, -1): diag(1,-1) rot(0.7) diag(1,-1) flips the sine terms
    np.testing.assert_allclose(conjugate(refl(0.0), rot(0.7)), rot(-0.7), atol=1e-15)
    np.testing.assert_allclose(conjugate(refl(1.2), rot(-0.3)), rot(0.3), atol=1e-15)


def test_conjugate_rejects_bad_operands():
    with pytest.raises(NotARotationError):
        conjugate(np.array([[1.0, 1.0], [0.0, 1.0]]), rot(0.1))
    with pytest.raises(NotARotationError):
        conjugate(rot(0.1), refl(0.1))


@settings(max_examples=200)
@given(angles, angles)
def test_product_identities(t, p):
    np.testing.assert_allclose(rot(t) @ refl(p), refl(p + t / 2), atol=1e-12)
    np.testing.assert_allclose(refl(t) @ refl(p), rot(2 * (t - p)), atol=1e-12)
    np.testing.assert_allclose(rot(t) @ rot(p), rot(wrap_angle(t + p)), atol=1e-12)


@settings(max_examples=200)
@given(angles, angles, st.booleans())
def test_conjugate_is_p_or_its_transpose(o_angle, p_angle, reflect):
    o = refl(o_angle) if reflect else rot(o_angle)
    p = rot(p_angle)
    expected = p.T if reflect else p
    np.testing.assert_allclose(conjugate(o, p), expected, atol=1e-12)
