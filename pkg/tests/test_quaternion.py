import math

import numpy as np
import pytest

from tiltrotor_sim import quaternion as qt
from tiltrotor_sim.errors import AntiparallelVectors, DegenerateQuaternion, NonUnitQuaternion

from oracles import dcm_from_quaternion, quat_left_matrix, random_unit_quaternion, rate_skew_matrix


def test_multiply_identity_and_basis():
    identity = np.array([1.0, 0.0, 0.0, 0.0])
    q = np.array([0.3, -0.4, 0.5, 0.1])
    assert np.allclose(qt.multiply(identity, q), q, atol=0.0)
    # i * j = k
    i = np.array([0.0, 1.0, 0.0, 0.0])
    j = np.array([0.0, 0.0, 1.0, 0.0])
    assert np.allclose(qt.multiply(i, j), [0.0, 0.0, 0.0, 1.0], atol=0.0)


def test_multiply_matches_matrix_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        assert np.allclose(qt.multiply(a, b), quat_left_matrix(a) @ b, atol=1e-13)


def test_multiply_norm_multiplicative():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        lhs = qt.norm(qt.multiply(a, b))
        rhs = qt.norm(a) * qt.norm(b)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_conjugate():
    assert np.allclose(qt.conjugate(np.array([1.0, 0, 0, 0])), [1, 0, 0, 0])
    assert np.allclose(
        qt.conjugate(np.array([0.5, 0.5, 0.5, 0.5])), [0.5, -0.5, -0.5, -0.5]
    )
    rng = np.random.default_rng(3)
    for _ in range(100):
        q = random_unit_quaternion(rng)
        prod = qt.multiply(q, qt.conjugate(q))
        assert np.allclose(prod, [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_normalize():
    assert np.allclose(qt.normalize(np.array([2.0, 0, 0, 0])), [1, 0, 0, 0])
    assert np.allclose(qt.normalize(np.array([1.0, 1, 1, 1])), [0.5, 0.5, 0.5, 0.5])
    assert qt.norm(qt.normalize(np.array([0.3, -2.0, 0.7, 10.0]))) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DegenerateQuaternion):
        qt.normalize(np.zeros(4))


def test_derivative_hover_roll_rate():
    # At identity attitude the quaternion rate is half the body rate.
    qd = qt.derivative(np.array([1.0, 0, 0, 0]), np.array([0.8, 0.0, 0.0]))
    assert np.allclose(qd, [0.0, 0.4, 0.0, 0.0], atol=0.0)
    assert np.allclose(qt.derivative(np.array([1.0, 0, 0, 0]), np.zeros(3)), np.zeros(4))


def test_derivative_matches_matrix_form():
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = random_unit_quaternion(rng)
        omega = rng.standard_normal(3)
        assert np.allclose(qt.derivative(q, omega), rate_skew_matrix(omega) @ q, atol=1e-14)


def test_derivative_norm_preserving_direction():
    # d/dt ||q||^2 = 2 q . q_dot = 0 for unit q
    rng = np.random.default_rng(13)
    for _ in range(100):
        q = random_unit_quaternion(rng)
        omega = rng.standard_normal(3)
        assert abs(float(q @ qt.derivative(q, omega))) < 1e-14


def test_rotate_identity_and_basis():
    v = np.array([0.3, -1.2, 2.0])
    assert np.allclose(qt.rotate(np.array([1.0, 0, 0, 0]), v), v)
    q_z90 = qt.from_euler(0.0, 0.0, math.pi / 2)
    assert np.allclose(qt.rotate(q_z90, np.array([1.0, 0, 0])), [0.0, 1.0, 0.0], atol=1e-12)


def test_rotate_matches_dcm_oracle_and_preserves_norm():
    rng = np.random.default_rng(17)
    for _ in range(200):
        q = random_unit_quaternion(rng)
        v = rng.standard_normal(3)
        rotated = qt.rotate(q, v)
        assert np.allclose(rotated, dcm_from_quaternion(q) @ v, atol=1e-12)
        assert np.linalg.norm(rotated) == pytest.approx(np.linalg.norm(v), rel=1e-12)


def test_rotate_rejects_non_unit():
    with pytest.raises(NonUnitQuaternion):
        qt.rotate(np.array([1.0, 1.0, 0.0, 0.0]), np.array([1.0, 0, 0]))


def test_to_euler_basics():
    assert qt.to_euler(np.array([1.0, 0, 0, 0])) == (0.0, 0.0, 0.0)
    e = qt.to_euler(np.array([math.cos(0.5), math.sin(0.5), 0.0, 0.0]))
    assert e.phi == pytest.approx(1.0, abs=1e-12)
    assert e.theta == 0.0 and e.psi == 0.0


def test_to_euler_clamps_pitch_argument():
    # Pitch exactly 90 deg; float round-off may push the asin argument past 1.
    q = qt.from_euler(0.0, math.pi / 2, 0.0)
    e = qt.to_euler(q / qt.norm(q))
    assert math.isfinite(e.theta)
    assert e.theta == pytest.approx(math.pi / 2, abs=1e-9)


def test_euler_round_trip_away_from_gimbal_lock():
    rng = np.random.default_rng(23)
    count = 0
    while count < 300:
        q = random_unit_quaternion(rng)
        e = qt.to_euler(q)
        if abs(e.theta) > math.pi / 2 - 1e-3:
            continue  # gimbal-lock neighborhood exempt
        count += 1
        back = qt.from_euler(*e)
        assert min(np.linalg.norm(back - q), np.linalg.norm(back + q)) < 1e-9


def test_from_two_vectors_cases():
    a = np.array([0.2, -0.4, 0.7])
    assert np.allclose(qt.from_two_vectors(a, a), [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    q = qt.from_two_vectors(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    s = 1.0 / math.sqrt(2.0)
    assert np.allclose(q, [s, 0.0, s, 0.0], atol=1e-15)
    assert np.allclose(qt.rotate(q, np.array([0.0, 0.0, 1.0])), [1.0, 0.0, 0.0], atol=1e-12)
    with pytest.raises(AntiparallelVectors):
        qt.from_two_vectors(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]))


def test_from_two_vectors_round_trip_random():
    rng = np.random.default_rng(29)
    done = 0
    while done < 300:
        a = rng.standard_normal(3)
        b = rng.standard_normal(3)
        ah = a / np.linalg.norm(a)
        bh = b / np.linalg.norm(b)
        if 1.0 + float(ah @ bh) < qt.ALIGN_EPS:
            continue
        done += 1
        q = qt.from_two_vectors(a, b)
        assert qt.norm(q) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(qt.rotate(q, ah), bh, atol=1e-10)


def test_canonicalize():
    q = np.array([-0.5, 0.5, 0.5, 0.5])
    assert np.allclose(qt.canonicalize(q), -q)
    q = np.array([0.5, -0.5, 0.5, -0.5])
    assert qt.canonicalize(q) is q
