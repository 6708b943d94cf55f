"""Quaternion algebra and kinematics for rigid-body attitude.

Quaternions are numpy arrays of shape (4,) in scalar-first order
``q = [q0, q1, q2, q3]`` with the Hamilton convention (i*j = k).
A unit quaternion maps body-frame vectors to the inertial frame via the
sandwich product q (x) [0, v] (x) q*, so ``rotate(q, v)`` is the
body-to-inertial transform used by the dynamics.

All functions are pure and allocation-light; they are called inside the
integrator hot loop.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import AntiparallelVectors, DegenerateQuaternion, NonUnitQuaternion

# Norms below this are considered degenerate (well above double-precision
# underflow, well below any physical quaternion magnitude).
NORM_EPS = 1e-9

# Unit-norm tolerance for operations that require a unit quaternion.
UNIT_TOL = 1e-9

# Guard for the alignment rotation: the denominator sqrt(2*(1 + a.b)) loses
# half its significant digits as a.b -> -1.
ALIGN_EPS = 1e-6

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


class EulerAngles(NamedTuple):
    """Roll/pitch/yaw in radians, ZYX (yaw-pitch-roll) sequence."""

    phi: float
    theta: float
    psi: float


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a (x) b."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def conjugate(q: np.ndarray) -> np.ndarray:
    """Quaternion conjugate (scalar part kept, vector part negated)."""
    return np.array([q[0], -q[1], -q[2], -q[3]])


def norm(q: np.ndarray) -> float:
    q0, q1, q2, q3 = q
    return math.sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)


def normalize(q: np.ndarray) -> np.ndarray:
    """Scale q to unit norm.

    Raises DegenerateQuaternion when the norm is at or below NORM_EPS.
    """
    n = norm(q)
    if n <= NORM_EPS:
        raise DegenerateQuaternion(f"cannot normalize quaternion with norm {n:.3e}")
    return q / n


def canonicalize(q: np.ndarray) -> np.ndarray:
    """Return q or -q so the scalar part is non-negative.

    q and -q encode the same rotation; picking q0 >= 0 makes feedback laws
    command the short way around and avoids unwinding.
    """
    return -q if q[0] < 0.0 else q


def _require_unit(q: np.ndarray) -> None:
    if abs(norm(q) - 1.0) > UNIT_TOL:
        raise NonUnitQuaternion(f"expected unit quaternion, got norm {norm(q)!r}")


def derivative(q: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Attitude kinematics: q_dot = 0.5 * q (x) [0, omega].

    omega = [p, q, r] are body rates in rad/s.
    """
    q0, q1, q2, q3 = q
    p, qq, r = omega
    return 0.5 * np.array([
        -q1 * p - q2 * qq - q3 * r,
        q0 * p + q2 * r - q3 * qq,
        q0 * qq - q1 * r + q3 * p,
        q0 * r + q1 * qq - q2 * p,
    ])


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate v from body to inertial frame: vector part of q (x) [0,v] (x) q*.

    Requires a unit quaternion (raises NonUnitQuaternion otherwise).
    """
    _require_unit(q)
    q0, q1, q2, q3 = q
    vx, vy, vz = v
    # t = 2 * (q_vec x v), v' = v + q0 * t + q_vec x t
    tx = 2.0 * (q2 * vz - q3 * vy)
    ty = 2.0 * (q3 * vx - q1 * vz)
    tz = 2.0 * (q1 * vy - q2 * vx)
    return np.array([
        vx + q0 * tx + q2 * tz - q3 * ty,
        vy + q0 * ty + q3 * tx - q1 * tz,
        vz + q0 * tz + q1 * ty - q2 * tx,
    ])


def to_euler(q: np.ndarray) -> EulerAngles:
    """Convert a unit quaternion to ZYX Euler angles.

    The asin argument is clamped to [-1, 1]; float round-off can push it
    marginally outside for pitch at +/-90 deg.
    """
    _require_unit(q)
    q0, q1, q2, q3 = q
    phi = math.atan2(2.0 * (q0 * q1 + q2 * q3), 1.0 - 2.0 * (q1 * q1 + q2 * q2))
    s = 2.0 * (q0 * q2 - q3 * q1)
    theta = math.asin(min(1.0, max(-1.0, s)))
    psi = math.atan2(2.0 * (q0 * q3 + q1 * q2), 1.0 - 2.0 * (q2 * q2 + q3 * q3))
    return EulerAngles(phi, theta, psi)


def from_euler(phi: float, theta: float, psi: float) -> np.ndarray:
    """Unit quaternion for the ZYX sequence: q = qz(psi) (x) qy(theta) (x) qx(phi)."""
    cphi, sphi = math.cos(0.5 * phi), math.sin(0.5 * phi)
    cth, sth = math.cos(0.5 * theta), math.sin(0.5 * theta)
    cpsi, spsi = math.cos(0.5 * psi), math.sin(0.5 * psi)
    return np.array([
        cphi * cth * cpsi + sphi * sth * spsi,
        sphi * cth * cpsi - cphi * sth * spsi,
        cphi * sth * cpsi + sphi * cth * spsi,
        cphi * cth * spsi - sphi * sth * cpsi,
    ])


def from_two_vectors(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unit quaternion rotating direction a onto direction b.

    Inputs are normalized internally. The rotation is the minimal one,
    q = [1 + a.b, a x b] / sqrt(2 * (1 + a.b)) for unit a, b.

    Raises AntiparallelVectors when 1 + a.b < ALIGN_EPS (the denominator
    vanishes and the rotation axis is ill-defined).
    """
    na = math.sqrt(a[0] ** 2 + a[1] ** 2 + a[2] ** 2)
    nb = math.sqrt(b[0] ** 2 + b[1] ** 2 + b[2] ** 2)
    if na <= NORM_EPS or nb <= NORM_EPS:
        raise DegenerateQuaternion("alignment vectors must be nonzero")
    ax, ay, az = a[0] / na, a[1] / na, a[2] / na
    bx, by, bz = b[0] / nb, b[1] / nb, b[2] / nb
    d = 1.0 + (ax * bx + ay * by + az * bz)
    if d < ALIGN_EPS:
        raise AntiparallelVectors("vectors are (nearly) opposite; rotation axis undefined")
    s = 1.0 / math.sqrt(2.0 * d)
    return np.array([
        d * s,
        (ay * bz - az * by) * s,
        (az * bx - ax * bz) * s,
        (ax * by - ay * bx) * s,
    ])
