"""Outer-loop position control.

PID on inertial position error produces a commanded acceleration vector
(with gravity feed-forward on the vertical row) and, in parallel, direct
rotor-tilt increments for the horizontal axes; the same position error
drives both actuation paths, which is the redundancy of a thrust-vectoring
airframe. Zeroing the tilt-channel gains recovers a conventional quadcopter
position controller.

The commanded acceleration is turned into
  * a collective hover speed from the vertical row (``hover_speed``), and
  * a desired attitude that points the body thrust axis along the commanded
    acceleration direction with the requested yaw (``desired_quaternion``).

The caller owns the integral state: ``pid_update``/``position_step`` take it
as an argument and return the updated value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quaternion as qt
from .dynamics import RigidBodyState, VehicleParams
from .errors import NegativeThrustDemand, TiltSingularity

# Vertical-acceleration floor applied before computing the hover speed.
# Rotors cannot push down; without the floor a large downward position error
# would demand non-positive thrust and no hover speed would exist.
MIN_VERTICAL_ACCEL = 0.5

# Collective-tilt guard: demanded thrust grows without bound as the summed
# cosine of the tilt angles vanishes.
COS_SUM_EPS = 0.1

# Thrust direction in the body frame at trim (zero tilts).
BODY_THRUST_AXIS = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class PositionGains:
    """Per-axis PID gains for the acceleration rows (x, y, z), PID gains for
    the horizontal tilt rows (x, y), and the shared integral clamp [m s]."""

    kp: np.ndarray = field(default_factory=lambda: np.array([0.35, 0.35, 2.0]))
    ki: np.ndarray = field(default_factory=lambda: np.array([0.01, 0.01, 0.10]))
    kd: np.ndarray = field(default_factory=lambda: np.array([1.10, 1.10, 2.60]))
    kp_tilt: np.ndarray = field(default_factory=lambda: np.array([0.010, 0.010]))
    ki_tilt: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0]))
    kd_tilt: np.ndarray = field(default_factory=lambda: np.array([0.030, 0.030]))
    integral_clamp: float = 2.0

    def __post_init__(self):
        for name, size in (("kp", 3), ("ki", 3), ("kd", 3),
                           ("kp_tilt", 2), ("ki_tilt", 2), ("kd_tilt", 2)):
            v = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, v)
            if v.shape != (size,) or np.any(v < 0.0):
                raise ValueError(f"PositionGains.{name} must be {size} non-negative entries")
        if self.integral_clamp <= 0.0:
            raise ValueError("integral clamp must be positive")


@dataclass(frozen=True)
class PositionSetpoint:
    target: np.ndarray
    yaw_des: float = 0.0


@dataclass
class PositionCommand:
    accel_des: np.ndarray   # commanded inertial acceleration [m/s^2]
    d_tilt_xy: np.ndarray   # direct tilt increments for the x/y channels [rad]
    omega_h: float          # collective hover speed [rad/s]
    q_des: np.ndarray       # desired attitude (unit quaternion)


def pid_update(errors: np.ndarray, error_rates: np.ndarray, integrals: np.ndarray,
               gains: PositionGains, dt: float, g: float):
    """One PID evaluation with rectangle-rule integrators.

    Returns (accel_des, d_tilt_xy, new_integrals). The vertical acceleration
    row carries the gravity feed-forward ``+ g``. The x/y integrals are
    shared between the acceleration and tilt rows.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    clamp = gains.integral_clamp
    new_integrals = np.clip(integrals + errors * dt, -clamp, clamp)
    accel = gains.kp * errors + gains.ki * new_integrals + gains.kd * error_rates
    accel[2] += g
    d_tilt_xy = (gains.kp_tilt * errors[:2] + gains.ki_tilt * new_integrals[:2]
                 + gains.kd_tilt * error_rates[:2])
    return accel, d_tilt_xy, new_integrals


def hover_speed(accel_z_des: float, tilts: np.ndarray, params: VehicleParams) -> float:
    """Collective rotor speed for a vertical specific-force demand.

    omega_h = sqrt(m * accel_z_des / (k_f * sum(cos(tilt_i)))).
    """
    if accel_z_des <= 0.0:
        raise NegativeThrustDemand(
            f"vertical acceleration demand must be positive, got {accel_z_des}"
        )
    cos_sum = sum(math.cos(t) for t in tilts)
    if cos_sum <= COS_SUM_EPS:
        raise TiltSingularity(f"collective tilt leaves cos sum {cos_sum:.3f}")
    return math.sqrt(params.m * accel_z_des / (params.k_f * cos_sum))


def desired_quaternion(a_body: np.ndarray, accel_des: np.ndarray, yaw_des: float) -> np.ndarray:
    """Attitude that maps the body thrust direction onto the commanded one.

    First the minimal rotation aligning a_body with accel_des, then a
    rotation about the body thrust axis chosen so the extracted ZYX yaw
    equals yaw_des. The second rotation leaves the thrust alignment exactly
    intact when a_body is the body z axis. The yaw solve degenerates when
    the commanded direction is horizontal; within the intended envelope
    (directions well within 90 degrees of vertical) it is closed-form.
    """
    q_align = qt.from_two_vectors(a_body, accel_des)
    b1 = qt.rotate(q_align, np.array([1.0, 0.0, 0.0]))
    b2 = qt.rotate(q_align, np.array([0.0, 1.0, 0.0]))
    sin_y, cos_y = math.sin(yaw_des), math.cos(yaw_des)
    # heading component of cos(a)*b1 + sin(a)*b2 orthogonal to the requested
    # heading must vanish
    u = -b1[0] * sin_y + b1[1] * cos_y
    v = -b2[0] * sin_y + b2[1] * cos_y
    if u * u + v * v < 1e-24:
        alpha = 0.0
    else:
        alpha = math.atan2(-u, v)
        along = (math.cos(alpha) * (b1[0] * cos_y + b1[1] * sin_y)
                 + math.sin(alpha) * (b2[0] * cos_y + b2[1] * sin_y))
        if along < 0.0:
            alpha += math.pi
    q_yaw = np.array([math.cos(0.5 * alpha), 0.0, 0.0, math.sin(0.5 * alpha)])
    return qt.canonicalize(qt.normalize(qt.multiply(q_align, q_yaw)))


def position_step(state: RigidBodyState, setpoint: PositionSetpoint,
                  gains: PositionGains, params: VehicleParams, dt: float,
                  integrals: np.ndarray, tilts: np.ndarray):
    """One outer-loop update. Returns (PositionCommand, new_integrals).

    The error rate uses zero setpoint velocity (waypoints are static).
    ``tilts`` are the currently commanded rotor tilts, which set the
    collective denominator. The vertical acceleration is floored at
    MIN_VERTICAL_ACCEL before both the hover speed and the attitude target.
    """
    errors = setpoint.target - state.position
    error_rates = -state.velocity
    accel, d_tilt_xy, new_integrals = pid_update(
        errors, error_rates, integrals, gains, dt, params.g
    )
    if accel[2] < MIN_VERTICAL_ACCEL:
        accel = accel.copy()
        accel[2] = MIN_VERTICAL_ACCEL
    omega_h = hover_speed(accel[2], tilts, params)
    q_des = desired_quaternion(BODY_THRUST_AXIS, accel, setpoint.yaw_des)
    return PositionCommand(accel, d_tilt_xy, omega_h, q_des), new_integrals


def waypoint_advance(position: np.ndarray, waypoints, index: int,
                     capture_radius: float) -> int:
    """Advance the waypoint index on horizontal capture; hold the last one."""
    if not 0 <= index < len(waypoints):
        raise IndexError(f"waypoint index {index} out of range")
    wx, wy = waypoints[index][0], waypoints[index][1]
    if math.hypot(position[0] - wx, position[1] - wy) < capture_radius:
        if index + 1 < len(waypoints):
            return index + 1
    return index
