"""Quaternion-error attitude feedback and Lyapunov monitoring.

Two error quaternions appear here and the distinction matters:

* ``error_quaternion(q_des, q) = q_des (x) q*`` expresses the remaining
  rotation in the inertial frame. This is the quantity reported in logs; it
  reaches identity exactly when the attitude is achieved.
* ``feedback_error(q_des, q) = q_des* (x) q`` expresses the current attitude
  relative to the desired frame. Its vector part is what the negative
  feedback gains below act on: for a small attitude error e (desired minus
  current, as a body rotation vector) the vector part is -e/2, so
  ``-k * vector`` produces a torque toward the target. Feeding the laws the
  inertial-frame error instead flips the loop sign and destabilizes it;
  ``tests/test_attitude.py`` pins the sign through the full mixer/dynamics
  chain.

Both are canonicalized to a non-negative scalar part so the commanded
rotation is always the short way around.

``attitude_law`` is the deployed regulation law (diagonal gains on the error
vector and on the body rates, one set for the speed channels and one for the
tilt channels). ``control_torque`` is the computed-torque law used by the
Lyapunov verification mode and for tracking a time-varying rate reference;
it cancels the gyroscopic term, so along its closed loop the monitor energy

    V = k_q * |q_err - identity|^2 + 0.5 * w_err' I w_err

decays at exactly ``V_dot = -k_omega * |w_err|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import quaternion as qt
from .dynamics import VehicleParams


@dataclass(frozen=True)
class AttitudeGains:
    """Diagonal gains of the regulation law, one triple per channel group.

    k_q / k_w act on the error vector / body rates for the speed increments,
    k_q_tilt / k_w_tilt for the tilt increments. All entries positive.
    """

    k_q: np.ndarray = field(default_factory=lambda: np.array([15.0, 15.0, 15.0]))
    k_w: np.ndarray = field(default_factory=lambda: np.array([4.0, 4.0, 4.0]))
    k_q_tilt: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.2, 0.2]))
    k_w_tilt: np.ndarray = field(default_factory=lambda: np.array([0.05, 0.05, 0.05]))

    def __post_init__(self):
        for name in ("k_q", "k_w", "k_q_tilt", "k_w_tilt"):
            v = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, v)
            if v.shape != (3,) or np.any(v <= 0.0):
                raise ValueError(f"AttitudeGains.{name} must be three positive entries")


@dataclass(frozen=True)
class MonitorGains:
    """Scalar gains of the computed-torque law and the Lyapunov monitor."""

    k_q: float = 0.6
    k_omega: float = 0.3

    def __post_init__(self):
        if self.k_q <= 0.0 or self.k_omega <= 0.0:
            raise ValueError("monitor gains must be positive")


class VirtualAttitudeControls(NamedTuple):
    d_omega: np.ndarray  # (roll, pitch, yaw) speed increments [rad/s]
    d_tilt: np.ndarray   # (roll, pitch, yaw) tilt increments [rad]


class LyapunovSample(NamedTuple):
    v: float
    v_dot: float
    t: float


def error_quaternion(q_des: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Remaining rotation q_des (x) q*, unit and canonicalized (scalar >= 0)."""
    qt._require_unit(q_des)
    qt._require_unit(q)
    return qt.canonicalize(qt.normalize(qt.multiply(q_des, qt.conjugate(q))))


def feedback_error(q_des: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Current attitude relative to the desired frame, q_des* (x) q, canonical.

    This is the error the feedback laws consume; see the module docstring
    for the sign convention.
    """
    qt._require_unit(q_des)
    qt._require_unit(q)
    return qt.canonicalize(qt.normalize(qt.multiply(qt.conjugate(q_des), q)))


def attitude_law(q_err: np.ndarray, rates: np.ndarray,
                 gains: AttitudeGains) -> VirtualAttitudeControls:
    """Regulation law: virtual increments -k_q*eps - k_w*rates per channel group.

    ``q_err`` must be the feedback-convention error (see ``feedback_error``);
    eps is its vector part.
    """
    eps = q_err[1:4]
    return VirtualAttitudeControls(
        d_omega=-gains.k_q * eps - gains.k_w * rates,
        d_tilt=-gains.k_q_tilt * eps - gains.k_w_tilt * rates,
    )


def control_torque(q_err: np.ndarray, rates: np.ndarray, rates_des: np.ndarray,
                   rates_des_dot: np.ndarray, gains: MonitorGains,
                   params: VehicleParams) -> np.ndarray:
    """Computed-torque law.

      tau = -k_q*eps - k_omega*(w - w_des) + I w_des_dot - I (w x w_des) + w x I w

    with eps the vector part of the feedback-convention error. The trailing
    term cancels the gyroscopic torque; it does no work on the rates, which
    is what makes the monitor energy decay exact.
    """
    eps = q_err[1:4]
    p, q, r = rates
    ixx, iyy, izz = params.i_xx, params.i_yy, params.i_zz
    w_err = rates - rates_des
    inertia = np.array([ixx, iyy, izz])
    gyro = np.array([
        q * r * (izz - iyy),
        r * p * (ixx - izz),
        p * q * (iyy - ixx),
    ])
    return (
        -gains.k_q * eps
        - gains.k_omega * w_err
        + inertia * rates_des_dot
        - inertia * np.cross(rates, rates_des)
        + gyro
    )


def lyapunov_sample(q_err: np.ndarray, rates_err: np.ndarray, gains: MonitorGains,
                    params: VehicleParams, t: float = 0.0) -> LyapunovSample:
    """Monitor energy and its closed-form decay rate under ``control_torque``.

    V depends on the error quaternion only through its scalar part
    (|q_err - identity|^2 = 2 (1 - q0) for unit q_err), so either error
    convention gives the same value.
    """
    v = 2.0 * gains.k_q * (1.0 - q_err[0]) + 0.5 * float(
        rates_err @ (np.array([params.i_xx, params.i_yy, params.i_zz]) * rates_err)
    )
    v_dot = -gains.k_omega * float(rates_err @ rates_err)
    return LyapunovSample(v=v, v_dot=v_dot, t=t)


def error_kinematics_matrix(q_err: np.ndarray) -> np.ndarray:
    """4x3 matrix f with f' q_err = 0 and f' identity = eps (vector part).

    Used only by the Lyapunov test helper to check the algebraic identities
    behind the monitor's decay rate; not part of the control path.
    """
    q0, q1, q2, q3 = q_err
    return np.array([
        [q1, q2, q3],
        [-q0, -q3, q2],
        [q3, -q0, -q1],
        [-q2, q1, -q0],
    ])
