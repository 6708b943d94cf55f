"""Nonlinear 6-DOF rigid-body model of the tilt-rotor quadcopter.

Rotor layout (x forward, y left, z up, right-handed body axes):

  rotor 1 on +x, rotor 3 on -x, tilting about the x arms (thrust swings
  toward -y for positive tilt); rotor 2 on +y, rotor 4 on -y, tilting about
  the y arms (thrust swings toward +x for positive tilt).

Each rotor produces thrust F_i = k_f * w_i^2 along its tilted axis and a
drag moment M_i = k_m * w_i^2 about it. Rotors 1 and 3 spin opposite to
rotors 2 and 4; the sign pattern is baked into the torque map below rather
than kept as a separate parameter.

The integrator is fixed-step classical RK4 with the attitude quaternion
renormalized after every step. Actuators are instantaneous (no servo or
motor lag states); commands are clamped to the configured limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quaternion as qt
from .errors import NegativeSpeed, NumericalDivergence

# Any state component beyond this (SI units) aborts the integration.
DIVERGENCE_BOUND = 1e6


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the vehicle.

    m     : total mass [kg]
    l     : arm length from center to rotor [m]
    k_f   : thrust coefficient [N s^2 / rad^2]
    k_m   : rotor drag-moment coefficient [N m s^2 / rad^2]
    i_xx, i_yy, i_zz : principal moments of inertia [kg m^2] (diagonal inertia)
    g     : gravitational acceleration [m/s^2]
    omega_max : rotor speed ceiling [rad/s]
    tilt_max  : rotor tilt magnitude ceiling [rad]
    """

    m: float = 1.56
    l: float = 0.12
    k_f: float = 2.2e-4
    k_m: float = 5.4e-6
    i_xx: float = 0.0449
    i_yy: float = 0.0449
    i_zz: float = 0.0899
    g: float = 9.81
    omega_max: float = 400.0
    tilt_max: float = math.pi / 6

    def __post_init__(self):
        for name in ("m", "l", "k_f", "k_m", "i_xx", "i_yy", "i_zz", "g",
                     "omega_max", "tilt_max"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"VehicleParams.{name} must be strictly positive")


@dataclass
class ActuatorCommand:
    """Four rotor speeds [rad/s] and four tilt angles [rad]."""

    omega: np.ndarray  # shape (4,)
    tilt: np.ndarray   # shape (4,)

    @staticmethod
    def hover(omega_h: float) -> "ActuatorCommand":
        return ActuatorCommand(np.full(4, omega_h), np.zeros(4))


@dataclass
class RigidBodyState:
    """Inertial position/velocity, unit attitude quaternion, body rates."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: qt.IDENTITY.copy())
    rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def pack(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity, self.attitude, self.rates])

    @staticmethod
    def unpack(x: np.ndarray) -> "RigidBodyState":
        return RigidBodyState(x[0:3].copy(), x[3:6].copy(), x[6:10].copy(), x[10:13].copy())


@dataclass
class StateDerivative:
    velocity: np.ndarray
    acceleration: np.ndarray
    attitude_rate: np.ndarray
    angular_acceleration: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate([
            self.velocity, self.acceleration, self.attitude_rate, self.angular_acceleration,
        ])


def rotor_force_moment(omega_i: float, params: VehicleParams) -> tuple[float, float]:
    """Thrust F = k_f w^2 and drag moment M = k_m w^2 of one rotor."""
    if omega_i < 0.0:
        raise NegativeSpeed(f"rotor speed must be non-negative, got {omega_i}")
    w2 = omega_i * omega_i
    return params.k_f * w2, params.k_m * w2


def _forces_moments(cmd: ActuatorCommand, params: VehicleParams):
    w = cmd.omega
    f = params.k_f * w * w
    m = params.k_m * w * w
    return f, m


def translational_accel(state: RigidBodyState, cmd: ActuatorCommand,
                        params: VehicleParams) -> np.ndarray:
    """Inertial acceleration: rotated body specific force minus gravity.

    Body-frame specific force of the tilted rotors:
      x: (F2 sin t2 + F4 sin t4) / m
      y: (-F1 sin t1 - F3 sin t3) / m
      z: (F1 cos t1 + F2 cos t2 + F3 cos t3 + F4 cos t4) / m
    """
    f, _ = _forces_moments(cmd, params)
    t = cmd.tilt
    s1, s2, s3, s4 = math.sin(t[0]), math.sin(t[1]), math.sin(t[2]), math.sin(t[3])
    c1, c2, c3, c4 = math.cos(t[0]), math.cos(t[1]), math.cos(t[2]), math.cos(t[3])
    inv_m = 1.0 / params.m
    body_force = np.array([
        (f[1] * s2 + f[3] * s4) * inv_m,
        (-f[0] * s1 - f[2] * s3) * inv_m,
        (f[0] * c1 + f[1] * c2 + f[2] * c3 + f[3] * c4) * inv_m,
    ])
    accel = qt.rotate(state.attitude, body_force)
    accel[2] -= params.g
    return accel


def body_torque(cmd: ActuatorCommand, params: VehicleParams) -> np.ndarray:
    """Torque about body axes from rotor thrusts, tilts, and drag moments."""
    f, m = _forces_moments(cmd, params)
    t = cmd.tilt
    s1, s2, s3, s4 = math.sin(t[0]), math.sin(t[1]), math.sin(t[2]), math.sin(t[3])
    c1, c2, c3, c4 = math.cos(t[0]), math.cos(t[1]), math.cos(t[2]), math.cos(t[3])
    l = params.l
    return np.array([
        l * (f[1] * c2 - f[3] * c4) + m[1] * s2 + m[3] * s4,
        l * (f[2] * c3 - f[0] * c1) + m[2] * s3 + m[0] * s1,
        l * (-f[0] * s1 - f[1] * s2 + f[2] * s3 + f[3] * s4)
        - m[0] * c1 + m[1] * c2 - m[2] * c3 + m[3] * c4,
    ])


def angular_accel(tau: np.ndarray, rates: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Euler's equations with diagonal inertia, gyroscopic term retained."""
    p, q, r = rates
    ixx, iyy, izz = params.i_xx, params.i_yy, params.i_zz
    # omega x (I omega) for diagonal I
    gx = q * r * (izz - iyy)
    gy = r * p * (ixx - izz)
    gz = p * q * (iyy - ixx)
    return np.array([
        (tau[0] - gx) / ixx,
        (tau[1] - gy) / iyy,
        (tau[2] - gz) / izz,
    ])


def state_derivative(state: RigidBodyState, cmd: ActuatorCommand,
                     params: VehicleParams) -> StateDerivative:
    return StateDerivative(
        velocity=state.velocity.copy(),
        acceleration=translational_accel(state, cmd, params),
        attitude_rate=qt.derivative(state.attitude, state.rates),
        angular_acceleration=angular_accel(body_torque(cmd, params), state.rates, params),
    )


def clamp_command(cmd: ActuatorCommand, params: VehicleParams) -> ActuatorCommand:
    """Saturate rotor speeds to [0, omega_max] and tilts to [-tilt_max, tilt_max]."""
    return ActuatorCommand(
        np.clip(cmd.omega, 0.0, params.omega_max),
        np.clip(cmd.tilt, -params.tilt_max, params.tilt_max),
    )


def _stage_state(x: np.ndarray) -> RigidBodyState:
    # Mid-stage states drift off the unit sphere by O(dt^2); controllers and
    # the vector field both see the normalized attitude (projected field).
    return RigidBodyState(x[0:3], x[3:6], qt.normalize(x[6:10]), x[10:13])


def _state_derivative_packed(state: RigidBodyState, cmd: ActuatorCommand,
                             params: VehicleParams) -> np.ndarray:
    return np.concatenate([
        state.velocity,
        translational_accel(state, cmd, params),
        qt.derivative(state.attitude, state.rates),
        angular_accel(body_torque(cmd, params), state.rates, params),
    ])


def step(state: RigidBodyState, cmd: ActuatorCommand, dt: float,
         params: VehicleParams) -> RigidBodyState:
    """One classical RK4 step with the command held constant over the step.

    The attitude is renormalized afterwards; norm drift of the kinematics is
    second order so this only removes float accumulation.
    """
    return step_controlled(state, lambda s: cmd, dt, params)


def step_controlled(state: RigidBodyState, command_fn, dt: float,
                    params: VehicleParams) -> RigidBodyState:
    """One RK4 step with the command re-evaluated from the state at each stage.

    command_fn(state) -> ActuatorCommand must be side-effect free; it is
    called four times per step. With continuous state feedback the closed
    loop is a smooth ODE and the step keeps its 4th-order accuracy.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    x0 = state.pack()
    s = _stage_state(x0)
    k1 = _state_derivative_packed(s, command_fn(s), params)
    s = _stage_state(x0 + 0.5 * dt * k1)
    k2 = _state_derivative_packed(s, command_fn(s), params)
    s = _stage_state(x0 + 0.5 * dt * k2)
    k3 = _state_derivative_packed(s, command_fn(s), params)
    s = _stage_state(x0 + dt * k3)
    k4 = _state_derivative_packed(s, command_fn(s), params)
    x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.abs(x1) < DIVERGENCE_BOUND):
        raise NumericalDivergence("state left the sane range; check commands and dt")
    x1[6:10] = qt.normalize(x1[6:10])
    return RigidBodyState.unpack(x1)
