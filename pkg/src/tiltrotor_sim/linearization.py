"""Hover linearization of the rotational dynamics and its numerical audit.

At the hover trim (all rotors at omega_h, zero tilts) each body axis responds
to exactly one speed channel and one tilt channel, giving three decoupled
2-state models over (rate, quaternion element) with a pure-integrator A
matrix. There are two natural scalings for the input coefficients:

* the body-rate map: d(rate_dot)/d(channel), obtained by the chain rule on
  the quadratic thrust law (``body_rate_coefficients``);
* the quaternion-rate form, which absorbs the factor 1/2 relating quaternion
  rates to body rates at hover into the input matrix, halving every entry.

The reference table this controller design was derived from
(``analytic_model``) keeps the body-rate scaling on the roll axis but the
halved scaling on pitch and yaw. ``verify`` measures every channel of that
table against a central finite difference of the nonlinear torque map and
records which scaling the model actually confirms, so the allocation gains
are never trusted on symbolic grounds alone.

The finite differences perturb the physical actuators according to each
channel's defining combination (for example the roll speed channel raises
rotor 2 by h/2 and lowers rotor 4 by h/2) and difference the angular
acceleration with the gyroscopic term absent, which at zero rates is also
the full-model Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import HoverTrim
from .dynamics import ActuatorCommand, VehicleParams, body_torque
from .errors import StepTooSmall

AXES = ("roll", "pitch", "yaw")

# Channel tolerance for confirming an analytic coefficient against the oracle.
REL_TOL = 1e-5

# Default central-difference steps: balance truncation against cancellation
# for coefficients of magnitude ~0.1..10 in double precision.
H_SPEED = 1e-3
H_TILT = 1e-5

_AXIS_INDEX = {"roll": 0, "pitch": 1, "yaw": 2}


@dataclass(frozen=True)
class LinearizedAxisModel:
    """Per-axis 2-state hover model over (rate, quaternion element).

    a_matrix is the pure integrator chain [[0, 0], [1, 0]] for every axis;
    b_matrix row 0 holds the (speed, tilt) input coefficients and row 1 is
    zero.
    """

    axis: str
    a_matrix: np.ndarray
    b_matrix: np.ndarray

    @property
    def speed_coeff(self) -> float:
        return float(self.b_matrix[0, 0])

    @property
    def tilt_coeff(self) -> float:
        return float(self.b_matrix[0, 1])


def body_rate_coefficients(axis: str, trim: HoverTrim, params: VehicleParams) -> tuple[float, float]:
    """Closed-form d(rate_dot)/d(channel) of the torque map at the hover trim.

    Chain rule on F = k_f w^2, M = k_m w^2 about (omega_h, zero tilt):
      roll/pitch speed: 2 l k_f omega_h / I     tilt: k_m omega_h^2 / I
      yaw speed:        2 k_m omega_h / Izz     tilt: l k_f omega_h^2 / Izz
    """
    w = trim.omega_h
    if axis == "roll":
        return 2.0 * params.l * params.k_f * w / params.i_xx, params.k_m * w * w / params.i_xx
    if axis == "pitch":
        return 2.0 * params.l * params.k_f * w / params.i_yy, params.k_m * w * w / params.i_yy
    if axis == "yaw":
        return 2.0 * params.k_m * w / params.i_zz, params.l * params.k_f * w * w / params.i_zz
    raise ValueError(f"unknown axis {axis!r}")


def analytic_model(axis: str, trim: HoverTrim, params: VehicleParams) -> LinearizedAxisModel:
    """Reference hover model for one axis, as used to derive the allocation.

    Roll carries the body-rate scaling; pitch and yaw carry the halved
    (quaternion-rate) scaling. ``verify`` audits this table channel by
    channel against the nonlinear model.
    """
    speed, tilt = body_rate_coefficients(axis, trim, params)
    if axis != "roll":
        speed, tilt = 0.5 * speed, 0.5 * tilt
    return LinearizedAxisModel(
        axis=axis,
        a_matrix=np.array([[0.0, 0.0], [1.0, 0.0]]),
        b_matrix=np.array([[speed, tilt], [0.0, 0.0]]),
    )


def _channel_command(axis: str, channel: str, trim: HoverTrim, value: float) -> ActuatorCommand:
    """Actuator command whose defining channel combination equals `value`."""
    w = np.full(4, trim.omega_h)
    t = np.full(4, trim.theta_h)
    half = 0.5 * value
    quarter = 0.25 * value
    if channel == "speed":
        if axis == "roll":
            w[1] += half
            w[3] -= half
        elif axis == "pitch":
            w[2] += half
            w[0] -= half
        else:  # yaw: -w1 + w2 - w3 + w4
            w += np.array([-quarter, quarter, -quarter, quarter])
    else:
        if axis == "roll":
            t[1] += half
            t[3] += half
        elif axis == "pitch":
            t[0] += half
            t[2] += half
        else:  # yaw: -t1 - t2 + t3 + t4
            t += np.array([-quarter, -quarter, quarter, quarter])
    return ActuatorCommand(w, t)


def channel_response(axis: str, channel: str, trim: HoverTrim, params: VehicleParams,
                     h: float) -> np.ndarray:
    """Central difference of the angular acceleration along one channel.

    Returns the full 3-vector of rate-derivative sensitivities so that
    cross-axis leakage can be inspected; the own-axis component is the
    channel coefficient.
    """
    if h <= 0.0:
        raise ValueError("finite-difference step must be positive")
    base = trim.omega_h if channel == "speed" else trim.theta_h
    if base + 0.25 * h == base and base != 0.0:
        raise StepTooSmall(f"step {h:g} vanishes against the trim value {base:g}")
    inertia = np.array([params.i_xx, params.i_yy, params.i_zz])
    f_plus = body_torque(_channel_command(axis, channel, trim, +0.5 * h), params) / inertia
    f_minus = body_torque(_channel_command(axis, channel, trim, -0.5 * h), params) / inertia
    scale = max(np.max(np.abs(f_plus)), np.max(np.abs(f_minus)))
    diff = f_plus - f_minus
    # An exactly zero difference is a genuine zero derivative (symmetric
    # evaluations); only a nonzero residue below float resolution means the
    # step was swallowed by cancellation.
    top = np.max(np.abs(diff))
    if 0.0 < top < 32.0 * np.finfo(float).eps * scale:
        raise StepTooSmall(
            f"central difference lost to cancellation (step {h:g}, scale {scale:g})"
        )
    return diff / h


def numeric_jacobian(axis: str, trim: HoverTrim, params: VehicleParams,
                     h_speed: float = H_SPEED, h_tilt: float = H_TILT) -> tuple[float, float]:
    """Finite-difference (speed, tilt) coefficients for one axis."""
    i = _AXIS_INDEX[axis]
    speed = channel_response(axis, "speed", trim, params, h_speed)[i]
    tilt = channel_response(axis, "tilt", trim, params, h_tilt)[i]
    return float(speed), float(tilt)


@dataclass
class ChannelCheck:
    axis: str
    channel: str            # "speed" or "tilt"
    analytic: float         # reference-table coefficient
    declared: str           # scaling the table claims: "as_given" or "doubled"
    resolved: float         # analytic coefficient with the declared scaling applied
    numeric: float          # finite-difference value
    step: float
    confirmed: str          # scaling the oracle matched: "as_given", "doubled",
                            # "degenerate", or "neither"
    rel_error: float        # relative error of `resolved` vs `numeric` (nan if degenerate)
    flagged: bool           # resolved value disagrees with the oracle


@dataclass
class JacobianReport:
    trim: HoverTrim
    checks: list
    notes: list

    @property
    def ok(self) -> bool:
        return not any(c.flagged for c in self.checks)

    def render(self) -> str:
        lines = [
            f"hover trim: omega_h = {self.trim.omega_h:.6g} rad/s, "
            f"theta_h = {self.trim.theta_h:.6g} rad",
            f"{'axis':<6} {'channel':<7} {'analytic':>13} {'resolved':>13} "
            f"{'numeric':>13} {'confirmed':>10} {'rel_error':>10}  flag",
        ]
        for c in self.checks:
            lines.append(
                f"{c.axis:<6} {c.channel:<7} {c.analytic:>13.6e} {c.resolved:>13.6e} "
                f"{c.numeric:>13.6e} {c.confirmed:>10} {c.rel_error:>10.2e}  "
                f"{'FLAGGED' if c.flagged else 'ok'}"
            )
        lines.extend(self.notes)
        return "\n".join(lines)

    def csv_rows(self):
        yield ("axis", "channel", "analytic", "declared", "resolved", "numeric",
               "step", "confirmed", "rel_error", "flagged")
        for c in self.checks:
            yield (c.axis, c.channel, repr(c.analytic), c.declared, repr(c.resolved),
                   repr(c.numeric), repr(c.step), c.confirmed, repr(c.rel_error),
                   str(c.flagged))


# Scaling each axis row of the reference table carries relative to the
# body-rate map (see analytic_model).
DECLARED_SCALING = {"roll": "as_given", "pitch": "doubled", "yaw": "doubled"}


def _confirm(analytic: float, numeric: float) -> str:
    """Which scaling of the analytic value the oracle matches, if any."""
    if max(abs(numeric), abs(analytic)) < 1e-300:
        return "degenerate"
    if abs(numeric) == 0.0:
        return "neither"
    if abs(analytic - numeric) <= REL_TOL * abs(numeric):
        return "as_given"
    if abs(2.0 * analytic - numeric) <= REL_TOL * abs(numeric):
        return "doubled"
    return "neither"


def verify(trim: HoverTrim, params: VehicleParams,
           h_speed: float = H_SPEED, h_tilt: float = H_TILT,
           analytic_params: VehicleParams | None = None) -> JacobianReport:
    """Audit every axis/channel of the reference table against the oracle.

    A channel is flagged when its resolved coefficient (the table value with
    its declared scaling applied) disagrees with the finite difference by
    more than REL_TOL relative. ``analytic_params`` lets a test corrupt the
    analytic side only (fault injection); it defaults to the true parameters.
    """
    ap = params if analytic_params is None else analytic_params
    checks = []
    for axis in AXES:
        model = analytic_model(axis, trim, ap)
        numeric = numeric_jacobian(axis, trim, params, h_speed, h_tilt)
        declared = DECLARED_SCALING[axis]
        factor = 1.0 if declared == "as_given" else 2.0
        for channel, analytic, num, h in (
            ("speed", model.speed_coeff, numeric[0], h_speed),
            ("tilt", model.tilt_coeff, numeric[1], h_tilt),
        ):
            resolved = factor * analytic
            confirmed = _confirm(analytic, num)
            if confirmed == "degenerate":
                rel, flagged = float("nan"), False
            elif num == 0.0:
                rel, flagged = float("inf"), resolved != 0.0
            else:
                rel = abs(resolved - num) / abs(num)
                flagged = rel > REL_TOL
            checks.append(ChannelCheck(axis, channel, analytic, declared, resolved,
                                       num, h, confirmed, rel, flagged))
    notes = []
    by_axis = {a: [c for c in checks if c.axis == a] for a in AXES}
    if all(c.confirmed == "as_given" for c in by_axis["roll"]):
        notes.append(
            "roll: body-rate scaling confirmed; the half-scaled variant of the "
            "roll row belongs to quaternion-rate states, not to the rate map"
        )
    for a in ("pitch", "yaw"):
        if all(c.confirmed == "doubled" for c in by_axis[a]):
            notes.append(
                f"{a}: oracle matches twice the reference coefficients; the "
                "reference row absorbs the 1/2 of the quaternion kinematics"
            )
    degenerate = [f"{c.axis}/{c.channel}" for c in checks if c.confirmed == "degenerate"]
    if degenerate:
        notes.append("degenerate channels (zero trim authority): " + ", ".join(degenerate))
    bad = [f"{c.axis}/{c.channel}" for c in checks if c.flagged]
    if bad:
        notes.append("FLAGGED channels exceeding tolerance: " + ", ".join(bad))
    return JacobianReport(trim=trim, checks=checks, notes=notes)
