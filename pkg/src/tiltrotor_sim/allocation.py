"""Control allocation: virtual axis commands to physical actuator increments.

The eight virtual controls are, in order,

  [d_omega_roll, d_omega_pitch, d_omega_yaw,
   d_tilt_roll, d_tilt_pitch, d_tilt_yaw, d_tilt_x, d_tilt_y]

speed increments in rad/s and tilt increments in rad. MIXER maps them to the
eight actuator increments [dw1..dw4, dt1..dt4] about the hover trim. The
matrix is integer-valued, so mixing is exact.

Each virtual channel is defined as a combination of physical increments
(e.g. the roll speed channel is "speed of rotor 2 minus speed of rotor 4");
driving the mixer with a unit virtual input produces that combination with a
channel gain of 2 (differential channels) or 4 (yaw channels). The mixer is
kept verbatim rather than normalized; feedback gains absorb the factors.

Two of the tilt columns intentionally alias: the x-translation column equals
the roll-tilt column and the y-translation column is the negated pitch-tilt
column. Tilting rotors 2 and 4 together is both "accelerate along +x" and
"roll moment from rotor drag"; the redundancy is physical, and it makes the
8x8 matrix rank 6. ``consistency_report`` checks the full channel-coupling
structure including these aliases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import ActuatorCommand, VehicleParams, clamp_command

MIXER = np.array([
    [0, -1, -1, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0],
    [0, 1, -1, 0, 0, 0, 0, 0],
    [-1, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, -1, 0, -1],
    [0, 0, 0, 1, 0, -1, 1, 0],
    [0, 0, 0, 0, 1, 1, 0, -1],
    [0, 0, 0, 1, 0, 1, 1, 0],
], dtype=float)

VIRTUAL_CHANNELS = (
    "d_omega_roll", "d_omega_pitch", "d_omega_yaw",
    "d_tilt_roll", "d_tilt_pitch", "d_tilt_yaw", "d_tilt_x", "d_tilt_y",
)

# Defining combination of each virtual channel over [dw1..dw4, dt1..dt4]:
# roll speed = dw2 - dw4, pitch speed = dw3 - dw1,
# yaw speed = -dw1 + dw2 - dw3 + dw4,
# roll tilt = dt2 + dt4, pitch tilt = dt3 + dt1,
# yaw tilt = -dt1 - dt2 + dt3 + dt4,
# x tilt = dt2 + dt4 (same actuators as roll tilt),
# y tilt = -(dt1 + dt3).
CHANNEL_DEFINITIONS = np.array([
    [0, 1, 0, -1, 0, 0, 0, 0],
    [-1, 0, 1, 0, 0, 0, 0, 0],
    [-1, 1, -1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, -1, -1, 1, 1],
    [0, 0, 0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, -1, 0, -1, 0],
], dtype=float)

# Channel gains and cross-channel couplings of CHANNEL_DEFINITIONS @ MIXER.
# Diagonal: 2 for differential channels, 4 for the two yaw channels.
# Off-diagonal: the tilt-column aliases couple (roll tilt, x tilt) with +2
# and (pitch tilt, y tilt) with -2.
EXPECTED_COUPLING = np.diag([2.0, 2.0, 4.0, 2.0, 2.0, 4.0, 2.0, 2.0])
EXPECTED_COUPLING[3, 6] = EXPECTED_COUPLING[6, 3] = 2.0
EXPECTED_COUPLING[4, 7] = EXPECTED_COUPLING[7, 4] = -2.0


@dataclass(frozen=True)
class HoverTrim:
    """Operating point: all rotors at omega_h, all tilts at theta_h (0 at hover)."""

    omega_h: float
    theta_h: float = 0.0

    def __post_init__(self):
        if self.omega_h < 0.0:
            raise ValueError("hover speed must be non-negative")


def virtual_vector(d_omega, d_tilt, d_tilt_xy=(0.0, 0.0)) -> np.ndarray:
    """Assemble the 8-vector of virtual controls from its three groups."""
    return np.array([
        d_omega[0], d_omega[1], d_omega[2],
        d_tilt[0], d_tilt[1], d_tilt[2],
        d_tilt_xy[0], d_tilt_xy[1],
    ])


def mix(v: np.ndarray) -> np.ndarray:
    """Actuator increments [dw1..dw4, dt1..dt4] = MIXER @ v."""
    return MIXER @ np.asarray(v, dtype=float)


def compose(trim: HoverTrim, deltas: np.ndarray, params: VehicleParams) -> ActuatorCommand:
    """Add actuator increments to the trim and clamp to the actuator limits."""
    d = np.asarray(deltas, dtype=float)
    return clamp_command(
        ActuatorCommand(trim.omega_h + d[0:4], trim.theta_h + d[4:8]), params
    )


@dataclass
class ConsistencyReport:
    """Channel-by-channel audit of the mixer against the channel definitions."""

    coupling: np.ndarray           # CHANNEL_DEFINITIONS @ mixer
    gains: np.ndarray              # diagonal of `coupling`
    anomalies: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.anomalies

    def render(self) -> str:
        lines = ["channel gain factors (definition units per unit virtual input):"]
        for name, gain in zip(VIRTUAL_CHANNELS, self.gains):
            lines.append(f"  {name:<14} {gain:+.0f}")
        if self.anomalies:
            lines.append("anomalies:")
            lines.extend(f"  {a}" for a in self.anomalies)
        else:
            lines.append("coupling structure matches the expected pattern")
        return "\n".join(lines)


def consistency_report(matrix: np.ndarray | None = None) -> ConsistencyReport:
    """Check a mixer matrix against the virtual-channel definitions.

    Applies a unit input on every virtual channel and evaluates all eight
    defining combinations on the resulting actuator increments. Any deviation
    from the expected coupling pattern (including a single flipped sign) is
    flagged.
    """
    m = MIXER if matrix is None else np.asarray(matrix, dtype=float)
    coupling = CHANNEL_DEFINITIONS @ m
    anomalies = []
    for i in range(8):
        for j in range(8):
            if coupling[i, j] != EXPECTED_COUPLING[i, j]:
                anomalies.append(
                    f"channel {VIRTUAL_CHANNELS[j]} drives definition "
                    f"{VIRTUAL_CHANNELS[i]} with factor {coupling[i, j]:+g} "
                    f"(expected {EXPECTED_COUPLING[i, j]:+g})"
                )
    return ConsistencyReport(coupling=coupling, gains=np.diag(coupling).copy(),
                             anomalies=anomalies)


def torque_to_speeds(tau: np.ndarray, omega_h: float, params: VehicleParams) -> np.ndarray:
    """Rotor speeds that realize a body torque exactly, tilts at zero.

    Solves in thrust space (squared speeds), where the torque map is linear:

      s2 - s4           = tau_x / (l k_f)
      s3 - s1           = tau_y / (l k_f)
      -s1 + s2 - s3 + s4 = tau_z / k_m
      s1 + s2 + s3 + s4  = 4 omega_h^2   (collective preserved)

    Used by the computed-torque control mode. Squared speeds are floored at
    zero before the square root, which saturates the torque when the demand
    exceeds the authority at the current collective.
    """
    tx, ty, tz = tau
    a = tx / (2.0 * params.l * params.k_f)
    b = ty / (2.0 * params.l * params.k_f)
    c = tz / (4.0 * params.k_m)
    w2 = omega_h * omega_h
    s = np.array([w2 - b - c, w2 + a + c, w2 + b - c, w2 - a + c])
    return np.sqrt(np.maximum(s, 0.0))
