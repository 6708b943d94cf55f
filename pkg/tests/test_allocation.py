import numpy as np
import pytest

from tiltrotor_sim.allocation import (
    CHANNEL_DEFINITIONS,
    EXPECTED_COUPLING,
    MIXER,
    HoverTrim,
    compose,
    consistency_report,
    mix,
    torque_to_speeds,
    virtual_vector,
)
from tiltrotor_sim.dynamics import ActuatorCommand, VehicleParams, body_torque

PARAMS = VehicleParams()


def test_mix_roll_speed_column():
    out = mix(np.array([2.5, 0, 0, 0, 0, 0, 0, 0]))
    assert np.allclose(out, [0, 2.5, 0, -2.5, 0, 0, 0, 0])


def test_mix_yaw_speed_column():
    out = mix(np.array([0, 0, 1.5, 0, 0, 0, 0, 0]))
    assert np.allclose(out[:4], [-1.5, 1.5, -1.5, 1.5])
    assert np.allclose(out[4:], 0.0)


def test_mix_zero_and_exact_linearity():
    assert np.allclose(mix(np.zeros(8)), 0.0)
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.integers(-5, 6, 8).astype(float)
        b = rng.integers(-5, 6, 8).astype(float)
        # integer matrix: exact, not approximate
        assert np.array_equal(mix(a + b), mix(a) + mix(b))


def test_mixer_structure():
    # speed columns touch only speed rows; tilt rows are driven only by tilt columns
    assert np.allclose(MIXER[4:, :3], 0.0)
    assert np.allclose(MIXER[:4, 3:], 0.0)
    # the tilt aliasing makes the matrix rank 6, not 8
    assert np.linalg.matrix_rank(MIXER) == 6
    assert np.array_equal(MIXER[:, 6], MIXER[:, 3])   # x tilt == roll tilt
    assert np.array_equal(MIXER[:, 7], -MIXER[:, 4])  # y tilt == -pitch tilt


def test_consistency_report_factors():
    rep = consistency_report()
    assert rep.ok
    assert np.allclose(rep.gains, [2, 2, 4, 2, 2, 4, 2, 2])
    assert np.allclose(rep.coupling, EXPECTED_COUPLING)
    assert "d_omega_yaw" in rep.render()


def test_consistency_report_flags_flipped_sign():
    bad = MIXER.copy()
    bad[1, 0] = -1.0  # flip rotor 2's roll-speed entry
    rep = consistency_report(bad)
    assert not rep.ok
    assert any("d_omega_roll" in a for a in rep.anomalies)


def test_virtual_vector_ordering():
    v = virtual_vector([1, 2, 3], [4, 5, 6], [7, 8])
    assert np.allclose(v, [1, 2, 3, 4, 5, 6, 7, 8])


def test_compose():
    trim = HoverTrim(131.9)
    out = compose(trim, np.zeros(8), PARAMS)
    assert np.allclose(out.omega, 131.9) and np.allclose(out.tilt, 0.0)

    deltas = np.zeros(8)
    deltas[1] = 5.0  # rotor 2 speed increment
    out = compose(trim, deltas, PARAMS)
    assert np.allclose(out.omega, [131.9, 136.9, 131.9, 131.9])

    big = np.full(8, 1e3)
    out = compose(trim, big, PARAMS)
    assert np.allclose(out.omega, PARAMS.omega_max)
    assert np.allclose(out.tilt, PARAMS.tilt_max)


def test_hover_trim_validation():
    with pytest.raises(ValueError):
        HoverTrim(-1.0)


def test_channel_definitions_match_mix_examples():
    # roll speed channel: dw2 - dw4 doubles the virtual input
    out = mix(virtual_vector([1.0, 0, 0], [0, 0, 0]))
    assert out[1] - out[3] == 2.0
    # yaw speed channel: -dw1 + dw2 - dw3 + dw4 quadruples it
    out = mix(virtual_vector([0, 0, 1.0], [0, 0, 0]))
    assert -out[0] + out[1] - out[2] + out[3] == 4.0
    assert CHANNEL_DEFINITIONS.shape == (8, 8)


def test_torque_to_speeds_realizes_torque_exactly():
    rng = np.random.default_rng(11)
    omega_h = 131.9
    for _ in range(100):
        tau = rng.uniform(-0.2, 0.2, 3)
        w = torque_to_speeds(tau, omega_h, PARAMS)
        cmd = ActuatorCommand(w, np.zeros(4))
        assert np.allclose(body_torque(cmd, PARAMS), tau, atol=1e-12)
        # collective thrust preserved
        assert np.sum(w**2) == pytest.approx(4.0 * omega_h**2, rel=1e-12)


def test_torque_to_speeds_saturates_gracefully():
    w = torque_to_speeds(np.array([0.0, 0.0, 50.0]), 131.9, PARAMS)
    assert np.all(w >= 0.0) and np.all(np.isfinite(w))
