"""Exception types raised by the simulation and control modules."""


class TiltrotorError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateQuaternion(TiltrotorError):
    """Quaternion norm is too close to zero to normalize."""


class NonUnitQuaternion(TiltrotorError):
    """Operation requires a unit quaternion and the input is not one."""


class AntiparallelVectors(TiltrotorError):
    """Alignment rotation is undefined for (nearly) opposite vectors."""


class NegativeSpeed(TiltrotorError):
    """Rotor speeds must be non-negative."""


class NumericalDivergence(TiltrotorError):
    """A state component left the sane range during integration."""


class TiltSingularity(TiltrotorError):
    """Collective tilt leaves no vertical thrust authority."""


class NegativeThrustDemand(TiltrotorError):
    """Hover speed is undefined for non-positive vertical acceleration demand."""


class StepTooSmall(TiltrotorError):
    """Finite-difference step is below floating-point resolution."""


class MissionTimeout(TiltrotorError):
    """The final waypoint was not captured within the configured duration."""


class ConfigError(TiltrotorError):
    """Scenario configuration file is missing or inconsistent."""
