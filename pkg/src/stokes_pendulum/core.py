"""State representations for planar pendulum orbits and their Stokes-parameter form.

A nearly-elliptical horizontal orbit of a pendulum can be described three
ways: by its ellipse geometry (semi-axes, inclination, sense of motion), by
the per-axis amplitudes and their phase difference, or by the dimensionless
Stokes parameters (s1, s2, s3) that place the orbit on a Poincare sphere of
radius s0 = sqrt(s1^2 + s2^2 + s3^2).  This module holds those value types
and the exact conversions between them, plus the physical observables
(energy, vertical angular momentum) and the quadratic-average extraction of
Stokes parameters from a sampled trajectory.

All values are immutable after construction; every function here is pure.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ADVISORY_RATE_RATIO",
    "AmplitudePhase",
    "ConvergenceError",
    "DegenerateOrbitError",
    "EllipseGeometry",
    "Handedness",
    "PendulumConfig",
    "SlowRateAdvisory",
    "StokesState",
    "ValidationError",
    "amplitudes_from_stokes",
    "ellipse_from_stokes",
    "observables",
    "stokes_from_amplitudes",
    "stokes_from_ellipse",
    "stokes_from_trajectory",
]


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class DegenerateOrbitError(ValidationError):
    """The orbit has zero extent (s0 = 0) and cannot be inverted."""


class ConvergenceError(RuntimeError):
    """An iterative kernel failed to reach its tolerance."""


class SlowRateAdvisory(UserWarning):
    """Rates are not small against omega; the orbit-averaged picture degrades.

    Advisory only: every formula in the package remains well defined, but
    the reduced model's fidelity to a physical pendulum assumes slow rates.
    """


# |delta_omega|/omega or |Omega_rot|/omega above this emits an advisory
# warning: the reduced model assumes slow rates relative to the swing.
ADVISORY_RATE_RATIO = 0.5


def _require_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValidationError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class PendulumConfig:
    """Physical parameters shared by every model in the package.

    Parameters
    ----------
    omega : float
        Small-oscillation angular frequency sqrt(g/L) [rad/s].  Must be > 0.
    delta_omega : float
        Frequency split between the x and y principal axes (x is faster by
        this amount) [rad/s].
    Omega_rot : float
        Rotation rate of the reference frame about the vertical [rad/s].
    gamma_x, gamma_y : float
        Linear damping rates per axis [1/s].  Must be >= 0.
    length : float
        Pendulum length [m].  Must be > 0.
    mass : float
        Bob mass [kg].  Must be > 0.
    """

    omega: float
    delta_omega: float = 0.0
    Omega_rot: float = 0.0
    gamma_x: float = 0.0
    gamma_y: float = 0.0
    length: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        _require_finite(
            omega=self.omega,
            delta_omega=self.delta_omega,
            Omega_rot=self.Omega_rot,
            gamma_x=self.gamma_x,
            gamma_y=self.gamma_y,
            length=self.length,
            mass=self.mass,
        )
        if self.omega <= 0:
            raise ValidationError(f"omega must be > 0, got {self.omega}")
        if self.length <= 0:
            raise ValidationError(f"length must be > 0, got {self.length}")
        if self.mass <= 0:
            raise ValidationError(f"mass must be > 0, got {self.mass}")
        if self.gamma_x < 0 or self.gamma_y < 0:
            raise ValidationError("damping rates must be >= 0")
        for name in ("delta_omega", "Omega_rot"):
            if abs(getattr(self, name)) > ADVISORY_RATE_RATIO * self.omega:
                warnings.warn(
                    f"|{name}| = {abs(getattr(self, name)):g} is not small against "
                    f"omega = {self.omega:g}; the reduced orbit-averaged model "
                    "assumes slow rates",
                    category=SlowRateAdvisory,
                    stacklevel=3,
                )

    @property
    def gravity(self) -> float:
        """Acceleration g implied by omega and length (g = omega^2 L)."""
        return self.omega**2 * self.length


class Handedness(enum.Enum):
    """Sense of motion along the orbit, viewed from above."""

    COUNTERCLOCKWISE = 1
    CLOCKWISE = -1

    @property
    def sign(self) -> int:
        return self.value


@dataclass(frozen=True)
class StokesState:
    """A point (s1, s2, s3) on or inside the Poincare sphere.

    The radius s0 is always derived from the components, never stored, so
    the sphere identity s0^2 = s1^2 + s2^2 + s3^2 holds by construction.
    """

    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require_finite(s1=self.s1, s2=self.s2, s3=self.s3)

    @property
    def s0(self) -> float:
        return math.sqrt(self.s1**2 + self.s2**2 + self.s3**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3], dtype=float)

    @classmethod
    def from_array(cls, a) -> "StokesState":
        s1, s2, s3 = (float(v) for v in a)
        return cls(s1, s2, s3)


@dataclass(frozen=True)
class EllipseGeometry:
    """Orbit ellipse: semi-axes a >= b >= 0, inclination psi, handedness.

    psi is normalized into [0, pi) at construction (psi and psi + pi
    describe the same ellipse).  For circular orbits (a == b) psi carries no
    information; conversions return psi = 0 by convention and
    ``is_circular`` flags the degeneracy.
    """

    a: float
    b: float
    psi: float
    handedness: Handedness = Handedness.COUNTERCLOCKWISE

    def __post_init__(self):
        for name in ("a", "b", "psi"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require_finite(a=self.a, b=self.b, psi=self.psi)
        if not (self.a >= self.b >= 0.0):
            raise ValidationError(
                f"semi-axes must satisfy a >= b >= 0, got a={self.a}, b={self.b}"
            )
        object.__setattr__(self, "psi", self.psi % math.pi)

    @property
    def is_circular(self) -> bool:
        return self.a - self.b <= 1e-12 * max(self.a, 1e-300)


@dataclass(frozen=True)
class AmplitudePhase:
    """Per-axis amplitudes A, B and phase difference phi in (-pi, pi]."""

    A: float
    B: float
    phi: float

    def __post_init__(self):
        _require_finite(A=self.A, B=self.B, phi=self.phi)
        if self.A < 0 or self.B < 0:
            raise ValidationError("amplitudes must be >= 0")
        # normalize into (-pi, pi]
        p = -((-self.phi + math.pi) % (2.0 * math.pi) - math.pi)
        object.__setattr__(self, "phi", p)


def stokes_from_ellipse(e: EllipseGeometry, length: float) -> StokesState:
    """Stokes parameters of the orbit with ellipse geometry `e`.

    s1 = (a^2 - b^2) cos(2 psi) / L^2
    s2 = (a^2 - b^2) sin(2 psi) / L^2
    s3 = +-2 a b / L^2            (sign from handedness)

    and consequently s0 = (a^2 + b^2) / L^2.
    """
    _require_finite(length=length)
    if length <= 0:
        raise ValidationError(f"length must be > 0, got {length}")
    l2 = length**2
    diff = (e.a**2 - e.b**2) / l2
    return StokesState(
        s1=diff * math.cos(2.0 * e.psi),
        s2=diff * math.sin(2.0 * e.psi),
        s3=e.handedness.sign * 2.0 * e.a * e.b / l2,
    )


def stokes_from_amplitudes(p: AmplitudePhase, length: float) -> StokesState:
    """Stokes parameters from per-axis amplitudes and phase difference.

    s1 = (A^2 - B^2)/L^2,  s2 = 2AB cos(phi)/L^2,  s3 = 2AB sin(phi)/L^2.
    """
    _require_finite(length=length)
    if length <= 0:
        raise ValidationError(f"length must be > 0, got {length}")
    l2 = length**2
    two_ab = 2.0 * p.A * p.B / l2
    return StokesState(
        s1=(p.A**2 - p.B**2) / l2,
        s2=two_ab * math.cos(p.phi),
        s3=two_ab * math.sin(p.phi),
    )


def ellipse_from_stokes(s: StokesState, length: float) -> EllipseGeometry:
    """Invert the ellipse -> Stokes map.

    Uses a^2 + b^2 = s0 L^2, a^2 - b^2 = sqrt(s1^2 + s2^2) L^2 and
    2 psi = atan2(s2, s1).  Raises DegenerateOrbitError for s0 = 0.
    """
    _require_finite(length=length)
    if length <= 0:
        raise ValidationError(f"length must be > 0, got {length}")
    s0 = s.s0
    if s0 <= 0.0:
        raise DegenerateOrbitError("s0 = 0: the orbit has no extent")
    l2 = length**2
    lin = math.hypot(s.s1, s.s2)
    a2 = 0.5 * (s0 + lin) * l2
    b2 = 0.5 * (s0 - lin) * l2
    psi = 0.5 * math.atan2(s.s2, s.s1) if lin > 0.0 else 0.0
    hand = Handedness.CLOCKWISE if s.s3 < 0 else Handedness.COUNTERCLOCKWISE
    return EllipseGeometry(
        a=math.sqrt(a2), b=math.sqrt(max(b2, 0.0)), psi=psi, handedness=hand
    )


def amplitudes_from_stokes(s: StokesState, length: float) -> AmplitudePhase:
    """Invert the amplitude-phase -> Stokes map (phi = 0 when 2AB = 0)."""
    _require_finite(length=length)
    if length <= 0:
        raise ValidationError(f"length must be > 0, got {length}")
    s0 = s.s0
    if s0 <= 0.0:
        raise DegenerateOrbitError("s0 = 0: the orbit has no extent")
    l2 = length**2
    a2 = 0.5 * (s0 + s.s1) * l2
    b2 = 0.5 * (s0 - s.s1) * l2
    phi = math.atan2(s.s3, s.s2) if (s.s2 != 0.0 or s.s3 != 0.0) else 0.0
    return AmplitudePhase(A=math.sqrt(max(a2, 0.0)), B=math.sqrt(max(b2, 0.0)), phi=phi)


def observables(s: StokesState, c: PendulumConfig) -> tuple[float, float]:
    """Energy and vertical angular momentum of the orbit.

    E = (1/2) m omega^2 L^2 s0 and L_z = (1/2) m omega L^2 s3.
    """
    half_ml2 = 0.5 * c.mass * c.length**2
    return half_ml2 * c.omega**2 * s.s0, half_ml2 * c.omega * s.s3


def stokes_from_trajectory(
    x, y, xdot, ydot, dt: float, period: float, length: float
) -> StokesState:
    """Extract Stokes parameters from one period of a sampled trajectory.

    The quadratic averages <x^2>, <y^2>, <xy> are taken with the trapezoid
    rule over exactly one period starting at the first sample; the sign of
    s3 comes from the mean of (x ydot - y xdot).

    Parameters
    ----------
    x, y, xdot, ydot : array_like
        Uniformly sampled positions and velocities.  Must span at least one
        period.
    dt : float
        Sample spacing.  The period must be an integer number of steps.
    period : float
        Averaging window T = 2 pi / omega.
    length : float
        Pendulum length, used to non-dimensionalize.
    """
    _require_finite(dt=dt, period=period, length=length)
    if dt <= 0 or period <= 0 or length <= 0:
        raise ValidationError("dt, period and length must all be > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    ydot = np.asarray(ydot, dtype=float)
    if not (x.shape == y.shape == xdot.shape == ydot.shape) or x.ndim != 1:
        raise ValidationError("x, y, xdot, ydot must be 1-d arrays of equal length")

    steps = period / dt
    n_per = round(steps)
    if abs(steps - n_per) > 1e-9 * steps:
        raise ValidationError(
            f"period/dt = {steps:g} is not an integer; resample the trajectory"
        )
    if n_per < 16:
        raise ValidationError(
            f"need at least 16 samples per period, got {n_per}"
        )
    if x.size < n_per + 1:
        raise ValidationError(
            f"window spans {(x.size - 1) * dt:g} < one period {period:g}"
        )

    w = np.ones(n_per + 1)
    w[0] = w[-1] = 0.5
    w /= n_per
    xs, ys = x[: n_per + 1], y[: n_per + 1]
    mean_xx = w @ (xs * xs)
    mean_yy = w @ (ys * ys)
    mean_xy = w @ (xs * ys)
    mean_ang = w @ (xs * ydot[: n_per + 1] - ys * xdot[: n_per + 1])

    l2 = length**2
    s1 = 2.0 * (mean_xx - mean_yy) / l2
    s2 = 4.0 * mean_xy / l2
    s3_mag = 4.0 * math.sqrt(max(mean_xx * mean_yy - mean_xy**2, 0.0)) / l2
    s3 = math.copysign(s3_mag, mean_ang) if mean_ang != 0.0 else s3_mag
    return StokesState(s1=s1, s2=s2, s3=s3)
