"""Reduced equations of motion on the Poincare sphere and their integrator.

Three elementary flows act on the Stokes vector: rotation about s1 at the
frequency split (anisotropy), rotation about s3 at twice the frame rate
(Coriolis), and twisting about s3 at a rate proportional to s3 itself (the
area-proportional precession of elliptical orbits).  Their combination

    ds1/dt =  2 Omega s2          - (3/8) omega s2 s3
    ds2/dt = -2 Omega s1 - dw s3  + (3/8) omega s1 s3
    ds3/dt =   dw s2

conserves both the sphere radius s0 and the scalar

    H = dw s1 - 2 Omega s3 + (3/16) omega s3^2,

where dw is the frequency split.  Anisotropic linear damping adds
non-conservative terms that close in (s1, s2, s3) because s0 is expressible
through them.  The integrator is a deterministic fixed-step RK4 that records
s0 and H at every step, so each run audits its own conservation drift.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import EllipseGeometry, PendulumConfig, StokesState, ValidationError

__all__ = [
    "FlowKind",
    "Trajectory",
    "airy_precession_rate",
    "hamiltonian",
    "integrate",
    "max_stable_dt",
    "rhs_conservative",
    "rhs_damped",
]


class FlowKind(enum.Enum):
    """Which terms of the right-hand side are active."""

    ANISOTROPY = "anisotropy"
    CORIOLIS = "coriolis"
    TWISTING = "twisting"
    COMBINED = "combined"
    DAMPED_COMBINED = "damped-combined"


def rhs_conservative(s: StokesState, c: PendulumConfig) -> tuple[float, float, float]:
    """Time derivatives (ds1, ds2, ds3) of the combined conservative flow."""
    tw = 0.375 * c.omega * s.s3
    return (
        (2.0 * c.Omega_rot - tw) * s.s2,
        (-2.0 * c.Omega_rot + tw) * s.s1 - c.delta_omega * s.s3,
        c.delta_omega * s.s2,
    )


def rhs_damped(s: StokesState, c: PendulumConfig) -> tuple[float, float, float]:
    """Conservative flow plus anisotropic linear damping.

    The s0 appearing in the damping of s1 is substituted by
    sqrt(s1^2 + s2^2 + s3^2), closing the system in three variables.
    """
    if c.gamma_x < 0 or c.gamma_y < 0:
        raise ValidationError("damping rates must be >= 0")
    d1, d2, d3 = rhs_conservative(s, c)
    g_sum = 0.5 * (c.gamma_x + c.gamma_y)
    g_diff = 0.5 * (c.gamma_x - c.gamma_y)
    s0 = s.s0
    return (
        d1 - g_diff * s0 - g_sum * s.s1,
        d2 - g_sum * s.s2,
        d3 - g_sum * s.s3,
    )


def hamiltonian(s: StokesState, c: PendulumConfig) -> float:
    """Conserved scalar of the combined flow (rad/s, dimensionless Stokes)."""
    return (
        c.delta_omega * s.s1
        - 2.0 * c.Omega_rot * s.s3
        + 0.1875 * c.omega * s.s3**2
    )


def airy_precession_rate(e: EllipseGeometry, c: PendulumConfig) -> float:
    """Area-proportional precession rate 3 a b omega / (8 L^2) of an ellipse.

    Signed by handedness: the precession has the same sense as the motion.
    """
    return e.handedness.sign * 0.375 * e.a * e.b * c.omega / c.length**2


def max_stable_dt(c: PendulumConfig, s0: float, kind: FlowKind = FlowKind.COMBINED):
    """Largest allowed step and the name of the rate that limits it.

    The guard keeps rate * dt <= 0.05 for the fastest active rotation:
    |dw|, 2|Omega|, (3/8) omega s0 and (gamma_x + gamma_y)/2.
    """
    rates = {}
    if kind in (FlowKind.ANISOTROPY, FlowKind.COMBINED, FlowKind.DAMPED_COMBINED):
        rates["anisotropy rate |delta_omega|"] = abs(c.delta_omega)
    if kind in (FlowKind.CORIOLIS, FlowKind.COMBINED, FlowKind.DAMPED_COMBINED):
        rates["Coriolis rate 2|Omega_rot|"] = 2.0 * abs(c.Omega_rot)
    if kind in (FlowKind.TWISTING, FlowKind.COMBINED, FlowKind.DAMPED_COMBINED):
        rates["twisting rate (3/8) omega s0"] = 0.375 * c.omega * s0
    if kind is FlowKind.DAMPED_COMBINED:
        rates["damping rate (gamma_x + gamma_y)/2"] = 0.5 * (c.gamma_x + c.gamma_y)
    name, fastest = max(rates.items(), key=lambda kv: kv[1])
    if fastest == 0.0:
        return math.inf, name
    return 0.05 / fastest, name


@dataclass(frozen=True)
class Trajectory:
    """Integrated Stokes trajectory with per-step conservation monitors.

    Attributes
    ----------
    times : ndarray, shape (n,)
        Strictly increasing sample times.
    states : ndarray, shape (n, 3)
        Stokes components at each time.
    h_values : ndarray, shape (n,)
        The conserved scalar H at each step (a diagnostic only for damped
        runs, where it is not conserved).
    s0_values : ndarray, shape (n,)
        Sphere radius at each step.  Drift of s0 is the integrator quality
        metric; no renormalization is ever applied.
    """

    times: np.ndarray
    states: np.ndarray
    h_values: np.ndarray
    s0_values: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.states) == len(self.h_values) == len(self.s0_values) == n):
            raise ValidationError("trajectory columns must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("times must be strictly increasing")

    def state_at(self, i: int) -> StokesState:
        return StokesState.from_array(self.states[i])

    @property
    def final_state(self) -> StokesState:
        return self.state_at(-1)

    def max_relative_drift(self) -> tuple[float, float]:
        """Max |s0(t)-s0(0)|/s0(0) and |H(t)-H(0)|/max(1, |H(0)|) over the run."""
        s0_ref = self.s0_values[0]
        h_ref = self.h_values[0]
        s0_drift = float(np.max(np.abs(self.s0_values - s0_ref))) / s0_ref
        h_drift = float(np.max(np.abs(self.h_values - h_ref))) / max(1.0, abs(h_ref))
        return s0_drift, h_drift

    def to_csv(self, path) -> None:
        """Write t, s1, s2, s3, s0, H with full double precision."""
        with open(path, "w", encoding="utf-8") as f:
            f.write("t,s1,s2,s3,s0,H\n")
            for i, t in enumerate(self.times):
                s1, s2, s3 = self.states[i]
                f.write(
                    f"{t:.17g},{s1:.17g},{s2:.17g},{s3:.17g},"
                    f"{self.s0_values[i]:.17g},{self.h_values[i]:.17g}\n"
                )


def _make_rhs(c: PendulumConfig, kind: FlowKind):
    """Scalar right-hand side closure for the requested flow."""
    dw = c.delta_omega
    two_om = 2.0 * c.Omega_rot
    tw_coef = 0.375 * c.omega
    g_sum = 0.5 * (c.gamma_x + c.gamma_y)
    g_diff = 0.5 * (c.gamma_x - c.gamma_y)

    if kind is FlowKind.ANISOTROPY:
        return lambda s1, s2, s3: (0.0, -dw * s3, dw * s2)
    if kind is FlowKind.CORIOLIS:
        return lambda s1, s2, s3: (two_om * s2, -two_om * s1, 0.0)
    if kind is FlowKind.TWISTING:
        return lambda s1, s2, s3: (-tw_coef * s2 * s3, tw_coef * s1 * s3, 0.0)
    if kind is FlowKind.COMBINED:

        def rhs(s1, s2, s3):
            tw = tw_coef * s3
            return (
                (two_om - tw) * s2,
                (tw - two_om) * s1 - dw * s3,
                dw * s2,
            )

        return rhs
    if kind is FlowKind.DAMPED_COMBINED:

        def rhs_d(s1, s2, s3):
            tw = tw_coef * s3
            s0 = math.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
            return (
                (two_om - tw) * s2 - g_diff * s0 - g_sum * s1,
                (tw - two_om) * s1 - dw * s3 - g_sum * s2,
                dw * s2 - g_sum * s3,
            )

        return rhs_d
    raise ValidationError(f"unknown flow kind {kind!r}")


def integrate(
    s_init: StokesState,
    c: PendulumConfig,
    kind: FlowKind,
    t_end: float,
    dt: float,
) -> Trajectory:
    """Fixed-step classical RK4 integration of the selected flow.

    The step is uniformly shrunk so the run lands exactly on ``t_end``.
    H and s0 are recorded at every step.  Deterministic for identical
    inputs.  Raises if ``dt`` exceeds the stability guard, naming the
    limiting rate.
    """
    if not (t_end > 0 and dt > 0):
        raise ValidationError("t_end and dt must be > 0")
    dt_max, limiter = max_stable_dt(c, s_init.s0, kind)
    if dt > dt_max:
        raise ValidationError(
            f"dt = {dt:g} exceeds the stability guard {dt_max:g} "
            f"set by the {limiter}"
        )

    rhs = _make_rhs(c, kind)
    n_steps = max(1, math.ceil(t_end / dt - 1e-12))
    h = t_end / n_steps

    dw = c.delta_omega
    two_om = 2.0 * c.Omega_rot
    h_quad = 0.1875 * c.omega

    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 3))
    h_vals = np.empty(n_steps + 1)
    s0_vals = np.empty(n_steps + 1)

    s1, s2, s3 = s_init.s1, s_init.s2, s_init.s3
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(n_steps + 1):
        times[i] = i * h
        states[i, 0], states[i, 1], states[i, 2] = s1, s2, s3
        s0_vals[i] = math.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
        h_vals[i] = dw * s1 - two_om * s3 + h_quad * s3 * s3
        if i == n_steps:
            break
        a1, a2, a3 = rhs(s1, s2, s3)
        b1, b2, b3 = rhs(s1 + half * a1, s2 + half * a2, s3 + half * a3)
        c1, c2, c3 = rhs(s1 + half * b1, s2 + half * b2, s3 + half * b3)
        d1, d2, d3 = rhs(s1 + h * c1, s2 + h * c2, s3 + h * c3)
        s1 += sixth * (a1 + 2.0 * (b1 + c1) + d1)
        s2 += sixth * (a2 + 2.0 * (b2 + c2) + d2)
        s3 += sixth * (a3 + 2.0 * (b3 + c3) + d3)
    times[n_steps] = t_end

    return Trajectory(times=times, states=states, h_values=h_vals, s0_values=s0_vals)
