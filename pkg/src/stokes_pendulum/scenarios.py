"""Composite experiments: Zeno filtering, classical squeezing, self-trapping.

These scripts combine the reduced flows into the three demonstrations the
toolkit exists for:

* a sequence of strong unidirectional-damping intervals ("filters")
  interleaved with Coriolis rotation, showing that frequent projection onto
  one linear polarization lets the swing survive a rotation that would
  otherwise absorb it entirely;

* an ensemble of pendulums spread around a linear orbit, sheared by the
  twisting flow into a stretched, tilted patch whose short principal axis
  drops below the initial spread (classical squeezing), and a derotation
  that aligns the squeezed axis with the orbit-circularity coordinate;

* the flip-or-trap dichotomy of a circular orbit under anisotropy plus
  twisting, bisected over the sphere radius to locate the transition.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import PendulumConfig, StokesState, ValidationError
from .dynamics import FlowKind, integrate

__all__ = [
    "EnsembleSpec",
    "SelfTrappingResult",
    "SqueezeResult",
    "ZenoProtocol",
    "derotate_ensemble",
    "find_flip_trap_transition",
    "sample_ensemble",
    "self_trapping_demo",
    "squeeze_ensemble",
    "zeno_run",
]


@dataclass(frozen=True)
class ZenoProtocol:
    """A rotation-by-pi/2 interrupted by n strong damping intervals.

    ``n_filters`` counts the free-rotation segments; a filter acts after
    each one (the filter in front of the first segment would be idle, since
    the initial state is already the polarization the filters keep).
    Filter quality gamma * duration >= 20 keeps the cross-polarized energy
    leak per filter below e^-20.
    """

    n_filters: int
    Omega_rot: float
    gamma_filter: float
    filter_duration: float

    def __post_init__(self):
        if self.n_filters < 0:
            raise ValidationError("n_filters must be >= 0")
        if self.Omega_rot <= 0:
            raise ValidationError("the protocol needs a positive rotation rate")
        if self.gamma_filter < 0 or self.filter_duration <= 0:
            raise ValidationError("filter parameters must be positive")
        if self.gamma_filter * self.filter_duration < 20.0:
            raise ValidationError(
                "filter quality gamma * duration must be >= 20, got "
                f"{self.gamma_filter * self.filter_duration:g}"
            )

    @property
    def quarter_turn_time(self) -> float:
        return 0.5 * math.pi / self.Omega_rot


def zeno_run(p: ZenoProtocol, omega: float = 1.0, dt: float | None = None) -> float:
    """Transmitted energy fraction of the filtered quarter-turn.

    The run starts linearly polarized along the undamped direction and
    alternates Coriolis-only rotation segments (each turning the orbit
    plane by pi/(2 n)) with damping-only filter intervals; rotation is
    suspended while a filter acts, so the rotation between filters is exact.
    Returns final s0 / initial s0 (energy is proportional to s0).
    """
    state = StokesState(-1.0, 0.0, 0.0)  # linear along the undamped axis
    if p.n_filters == 0:
        return state.s0

    rotation_config = PendulumConfig(omega=omega, Omega_rot=p.Omega_rot)
    filter_config = PendulumConfig(omega=omega, gamma_x=p.gamma_filter)
    segment = p.quarter_turn_time / p.n_filters
    if dt is None:
        dt = min(0.04 / (2.0 * p.Omega_rot), 0.04 / (0.5 * p.gamma_filter))

    s0_init = state.s0
    for _ in range(p.n_filters):
        state = integrate(
            state, rotation_config, FlowKind.COMBINED, segment, dt
        ).final_state
        state = integrate(
            state, filter_config, FlowKind.DAMPED_COMBINED, p.filter_duration, dt
        ).final_state
    return state.s0 / s0_init


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble of pendulums spread around the x-polarized linear orbit."""

    n_members: int
    s0: float
    spread: float
    seed: int = 0

    def __post_init__(self):
        if self.n_members < 2:
            raise ValidationError("need at least two members")
        if not (self.s0 > 0):
            raise ValidationError("s0 must be > 0")
        if not (0 < self.spread <= 0.05 * self.s0):
            raise ValidationError(
                f"spread must satisfy 0 < spread <= 0.05 s0 = {0.05 * self.s0:g}"
            )


def sample_ensemble(e: EnsembleSpec) -> np.ndarray:
    """Draw members near (s0, 0, 0) with independent Gaussian s2, s3.

    The Gaussian draw is projected radially back onto the sphere; the
    distortion is second order in spread / s0.
    """
    rng = np.random.default_rng(e.seed)
    members = np.empty((e.n_members, 3))
    members[:, 0] = e.s0
    members[:, 1] = rng.normal(0.0, e.spread, e.n_members)
    members[:, 2] = rng.normal(0.0, e.spread, e.n_members)
    members *= e.s0 / np.linalg.norm(members, axis=1)[:, None]
    return members


def derotate_ensemble(members: np.ndarray, angle: float) -> np.ndarray:
    """Rotate every member about the s1 axis by the given angle (exactly)."""
    c, s = math.cos(angle), math.sin(angle)
    out = np.asarray(members, dtype=float).copy()
    s2 = out[:, 1].copy()
    out[:, 1] = c * s2 - s * out[:, 2]
    out[:, 2] = s * s2 + c * out[:, 2]
    return out


@dataclass(frozen=True)
class SqueezeResult:
    """Principal spreads and tilt of the sheared ensemble."""

    covariance: np.ndarray
    delta_plus: float
    delta_minus: float
    tilt_alpha: float
    members: np.ndarray

    def to_json(self, path=None) -> str:
        doc = {
            "covariance": self.covariance.tolist(),
            "delta_plus": self.delta_plus,
            "delta_minus": self.delta_minus,
            "tilt_alpha": self.tilt_alpha,
        }
        text = json.dumps(doc, indent=2)
        if path is not None:
            with open(path, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        return text


def squeeze_ensemble(
    e: EnsembleSpec, c: PendulumConfig, tau: float
) -> SqueezeResult:
    """Shear the ensemble with the twisting flow for time tau.

    Under pure twisting each member rotates about s3 by (3/8) omega s3 tau
    with its own constant s3 (the flow is exactly integrable), correlating
    s2 with s3.  The useful window is

        8 / (3 omega s0)  <<  tau  <~  4 / (3 omega spread):

    shorter and the shear has not yet beaten the isotropic spread, longer
    and the patch wraps around the sphere.  Outside the window by more than
    a factor of ten is an error; outside at all is a warning.
    """
    tau_lo = 8.0 / (3.0 * c.omega * e.s0)
    tau_hi = 4.0 / (3.0 * c.omega * e.spread)
    if tau <= 0:
        raise ValidationError("tau must be > 0")
    if tau < 0.1 * tau_lo or tau > 10.0 * tau_hi:
        raise ValidationError(
            f"tau = {tau:g} is outside the useful window "
            f"[{tau_lo:g}, {tau_hi:g}] by more than 10x"
        )
    if tau < tau_lo or tau > tau_hi:
        warnings.warn(
            f"tau = {tau:g} is at the boundary of the useful window "
            f"[{tau_lo:g}, {tau_hi:g}]",
            stacklevel=2,
        )

    members = sample_ensemble(e)
    angle = 0.375 * c.omega * members[:, 2] * tau
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    s1 = members[:, 0].copy()
    members[:, 0] = cos_a * s1 - sin_a * members[:, 1]
    members[:, 1] = sin_a * s1 + cos_a * members[:, 1]

    cov = np.cov(members[:, 1], members[:, 2])
    half_tr = 0.5 * (cov[0, 0] + cov[1, 1])
    half_diff = 0.5 * (cov[0, 0] - cov[1, 1])
    radius = math.hypot(half_diff, cov[0, 1])
    lam_plus = half_tr + radius
    lam_minus = max(half_tr - radius, 0.0)
    # major-axis angle above the equator, in (-pi/2, pi/2]
    alpha = 0.5 * math.atan2(2.0 * cov[0, 1], cov[0, 0] - cov[1, 1])
    return SqueezeResult(
        covariance=cov,
        delta_plus=math.sqrt(lam_plus),
        delta_minus=math.sqrt(lam_minus),
        tilt_alpha=alpha,
        members=members,
    )


@dataclass(frozen=True)
class SelfTrappingResult:
    """Outcome of one circular-orbit run: did the circulation sense survive?"""

    s0: float
    trapped: bool
    min_s3: float

    @property
    def classification(self) -> str:
        return "self-trapped" if self.trapped else "rabi-flip"


def _run_from_pole(c: PendulumConfig, s0: float, t_end: float) -> SelfTrappingResult:
    dt = 0.04 / max(abs(c.delta_omega), 0.375 * c.omega * s0)
    traj = integrate(StokesState(0.0, 0.0, s0), c, FlowKind.COMBINED, t_end, dt)
    min_s3 = float(traj.states[:, 2].min())
    return SelfTrappingResult(s0=s0, trapped=min_s3 > 0.0, min_s3=min_s3)


def self_trapping_demo(
    c: PendulumConfig, s0_pair: tuple[float, float], t_end: float | None = None
) -> tuple[SelfTrappingResult, SelfTrappingResult]:
    """Run a sub- and a super-critical circular orbit and classify each.

    Requires a non-rotating, anisotropic configuration.  Starting on the
    pole, the orbit either reverses its circulation sense periodically
    (s3 changes sign) or stays trapped on one hemisphere of circulation.
    """
    if c.Omega_rot != 0.0 or c.delta_omega == 0.0:
        raise ValidationError("self-trapping needs Omega_rot = 0 and delta_omega != 0")
    if t_end is None:
        t_end = 40.0 / abs(c.delta_omega)
    return tuple(_run_from_pole(c, s0, t_end) for s0 in s0_pair)


def find_flip_trap_transition(
    c: PendulumConfig,
    s0_lo: float,
    s0_hi: float,
    rel_tol: float = 0.004,
    t_end: float | None = None,
) -> float:
    """Bisect the sphere radius separating flipping from trapped pole orbits.

    ``s0_lo`` must flip and ``s0_hi`` must trap; both are verified before
    bisection starts.
    """
    if c.Omega_rot != 0.0 or c.delta_omega == 0.0:
        raise ValidationError("self-trapping needs Omega_rot = 0 and delta_omega != 0")
    if t_end is None:
        t_end = 40.0 / abs(c.delta_omega)
    if _run_from_pole(c, s0_lo, t_end).trapped:
        raise ValidationError(f"s0_lo = {s0_lo:g} does not flip")
    if not _run_from_pole(c, s0_hi, t_end).trapped:
        raise ValidationError(f"s0_hi = {s0_hi:g} does not trap")
    lo, hi = s0_lo, s0_hi
    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _run_from_pole(c, mid, t_end).trapped:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
