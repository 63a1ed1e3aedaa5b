"""Stationary points of the combined flow, their stability, and the critical radius.

Setting the combined right-hand side to zero with a nonzero frequency split
forces s2 = 0 and ties s3 to s1 through

    s3 ((3/8) omega s1 - dw) = 2 Omega s1.

Eliminating s3 against the sphere constraint s1^2 + s3^2 = s0^2 yields the
quartic

    ((3/8) omega s1 - dw)^2 (s1^2 - s0^2) + 4 Omega^2 s1^2 = 0,

whose real roots in [-s0, s0] are the stationary s1 values.  Geometrically
the stationary points are where the sphere touches a parabolic cylinder of
constant H; the touch can become internal (unstable) only when the sphere
radius exceeds

    s0_crit = (8 / 3 omega) (|dw|^(2/3) + |2 Omega|^(2/3))^(3/2),

which this module also derives independently from the curvature radius of
the parabola (the cylinder's cross-section).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import PendulumConfig, StokesState, ValidationError
from .dynamics import hamiltonian, rhs_conservative

__all__ = [
    "Regime",
    "RegionClassifier",
    "Stability",
    "StationaryPoint",
    "StationarySet",
    "classify_stability",
    "critical_contact_s3",
    "critical_s0",
    "parabola_curvature_radius",
    "separatrix_and_regions",
    "stationary_points",
]

# Residual bound for a point to count as stationary: max |rhs| < this * omega * s0^2.
RESIDUAL_TOL = 1e-10
# Band around the critical radius inside which merging roots are not resolved.
CRITICAL_BAND = 0.01


class Stability(enum.Enum):
    STABLE_CENTER = "stable-center"
    UNSTABLE_SADDLE = "unstable-saddle"
    DEGENERATE = "degenerate"


class Regime(enum.Enum):
    TWO_POINT = "two-point"
    CRITICAL = "critical"
    FOUR_POINT = "four-point"
    SYMMETRIC_DEGENERATE = "symmetric-degenerate"


@dataclass(frozen=True)
class StationaryPoint:
    state: StokesState
    stability: Stability
    residual: float


@dataclass(frozen=True)
class StationarySet:
    """All stationary points at a given radius, with the regime summary.

    ``separatrix_h`` is present exactly when an unstable saddle exists.  For
    the symmetric pendulum (zero split) the unstable set is a whole circle
    of constant s3, reported through ``degenerate_circle_s3`` instead of as
    discrete points.
    """

    points: tuple[StationaryPoint, ...]
    s0_crit: float
    separatrix_h: float | None
    regime: Regime
    degenerate_circle_s3: float | None = None

    @property
    def saddle(self) -> StationaryPoint | None:
        for p in self.points:
            if p.stability is Stability.UNSTABLE_SADDLE:
                return p
        return None

    def to_json(self, path=None) -> str:
        doc = {
            "points": [
                {
                    "s1": p.state.s1,
                    "s2": p.state.s2,
                    "s3": p.state.s3,
                    "stability": p.stability.value,
                    "residual": p.residual,
                }
                for p in self.points
            ],
            "s0_crit": self.s0_crit,
            "separatrix_h": self.separatrix_h,
            "regime": self.regime.value,
            "degenerate_circle_s3": self.degenerate_circle_s3,
        }
        text = json.dumps(doc, indent=2)
        if path is not None:
            with open(path, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        return text


def critical_s0(c: PendulumConfig) -> float:
    """Critical sphere radius separating the two- and four-point regimes."""
    return (
        8.0
        / 3.0
        * (abs(c.delta_omega) ** (2.0 / 3.0) + abs(2.0 * c.Omega_rot) ** (2.0 / 3.0))
        ** 1.5
        / c.omega
    )


def parabola_curvature_radius(s3: float, c: PendulumConfig) -> float:
    """Curvature radius of the constant-H parabola s1(s3) at the given s3.

    Defined only for a nonzero frequency split; at zero split the parabolic
    cylinder degenerates into a pair of planes.
    """
    if c.delta_omega == 0.0:
        raise ValidationError(
            "zero frequency split: the cylinder degenerates to planes"
        )
    slope = 2.0 * c.Omega_rot / c.delta_omega - 0.375 * c.omega / c.delta_omega * s3
    return 8.0 * abs(c.delta_omega) / (3.0 * c.omega) * (1.0 + slope**2) ** 1.5


def critical_contact_s3(c: PendulumConfig) -> float:
    """s3 of the sphere-parabola contact at the critical radius.

    Equating the parabola's curvature radius with that of a circle centered
    on the s3 = 0 line, at equal slopes, gives
    s3 = (8 dw / 3 omega) (q + q^(1/3)) with q = 2 Omega / dw.
    """
    if c.delta_omega == 0.0:
        raise ValidationError("zero frequency split has no parabolic contact")
    q = 2.0 * c.Omega_rot / c.delta_omega
    cbrt_q = math.copysign(abs(q) ** (1.0 / 3.0), q)
    return 8.0 * c.delta_omega / (3.0 * c.omega) * (q + cbrt_q)


def _tangent_jacobian(state: StokesState, c: PendulumConfig) -> np.ndarray:
    """Jacobian of the conservative flow restricted to the sphere's tangent plane."""
    tw = 0.375 * c.omega
    j = np.array(
        [
            [0.0, 2.0 * c.Omega_rot - tw * state.s3, -tw * state.s2],
            [-2.0 * c.Omega_rot + tw * state.s3, 0.0, -c.delta_omega + tw * state.s1],
            [0.0, c.delta_omega, 0.0],
        ]
    )
    n = state.as_array()
    n /= np.linalg.norm(n)
    # orthonormal basis of the tangent plane
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, seed)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    basis = np.column_stack([e1, e2])
    return basis.T @ j @ basis


def _residual(state: StokesState, c: PendulumConfig) -> float:
    return max(abs(v) for v in rhs_conservative(state, c))


def classify_stability(p: StokesState, c: PendulumConfig) -> Stability:
    """Classify a stationary point from tangent-plane Jacobian eigenvalues.

    Purely imaginary pair -> stable center; real pair of opposite sign ->
    unstable saddle; both negligible -> degenerate.  Raises if the point is
    not stationary to within the residual tolerance.
    """
    s0 = p.s0
    tol = RESIDUAL_TOL * c.omega * s0**2
    res = _residual(p, c)
    if res > tol:
        raise ValidationError(
            f"point is not stationary: residual {res:g} exceeds {tol:g}"
        )
    eigs = np.linalg.eigvals(_tangent_jacobian(p, c))
    if np.all(np.abs(eigs) < 1e-10 * c.omega):
        return Stability.DEGENERATE
    if np.all(np.abs(eigs.imag) < 1e-10 * c.omega) and eigs.real.min() < 0 < eigs.real.max():
        return Stability.UNSTABLE_SADDLE
    if np.all(np.abs(eigs.real) < 1e-8 * c.omega):
        return Stability.STABLE_CENTER
    raise ValidationError(f"unclassifiable eigenvalue pair {eigs}")


def _quartic_roots_s1(c: PendulumConfig, s0: float) -> np.ndarray:
    """Real roots in [-s0, s0] of the s3-eliminated stationarity quartic."""
    k = 0.375 * c.omega
    d = c.delta_omega / k
    w = 2.0 * c.Omega_rot / k
    # ((s1 - d)^2 (s1^2 - s0^2) + w^2 s1^2 = 0) expanded, monic in s1
    coeffs = np.array(
        [
            1.0,
            -2.0 * d,
            d * d + w * w - s0 * s0,
            2.0 * d * s0 * s0,
            -d * d * s0 * s0,
        ]
    )
    roots = np.roots(coeffs)  # companion-matrix eigenvalues

    poly = np.polynomial.Polynomial(coeffs[::-1])
    dpoly = poly.deriv()
    scale = max(s0, abs(d)) ** 4 + s0**4
    out = []
    for r in roots:
        if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
            continue
        x = r.real
        # one Newton polish step against the exact polynomial
        fp = dpoly(x)
        if fp != 0.0:
            x -= poly(x) / fp
        if abs(x) > s0 * (1.0 + 1e-9):
            continue
        if abs(poly(x)) > 1e-10 * scale:
            continue
        out.append(min(max(x, -s0), s0))
    # collapse duplicates (double roots near merges)
    out.sort()
    dedup: list[float] = []
    for x in out:
        if not dedup or abs(x - dedup[-1]) > 1e-9 * s0:
            dedup.append(x)
    return np.array(dedup)


def stationary_points(c: PendulumConfig, s0: float) -> StationarySet:
    """Locate and classify all stationary points on the sphere of radius s0."""
    if not (s0 > 0):
        raise ValidationError(f"s0 must be > 0, got {s0}")
    s0c = critical_s0(c)

    if c.delta_omega == 0.0:
        points = []
        for sign in (1.0, -1.0):
            st = StokesState(0.0, 0.0, sign * s0)
            points.append(
                StationaryPoint(st, classify_stability(st, c), _residual(st, c))
            )
        # the unstable circle |s3| = 16 Omega / (3 omega) exists whenever it
        # fits on the sphere; for Omega = 0 it is the whole equator
        circle_s3 = 16.0 * c.Omega_rot / (3.0 * c.omega)
        if abs(circle_s3) < s0:
            rep = StokesState(math.sqrt(s0**2 - circle_s3**2), 0.0, circle_s3)
            return StationarySet(
                points=tuple(points),
                s0_crit=s0c,
                separatrix_h=hamiltonian(rep, c),
                regime=Regime.SYMMETRIC_DEGENERATE,
                degenerate_circle_s3=circle_s3,
            )
        return StationarySet(
            points=tuple(points),
            s0_crit=s0c,
            separatrix_h=None,
            regime=Regime.TWO_POINT,
        )

    near_critical = abs(s0 - s0c) <= CRITICAL_BAND * s0c

    k = 0.375 * c.omega
    if c.Omega_rot == 0.0:
        s1_star = c.delta_omega / k
        s1_roots = [s0, -s0]
        if abs(s1_star) < s0:
            s1_roots.append(s1_star)
    else:
        s1_roots = list(_quartic_roots_s1(c, s0))

    points = []
    for s1 in s1_roots:
        denom = k * s1 - c.delta_omega
        if c.Omega_rot == 0.0 and abs(denom) <= 1e-12 * abs(c.delta_omega):
            # the extra pair at s1 = 8 dw / (3 omega), s3 = +-sqrt(s0^2 - s1^2)
            for sign in (1.0, -1.0):
                st = StokesState(s1, 0.0, sign * math.sqrt(s0**2 - s1**2))
                points.append(
                    StationaryPoint(st, classify_stability(st, c), _residual(st, c))
                )
            continue
        s3 = 2.0 * c.Omega_rot * s1 / denom if c.Omega_rot != 0.0 else 0.0
        st = StokesState(s1, 0.0, s3)
        res = _residual(st, c)
        tol = RESIDUAL_TOL * c.omega * s0**2
        if res > tol:
            if near_critical:
                # merging roots cannot be resolved; report the cluster as degenerate
                points.append(StationaryPoint(st, Stability.DEGENERATE, res))
                continue
            raise ValidationError(
                f"root polish failed: residual {res:g} exceeds {tol:g} "
                f"at s1 = {s1:.17g}"
            )
        points.append(StationaryPoint(st, classify_stability(st, c), res))

    saddles = [p for p in points if p.stability is Stability.UNSTABLE_SADDLE]
    if near_critical:
        regime = Regime.CRITICAL
    elif len(points) >= 4 and len(saddles) == 1:
        regime = Regime.FOUR_POINT
    elif len(points) == 2 and not saddles:
        regime = Regime.TWO_POINT
    else:
        raise ValidationError(
            f"inconsistent stationary structure: {len(points)} points, "
            f"{len(saddles)} saddles at s0 = {s0:g} (crit {s0c:g})"
        )
    separatrix_h = hamiltonian(saddles[0].state, c) if len(saddles) == 1 else None
    return StationarySet(
        points=tuple(points),
        s0_crit=s0c,
        separatrix_h=separatrix_h,
        regime=regime,
    )


@dataclass(frozen=True)
class RegionClassifier:
    """Maps on-sphere states to the circulation region they belong to.

    In the four-point regime the separatrix splits the sphere into a central
    region around the lone center on one side of the separatrix energy and
    two trapped lobes on the other, distinguished by the sign of
    s3 - s3(saddle).  Conserved H makes the label constant along any
    conservative trajectory.
    """

    separatrix_h: float
    saddle_s3: float
    lobes_above: bool
    config: PendulumConfig
    boundary_tol: float

    def region_of(self, s: StokesState) -> str:
        h = hamiltonian(s, self.config)
        if abs(h - self.separatrix_h) <= self.boundary_tol:
            return "separatrix"
        on_lobe_side = h > self.separatrix_h if self.lobes_above else h < self.separatrix_h
        if not on_lobe_side:
            return "central"
        return "lobe+" if s.s3 > self.saddle_s3 else "lobe-"


def separatrix_and_regions(sset: StationarySet, c: PendulumConfig) -> RegionClassifier:
    """Build the region classifier for a four-point stationary set."""
    if sset.regime is not Regime.FOUR_POINT:
        raise ValidationError(
            f"region classification needs the four-point regime, got {sset.regime.value}"
        )
    saddle = sset.saddle
    assert saddle is not None and sset.separatrix_h is not None
    centers = [p for p in sset.points if p.stability is Stability.STABLE_CENTER]
    above = [p for p in centers if hamiltonian(p.state, c) > sset.separatrix_h]
    if len(above) == 2:
        lobes_above = True
    elif len(above) == 1:
        lobes_above = False
    else:
        raise ValidationError("could not orient the trapped lobes against H")
    h_scale = max(abs(hamiltonian(p.state, c)) for p in sset.points)
    return RegionClassifier(
        separatrix_h=sset.separatrix_h,
        saddle_s3=saddle.state.s3,
        lobes_above=lobes_above,
        config=c,
        boundary_tol=1e-10 * max(1.0, h_scale),
    )
