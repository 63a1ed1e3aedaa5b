"""Asymmetric Foucault pendulum dynamics in Stokes-parameter form.

The horizontal orbit of a slightly anisotropic spherical pendulum in a
rotating frame, averaged over one swing, reduces to a flow of the three
Stokes parameters on a Poincare sphere.  This package implements that
reduced model and everything around it: exact state conversions, the
conservative and damped flows with a self-auditing integrator, stationary
points and the critical radius where their number bifurcates, a full
spherical-pendulum reference integrator for validation, the collective-spin
(LMG-type) quantization whose spectra mirror the classical structure, and
scenario experiments (Zeno filtering, classical squeezing, self-trapping).
"""

from .core import (
    ADVISORY_RATE_RATIO,
    AmplitudePhase,
    ConvergenceError,
    DegenerateOrbitError,
    EllipseGeometry,
    Handedness,
    PendulumConfig,
    SlowRateAdvisory,
    StokesState,
    ValidationError,
    amplitudes_from_stokes,
    ellipse_from_stokes,
    observables,
    stokes_from_amplitudes,
    stokes_from_ellipse,
    stokes_from_trajectory,
)
from .dynamics import (
    FlowKind,
    Trajectory,
    airy_precession_rate,
    hamiltonian,
    integrate,
    max_stable_dt,
    rhs_conservative,
    rhs_damped,
)
from .full_model import (
    ComparisonReport,
    FullTrajectory,
    SphericalState,
    cartesian_from_ellipse,
    compare_reduced_full,
    full_rhs,
    integrate_full,
    integrate_full_polar,
    spherical_from_cartesian,
    stokes_series,
)
from .quantum import (
    DickeBasis,
    DosResult,
    LmgMapping,
    SpectrumResult,
    TridiagonalHamiltonian,
    build_hamiltonian,
    classical_dos,
    classical_energy_bin_edges,
    eigen_spectrum,
    lmg_map,
    quantum_dos,
    spectrum_sweep,
)
from .scenarios import (
    EnsembleSpec,
    SelfTrappingResult,
    SqueezeResult,
    ZenoProtocol,
    derotate_ensemble,
    find_flip_trap_transition,
    sample_ensemble,
    self_trapping_demo,
    squeeze_ensemble,
    zeno_run,
)
from .stationary import (
    Regime,
    RegionClassifier,
    Stability,
    StationaryPoint,
    StationarySet,
    classify_stability,
    critical_contact_s3,
    critical_s0,
    parabola_curvature_radius,
    separatrix_and_regions,
    stationary_points,
)

__version__ = "0.1.0"
