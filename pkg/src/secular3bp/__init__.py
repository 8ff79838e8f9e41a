"""Double-averaged inner elliptic restricted three-body problem.

Closed-form secular potentials and linear-stability quadratic forms, a
brute-force double-averaging oracle that audits them, and phase-portrait
generation for the planar and linearized out-of-plane flows.
"""

from .averaging import AveragedValue, QuadratureGrid, average_over_l, converge, double_average
from .dynamics import (
    Classification,
    EllipseCurve,
    PlanarState,
    Trajectory,
    WPortrait,
    classify_level,
    equilibrium_state,
    integrate_trajectory,
    level_curve,
    linearized_normal_flow,
    planar_hamiltonian,
    planar_state_from_theta_e,
    planar_vector_field,
    separatrix_level,
    theta_e_of_state,
    w_portrait,
)
from .elements import (
    DelaunayState,
    InertialPosition,
    Normalization,
    OrbitalElements,
    PerifocalPosition,
    PerturberConfig,
    PoincareState,
    delaunay_from_elements,
    delaunay_from_poincare,
    elements_from_delaunay,
    perifocal_position,
    planet_position,
    poincare_from_delaunay,
    reduce_angle,
    rotate_to_inertial,
    rotation_matrix,
    shell_p3q3,
    solve_kepler,
)
from .errors import (
    DomainError,
    LevelNotAttainedError,
    NoEquilibriumError,
    QuadratureError,
    SingularityError,
)
from .oracle import (
    OracleReport,
    TruncationFinding,
    ValidationReport,
    harmonic_residuals,
    harmonics_in_Omega,
    indirect_average,
    recover_quadratic_form,
    recovery_report,
    run_validation,
    truncation_audit,
    ubar_on_shell,
)
from .potential import (
    InteractionTerms,
    KernelKind,
    exact_kernel,
    indirect_term,
    m_terms,
    truncated_kernel,
)
from .secular import (
    QuadraticForm2,
    Regime,
    SecularParams,
    StabilityVerdict,
    coeffs_apsidal,
    coeffs_general,
    coeffs_small_inclination,
    det_general,
    det_general_terms,
    det_small_inclination,
    det_small_inclination_terms,
    equilibrium_eccentricity,
    rbar_quadrature,
    rbar_series,
    rbar_series_e_derivative,
    stability_verdict,
)

__version__ = "0.1.0"
