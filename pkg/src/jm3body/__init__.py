"""Numerical geometric mechanics of the planar three-body problem.

The gravitational three-body flow at a fixed energy is, up to a
reparametrization of time, the geodesic flow of the Jacobi-Maupertuis
metric on the classically allowed region.  This package builds that
metric on the center-of-mass configuration space and on its rotation and
scaling quotients, for the attractive 1/r**2 potential and the Newtonian
1/r potential, and provides curvature tensors, inequality scans,
trajectory/geodesic integrators, collision probes and geodesic-stability
diagnostics on top of it, together with a small command-line interface.
"""

from .analysis import (
    FieldSample,
    GridSpec,
    InequalityResult,
    PowerSums,
    ScanReport,
    SuiteReport,
    VerifyConfig,
    curvature_field_sample,
    inequality_scan,
    power_sums,
    run_verification_suite,
)
from .coords import (
    ChartPoint,
    MassConfig,
    PlanarConfig,
    Space,
    hopf_from_rescaled,
    jacobi_from_positions,
    positions_from_jacobi,
    rescaled_from_hopf,
    shape_cartesian,
    special_point,
    theta_phi_from_hopf,
)
from .curvature import (
    riemann,
    scalar_closed_form,
    scalar_closed_grid,
    scalar_curvature,
    sectional,
    special_limits,
)
from .dynamics import (
    TRIPLE_TARGET,
    FlowComparison,
    LengthProfile,
    PathRecord,
    binary_target,
    collision_distance_probe,
    compare_trajectory_geodesic,
    homothety_collision_time,
    integrate_geodesic,
    integrate_trajectory,
    lagrange_jacobi_residual,
    power_law_length_profile,
)
from .errors import (
    ChartSingular,
    CollisionPole,
    DegeneratePlane,
    GeometryError,
    InvalidQuotient,
    OutsideHill,
    ZeroSize,
)
from .metrics import (
    MetricField,
    NearCollisionKind,
    PotentialKind,
    kepler_metric,
    near_collision_metric,
    oscillator_metric,
)
from .stability import (
    JacobiEvolution,
    StabilityReport,
    homothety_tensor_closed_form,
    jacobi_field_evolve,
    rotation_tensor_closed_form,
    stability_tensor,
    stability_verdicts,
)

__version__ = "0.1.0"
