"""sphwass: SPH particle schemes with a Wasserstein convergence harness.

The package simulates a compressible medium (or an interacting swarm)
with two closely related smoothed-particle schemes, selected by a switch
``theta``: the symmetrized pairwise pressure form that conserves linear
and angular momentum exactly (``theta = 1``), and the direct
discretization of the continuum pressure gradient (``theta = 0``).
Particle solutions at increasing resolution are compared in the
Wasserstein-1 distance to estimate convergence rates.
"""

__version__ = "0.1.0"

from .forces import (
    EosPolytropic,
    ForceModel,
    MorseInteraction,
    QuadraticPotential,
    SingularDensityError,
    external_accel,
    f_theta,
    morse_force,
)
from .initial import (
    Box,
    InitialSpec,
    PiecewiseConstantDensity1D,
    equipartition,
    preset,
    rotation_velocity,
    sample_iid,
    select_h,
)
from .integrator import (
    IntegratorConfig,
    SimulationDivergedError,
    Trajectory,
    run,
    step,
)
from .kernels import Gaussian1D, WendlandCubic2D
from .sph import (
    DensityField,
    ParticleState,
    SupportDiagnostic,
    angular_momentum,
    build_neighbor_lists,
    check_support,
    compute_accelerations,
    compute_density,
    momentum,
    support_bound,
)
from .transport import (
    DiscreteMeasure,
    RateTable,
    TransportBudgetError,
    TransportPlan,
    convergence_rates,
    dual_certificate,
    sup_wasserstein_over_time,
    w1_1d_discrete,
    w1_1d_vs_density,
    w1_lp,
    wasserstein1,
)
from .experiments import (
    DensityProfile,
    ExperimentPlan,
    StudyDivergedError,
    StudyResult,
    density_profile,
    emit_report,
    run_convergence_study,
)
