"""bslab: a numerical laboratory for horizontal kinetic-energy backscatter.

Linear spectra and critical thresholds of backscatter-augmented rotating
shallow water, an explicit-solution catalog across four fluid models with
independent PDE-residual verification, a dealiased pseudo-spectral 2D Euler
integrator demonstrating stable unbounded growth, and the bottom-drag
bifurcation analysis with pseudo-arclength continuation.
"""

from .params import BackscatterParams, PhysicalParams, WaveVector, perp
from .grid import GridSpec, SpectralField2D, to_physical, to_spectral
from .dispersion import (
    CriticalPoint,
    DispersionCoeffs,
    DispersionResult,
    KernelMode,
    StabilityClass,
    backscatter_symbol,
    classification_sweep,
    comoving_roots,
    critical_point,
    euler_linear_eigs,
    kernel_modes,
    sw_dispersion_coeffs,
    sw_dispersion_roots,
    tail_root,
)
from .errors import (
    BslabError,
    ComplianceError,
    ConvergenceError,
    DepthViolation,
    GridCompatibilityError,
    RangeError,
    SimulationDiverged,
    VerticalBranch,
)
from .flows import (
    IGWMode,
    KolmogorovMode,
    ParallelFlow,
    PlaneWaveFlow,
    PrimitiveMode,
    SuperposedFlow,
    angular_superpose,
    euler_plane_wave,
    igw_assemble,
    igw_modes,
    igw_special,
    kolmogorov_solve,
    parallel_flow,
    primitive_mode,
    radial_superpose,
    superpose_parallel_with_horizontal,
    sw_loci_map,
    sw_monochromatic,
)
from .residual import verify_residual
from .simulator import (
    Diagnostics,
    SimConfig,
    SimState,
    basis_mode,
    leray_project,
    mean_evolution_check,
    nonlinear_term,
    random_band_limited,
    run,
    step,
)
from .growth import GrowthReport, ScaleSplit, fit_rate, split_scales, \
    verify_growth_theorem
from .bifurcation import (
    BifParams,
    GWQuadratures,
    ReducedProfile,
    ge_amplitude,
    ge_profile,
    gw_amplitude_and_speed,
    gw_quadratures,
    lambda_expansion,
)
from .reduced import (
    BranchPoint,
    continue_branch,
    gw_travelling_solve,
    reduced_rhs,
    reduced_stability,
    reduced_steady_solve,
    reduced_time_evolve,
)

__version__ = "0.1.0"
