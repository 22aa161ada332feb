"""Faddeev eigenfunctions, dbar-spectral data and Moutard-type transforms at fixed negative energy."""
from .dbar import (
    AnnulusGrid,
    LambdaField,
    ResidualReport,
    build_grid,
    check_dbar,
    check_dbar_pair,
    check_symmetries_B,
    check_symmetries_b,
    dbar_fd,
    observed_order,
)
from .errors import (
    BoundaryError,
    ConfigError,
    DivisionByZeroOmega,
    DomainError,
    MoutardError,
    NonConvergence,
    PathError,
    SeedInvalid,
    SingularPoint,
    StencilError,
)
from .green import (
    GreenEval,
    GreenMethod,
    QuadratureConfig,
    bessel_reference,
    check_dbar_green,
    green,
    green_contour_shift,
    green_direct,
    green_log_coeff,
    green_shift_values,
)
from .omega import (
    IntegrationPath,
    OmegaConstants,
    OmegaKind,
    check_omega_gradient,
    omega_closed,
    omega_integrate,
)
from .point import (
    B_from_b,
    B_point,
    SingularSet,
    a_point,
    b_point,
    psi_point,
    psi_star_point,
    singular_circles,
)
from .spectral import Domain, KVector, SpectralParam, classify, k_from_lambda, plane_wave, re_im_norm
from .transform import (
    MoutardSeed,
    ScenarioResult,
    moutard_B,
    moutard_psi,
    moutard_psi_star,
    run_annihilation,
    run_creation,
)

__version__ = "0.1.0"
