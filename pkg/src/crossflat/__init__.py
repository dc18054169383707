"""Numerical checks for Jacobi convolution kernels, spherical functions on
compact rank-one symmetric spaces, and restriction exponents on their products."""

from .special import (
    JacobiParams,
    AsymptoticFrame,
    jacobi_eval,
    jacobi_binomial,
    chebyshev_half_case,
    jacobi_theta_derivative,
    interior_main_term,
    edge_main_term,
    bessel_j,
)
from .spaces import (
    CrossSpace,
    sphere,
    real_projective,
    complex_projective,
    quaternionic_projective,
    octonionic_plane,
    catalog,
    spherical_eval,
    fourier_expansion,
    rep_dimension,
    laplace_eigenvalue,
)
from .torus import (
    PeriodicGrid,
    lp_norm_periodic,
    kernel_lp_norm,
    envelope_A,
    envelope_A_tilde,
    opnorm_l2_exact,
    opnorm_bracket,
    tensor_opnorm_upper,
    fit_exponent,
)
from .products import (
    ProductManifold,
    LatticeShell,
    enumerate_shell,
    extremizer_eval,
    extremizer_l2_norm,
    FlatSubmanifold,
    restriction_lp_norm,
    pointwise_lower_check,
    exponent_table,
    sharpness_report,
)

__version__ = "0.1.0"
