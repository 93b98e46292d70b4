"""Harmonic span, slit maps and variation formulas for planar domains."""

from .bie import (
    HarmonicField,
    complex_gradient,
    evaluate,
    green_function,
    solve_dirichlet,
    solve_modified_dirichlet,
    solve_neumann,
)
from .domain import (
    MarkedDomain,
    build_curve,
    circle_coeffs,
    contains,
    disk,
    load_domain,
    make_domain,
    sample_boundary,
)
from .errors import *  # noqa: F401,F403
from .expr import parse
from .principal import (
    PrincipalPair,
    build_H,
    build_slit_map,
    compute_principal_pair,
    convexity_check,
    e_log_area,
    eval_F,
    extract_slit_data,
)
from .span import (
    check_span_distance_identity,
    exhaustion_sequence,
    harmonic_span,
    poincare_distance,
    s_function_grid,
)
from .variation import (
    DomainFamily,
    eval_k1,
    eval_k2,
    family,
    fd_derivative,
    first_variation,
    load_family,
    logcosh_subharmonicity,
    rigidity_check,
    second_variation_span,
    sfunction_psh_check,
    subharmonicity_scan,
)

__version__ = "0.1.0"
