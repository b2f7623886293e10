"""Heat kernels, spectral bounds and stochastic completeness of weighted graphs.

Explicit finite graphs are handled by dense eigendecomposition of Dirichlet
balls; weakly spherically symmetric graphs reduce to tridiagonal radial
operators described by a :class:`SymmetricProfile`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .generators import (  # noqa: F401
    antitree_from_sizes,
    half_line,
    make_antitree,
    make_sym_tree,
    make_tree,
    sphere_cliques,
)
from .graph import (  # noqa: F401
    Layering,
    WeightedGraph,
    apply_formal_laplacian,
    average,
    build_graph,
    curvature,
    detect_weak_symmetry,
    extract_profile,
    layer,
    quadratic_form,
)
from .profile import (  # noqa: F401
    GrowthRule,
    SymmetricProfile,
    ball_stats,
    criterion,
    exterior_reduced_operator,
    reduced_operator,
    solve_recursion,
    validate_profile,
)
from .semigroup import (  # noqa: F401
    HeatKernelAt,
    Lambda0,
    MassAt,
    commutation_defect,
    decompose,
    exhaust,
    heat_apply,
    heat_kernel,
    lowest_eigenvalue,
    mass_function,
    restrict,
)
from .spectral import (  # noqa: F401
    certify_lower_bound,
    comparison_report,
    curvature_compare,
    essential_probe,
    lambda0_limit,
    li_estimate,
    spectrum_report,
    volume_bound,
)
from .stochastic import (  # noqa: F401
    classify,
    mass_deficit,
    potential_compare,
    sc_transfer,
    solution_boundedness,
)
from .verdict import Outcome, Verdict  # noqa: F401
