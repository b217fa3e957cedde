"""Backward heat reconstruction with quasi-boundary value regularization.

Recovers the initial state of a Dirichlet heat problem from noisy final
data. Four regularized final conditions are implemented; two of them give
the all-at-once space-time system an omega-circulant time coupling that an
FFT diagonalization solves directly in quasi-linear time. A generic sparse
LU baseline, a per-mode closed-form oracle, continuum series analysis, and
a benchmark CLI round out the package.
"""

from .analysis import (
    NoisyData,
    ProblemSpec,
    SpectralCoefficients,
    add_noise,
    error_bound,
    exact_solution_ex1,
    exact_solution_ex2,
    get_problem,
    regularized_series,
    stability_bound,
    theorem1_bound,
)
from .baseline import (
    DEFAULT_NNZ_BUDGET,
    march_forward,
    solve_sparse_lu,
    solve_spectral_oracle,
)
from .bench import (
    ExperimentConfig,
    SolveReport,
    emit_csv,
    emit_profile,
    l2_error,
    parse_csv,
    resolve_alpha,
    run_experiment,
)
from .circulant import (
    CirculantDiagonalization,
    ImaginaryResidueError,
    TimeGrid,
    diagonalize,
    from_eigenspace,
    step_matrix,
    to_eigenspace,
)
from .methods import (
    AllAtOnceSystem,
    MethodKind,
    MethodSpec,
    SolveResult,
    alpha_rule,
    assemble,
    residual,
)
from .pint import solve_pint, step_b_parallel
from .space import (
    LaplacianOperator,
    SingularShiftError,
    SpatialGrid,
    SpatialSpectrum,
    build_grid,
    grid_norm,
    laplacian_eigenvalues,
    shifted_solve,
    sine_transform,
)

__version__ = "0.1.0"
