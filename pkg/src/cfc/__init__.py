"""Compressive Fourier collocation for periodic diffusion-reaction equations.

Solves -div(a grad u) + rho u = f on the d-dimensional torus by collocating at
m random points and recovering a sparse coefficient vector over a hyperbolic
cross Fourier expansion, with OMP, adaptive lower OMP and square-root LASSO
recovery, plus the theory-derived diagnostics used to validate the pipeline.
"""

__version__ = "0.1.0"

PRNG_IDENTITY = "numpy Philox4x64-10, key = (seed, stream)"

from .multiindex import (  # noqa: F401
    IndexSet,
    IndexSetTooLarge,
    NotLowerError,
    enumerate_hyperbolic_cross,
    is_lower,
    reduced_margin,
    reflection_family,
)
from .basis import fourier_eval, rescale_factor, synthesize, synthesize_many  # noqa: F401
from .problem import (  # noqa: F401
    ConfigError,
    DiffusionCoefficient,
    ExactSolution,
    ProblemSpec,
    constant_diffusion,
    example_solution,
    manufactured_forcing,
    manufactured_problem,
    paper_diffusion,
)
from .collocation import (  # noqa: F401
    CollocationSystem,
    SamplePlan,
    assemble,
    evaluation_points,
    extend_columns,
    sample_points,
)
from .recovery import (  # noqa: F401
    AdaptiveCaps,
    SparseSolution,
    SrLassoConfig,
    adaptive_lower_omp,
    lambda_range,
    least_squares_on_support,
    omp,
    sr_lasso,
)
from .analysis import (  # noqa: F401
    RieszConstants,
    gershgorin_interval,
    gram_eigenvalues,
    gram_matrix,
    riesz_constants,
    sample_complexity,
    sobolev_norms,
)
from .evaluation import ErrorReport, geometric_stats, relative_l2_error  # noqa: F401
