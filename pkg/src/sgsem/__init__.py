"""Multiple solutions of semilinear Dirichlet problems -Lap u = f(u) on rectangles.

Eigenfunction seeds are refined by Newton's method on a Legendre-Gauss-Lobatto
spectral discretization with interpolated nonlinear coefficients.
"""

from .analysis import (
    ConvergenceRecord,
    SolutionClass,
    classify,
    convergence_study,
    error_norms,
    export_field,
    reference_solution,
)
from .discretization import DiscreteSolution, TensorOperators, tensor_operators
from .eigen import EigenGroup, EigenPair, Normalization, RectDomain, eigen_group, laplace_eigenpairs
from .lgl import Lgl1D, assemble_stiffness_mass, lgl_nodes_weights
from .newton import NewtonConfig, continuation_solve, newton_solve
from .nonlinearity import Nonlinearity, cubic, make_nonlinearity, sine_gordon
from .seeds import (
    SeedGuess,
    enumerate_cubic_seeds,
    extend_seed,
    random_newton_search,
    seed_to_nodal,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRecord", "DiscreteSolution", "EigenGroup", "EigenPair", "Lgl1D",
    "NewtonConfig", "Nonlinearity", "Normalization", "RectDomain", "SeedGuess",
    "SolutionClass", "TensorOperators", "assemble_stiffness_mass", "classify",
    "continuation_solve", "convergence_study", "cubic", "eigen_group",
    "enumerate_cubic_seeds", "error_norms", "export_field", "extend_seed",
    "laplace_eigenpairs", "lgl_nodes_weights", "make_nonlinearity", "newton_solve",
    "random_newton_search", "reference_solution", "seed_to_nodal", "sine_gordon",
    "tensor_operators",
]
