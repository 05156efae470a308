"""Patch-reconstruction interior-penalty DG for biharmonic interface problems.

Solves Delta(beta Delta u) = f on a rectangle with the coefficient beta
jumping across a smooth closed curve, on unfitted triangular meshes. One
scalar unknown lives at each uncut element barycenter; per-element
polynomials of degree m are reconstructed by constrained least squares
over neighborhood patches, and the fourth-order operator is discretized
with a symmetric interior-penalty form that enforces the interface jump
data weakly.
"""

from .analysis import (ConvergenceTable, ErrorReport, energy_norms, eoc,
                       l2_error, norm_equivalence_probe)
from .cli import RunConfig, read_csv, run_convergence, write_csv
from .estimator import InterfaceSolver
from .exceptions import (AssumptionViolation, ConfigError, NoConvergence,
                         NotPositiveDefinite, PatchDGError, PatchTooSmall,
                         RankDeficient, SingularMatrix)
from .geometry import (CircleLevelSet, EllipseLevelSet, StarLevelSet,
                       classify, interface_length, make_level_set, quad_bulk,
                       quad_face, quad_interface)
from .mesh import (Mesh, generate_structured, load_mesh, refine_uniform,
                   save_mesh)
from .problems import NamedProblem, get_problem, problem_names
from .reconstruction import ReconstructionSpace, build_space
from .solve import solve_spd, write_system
from .system import (LinearSystem, PenaltyConfig, ProblemSpec,
                     assemble_bilinear, assemble_linear, assemble_system,
                     galerkin_residual)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation", "CircleLevelSet", "ConfigError",
    "ConvergenceTable", "EllipseLevelSet", "ErrorReport", "InterfaceSolver",
    "LinearSystem", "Mesh", "NamedProblem", "NoConvergence",
    "NotPositiveDefinite", "PatchDGError", "PatchTooSmall", "PenaltyConfig",
    "ProblemSpec", "RankDeficient", "ReconstructionSpace", "RunConfig",
    "SingularMatrix", "StarLevelSet", "assemble_bilinear", "assemble_linear",
    "assemble_system", "build_space", "classify", "energy_norms", "eoc",
    "galerkin_residual", "generate_structured", "get_problem",
    "interface_length", "l2_error", "load_mesh", "make_level_set",
    "norm_equivalence_probe", "problem_names", "quad_bulk", "quad_face",
    "quad_interface", "read_csv", "refine_uniform", "run_convergence",
    "save_mesh", "solve_spd", "write_csv", "write_system",
]
