"""Flat unitary bundles on punctured surfaces, numerically.

Representations of punctured-surface groups with peripheral images in
prescribed conjugacy classes, their twisted-cohomology tangent spaces,
the symplectic pairing against the relative fundamental class, and
order-by-order deformations with explicit obstruction residuals.
"""

from .cohomology import (
    AnalysisReport,
    Subspace,
    analyze,
    centralizer_dimension,
    cone_h2_trivial_rank,
    expected_dimension,
    h1_basis,
    is_irreducible,
    parabolic_tangent_basis,
    relative_h2_dim,
)
from .corpus import (
    CorpusInstance,
    build_corpus,
    obstructed_instance,
    smooth_instance,
    tangent_direction,
    witness_representation,
)
from .deformation import (
    DeformationState,
    MatrixSeries,
    build_deformation,
    conjugation_state,
    verify_deformation,
)
from .errors import (
    NearSingularError,
    NoConvergenceError,
    NotParabolicError,
    NotSmoothError,
    NumericalRankError,
    ObstructionFound,
    ReducibleError,
    SurfrepError,
)
from .pairing import GramMatrix, gram_matrix, lift_to_cone, symplectic_form
from .presentation import (
    Presentation,
    Representation,
    SurfaceData,
    standard_presentation,
)
from .serialize import TOOL_VERSION as __version__
from .solver import SolveResult, SolverConfig, solve
from .unitary import ConjugacyClass

__all__ = [
    "AnalysisReport",
    "ConjugacyClass",
    "CorpusInstance",
    "DeformationState",
    "GramMatrix",
    "MatrixSeries",
    "NearSingularError",
    "NoConvergenceError",
    "NotParabolicError",
    "NotSmoothError",
    "NumericalRankError",
    "ObstructionFound",
    "Presentation",
    "ReducibleError",
    "Representation",
    "SolveResult",
    "SolverConfig",
    "Subspace",
    "SurfaceData",
    "SurfrepError",
    "analyze",
    "build_corpus",
    "build_deformation",
    "centralizer_dimension",
    "cone_h2_trivial_rank",
    "conjugation_state",
    "expected_dimension",
    "gram_matrix",
    "h1_basis",
    "is_irreducible",
    "lift_to_cone",
    "obstructed_instance",
    "parabolic_tangent_basis",
    "relative_h2_dim",
    "smooth_instance",
    "solve",
    "symplectic_form",
    "tangent_direction",
    "verify_deformation",
    "witness_representation",
    "__version__",
]
