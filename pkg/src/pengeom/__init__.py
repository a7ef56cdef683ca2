"""pengeom: exact geometry of polytope-norm penalized least squares.

Decides, with rational arithmetic, whether LASSO / SLOPE / sup-norm penalized
least squares (and basis pursuit) have unique minimizers for every response,
enumerates the accessible sign vectors and clustering models of a design
matrix, and constructs certified witness responses when uniqueness fails.
"""

from fractions import Fraction

from .analysis import (
    ANALYTIC,
    BOTH,
    GEOMETRIC,
    AccessibilityReport,
    Classification,
    GenericityReport,
    NonUniquenessWitness,
    UniquenessReport,
    accessible_sign_vectors,
    accessible_slope_models,
    check_uniqueness,
    check_uniqueness_bp,
    classify_response,
    genericity_experiment,
    null_set_projection,
)
from .exact import (
    Rational,
    RationalMatrix,
    kernel_basis,
    load_matrix,
    parse_rational,
    rank,
    rat,
    rat_str,
    vec,
)
from .geometry import (
    CapExceeded,
    Face,
    SignedPermutation,
    enumerate_exposed_faces,
    enumerate_models,
    face_intersects_rowspace,
    is_model,
    model_of,
    model_to_face,
    sign_to_crosspolytope_face,
    sign_to_cube_face,
    sign_vectors,
    signed_permutations,
)
from .norms import (
    PolytopeNorm,
    SlopeWeights,
    dual_ball_membership,
    dual_ball_vertices,
    dual_norm_value,
    l1_norm,
    norm_value,
    slope_norm,
    subdifferential_face,
    sup_norm,
)
from .solvers import (
    Certificate,
    Solution,
    SolverOptions,
    bp_certificate_holds,
    bp_dual_certificate,
    kkt_certify,
    norm_min_subject_to,
    prox_l1,
    prox_slope,
    solve_bp,
    solve_penalized,
)

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC",
    "AccessibilityReport",
    "BOTH",
    "CapExceeded",
    "Certificate",
    "Classification",
    "Face",
    "Fraction",
    "GEOMETRIC",
    "GenericityReport",
    "NonUniquenessWitness",
    "PolytopeNorm",
    "Rational",
    "RationalMatrix",
    "SignedPermutation",
    "SlopeWeights",
    "Solution",
    "SolverOptions",
    "UniquenessReport",
    "accessible_sign_vectors",
    "accessible_slope_models",
    "bp_certificate_holds",
    "bp_dual_certificate",
    "check_uniqueness",
    "check_uniqueness_bp",
    "classify_response",
    "dual_ball_membership",
    "dual_ball_vertices",
    "dual_norm_value",
    "enumerate_exposed_faces",
    "enumerate_models",
    "face_intersects_rowspace",
    "genericity_experiment",
    "is_model",
    "kernel_basis",
    "kkt_certify",
    "l1_norm",
    "load_matrix",
    "model_of",
    "model_to_face",
    "norm_min_subject_to",
    "norm_value",
    "null_set_projection",
    "parse_rational",
    "prox_l1",
    "prox_slope",
    "rank",
    "rat",
    "rat_str",
    "sign_to_crosspolytope_face",
    "sign_to_cube_face",
    "sign_vectors",
    "signed_permutations",
    "slope_norm",
    "solve_bp",
    "solve_penalized",
    "subdifferential_face",
    "sup_norm",
    "vec",
    "__version__",
]
