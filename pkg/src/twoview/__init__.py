"""Exact two-view projective geometry.

Decides, for a set of 2D point correspondences, whether a projective
reconstruction exists, and constructs the certificates: a rank-2
fundamental matrix, a finite camera pair, a finitizing homography, and
triangulated world points whose reprojections match the inputs up to
scale.
"""

__version__ = "0.1.0"

from .decision import (
    Verdict,
    VerdictStatus,
    decide,
    design_matrix,
    fundamental_candidates,
    reconstruct,
    verify_certificates,
)
from .epipolar import (
    FundamentalMatrix,
    Regularity,
    camera_from_fundamental,
    epipoles,
    finite_pair_from_fundamental,
    fundamental_from_cameras,
    pair_regularity,
    residual,
    residuals,
    triangulate,
)
from .estimators import PlanarHomographyAlignment, TwoViewReconstructor
from .exceptions import (
    AtCenterError,
    CoincidentCamerasError,
    ConfigConflictError,
    EpipolarViolatedError,
    IrregularPairError,
    NotFiniteError,
    NotReconstructableError,
    RankViolationError,
    SearchExhaustedError,
    TwoViewError,
    WitnessInvalidError,
    ZeroVectorError,
)
from .geometry import (
    Camera,
    camera_center,
    canonical_homography,
    coincident,
    identity_camera,
    is_finite_point,
    lift,
    project,
    verify_reconstruction,
)
from .interchange import InterchangeDocument, emit, parse
from .numerics import (
    DEFAULT_TOLERANCES,
    Tolerances,
    find_avoiding_vector,
    normalize_hom,
    nullspace,
    proportional,
    rank_tol,
    skew,
)
from .reconstruction import (
    Reconstruction,
    build_reconstruction,
    canonicalize,
    coincident_reconstruction,
    finitize,
    projective_equivalence,
)
from .synth import SceneConfig, expected_status, synthesize_scene

__all__ = [
    "AtCenterError",
    "Camera",
    "CoincidentCamerasError",
    "ConfigConflictError",
    "DEFAULT_TOLERANCES",
    "EpipolarViolatedError",
    "FundamentalMatrix",
    "InterchangeDocument",
    "IrregularPairError",
    "NotFiniteError",
    "NotReconstructableError",
    "PlanarHomographyAlignment",
    "RankViolationError",
    "Reconstruction",
    "Regularity",
    "SceneConfig",
    "SearchExhaustedError",
    "Tolerances",
    "TwoViewError",
    "TwoViewReconstructor",
    "Verdict",
    "VerdictStatus",
    "WitnessInvalidError",
    "ZeroVectorError",
    "build_reconstruction",
    "camera_center",
    "camera_from_fundamental",
    "canonical_homography",
    "canonicalize",
    "coincident",
    "coincident_reconstruction",
    "decide",
    "design_matrix",
    "emit",
    "epipoles",
    "expected_status",
    "find_avoiding_vector",
    "finite_pair_from_fundamental",
    "finitize",
    "fundamental_candidates",
    "fundamental_from_cameras",
    "identity_camera",
    "is_finite_point",
    "lift",
    "normalize_hom",
    "nullspace",
    "pair_regularity",
    "parse",
    "project",
    "projective_equivalence",
    "proportional",
    "rank_tol",
    "reconstruct",
    "residual",
    "residuals",
    "skew",
    "synthesize_scene",
    "triangulate",
    "verify_certificates",
    "verify_reconstruction",
]
