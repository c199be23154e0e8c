"""Fundamental matrices, epipoles, pair regularity and exact triangulation.

For cameras (I | 0) and (A | b) with A nonsingular and b != 0, the matrix
[b]x A has rank two and annihilates every correspondence the cameras can
explain. Conversely, a rank-2 matrix F satisfying the constraints yields a
finite non-coincident camera pair, and a pair (x, y) triangulates under it
exactly when x is an epipole of the first camera if and only if y is an
epipole of the second. The two mixed cases (exactly one side an epipole)
satisfy the epipolar constraint trivially yet admit no world point; they
are what the regularity check rejects.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .exceptions import (
    CoincidentCamerasError,
    EpipolarViolatedError,
    IrregularPairError,
    NotFiniteError,
    RankViolationError,
)
from .geometry import IDENTITY_CAMERA_MATRIX, Camera, lift
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
from .validation import check_image_point, check_square, check_vector


class Regularity(Enum):
    """Outcome of the mixed-epipole check for one pair."""

    REGULAR = "regular"
    IRREGULAR_LEFT = "irregular-left"    # x is an epipole, y is not
    IRREGULAR_RIGHT = "irregular-right"  # y is an epipole, x is not


class FundamentalMatrix:
    """A 3x3 matrix certified to have rank exactly two, with its epipoles.

    e1 generates the right kernel (first image), e2 the left kernel
    (second image); both are normalized. The stored arrays are read-only.
    """

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOLERANCES):
        F = check_square(matrix, 3, "fundamental matrix").copy()
        if rank_tol(F, tol) != 2:
            raise RankViolationError("fundamental matrix must have rank exactly two")
        F.flags.writeable = False
        self.matrix = F
        self.tol = tol
        self.e1 = normalize_hom(nullspace(F, tol)[:, 0])
        self.e2 = normalize_hom(nullspace(F.T, tol)[:, 0])
        self.e1.flags.writeable = False
        self.e2.flags.writeable = False

    def conditioning(self) -> float:
        """sigma_2 / sigma_1: how far the matrix is from rank one."""
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return float(s[1] / s[0])

    def __repr__(self):
        return f"FundamentalMatrix(matrix={self.matrix.tolist()!r})"


def _check_identity_first(camera1: Camera, tol: Tolerances):
    if not proportional(camera1.matrix.ravel(), IDENTITY_CAMERA_MATRIX.ravel(), tol):
        raise ValueError("first camera must be proportional to (I | 0)")


def _b_is_zero(A: np.ndarray, b: np.ndarray, tol: Tolerances) -> bool:
    scale = np.linalg.norm(np.hstack([A, b[:, None]]))
    return np.linalg.norm(b) <= tol.rank_rel * scale


def fundamental_from_cameras(camera1: Camera, camera2: Camera,
                             tol: Tolerances = DEFAULT_TOLERANCES,
                             t=None) -> FundamentalMatrix:
    """Fundamental matrix of a finite canonical camera pair.

    Non-coincident pairs (b != 0) give [b]x A. Coincident pairs (b = 0)
    give [t]x A for an arbitrary nonzero t, since A itself maps first
    image points onto second image points; t defaults to (0, 0, 1) for
    determinism and is retried against the rank certificate.
    """
    _check_identity_first(camera1, tol)
    if not camera2.is_finite:
        raise NotFiniteError("second camera must be finite")
    A = camera2.A
    b = camera2.b
    if not _b_is_zero(A, b, tol):
        return FundamentalMatrix(skew(b) @ A, tol)
    candidates = [check_vector(t, 3, "t")] if t is not None else []
    candidates += [np.array([0.0, 0.0, 1.0]), *np.eye(3), np.ones(3)]
    for axis in candidates:
        if np.linalg.norm(axis) == 0.0:
            continue
        try:
            return FundamentalMatrix(skew(axis) @ A, tol)
        except RankViolationError:
            continue
    raise RankViolationError("no axis produced a certified rank-2 matrix")


def epipoles(camera2: Camera, tol: Tolerances = DEFAULT_TOLERANCES):
    """Epipoles (e1, e2) = (A^-1 b, b) of the pair ((I | 0), (A | b)).

    e1 spans the right kernel and e2 the left kernel of [b]x A. Raises
    NotFiniteError for singular A and CoincidentCamerasError for b = 0.
    """
    if not camera2.is_finite:
        raise NotFiniteError("second camera must be finite")
    A = camera2.A
    b = camera2.b
    if _b_is_zero(A, b, tol):
        raise CoincidentCamerasError("coincident cameras have no epipoles")
    e1 = normalize_hom(np.linalg.solve(A, b))
    e2 = normalize_hom(b)
    return e1, e2


def residual(F, x, y) -> float:
    """Normalized epipolar residual |y^T F x| / (||F|| ||x^|| ||y^||).

    F may be a FundamentalMatrix or a raw 3x3 array. The pair satisfies
    the epipolar constraint exactly when the residual is at most
    residual_abs.
    """
    M = F.matrix if isinstance(F, FundamentalMatrix) else check_square(F, 3, "F")
    xh = lift(check_image_point(x, "x"))
    yh = lift(check_image_point(y, "y"))
    scale = np.linalg.norm(M) * np.linalg.norm(xh) * np.linalg.norm(yh)
    if scale == 0.0:
        raise ValueError("residual is undefined for a zero matrix")
    return float(abs(yh @ M @ xh) / scale)


def residuals(F, correspondences) -> np.ndarray:
    """Vectorized residual over an (m, 4) correspondence array."""
    M = F.matrix if isinstance(F, FundamentalMatrix) else check_square(F, 3, "F")
    corrs = np.asarray(correspondences, dtype=float)
    xs = lift(corrs[:, :2])
    ys = lift(corrs[:, 2:])
    values = np.abs(np.einsum("ij,jk,ik->i", ys, M, xs))
    scale = np.linalg.norm(M) * np.linalg.norm(xs, axis=1) * np.linalg.norm(ys, axis=1)
    return values / scale


def pair_regularity(A, b, x, y, tol: Tolerances = DEFAULT_TOLERANCES) -> Regularity:
    """Classify a pair by which of its points are epipoles.

    The pair is irregular when exactly one of [b]x A x^ = 0 (x is an
    epipole of the first camera) and y^T [b]x = 0 (y is an epipole of the
    second) holds. Zero-tests compare against rank_rel times the natural
    scale of each product; both scales carry ||b|| so that rescaling b
    cannot change the classification.
    """
    A = check_square(A, 3, "A")
    b = check_vector(b, 3, "b")
    if _b_is_zero(A, b, tol):
        raise CoincidentCamerasError("regularity is undefined for b = 0")
    xh = lift(check_image_point(x, "x"))
    yh = lift(check_image_point(y, "y"))
    left = skew(b) @ A @ xh
    right = np.cross(yh, b)  # transpose of y^T [b]x
    nb = np.linalg.norm(b)
    left_zero = np.linalg.norm(left) <= tol.rank_rel * nb * np.linalg.norm(A) * np.linalg.norm(xh)
    right_zero = np.linalg.norm(right) <= tol.rank_rel * nb * np.linalg.norm(yh)
    if left_zero and not right_zero:
        return Regularity.IRREGULAR_LEFT
    if right_zero and not left_zero:
        return Regularity.IRREGULAR_RIGHT
    return Regularity.REGULAR


def _dependence(A: np.ndarray, b: np.ndarray, xh: np.ndarray, yh: np.ndarray,
                tol: Tolerances) -> np.ndarray:
    # Coefficients (g, be, al) with g * A xh = be * yh - al * b, found as
    # the kernel of the matrix with columns (A xh, -yh, b). With several
    # independent dependences, prefer the basis element with the largest
    # |be|: the generic case is best conditioned and a pure-g element can
    # have an unusable zero be.
    M = np.column_stack([A @ xh, -yh, b])
    basis = nullspace(M, tol)
    if basis.shape[1] == 0:
        _, _, vh = np.linalg.svd(M)
        return vh[-1]
    return basis[:, np.argmax(np.abs(basis[1, :]))]


def triangulate(A, b, x, y, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """World point w with (I | 0) w ~ x^ and (A | b) w ~ y^, normalized.

    Requires (A | b) of rank three with b != 0 (A itself may be singular;
    the construction only needs a valid second camera), a satisfied
    epipolar constraint (EpipolarViolatedError otherwise) and a regular
    pair (IrregularPairError otherwise). The constraint makes A x^, y^
    and b linearly dependent; the returned point is (x^, d) where the
    last coordinate d comes from a case split on the dependence
    coefficients: d = al when the A x^ term drops out, d = 0 when
    y^ ~ A x^, d = 1 when A x^ vanishes against b alone, and d = al / g
    in the generic case.
    """
    A = check_square(A, 3, "A")
    b = check_vector(b, 3, "b")
    if _b_is_zero(A, b, tol):
        raise CoincidentCamerasError("triangulation requires non-coincident cameras, b != 0")
    if rank_tol(np.hstack([A, b[:, None]]), tol) != 3:
        raise RankViolationError("(A | b) must be a rank-3 camera matrix")
    x = check_image_point(x, "x")
    y = check_image_point(y, "y")
    if residual(skew(b) @ A, x, y) > tol.residual_abs:
        raise EpipolarViolatedError("pair violates the epipolar constraint")
    report = pair_regularity(A, b, x, y, tol)
    if report is not Regularity.REGULAR:
        raise IrregularPairError(f"pair is {report.value}: no world point exists")

    xh = lift(x)
    yh = lift(y)
    g, be, al = _dependence(A, b, xh, yh, tol)
    Axh = A @ xh
    contrib = np.array([
        abs(g) * np.linalg.norm(Axh),
        abs(be) * np.linalg.norm(yh),
        abs(al) * np.linalg.norm(b),
    ])
    scale = contrib.max()
    g_zero = contrib[0] <= tol.rank_rel * scale
    be_zero = contrib[1] <= tol.rank_rel * scale

    if g_zero:
        # y^ ~ b. With A x^ = 0 the dependence reads be*y^ = al*b, so
        # (x^, al) projects to al*b; otherwise regularity forces
        # A x^ ~ b ~ y^ and (x^, 0) already works.
        if np.linalg.norm(Axh) <= tol.rank_rel * np.linalg.norm(A) * np.linalg.norm(xh):
            delta = al
        else:
            delta = 0.0
    elif be_zero:
        # A x^ = -al b up to scale. al = 0 collapses A x^ and regularity
        # gives y^ ~ b, matched by (x^, 1); al != 0 gives A x^ ~ b ~ y^.
        al_zero = contrib[2] <= tol.rank_rel * scale
        delta = 1.0 if al_zero else 0.0
    else:
        delta = al / g
    return normalize_hom(np.append(xh, delta))


def camera_from_fundamental(F: FundamentalMatrix) -> Camera:
    """The rank-3 camera ([e2]x F | e2) built on the left epipole."""
    if not isinstance(F, FundamentalMatrix):
        F = FundamentalMatrix(F)
    P = np.hstack([skew(F.e2) @ F.matrix, F.e2[:, None]])
    return Camera(P, F.tol)


def finite_pair_from_fundamental(F: FundamentalMatrix):
    """Finite non-coincident cameras (I | 0), (A | e2) reproducing F.

    A = [e2]x F - e2 a^T is nonsingular exactly when a is not orthogonal
    to the right epipole e1, so a comes from the avoidance search. The
    fundamental matrix derived from the returned pair equals
    -||e2||^2 F up to scale.
    """
    if not isinstance(F, FundamentalMatrix):
        F = FundamentalMatrix(F)
    tol = F.tol
    a = find_avoiding_vector([F.e1], tol)
    A = skew(F.e2) @ F.matrix - np.outer(F.e2, a)
    if rank_tol(A, tol) != 3:
        # The margin normally prevents this; retry against a shifted set.
        a = find_avoiding_vector([F.e1, a], tol)
        A = skew(F.e2) @ F.matrix - np.outer(F.e2, a)
        if rank_tol(A, tol) != 3:
            raise RankViolationError("failed to complete a nonsingular camera block")
    camera1 = Camera(IDENTITY_CAMERA_MATRIX, tol)
    camera2 = Camera(np.hstack([A, F.e2[:, None]]), tol)
    return camera1, camera2
