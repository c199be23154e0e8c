"""Reconstructions and the transforms that put them in finite canonical form.

A reconstruction is a camera pair plus world points that reproject onto a
given set of correspondences. Any reconstruction can be rewritten, without
changing what it explains, so that the first camera is (I | 0), the second
camera is finite and every world point is finite; the rewriting is a 4x4
homography followed by a shear of the plane at infinity. Coincidence of
the camera centers survives the rewriting, and coincident-camera
reconstructions are exactly the ones induced by a planar homography
between the two images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import WitnessInvalidError
from .geometry import (
    IDENTITY_CAMERA_MATRIX,
    Camera,
    coincident,
    is_finite_point,
    lift,
    canonical_homography,
    verify_reconstruction,
)
from .numerics import (
    DEFAULT_TOLERANCES,
    Tolerances,
    find_avoiding_vector,
    normalize_hom,
    nullspace,
    proportional,
    rank_tol,
)
from .validation import check_correspondences, check_square

_EQUIV_SEED = 24862
_EQUIV_RANDOM_COMBOS = 64


@dataclass(frozen=True)
class Reconstruction:
    """Camera pair, world points and the correspondences they explain.

    points is an (m, 4) array of homogeneous rows, one per correspondence
    row (x1, x2, y1, y2). finite_canonical means the first camera is
    proportional to (I | 0), the second camera is finite and every point
    is finite. The flags describe the stored data; builders in this module
    compute them and verify reprojection before returning.
    """

    camera1: Camera
    camera2: Camera
    points: np.ndarray
    correspondences: np.ndarray
    finite_canonical: bool
    coincident: bool

    def verify(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return verify_reconstruction(
            self.camera1, self.camera2, self.points, self.correspondences, tol
        )


def _is_identity_form(camera: Camera, tol: Tolerances) -> bool:
    return proportional(camera.matrix.ravel(), IDENTITY_CAMERA_MATRIX.ravel(), tol)


def build_reconstruction(camera1: Camera, camera2: Camera, points, correspondences,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> Reconstruction:
    """Assemble a Reconstruction, computing its tags and verifying it.

    Raises WitnessInvalidError when some point fails to reproject onto its
    correspondence pair.
    """
    corrs = check_correspondences(correspondences)
    pts = np.array([normalize_hom(w) for w in np.asarray(points, dtype=float)])
    if pts.shape != (corrs.shape[0], 4):
        raise ValueError("points must be an (m, 4) array matching the correspondences")
    if not verify_reconstruction(camera1, camera2, pts, corrs, tol):
        raise WitnessInvalidError("world points do not reproject onto the correspondences")
    canonical = (
        _is_identity_form(camera1, tol)
        and camera2.is_finite
        and all(is_finite_point(w, tol) for w in pts)
    )
    pts.flags.writeable = False
    return Reconstruction(
        camera1=camera1,
        camera2=camera2,
        points=pts,
        correspondences=corrs,
        finite_canonical=canonical,
        coincident=coincident(camera1, camera2, tol),
    )


def finitize(rec: Reconstruction, tol: Tolerances = DEFAULT_TOLERANCES) -> Reconstruction:
    """Make the second camera and all points finite, keeping camera1 = (I | 0).

    Applies the shear H = ((I, 0), (a^T, 1)) where (a, 1) avoids the
    hyperplanes of both camera centers and of every world point. Such a
    row exists because all of those are nonzero 4-vectors, and its last
    entry can be scaled to 1 because the first center is (0, 0, 0, 1).
    If the input's second camera has a nonzero last column the output
    cameras are non-coincident.
    """
    if not _is_identity_form(rec.camera1, tol):
        raise ValueError("finitize requires the first camera to be proportional to (I | 0)")
    to_avoid = [rec.camera1.center, rec.camera2.center, *rec.points]
    row = find_avoiding_vector(to_avoid, tol)
    row = row / row[3]  # last entry is nonzero: the row avoids (0, 0, 0, 1)
    H = np.eye(4)
    H[3, :] = row
    H_inv = np.eye(4)
    H_inv[3, :3] = -row[:3]
    camera2 = Camera(rec.camera2.matrix @ H_inv, tol)
    points = [H @ w for w in rec.points]
    return build_reconstruction(rec.camera1, camera2, points, rec.correspondences, tol)


def canonicalize(rec: Reconstruction, tol: Tolerances = DEFAULT_TOLERANCES) -> Reconstruction:
    """Rewrite any reconstruction into finite canonical form.

    First moves camera1 onto (I | 0) by the homography that stacks it with
    an extra row, then finitizes. The output explains the same
    correspondences, and its cameras are coincident exactly when the input
    cameras were.
    """
    H = canonical_homography(rec.camera1)
    H_inv = np.linalg.inv(H)
    camera1 = Camera(rec.camera1.matrix @ H_inv, tol)
    camera2 = Camera(rec.camera2.matrix @ H_inv, tol)
    points = [H @ w for w in rec.points]
    moved = build_reconstruction(camera1, camera2, points, rec.correspondences, tol)
    return finitize(moved, tol)


def _dlt_rows(xh: np.ndarray, yh: np.ndarray) -> np.ndarray:
    # Two independent components of cross(yh, H @ xh) = 0, linear in the
    # row-major entries of H. The third component is implied whenever
    # H @ xh is nonzero, which the nonsingularity filter enforces.
    zero = np.zeros(3)
    return np.array([
        np.concatenate([zero, -yh[2] * xh, yh[1] * xh]),
        np.concatenate([yh[2] * xh, zero, -yh[0] * xh]),
    ])


def projective_equivalence(correspondences, tol: Tolerances = DEFAULT_TOLERANCES):
    """Search for a nonsingular 3x3 H with H x_i ~ y_i for every pair.

    Returns the witness as a (3, 3) array, or None when no nonsingular
    homography is compatible with the pairs within tolerance. Solves the
    DLT system built from the cross-product constraints; when the system
    is underdetermined the nullspace is searched for a nonsingular
    element, first over the basis vectors and then over fixed-seed random
    combinations. For very small m the witness is massively non-unique and
    this returns the first one found under the fixed seed.
    """
    corrs = check_correspondences(correspondences)
    xs = lift(corrs[:, :2])
    ys = lift(corrs[:, 2:])
    rows = np.vstack([_dlt_rows(xh, yh) for xh, yh in zip(xs, ys)])
    basis = nullspace(rows, tol)
    k = basis.shape[1]
    if k == 0:
        return None

    def witness(vec):
        H = vec.reshape(3, 3)
        if rank_tol(H, tol) != 3:
            return None
        if all(proportional(H @ xh, yh, tol) for xh, yh in zip(xs, ys)):
            return normalize_hom(vec).reshape(3, 3)
        return None

    for j in range(k):
        H = witness(basis[:, j])
        if H is not None:
            return H
    if k >= 2:
        rng = np.random.default_rng(_EQUIV_SEED)
        for _ in range(_EQUIV_RANDOM_COMBOS):
            combo = basis @ rng.standard_normal(k)
            norm = np.linalg.norm(combo)
            if norm == 0.0:
                continue
            H = witness(combo / norm)
            if H is not None:
                return H
    return None


def coincident_reconstruction(correspondences, homography,
                              tol: Tolerances = DEFAULT_TOLERANCES) -> Reconstruction:
    """Build the coincident-camera reconstruction induced by a witness H.

    Uses cameras (I | 0) and (H | 0) with the double-lifted points
    (x1, x2, 1, 1). Raises WitnessInvalidError when H does not actually
    map every first image point onto the second.
    """
    corrs = check_correspondences(correspondences)
    H = check_square(homography, 3, "homography")
    if rank_tol(H, tol) != 3:
        raise WitnessInvalidError("homography witness must be nonsingular")
    camera1 = Camera(IDENTITY_CAMERA_MATRIX, tol)
    camera2 = Camera(np.hstack([H, np.zeros((3, 1))]), tol)
    points = np.hstack([lift(corrs[:, :2]), np.ones((corrs.shape[0], 1))])
    return build_reconstruction(camera1, camera2, points, corrs, tol)
