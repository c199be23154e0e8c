"""Homogeneous points, cameras, projection, and the canonical homography.

Image points live in R^2 and are lifted to homogeneous 3-vectors; world
points are homogeneous 4-vectors. A camera is a 3x4 matrix of rank three,
partitioned as (A | b); it is finite when A is nonsingular. The camera
center is the one-dimensional kernel of the camera matrix: the unique
point with no image.
"""

from __future__ import annotations

import numpy as np

from .exceptions import AtCenterError, RankViolationError
from .numerics import (
    DEFAULT_TOLERANCES,
    Tolerances,
    find_avoiding_vector,
    normalize_hom,
    nullspace,
    proportional,
    rank_tol,
)

# The reference first camera (I | 0), used across the package.
IDENTITY_CAMERA_MATRIX = np.hstack([np.eye(3), np.zeros((3, 1))])


def lift(x) -> np.ndarray:
    """Append a unit coordinate: (x1, x2) -> (x1, x2, 1).

    Accepts a single point of shape (2,) or a batch of shape (m, 2); the
    batch form returns an (m, 3) array of rows.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape != (2,):
            raise ValueError(f"lift expects a 2-vector, got shape {x.shape}")
        return np.array([x[0], x[1], 1.0])
    if x.ndim == 2 and x.shape[1] == 2:
        return np.hstack([x, np.ones((x.shape[0], 1))])
    raise ValueError(f"lift expects shape (2,) or (m, 2), got {x.shape}")


def is_finite_point(h, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True when the last homogeneous coordinate survives normalization."""
    h = np.asarray(h, dtype=float).ravel()
    return bool(abs(h[-1]) > tol.rank_rel * np.linalg.norm(h))


class Camera:
    """A 3x4 rank-3 matrix with its derived blocks and center.

    The rank condition is certified at construction (RankViolationError
    otherwise) and the stored matrix is made read-only, so a Camera can be
    shared freely across threads.
    """

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOLERANCES):
        P = np.array(matrix, dtype=float)
        if P.shape != (3, 4):
            raise ValueError(f"camera matrix must be 3x4, got {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("camera matrix must contain only finite values")
        if rank_tol(P, tol) != 3:
            raise RankViolationError("camera matrix must have rank three")
        P.flags.writeable = False
        self.matrix = P
        self.tol = tol
        self.is_finite = rank_tol(P[:, :3], tol) == 3
        self.center = camera_center(self)
        self.center.flags.writeable = False

    @property
    def A(self) -> np.ndarray:
        """Left 3x3 block."""
        return self.matrix[:, :3]

    @property
    def b(self) -> np.ndarray:
        """Right column."""
        return self.matrix[:, 3]

    def __repr__(self):
        kind = "finite" if self.is_finite else "infinite"
        return f"Camera({kind}, matrix={self.matrix.tolist()!r})"


def identity_camera(tol: Tolerances = DEFAULT_TOLERANCES) -> Camera:
    """The reference camera (I | 0)."""
    return Camera(IDENTITY_CAMERA_MATRIX, tol)


def camera_center(camera: Camera) -> np.ndarray:
    """Homogeneous center c with P @ c = 0, normalized.

    Finite cameras use the closed form (-A^-1 b, 1); infinite cameras fall
    back to the one-dimensional kernel of P, whose last coordinate is
    necessarily zero.
    """
    if camera.is_finite:
        c = np.append(-np.linalg.solve(camera.A, camera.b), 1.0)
        return normalize_hom(c)
    kernel = nullspace(camera.matrix, camera.tol)
    if kernel.shape[1] != 1:
        raise RankViolationError("camera matrix must have a one-dimensional kernel")
    return normalize_hom(kernel[:, 0])


def coincident(camera1: Camera, camera2: Camera, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True when the two camera centers are proportional."""
    return proportional(camera1.center, camera2.center, tol)


def project(camera: Camera, w, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Image of a world point, as a normalized homogeneous 3-vector.

    Raises AtCenterError when w is (numerically) the camera center; the
    projective image is undefined there and callers must treat the case
    explicitly rather than see a silent near-zero vector.
    """
    w = np.asarray(w, dtype=float).ravel()
    if w.shape != (4,):
        raise ValueError(f"world point must be a 4-vector, got shape {w.shape}")
    image = camera.matrix @ w
    cutoff = tol.rank_rel * np.linalg.norm(camera.matrix) * np.linalg.norm(w)
    if np.linalg.norm(image) <= cutoff:
        raise AtCenterError("point projects to zero: it is the camera center")
    return normalize_hom(image)


def canonical_homography(camera: Camera) -> np.ndarray:
    """Nonsingular 4x4 H with camera.matrix @ inv(H) proportional to (I | 0).

    H stacks the camera matrix with one extra row; the stack is
    nonsingular exactly when the row is not orthogonal to the camera
    center, so the row comes from the hyperplane-avoidance search applied
    to the kernel of P.
    """
    row = find_avoiding_vector([camera.center], camera.tol)
    H = np.vstack([camera.matrix, row])
    if rank_tol(H, camera.tol) != 4:
        raise RankViolationError("homography completion is singular")
    return H


def verify_reconstruction(camera1: Camera, camera2: Camera, points, correspondences,
                          tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Check that every world point reprojects onto its image pair.

    correspondences is an (m, 4) array of rows (x1, x2, y1, y2); points is
    an (m, 4) array of homogeneous world points. A point at either camera
    center counts as failure.
    """
    corrs = np.asarray(correspondences, dtype=float)
    ws = np.asarray(points, dtype=float)
    if ws.shape[0] != corrs.shape[0]:
        raise ValueError("need exactly one world point per correspondence")
    for w, row in zip(ws, corrs):
        try:
            image1 = project(camera1, w, tol)
            image2 = project(camera2, w, tol)
        except AtCenterError:
            return False
        if not proportional(image1, lift(row[:2]), tol):
            return False
        if not proportional(image2, lift(row[2:]), tol):
            return False
    return True
