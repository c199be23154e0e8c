"""Reproducible synthetic scenes with known ground truth.

The generator samples a camera pair of the requested kind, world points
(optionally some at infinity), projects them into both images, and can
append two special pairs: an epipole-epipole pair (regular, lies on the
baseline) and an irregular pair (satisfies the epipolar constraint yet
admits no world point; always appended last and not explained by the
ground truth). Identical configurations produce identical scenes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigConflictError
from .geometry import IDENTITY_CAMERA_MATRIX, Camera
from .numerics import DEFAULT_TOLERANCES, Tolerances, normalize_hom
from .reconstruction import build_reconstruction

CAMERA_KINDS = ("finite-noncoincident", "finite-coincident", "infinite-second")

# Rejection-sampling margins: keep sampled scenes comfortably away from
# the degeneracies the library is meant to certify, so that fixtures are
# reproducible across BLAS builds.
_COND_FLOOR = 1e-3
_IMAGE_MARGIN = 1e-2
_RESAMPLE_LIMIT = 1000


@dataclass(frozen=True)
class SceneConfig:
    """Recipe for one synthetic scene.

    pair_count is the total number of correspondences, including any
    planted pairs. infinite_point_count of the ordinary world points are
    direction vectors (last coordinate zero). Planted pairs require a
    non-coincident camera kind, since epipoles and regularity are
    undefined when the centers coincide.
    """

    seed: int = 0
    pair_count: int = 12
    camera_kind: str = "finite-noncoincident"
    infinite_point_count: int = 0
    plant_epipole_pair: bool = False
    plant_irregular_pair: bool = False

    def __post_init__(self):
        if self.camera_kind not in CAMERA_KINDS:
            raise ValueError(f"camera_kind must be one of {CAMERA_KINDS}")
        if self.pair_count < 1:
            raise ValueError("pair_count must be at least 1")
        if self.camera_kind != "finite-noncoincident":
            if self.plant_irregular_pair:
                raise ConfigConflictError(
                    "irregular pairs need finite non-coincident cameras; "
                    "regularity is undefined when b = 0 and the construction "
                    "needs a nonsingular A"
                )
            if self.plant_epipole_pair:
                raise ConfigConflictError(
                    "epipole pairs need finite non-coincident cameras"
                )
        planted = int(self.plant_epipole_pair) + int(self.plant_irregular_pair)
        if self.pair_count - planted < 1:
            raise ValueError("pair_count must exceed the number of planted pairs")
        if not 0 <= self.infinite_point_count <= self.pair_count - planted:
            raise ValueError(
                "infinite_point_count must lie between 0 and the ordinary point count"
            )


def _well_conditioned(rng, shape):
    for _ in range(_RESAMPLE_LIMIT):
        M = rng.standard_normal(shape)
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] > _COND_FLOOR * s[0]:
            return M
    raise RuntimeError("failed to sample a well-conditioned matrix")


def _finite_direction(v):
    # Usable as a dehomogenizable image point: last coordinate carries a
    # non-negligible share of the norm.
    return abs(v[-1]) > _IMAGE_MARGIN * np.linalg.norm(v)


def _sample_cameras(rng, kind: str, need_finite_epipoles: bool, tol: Tolerances):
    camera1 = Camera(IDENTITY_CAMERA_MATRIX, tol)
    for _ in range(_RESAMPLE_LIMIT):
        if kind == "finite-noncoincident":
            A = _well_conditioned(rng, (3, 3))
            b = rng.standard_normal(3)
            if np.linalg.norm(b) < 0.3:
                continue
            if need_finite_epipoles:
                if not _finite_direction(np.linalg.solve(A, b)) or not _finite_direction(b):
                    continue
            P2 = np.hstack([A, b[:, None]])
        elif kind == "finite-coincident":
            A = _well_conditioned(rng, (3, 3))
            P2 = np.hstack([A, np.zeros((3, 1))])
        else:  # infinite-second: singular A, b outside its column space
            M = _well_conditioned(rng, (3, 3))
            U, s, Vt = np.linalg.svd(M)
            A = U @ np.diag([s[0], s[1], 0.0]) @ Vt
            coeffs = rng.standard_normal(3)
            coeffs[2] = np.sign(coeffs[2]) * max(abs(coeffs[2]), 0.3)
            b = U @ coeffs
            P2 = np.hstack([A, b[:, None]])
        return camera1, Camera(P2, tol)
    raise RuntimeError("failed to sample a valid camera pair")


def _project_ok(camera: Camera, w):
    image = camera.matrix @ w
    n = np.linalg.norm(image)
    if n <= _IMAGE_MARGIN * np.linalg.norm(camera.matrix) * np.linalg.norm(w):
        return None
    if not _finite_direction(image):
        return None
    return image[:2] / image[2]


def _sample_world_point(rng, camera1, camera2, infinite: bool):
    for _ in range(_RESAMPLE_LIMIT):
        v = rng.uniform(-2.0, 2.0, 3)
        w = np.append(v, 0.0 if infinite else 1.0)
        if np.linalg.norm(v) < 0.1:
            continue
        x = _project_ok(camera1, w)
        y = _project_ok(camera2, w)
        if x is None or y is None:
            continue
        return w, x, y
    raise RuntimeError("failed to sample a projectable world point")


def _epipole_pair(rng, camera1, camera2):
    # Any point on the baseline (other than the centers) images to the
    # epipole in both views.
    for _ in range(_RESAMPLE_LIMIT):
        u, v = rng.uniform(0.25, 1.0, 2)
        w = normalize_hom(u * camera1.center + v * camera2.center)
        x = _project_ok(camera1, w)
        y = _project_ok(camera2, w)
        if x is None or y is None:
            continue
        return w, x, y
    raise RuntimeError("failed to place an epipole-epipole pair")


def _irregular_pair(rng, camera2, tol: Tolerances):
    # x images the first epipole; y is anything off the second epipole.
    # Satisfies y^T [b]x A x^ = 0 identically but admits no world point.
    e1 = np.linalg.solve(camera2.A, camera2.b)
    x = e1[:2] / e1[2]
    b_dir = camera2.b / np.linalg.norm(camera2.b)
    for _ in range(_RESAMPLE_LIMIT):
        y = rng.uniform(-2.0, 2.0, 2)
        yh = np.append(y, 1.0)
        cross = np.linalg.norm(np.cross(yh, b_dir))
        if cross > 1e-2 * np.linalg.norm(yh):
            return x, y
    raise RuntimeError("failed to place an irregular pair")


def synthesize_scene(config: SceneConfig, tol: Tolerances = DEFAULT_TOLERANCES):
    """Generate (correspondences, ground_truth, irregular_index).

    correspondences is the full (pair_count, 4) array. ground_truth is a
    verified Reconstruction explaining every pair except a planted
    irregular one, which (when requested) occupies the final row;
    irregular_index is its row index, or None.
    """
    rng = np.random.default_rng(config.seed)
    need_epipoles = config.plant_epipole_pair or config.plant_irregular_pair
    camera1, camera2 = _sample_cameras(rng, config.camera_kind, need_epipoles, tol)

    planted = int(config.plant_epipole_pair) + int(config.plant_irregular_pair)
    ordinary = config.pair_count - planted
    points = []
    rows = []
    for i in range(ordinary):
        w, x, y = _sample_world_point(rng, camera1, camera2,
                                      infinite=i < config.infinite_point_count)
        points.append(w)
        rows.append(np.concatenate([x, y]))
    if config.plant_epipole_pair:
        w, x, y = _epipole_pair(rng, camera1, camera2)
        points.append(w)
        rows.append(np.concatenate([x, y]))
    irregular_index = None
    if config.plant_irregular_pair:
        x, y = _irregular_pair(rng, camera2, tol)
        irregular_index = len(rows)
        rows.append(np.concatenate([x, y]))

    correspondences = np.vstack(rows)
    explained = correspondences if irregular_index is None else correspondences[:-1]
    ground_truth = build_reconstruction(camera1, camera2, np.vstack(points), explained, tol)
    return correspondences, ground_truth, irregular_index


def expected_status(config: SceneConfig) -> str:
    """The decide() status a scene from this configuration certifies."""
    if config.plant_irregular_pair:
        return "epipolar-only"
    if config.camera_kind == "finite-coincident":
        return "reconstructable-coincident"
    return "reconstructable-noncoincident"
