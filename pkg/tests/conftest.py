import numpy as np

from twoview.exceptions import AtCenterError
from twoview.geometry import IDENTITY_CAMERA_MATRIX, Camera, project
from twoview.reconstruction import build_reconstruction


def well_conditioned(rng, shape, floor=1e-3):
    while True:
        M = rng.standard_normal(shape)
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] > floor * s[0]:
            return M


def random_finite_camera(rng) -> Camera:
    A = well_conditioned(rng, (3, 3))
    b = rng.standard_normal(3)
    while np.linalg.norm(b) < 0.3:
        b = rng.standard_normal(3)
    return Camera(np.hstack([A, b[:, None]]))


def random_infinite_camera(rng) -> Camera:
    # singular left block, full row rank overall
    M = well_conditioned(rng, (3, 3))
    U, s, Vt = np.linalg.svd(M)
    A = U @ np.diag([s[0], s[1], 0.0]) @ Vt
    coeffs = rng.standard_normal(3)
    coeffs[2] = np.sign(coeffs[2]) * max(abs(coeffs[2]), 0.3)
    return Camera(np.hstack([A, (U @ coeffs)[:, None]]))


def identity_first_camera() -> Camera:
    return Camera(IDENTITY_CAMERA_MATRIX)


def _usable_image(h):
    return abs(h[2]) > 1e-2 * np.linalg.norm(h)


def general_scene(rng, m, n_infinite=0, first_infinite=False, coincident_pair=False,
                  first_identity=False, second_infinite=False):
    """A verified reconstruction with the requested degeneracies.

    Returns (reconstruction, correspondences). Coincident pairs are built
    as P2 = M P1 for a random nonsingular M, which shares the center of
    P1 exactly.
    """
    if first_identity:
        camera1 = identity_first_camera()
    elif first_infinite:
        camera1 = random_infinite_camera(rng)
    else:
        camera1 = random_finite_camera(rng)
    if coincident_pair:
        camera2 = Camera(well_conditioned(rng, (3, 3)) @ camera1.matrix)
    elif second_infinite:
        camera2 = random_infinite_camera(rng)
    else:
        camera2 = random_finite_camera(rng)

    points, rows = [], []
    while len(points) < m:
        infinite = len(points) < n_infinite
        w = np.append(rng.uniform(-2.0, 2.0, 3), 0.0 if infinite else 1.0)
        if np.linalg.norm(w[:3]) < 0.1:
            continue
        try:
            x = project(camera1, w)
            y = project(camera2, w)
        except AtCenterError:
            continue
        if not (_usable_image(x) and _usable_image(y)):
            continue
        points.append(w)
        rows.append([x[0] / x[2], x[1] / x[2], y[0] / y[2], y[1] / y[2]])
    corrs = np.array(rows)
    return build_reconstruction(camera1, camera2, np.vstack(points), corrs), corrs
