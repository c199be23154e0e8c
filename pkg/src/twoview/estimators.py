"""Scikit-learn style estimators wrapping the decision procedure.

The estimators accept correspondences as an (m, 4) array with rows
(x1, x2, y1, y2), the same layout the functional API and the CLI use, so
fitted reconstruction state plugs into pipelines and model-selection
tooling via the usual get_params / set_params machinery.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .decision import decide
from .epipolar import triangulate
from .exceptions import NotReconstructableError, WitnessInvalidError
from .geometry import lift
from .numerics import Tolerances, normalize_hom, proportional
from .reconstruction import projective_equivalence
from .validation import check_correspondences


class TwoViewReconstructor(BaseEstimator, TransformerMixin):
    """Fit a projective reconstruction to exact point correspondences.

    fit(X) runs the decision procedure on X of shape (m, 4) and stores the
    verdict with its certificates. transform(X) triangulates rows of X
    under the fitted camera pair, returning homogeneous world points of
    shape (m, 4); it raises NotReconstructableError when the fit did not
    certify a reconstruction.

    Attributes after fit: status_ (verdict string), verdict_ (full
    Verdict), fundamental_matrix_, cameras_, world_points_, homography_,
    irregular_indices_.
    """

    def __init__(self, tol_rank=1e-8, tol_prop=1e-8, tol_residual=1e-8):
        self.tol_rank = tol_rank
        self.tol_prop = tol_prop
        self.tol_residual = tol_residual

    def _tolerances(self) -> Tolerances:
        return Tolerances(
            rank_rel=self.tol_rank,
            prop_rel=self.tol_prop,
            residual_abs=self.tol_residual,
        )

    def fit(self, X, y=None):
        corrs = check_correspondences(X)
        verdict = decide(corrs, self._tolerances())
        self.n_features_in_ = 4
        self.verdict_ = verdict
        self.status_ = verdict.status.value
        self.fundamental_matrix_ = (
            None if verdict.fundamental is None else verdict.fundamental.matrix
        )
        self.homography_ = verdict.homography
        self.irregular_indices_ = [
            (index, report.value) for index, report in verdict.irregular_indices
        ]
        rec = verdict.reconstruction
        self.cameras_ = None if rec is None else (rec.camera1.matrix, rec.camera2.matrix)
        self.world_points_ = None if rec is None else rec.points
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "verdict_"):
            raise NotFittedError("TwoViewReconstructor is not fitted yet; call fit first")
        verdict = self.verdict_
        if not verdict.reconstructable:
            raise NotReconstructableError(
                f"fitted verdict is {verdict.status.value}: nothing to triangulate"
            )
        corrs = check_correspondences(X)
        tol = self._tolerances()
        rec = verdict.reconstruction
        if not rec.coincident:
            A = rec.camera2.A
            b = rec.camera2.b
            return np.vstack([
                triangulate(A, b, row[:2], row[2:], tol) for row in corrs
            ])
        H = rec.camera2.A
        points = []
        for row in corrs:
            xh = lift(row[:2])
            yh = lift(row[2:])
            if not proportional(H @ xh, yh, tol):
                raise WitnessInvalidError(
                    "pair is inconsistent with the fitted coincident homography"
                )
            points.append(normalize_hom(np.append(xh, 1.0)))
        return np.vstack(points)


class PlanarHomographyAlignment(BaseEstimator, TransformerMixin):
    """Fit the planar homography relating the two images, if one exists.

    fit(X) searches for a nonsingular 3x3 H with H x^_i ~ y^_i over the
    rows of X. transform(X) maps first-image points through the fitted H
    and returns the predicted second-image points, shape (m, 2).

    Attributes after fit: is_equivalent_ (bool), homography_ (3x3 array
    or None).
    """

    def __init__(self, tol_rank=1e-8, tol_prop=1e-8, tol_residual=1e-8):
        self.tol_rank = tol_rank
        self.tol_prop = tol_prop
        self.tol_residual = tol_residual

    def fit(self, X, y=None):
        corrs = check_correspondences(X)
        tol = Tolerances(
            rank_rel=self.tol_rank,
            prop_rel=self.tol_prop,
            residual_abs=self.tol_residual,
        )
        self.n_features_in_ = 4
        self.homography_ = projective_equivalence(corrs, tol)
        self.is_equivalent_ = self.homography_ is not None
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "homography_"):
            raise NotFittedError("PlanarHomographyAlignment is not fitted yet; call fit first")
        if self.homography_ is None:
            raise NotReconstructableError("the images are not projectively equivalent")
        corrs = np.asarray(X, dtype=float)
        if corrs.ndim == 2 and corrs.shape[1] == 4:
            firsts = corrs[:, :2]
        elif corrs.ndim == 2 and corrs.shape[1] == 2:
            firsts = corrs
        else:
            raise ValueError("expected an (m, 4) correspondence array or (m, 2) points")
        mapped = lift(firsts) @ self.homography_.T
        scale = mapped[:, 2]
        if np.any(np.abs(scale) <= 1e-12 * np.linalg.norm(mapped, axis=1)):
            raise NotReconstructableError("a mapped point falls on the line at infinity")
        return mapped[:, :2] / scale[:, None]
