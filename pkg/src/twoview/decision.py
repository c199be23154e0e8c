"""Reconstructability verdicts with machine-checkable certificates.

From correspondences alone: build the linear system the epipolar
constraints impose on a fundamental matrix, search its nullspace for
rank-2 candidates, screen every candidate's camera pair for irregular
pairs, and emit a verdict. Every certificate is re-verified immediately
before the verdict is returned; a verdict can never carry an unchecked
certificate.

The nullspace search is complete for nullity at most two (root-finding on
the determinant cubic of a pencil covers every singular member). For
nullity three and above only sampled two-dimensional pencils are solved,
so the procedure reports Inconclusive rather than claim absence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .epipolar import (
    FundamentalMatrix,
    Regularity,
    finite_pair_from_fundamental,
    pair_regularity,
    residuals,
    triangulate,
)
from .exceptions import (
    CoincidentCamerasError,
    EpipolarViolatedError,
    IrregularPairError,
    NotReconstructableError,
    RankViolationError,
    SearchExhaustedError,
    WitnessInvalidError,
)
from .geometry import lift
from .numerics import (
    DEFAULT_TOLERANCES,
    Tolerances,
    normalize_hom,
    nullspace,
    proportional,
    rank_tol,
)
from .reconstruction import (
    Reconstruction,
    build_reconstruction,
    coincident_reconstruction,
    projective_equivalence,
)
from .validation import check_correspondences

_PLANE_SEED = 73054
_RANDOM_PLANE_BUDGET = 256


class VerdictStatus(Enum):
    RECONSTRUCTABLE_NONCOINCIDENT = "reconstructable-noncoincident"
    RECONSTRUCTABLE_COINCIDENT = "reconstructable-coincident"
    EPIPOLAR_ONLY = "epipolar-only"
    NO_FUNDAMENTAL = "no-fundamental"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of the decision procedure plus its certificates.

    reconstruction / fundamental / homography are populated according to
    the status; irregular_indices lists (pair index, Regularity) for the
    fundamental matrix carried by an epipolar-only verdict. nullity
    records the dimension of the constraint nullspace the search worked
    in, which documents when the search was exhaustive (nullity <= 2).
    """

    status: VerdictStatus
    reconstruction: Reconstruction | None = None
    fundamental: FundamentalMatrix | None = None
    homography: np.ndarray | None = None
    irregular_indices: tuple = ()
    nullity: int = 0

    @property
    def reconstructable(self) -> bool:
        return self.status in (
            VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT,
            VerdictStatus.RECONSTRUCTABLE_COINCIDENT,
        )


def design_matrix(correspondences) -> np.ndarray:
    """The (m, 9) matrix whose rows encode y^T F x = 0 on vec(F).

    Row i is the row-major flattening of outer(y^_i, x^_i), so row_i
    dotted with the row-major flattening of F equals y^_i^T F x^_i.
    """
    corrs = check_correspondences(correspondences)
    xs = lift(corrs[:, :2])
    ys = lift(corrs[:, 2:])
    return np.einsum("ij,ik->ijk", ys, xs).reshape(-1, 9)


def _det_cubic(F1: np.ndarray, F2: np.ndarray) -> np.ndarray:
    # Coefficients (c0..c3) of det(t*F1 + F2) by interpolation at
    # t = 0, 1, -1, 2; exact for a cubic up to rounding.
    ts = np.array([0.0, 1.0, -1.0, 2.0])
    values = [np.linalg.det(t * F1 + F2) for t in ts]
    V = np.vander(ts, 4)
    return np.linalg.solve(V, values)


def _pencil_members(F1: np.ndarray, F2: np.ndarray, tol: Tolerances,
                    exhaustive: bool) -> list:
    """Singular members of the pencil span{F1, F2}, as raw matrices.

    Roots of the determinant cubic give the singular members directly.
    A pencil whose determinant vanishes identically consists entirely of
    singular matrices; when exhaustive is set, enough fixed probes are
    returned that at least one hits rank two whenever the pencil is not
    wholly rank-deficient below two.
    """
    coeffs = _det_cubic(F1, F2)
    scale = max(np.linalg.norm(F1), np.linalg.norm(F2))
    threshold = tol.rank_rel * scale ** 3
    if np.all(np.abs(coeffs) <= threshold):
        if not exhaustive:
            return []
        return [F1, F2, F1 + F2, F1 - F2, F1 + 2.0 * F2]
    trimmed = coeffs.copy()
    trimmed[np.abs(trimmed) <= threshold] = 0.0
    members = [F1, F2] if exhaustive else []
    leading = np.flatnonzero(trimmed)
    if leading.size == 0:
        return members
    poly = trimmed[leading[0]:]
    if poly.size >= 2:
        for root in np.roots(poly):
            if abs(root.imag) <= 1e-6 * (1.0 + abs(root.real)):
                members.append(float(root.real) * F1 + F2)
    return members


def _candidate_search(correspondences, tol: Tolerances):
    """All certified fundamental-matrix candidates plus the nullity."""
    corrs = check_correspondences(correspondences)
    basis = nullspace(design_matrix(corrs), tol)
    k = basis.shape[1]
    raw = []
    if k == 1:
        raw.append(basis[:, 0].reshape(3, 3))
    elif k == 2:
        F1 = basis[:, 0].reshape(3, 3)
        F2 = basis[:, 1].reshape(3, 3)
        raw.extend(_pencil_members(F1, F2, tol, exhaustive=True))
    elif k >= 3:
        mats = [basis[:, j].reshape(3, 3) for j in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                raw.extend(_pencil_members(mats[i], mats[j], tol, exhaustive=False))
        rng = np.random.default_rng(_PLANE_SEED)
        for _ in range(_RANDOM_PLANE_BUDGET):
            combos = basis @ rng.standard_normal((k, 2))
            n1 = np.linalg.norm(combos[:, 0])
            n2 = np.linalg.norm(combos[:, 1])
            if n1 == 0.0 or n2 == 0.0:
                continue
            raw.extend(_pencil_members(
                combos[:, 0].reshape(3, 3) / n1,
                combos[:, 1].reshape(3, 3) / n2,
                tol,
                exhaustive=False,
            ))

    candidates = []
    for matrix in raw:
        if rank_tol(matrix, tol) != 2:
            continue
        # emission convention: unit norm, leading entry positive, so the
        # certificate a given input produces is deterministic
        matrix = normalize_hom(matrix.ravel()).reshape(3, 3)
        if np.max(residuals(matrix, corrs)) > tol.residual_abs:
            continue
        F = FundamentalMatrix(matrix, tol)
        if any(proportional(F.matrix.ravel(), seen.matrix.ravel(), tol)
               for seen in candidates):
            continue
        candidates.append(F)
    candidates.sort(key=lambda F: -F.conditioning())
    return candidates, k


def fundamental_candidates(correspondences, tol: Tolerances = DEFAULT_TOLERANCES) -> list:
    """Certified rank-2 matrices satisfying every epipolar constraint.

    Ordered best-conditioned first (largest sigma_2 / sigma_1). The list
    is exhaustive up to scale when the constraint nullspace has dimension
    at most two; beyond that only sampled pencils are searched and an
    empty result is not a proof of absence.
    """
    candidates, _ = _candidate_search(correspondences, tol)
    return candidates


def verify_certificates(verdict: Verdict, correspondences,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    """Re-check every certificate a verdict carries; raise on any failure.

    decide() funnels all returns through this, so a verdict that reaches
    the caller has survived independent verification of its
    reconstruction, fundamental matrix and homography claims.
    """
    corrs = check_correspondences(correspondences)
    status = verdict.status
    if status is VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT:
        rec = verdict.reconstruction
        if rec is None or verdict.fundamental is None:
            raise WitnessInvalidError("missing certificates for a non-coincident verdict")
        if rec.coincident or not rec.finite_canonical:
            raise WitnessInvalidError("reconstruction is not finite canonical non-coincident")
        if not rec.verify(tol):
            raise WitnessInvalidError("reconstruction does not reproject onto the input")
        if not np.array_equal(rec.correspondences, corrs):
            raise WitnessInvalidError("reconstruction explains different correspondences")
    if status is VerdictStatus.RECONSTRUCTABLE_COINCIDENT:
        rec = verdict.reconstruction
        H = verdict.homography
        if rec is None or H is None:
            raise WitnessInvalidError("missing certificates for a coincident verdict")
        if not rec.coincident or not rec.finite_canonical:
            raise WitnessInvalidError("reconstruction is not finite canonical coincident")
        if not rec.verify(tol):
            raise WitnessInvalidError("reconstruction does not reproject onto the input")
        if rank_tol(H, tol) != 3:
            raise WitnessInvalidError("homography witness is singular")
        xs = lift(corrs[:, :2])
        ys = lift(corrs[:, 2:])
        if not all(proportional(H @ xh, yh, tol) for xh, yh in zip(xs, ys)):
            raise WitnessInvalidError("homography does not map the first image onto the second")
    if status in (VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT, VerdictStatus.EPIPOLAR_ONLY):
        F = verdict.fundamental
        if F is None:
            raise WitnessInvalidError("verdict must carry a fundamental matrix")
        if rank_tol(F.matrix, tol) != 2:
            raise WitnessInvalidError("fundamental certificate is not rank two")
        if np.max(residuals(F, corrs)) > tol.residual_abs:
            raise WitnessInvalidError("fundamental certificate violates a constraint")
    if status is VerdictStatus.EPIPOLAR_ONLY and not verdict.irregular_indices:
        raise WitnessInvalidError("epipolar-only verdict must name irregular pairs")


def decide(correspondences, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Decide reconstructability and return a certified verdict.

    Tries every fundamental-matrix candidate: if some candidate's derived
    camera pair classifies all pairs regular, the pairs triangulate and
    the verdict is reconstructable with non-coincident cameras. Otherwise
    a planar homography between the images certifies the coincident case.
    Candidates that exist but leave irregular pairs yield an epipolar-only
    verdict naming those pairs. With no candidate and no homography the
    answer is no-fundamental when the search was exhaustive (nullity at
    most two) and inconclusive otherwise.
    """
    corrs = check_correspondences(correspondences)

    def emit(verdict):
        verify_certificates(verdict, corrs, tol)
        return verdict

    candidates, nullity = _candidate_search(corrs, tol)
    first_failure = None
    for F in candidates:
        try:
            camera1, camera2 = finite_pair_from_fundamental(F)
        except (SearchExhaustedError, RankViolationError):
            continue
        A = camera2.A
        b = camera2.b
        reports = [
            pair_regularity(A, b, row[:2], row[2:], tol) for row in corrs
        ]
        failures = tuple(
            (i, report) for i, report in enumerate(reports)
            if report is not Regularity.REGULAR
        )
        if failures:
            if first_failure is None:
                first_failure = (F, failures)
            continue
        try:
            points = [triangulate(A, b, row[:2], row[2:], tol) for row in corrs]
            rec = build_reconstruction(camera1, camera2, points, corrs, tol)
        except (IrregularPairError, EpipolarViolatedError, CoincidentCamerasError,
                RankViolationError, WitnessInvalidError):
            continue
        if rec.coincident or not rec.finite_canonical:
            continue
        return emit(Verdict(
            status=VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT,
            reconstruction=rec,
            fundamental=F,
            nullity=nullity,
        ))

    H = projective_equivalence(corrs, tol)
    if H is not None:
        try:
            rec = coincident_reconstruction(corrs, H, tol)
        except WitnessInvalidError:
            rec = None
        if rec is not None:
            return emit(Verdict(
                status=VerdictStatus.RECONSTRUCTABLE_COINCIDENT,
                reconstruction=rec,
                homography=H,
                nullity=nullity,
            ))

    if first_failure is not None:
        F, failures = first_failure
        return emit(Verdict(
            status=VerdictStatus.EPIPOLAR_ONLY,
            fundamental=F,
            irregular_indices=failures,
            nullity=nullity,
        ))
    if candidates or nullity >= 3:
        # Candidates that individually failed certification, or an only
        # partially searched nullspace: absence is not proven.
        return emit(Verdict(status=VerdictStatus.INCONCLUSIVE, nullity=nullity))
    return emit(Verdict(status=VerdictStatus.NO_FUNDAMENTAL, nullity=nullity))


def reconstruct(correspondences, tol: Tolerances = DEFAULT_TOLERANCES) -> Reconstruction:
    """The certified reconstruction from decide(), or NotReconstructableError."""
    verdict = decide(correspondences, tol)
    if not verdict.reconstructable:
        raise NotReconstructableError(
            f"correspondences are not reconstructable: {verdict.status.value}"
        )
    return verdict.reconstruction
