import numpy as np
import pytest

import twoview.decision as decision_mod
from conftest import general_scene, well_conditioned
from twoview.decision import (
    Verdict,
    VerdictStatus,
    decide,
    design_matrix,
    fundamental_candidates,
    reconstruct,
    verify_certificates,
)
from twoview.epipolar import Regularity, fundamental_from_cameras, pair_regularity, residuals
from twoview.exceptions import NotReconstructableError, WitnessInvalidError
from twoview.geometry import lift
from twoview.numerics import proportional, rank_tol, skew


def scene_with_axis_cameras(rng, m):
    # P1 = (I | 0), P2 = (I | e3): y = (v1, v2, v3 + 1) dehomogenized
    rows = []
    while len(rows) < m:
        v = rng.uniform(-2.0, 2.0, 3)
        if abs(v[2]) < 0.2 or abs(v[2] + 1.0) < 0.2:
            continue
        rows.append([v[0] / v[2], v[1] / v[2], v[0] / (v[2] + 1.0), v[1] / (v[2] + 1.0)])
    return np.array(rows)


class TestDesignMatrix:
    def test_rows_encode_the_constraint(self):
        rng = np.random.default_rng(0)
        corrs = rng.uniform(-2, 2, (10, 4))
        M = design_matrix(corrs)
        F = rng.standard_normal((3, 3))
        for row, c in zip(M, corrs):
            direct = lift(c[2:]) @ F @ lift(c[:2])
            assert row @ F.ravel() == pytest.approx(direct, abs=1e-14)


class TestFundamentalCandidates:
    def test_recovers_ground_truth(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            rec, corrs = general_scene(rng, 8, first_identity=True)
            truth = fundamental_from_cameras(rec.camera1, rec.camera2)
            candidates = fundamental_candidates(corrs)
            assert candidates
            assert any(
                proportional(F.matrix.ravel(), truth.matrix.ravel())
                for F in candidates
            )

    def test_unrelated_points_give_nothing(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            corrs = rng.uniform(-1, 1, (9, 4))
            assert fundamental_candidates(corrs) == []

    def test_single_pair_is_satisfiable(self):
        candidates = fundamental_candidates([[0.3, -0.4, 1.2, 0.7]])
        assert candidates

    def test_all_outputs_certified(self):
        rng = np.random.default_rng(3)
        rec, corrs = general_scene(rng, 7, first_identity=True)
        for F in fundamental_candidates(corrs):
            assert rank_tol(F.matrix) == 2
            assert np.max(residuals(F, corrs)) <= 1e-8

    def test_sorted_by_conditioning(self):
        rng = np.random.default_rng(4)
        rec, corrs = general_scene(rng, 7, first_identity=True)
        conds = [F.conditioning() for F in fundamental_candidates(corrs)]
        assert conds == sorted(conds, reverse=True)


class TestDecide:
    def test_generic_scene_reconstructs(self):
        rng = np.random.default_rng(5)
        rec, corrs = general_scene(rng, 12, first_identity=True)
        verdict = decide(corrs)
        assert verdict.status is VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT
        assert verdict.reconstruction.verify()
        assert verdict.fundamental is not None
        # forward direction: the returned cameras classify every pair regular
        out = verdict.reconstruction
        for row in corrs:
            assert (pair_regularity(out.camera2.A, out.camera2.b, row[:2], row[2:])
                    is Regularity.REGULAR)

    def test_identical_images_are_coincident(self):
        rng = np.random.default_rng(6)
        xs = rng.uniform(-1, 1, (6, 2))
        verdict = decide(np.hstack([xs, xs]))
        assert verdict.status is VerdictStatus.RECONSTRUCTABLE_COINCIDENT
        assert proportional(verdict.homography.ravel(), np.eye(3).ravel())
        assert verdict.reconstruction.coincident

    def test_planted_irregular_pair_blocks(self):
        rng = np.random.default_rng(7)
        base = scene_with_axis_cameras(rng, 7)
        corrs = np.vstack([base, [[0.0, 0.0, 1.0, 1.0]]])
        candidates = fundamental_candidates(corrs)
        truth = skew((0.0, 0.0, 1.0))
        assert any(proportional(F.matrix.ravel(), truth.ravel()) for F in candidates)
        verdict = decide(corrs)
        assert verdict.status is VerdictStatus.EPIPOLAR_ONLY
        assert any(index == 7 for index, _ in verdict.irregular_indices)

    def test_unrelated_points_no_fundamental(self):
        rng = np.random.default_rng(8)
        verdict = decide(rng.uniform(-1, 1, (9, 4)))
        assert verdict.status is VerdictStatus.NO_FUNDAMENTAL

    def test_inconclusive_on_repeated_left_point(self):
        # every constraint row shares the same x^, so the nullspace is the
        # six-dimensional family with a common right kernel: all pencils
        # are determinant-degenerate, and no homography can satisfy
        # non-collinear targets
        corrs = np.array([
            [0.5, 0.5, 0.0, 0.0],
            [0.5, 0.5, 1.0, 0.0],
            [0.5, 0.5, 0.0, 1.0],
            [0.5, 0.5, 2.0, 3.0],
        ])
        verdict = decide(corrs)
        assert verdict.status is VerdictStatus.INCONCLUSIVE
        assert verdict.nullity >= 3

    def test_completeness_over_many_scenes(self):
        rng = np.random.default_rng(9)
        for i in range(500):
            rec, corrs = general_scene(rng, 8 + (i % 4), first_identity=True)
            verdict = decide(corrs)
            assert verdict.status is VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT, i
            assert verdict.nullity <= 2

    def test_regularity_formulation_agreement(self):
        # [b]x ([b]x F) x^ = -(b.b) [b]x A x^ for F = [b]x A, so the
        # (A, b)- and ([b]x F, b)-classifications coincide pair by pair
        rng = np.random.default_rng(10)
        for _ in range(50):
            rec, corrs = general_scene(rng, 6, first_identity=True)
            A = rec.camera2.A
            b = rec.camera2.b
            F = skew(b) @ A
            xh = lift(corrs[0, :2])
            assert np.allclose(skew(b) @ (skew(b) @ F) @ xh,
                               -(b @ b) * (skew(b) @ A @ xh))
            for row in corrs:
                assert (pair_regularity(A, b, row[:2], row[2:])
                        is pair_regularity(skew(b) @ F, b, row[:2], row[2:]))

    def test_verdict_status_is_affine_invariant(self):
        rng = np.random.default_rng(11)

        def transform(corrs, S, s, T, t):
            return np.hstack([corrs[:, :2] @ S.T + s, corrs[:, 2:] @ T.T + t])

        cases = []
        rec, corrs = general_scene(rng, 10, first_identity=True)
        cases.append(corrs)
        xs = rng.uniform(-1, 1, (6, 2))
        cases.append(np.hstack([xs, xs]))
        base = scene_with_axis_cameras(rng, 7)
        cases.append(np.vstack([base, [[0.0, 0.0, 1.0, 1.0]]]))
        cases.append(rng.uniform(-1, 1, (9, 4)))
        for corrs in cases:
            expected = decide(corrs).status
            for _ in range(3):
                S = well_conditioned(rng, (2, 2))
                T = well_conditioned(rng, (2, 2))
                s, t = rng.uniform(-1, 1, (2, 2))
                assert decide(transform(corrs, S, s, T, t)).status is expected


class TestSoundnessHook:
    def test_every_verdict_passes_through_verification(self, monkeypatch):
        calls = []
        real = decision_mod.verify_certificates

        def spy(verdict, corrs, tol):
            calls.append(verdict.status)
            return real(verdict, corrs, tol)

        monkeypatch.setattr(decision_mod, "verify_certificates", spy)
        rng = np.random.default_rng(12)
        rec, corrs = general_scene(rng, 9, first_identity=True)
        inputs = [
            corrs,
            np.hstack([rng.uniform(-1, 1, (6, 2))] * 2),
            rng.uniform(-1, 1, (9, 4)),
        ]
        for arr in inputs:
            decide(arr)
        assert len(calls) == len(inputs)

    def test_tampered_noncoincident_certificate_rejected(self):
        rng = np.random.default_rng(13)
        rec, corrs = general_scene(rng, 9, first_identity=True)
        verdict = decide(corrs)
        shuffled = corrs[::-1].copy()
        with pytest.raises(WitnessInvalidError):
            verify_certificates(verdict, shuffled)

    def test_epipolar_only_requires_indices(self):
        rng = np.random.default_rng(14)
        rec, corrs = general_scene(rng, 9, first_identity=True)
        verdict = decide(corrs)
        bogus = Verdict(
            status=VerdictStatus.EPIPOLAR_ONLY,
            fundamental=verdict.fundamental,
            irregular_indices=(),
        )
        with pytest.raises(WitnessInvalidError):
            verify_certificates(bogus, corrs)

    def test_missing_certificates_rejected(self):
        rng = np.random.default_rng(15)
        rec, corrs = general_scene(rng, 9, first_identity=True)
        bogus = Verdict(status=VerdictStatus.RECONSTRUCTABLE_NONCOINCIDENT)
        with pytest.raises(WitnessInvalidError):
            verify_certificates(bogus, corrs)


class TestReconstruct:
    def test_returns_certified_reconstruction(self):
        rng = np.random.default_rng(16)
        rec, corrs = general_scene(rng, 9, first_identity=True)
        out = reconstruct(corrs)
        assert out.verify()
        assert out.finite_canonical

    def test_coincident_case(self):
        rng = np.random.default_rng(17)
        xs = rng.uniform(-1, 1, (6, 2))
        out = reconstruct(np.hstack([xs, xs]))
        assert out.coincident

    def test_irregular_case_raises(self):
        rng = np.random.default_rng(18)
        base = scene_with_axis_cameras(rng, 7)
        corrs = np.vstack([base, [[0.0, 0.0, 1.0, 1.0]]])
        with pytest.raises(NotReconstructableError):
            reconstruct(corrs)
