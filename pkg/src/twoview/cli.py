"""Command-line front end.

Each subcommand maps onto one library entry point:

  check        correspondences -> verdict with certificates
  fundamental  correspondences -> fundamental-matrix candidates
  cameras      fundamental matrix -> finite non-coincident camera pair
  triangulate  cameras + correspondences -> world points
  equiv        correspondences -> planar homography witness, if any
  synth        scene configuration -> document with ground truth

Documents go to --out or standard output; a human summary accompanies
them unless --quiet is given. Exit codes: 0 for definite verdicts, 2 for
an inconclusive verdict, 1 for input errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .decision import VerdictStatus, decide, fundamental_candidates
from .epipolar import FundamentalMatrix, finite_pair_from_fundamental, triangulate
from .exceptions import TwoViewError
from .geometry import Camera
from .interchange import InterchangeDocument, emit, parse
from .numerics import Tolerances, proportional
from .reconstruction import projective_equivalence
from .synth import SceneConfig, synthesize_scene
from .validation import check_correspondences


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="twoview",
        description="Decide two-view projective reconstructability and construct certificates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-8,
                        help="relative singular-value cutoff (default 1e-8)")
    common.add_argument("--tol-prop", type=float, default=1e-8,
                        help="proportionality cutoff (default 1e-8)")
    common.add_argument("--tol-residual", type=float, default=1e-8,
                        help="epipolar residual cutoff (default 1e-8)")
    common.add_argument("--out", metavar="PATH",
                        help="write the output document here instead of stdout")
    common.add_argument("--quiet", action="store_true",
                        help="suppress the human summary")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "decide reconstructability of the document's correspondences"),
        ("fundamental", "list fundamental-matrix candidates for the correspondences"),
        ("cameras", "derive a finite camera pair from the document's fundamental matrix"),
        ("triangulate", "triangulate the correspondences under the document's cameras"),
        ("equiv", "search for a planar homography between the two images"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("document", help="input document path, or - for stdin")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic scene document")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--pairs", type=int, default=12, help="total correspondence count")
    p.add_argument("--camera-kind", default="finite-noncoincident",
                   choices=("finite-noncoincident", "finite-coincident", "infinite-second"))
    p.add_argument("--infinite-points", type=int, default=0,
                   help="number of world points at infinity")
    p.add_argument("--plant-epipole-pair", action="store_true",
                   help="append an epipole-epipole pair (regular, on the baseline)")
    p.add_argument("--plant-irregular-pair", action="store_true",
                   help="append a pair that satisfies the constraints but cannot triangulate")
    return parser


def _read_document(path: str) -> InterchangeDocument:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse(text)


def _write_document(doc: InterchangeDocument, out, quiet, summary_lines):
    text = emit(doc)
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if not quiet:
        for line in summary_lines:
            print(line)


def _require_correspondences(doc: InterchangeDocument) -> np.ndarray:
    if doc.correspondences is None:
        raise ValueError("document carries no correspondences")
    return check_correspondences(doc.correspondences)


def _cmd_check(args, tol):
    doc = _read_document(args.document)
    corrs = _require_correspondences(doc)
    verdict = decide(corrs, tol)
    out = InterchangeDocument(correspondences=corrs)
    payload = {"status": verdict.status.value, "nullity": verdict.nullity}
    if verdict.irregular_indices:
        payload["irregular_indices"] = [
            [index, report.value] for index, report in verdict.irregular_indices
        ]
    out.verdict = payload
    if verdict.fundamental is not None:
        out.fundamental = [verdict.fundamental.matrix]
    if verdict.homography is not None:
        out.homography = verdict.homography
    if verdict.reconstruction is not None:
        rec = verdict.reconstruction
        out.cameras = [rec.camera1.matrix, rec.camera2.matrix]
        out.points = rec.points
    summary = [f"status: {verdict.status.value}"]
    for index, report in verdict.irregular_indices:
        summary.append(f"pair {index}: {report.value}")
    _write_document(out, args.out, args.quiet, summary)
    return 2 if verdict.status is VerdictStatus.INCONCLUSIVE else 0


def _cmd_fundamental(args, tol):
    doc = _read_document(args.document)
    corrs = _require_correspondences(doc)
    candidates = fundamental_candidates(corrs, tol)
    out = InterchangeDocument(
        correspondences=corrs,
        fundamental=[F.matrix for F in candidates],
    )
    _write_document(out, args.out, args.quiet,
                    [f"fundamental candidates: {len(candidates)}"])
    return 0


def _cmd_cameras(args, tol):
    doc = _read_document(args.document)
    if not doc.fundamental:
        raise ValueError("document carries no fundamental matrix")
    F = FundamentalMatrix(doc.fundamental[0], tol)
    camera1, camera2 = finite_pair_from_fundamental(F)
    out = InterchangeDocument(
        fundamental=[F.matrix],
        cameras=[camera1.matrix, camera2.matrix],
    )
    _write_document(out, args.out, args.quiet,
                    ["derived a finite non-coincident camera pair"])
    return 0


def _cmd_triangulate(args, tol):
    doc = _read_document(args.document)
    corrs = _require_correspondences(doc)
    if doc.cameras is None:
        raise ValueError("document carries no cameras")
    camera1 = Camera(doc.cameras[0], tol)
    camera2 = Camera(doc.cameras[1], tol)
    identity = np.hstack([np.eye(3), np.zeros((3, 1))])
    if not proportional(camera1.matrix.ravel(), identity.ravel(), tol):
        raise ValueError("triangulation requires the first camera to be (I | 0)")
    points = np.vstack([
        triangulate(camera2.A, camera2.b, row[:2], row[2:], tol) for row in corrs
    ])
    out = InterchangeDocument(
        correspondences=corrs,
        cameras=[camera1.matrix, camera2.matrix],
        points=points,
    )
    _write_document(out, args.out, args.quiet,
                    [f"triangulated {points.shape[0]} points"])
    return 0


def _cmd_equiv(args, tol):
    doc = _read_document(args.document)
    corrs = _require_correspondences(doc)
    H = projective_equivalence(corrs, tol)
    out = InterchangeDocument(correspondences=corrs, homography=H)
    summary = ["projectively equivalent: " + ("yes" if H is not None else "no")]
    _write_document(out, args.out, args.quiet, summary)
    return 0


def _cmd_synth(args, tol):
    config = SceneConfig(
        seed=args.seed,
        pair_count=args.pairs,
        camera_kind=args.camera_kind,
        infinite_point_count=args.infinite_points,
        plant_epipole_pair=args.plant_epipole_pair,
        plant_irregular_pair=args.plant_irregular_pair,
    )
    corrs, truth, irregular_index = synthesize_scene(config, tol)
    out = InterchangeDocument(
        correspondences=corrs,
        cameras=[truth.camera1.matrix, truth.camera2.matrix],
        points=truth.points,
    )
    if config.camera_kind == "finite-coincident":
        out.homography = truth.camera2.A
    summary = [
        f"synthesized {config.pair_count} pairs ({config.camera_kind}, seed {config.seed})"
    ]
    if irregular_index is not None:
        summary.append(f"pair {irregular_index}: planted irregular, not explained")
    _write_document(out, args.out, args.quiet, summary)
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "fundamental": _cmd_fundamental,
    "cameras": _cmd_cameras,
    "triangulate": _cmd_triangulate,
    "equiv": _cmd_equiv,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        tol = Tolerances(
            rank_rel=args.tol_rank,
            prop_rel=args.tol_prop,
            residual_abs=args.tol_residual,
        )
        return _COMMANDS[args.command](args, tol)
    except (TwoViewError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
