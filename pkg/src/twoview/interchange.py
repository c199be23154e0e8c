"""Versioned text documents for the CLI and the test harness.

A document is a JSON object with a fixed key order: version,
correspondences, fundamental, cameras, points, homography, verdict.
Numbers are emitted with 17 significant digits, so parse(emit(doc))
reproduces every value bit-for-bit and identical documents serialize to
identical bytes.

Schema (all keys after "version" optional):
  version          "1"
  correspondences  [[x1, x2, y1, y2], ...]
  fundamental      list of 3x3 row-major matrices (candidates or a
                   single certificate)
  cameras          [P1, P2], each a 3x4 row-major matrix
  points           [[w1, w2, w3, w4], ...] homogeneous world points
  homography       3x3 row-major matrix
  verdict          {"status": str, "nullity": int,
                    "irregular_indices": [[index, classification], ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DOCUMENT_VERSION = "1"
_KEY_ORDER = ("version", "correspondences", "fundamental", "cameras",
              "points", "homography", "verdict")


@dataclass
class InterchangeDocument:
    version: str = DOCUMENT_VERSION
    correspondences: np.ndarray | None = None
    fundamental: list | None = None
    cameras: list | None = None
    points: np.ndarray | None = None
    homography: np.ndarray | None = None
    verdict: dict | None = None

    def equals(self, other: "InterchangeDocument") -> bool:
        """Field-for-field equality, with exact array comparison."""
        if self.version != other.version or self.verdict != other.verdict:
            return False
        for name in ("correspondences", "points", "homography"):
            a, b = getattr(self, name), getattr(other, name)
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        for name in ("fundamental", "cameras"):
            a, b = getattr(self, name), getattr(other, name)
            if (a is None) != (b is None):
                return False
            if a is not None:
                if len(a) != len(b):
                    return False
                if not all(np.array_equal(m, n) for m, n in zip(a, b)):
                    return False
        return True


def _format_float(value: float) -> str:
    text = format(float(value), ".17g")
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


def _render(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(item) for item in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(
            f"{json.dumps(str(key))}: {_render(item)}" for key, item in value.items()
        ) + "}"
    raise TypeError(f"cannot serialize value of type {type(value)!r}")


def emit(doc: InterchangeDocument) -> str:
    """Serialize a document to its canonical text form."""
    lines = []
    for key in _KEY_ORDER:
        value = getattr(doc, key)
        if value is None:
            continue
        lines.append(f'  "{key}": {_render(value)}')
    return "{\n" + ",\n".join(lines) + "\n}\n"


def _matrix(value, rows, cols, name):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (rows, cols):
        raise ValueError(f"{name} must be {rows}x{cols}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite numbers")
    return arr


def parse(text: str) -> InterchangeDocument:
    """Parse and validate a document; raises ValueError on malformed input."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"document is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("document must be a JSON object")
    unknown = set(data) - set(_KEY_ORDER)
    if unknown:
        raise ValueError(f"unknown document keys: {sorted(unknown)}")
    version = data.get("version")
    if version != DOCUMENT_VERSION:
        raise ValueError(f"unsupported document version: {version!r}")

    doc = InterchangeDocument(version=version)
    if "correspondences" in data:
        arr = np.asarray(data["correspondences"], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 1:
            raise ValueError("correspondences must be a nonempty list of 4-number rows")
        if not np.all(np.isfinite(arr)):
            raise ValueError("correspondences must contain only finite numbers")
        doc.correspondences = arr
    if "fundamental" in data:
        doc.fundamental = [
            _matrix(m, 3, 3, f"fundamental[{i}]") for i, m in enumerate(data["fundamental"])
        ]
    if "cameras" in data:
        cams = data["cameras"]
        if not isinstance(cams, list) or len(cams) != 2:
            raise ValueError("cameras must be a list of exactly two 3x4 matrices")
        doc.cameras = [_matrix(m, 3, 4, f"cameras[{i}]") for i, m in enumerate(cams)]
    if "points" in data:
        arr = np.asarray(data["points"], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValueError("points must be a list of homogeneous 4-number rows")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must contain only finite numbers")
        doc.points = arr
    if "homography" in data:
        doc.homography = _matrix(data["homography"], 3, 3, "homography")
    if "verdict" in data:
        verdict = data["verdict"]
        if not isinstance(verdict, dict) or "status" not in verdict:
            raise ValueError("verdict must be an object with a status")
        clean = {"status": str(verdict["status"])}
        if "nullity" in verdict:
            clean["nullity"] = int(verdict["nullity"])
        if "irregular_indices" in verdict:
            clean["irregular_indices"] = [
                [int(i), str(kind)] for i, kind in verdict["irregular_indices"]
            ]
        doc.verdict = clean
    return doc
