"""Tolerance-aware small dense linear algebra.

Everything downstream (cameras, fundamental matrices, the decision
procedure) reduces to the handful of primitives in this module: the skew
operator, scale-equivalence of homogeneous vectors, SVD-based rank and
kernel with a relative cutoff, and a search for a vector avoiding a finite
set of hyperplanes.

All functions are pure and operate on small dense arrays; none of them
mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SearchExhaustedError, ZeroVectorError

# Fixed seed for the randomized stage of the hyperplane-avoidance search.
# Deterministic fallbacks (canonical basis, all-ones) run first, so the RNG
# only decides genuinely degenerate inputs.
_AVOID_SEED = 61843
_AVOID_RETRIES = 128


@dataclass(frozen=True)
class Tolerances:
    """Numerical cutoffs used throughout the package.

    rank_rel: relative singular-value cutoff for rank and kernel decisions.
    prop_rel: cutoff on the normalized difference for scale-equivalence.
    residual_abs: cutoff on normalized epipolar residuals.

    All three are dimensionless, strictly positive and < 1. The defaults
    separate exact-up-to-rounding zeros from honest nonzeros at 3x3/3x4
    scale; the constructions here carry no statistical noise.
    """

    rank_rel: float = 1e-8
    prop_rel: float = 1e-8
    residual_abs: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "prop_rel", "residual_abs"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


DEFAULT_TOLERANCES = Tolerances()


def _as_float_array(values, name="array"):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def skew(v) -> np.ndarray:
    """Return the 3x3 skew-symmetric matrix of the cross product with v.

    skew(v) @ w equals np.cross(v, w); the result has rank two unless
    v is the zero vector, in which case it is the zero matrix.
    """
    v = _as_float_array(v, "v").ravel()
    if v.shape != (3,):
        raise ValueError(f"skew expects a 3-vector, got shape {v.shape}")
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def normalize_hom(v) -> np.ndarray:
    """Scale a homogeneous vector to unit norm with its largest entry positive.

    This is the output convention for every homogeneous quantity the
    package emits; it makes results deterministic and diff-able.
    """
    v = _as_float_array(v, "v").ravel()
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroVectorError("cannot normalize the zero vector")
    out = v / norm
    lead = np.argmax(np.abs(out))
    if out[lead] < 0.0:
        out = -out
    return out


def proportional(u, v, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Decide whether two nonzero vectors are equal up to a nonzero scale.

    True iff the unit directions agree up to sign within tol.prop_rel.
    Symmetric and scale-invariant; raises ZeroVectorError on zero input.
    """
    u = _as_float_array(u, "u").ravel()
    v = _as_float_array(v, "v").ravel()
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("proportional is undefined for zero vectors")
    uu = u / nu
    vv = v / nv
    dist = min(np.linalg.norm(uu - vv), np.linalg.norm(uu + vv))
    return dist <= tol.prop_rel


def rank_tol(M, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Numerical rank: singular values above rank_rel times the largest."""
    M = _as_float_array(M, "M")
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.size == 0:
        raise ValueError("rank_tol expects a nonempty matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def nullspace(M, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of M, as matrix columns.

    Returns an (n, k) array whose columns span {v : ||Mv|| <= rank_rel
    * sigma_1 * ||v||}; k is 0 when M has full column rank.
    """
    M = _as_float_array(M, "M")
    if M.ndim == 1:
        M = M.reshape(1, -1)
    n = M.shape[1]
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    _, _, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    return vh[rank:].T.copy()


def find_avoiding_vector(vectors, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Find a vector with a strict margin against every hyperplane v_i-perp.

    Returns a with |a . v_i| > rank_rel * ||a|| * ||v_i|| for all i, so
    downstream divisions by a . v_i are safe. Tries the canonical basis
    vectors and the all-ones vector first (reproducible answers on small
    hand inputs), then up to 128 fixed-seed random unit vectors; the set
    of unusable directions has measure zero.

    Raises ZeroVectorError if some v_i is zero, SearchExhaustedError if
    the retry budget runs out.
    """
    vs = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not vs:
        raise ValueError("find_avoiding_vector needs at least one vector")
    n = vs[0].shape[0]
    if any(v.shape != (n,) for v in vs):
        raise ValueError("all vectors must share one dimension")
    stacked = np.vstack(vs)
    if not np.all(np.isfinite(stacked)):
        raise ValueError("vectors must contain only finite values")
    norms = np.linalg.norm(stacked, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVectorError("cannot avoid the zero vector")

    def acceptable(a):
        margin = tol.rank_rel * np.linalg.norm(a) * norms
        return bool(np.all(np.abs(stacked @ a) > margin))

    for candidate in (*np.eye(n), np.ones(n)):
        if acceptable(candidate):
            return candidate
    rng = np.random.default_rng(_AVOID_SEED)
    for _ in range(_AVOID_RETRIES):
        a = rng.standard_normal(n)
        a /= np.linalg.norm(a)
        if acceptable(a):
            return a
    raise SearchExhaustedError(
        f"no avoiding vector found for {len(vs)} vectors in R^{n} "
        f"after {_AVOID_RETRIES} random retries"
    )
