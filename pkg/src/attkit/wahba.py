"""Closed-form weighted least-squares attitude determination (Wahba's problem).

Given unit reference directions in the inertial frame, their measured
counterparts in the body frame, and positive weights, the module builds the
3x3 attitude profile matrix, factors it, and returns the unique rotation
minimizing the weighted alignment cost together with the symmetric positive
definite solver factor. The solver route is a QR factorization followed by
the inverse principal square root; an SVD-based orthogonal Procrustes
fallback is available for profiles with negative determinant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import so3
from .errors import ReflectionProfile, ShapeMismatch, SingularProfile

# Rank floor for vector sets: third singular value relative to the first.
RANK_RTOL = 1e-6
# Nonsingularity floor for the profile determinant relative to norm(L)^3.
DET_RTOL = 1e-12
# Floor for eigenvalues of R R^T relative to the largest one.
SQRT_EIG_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class AttitudeProfile:
    """3x3 attitude profile matrix with its determinant cached."""

    matrix: np.ndarray
    det: float


def check_vector_set(V, unit: bool = False, name: str = "vector set") -> np.ndarray:
    """Validate a 3xn set of direction vectors (n >= 3, numerical rank 3)."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != 3 or V.shape[1] < 3:
        raise ShapeMismatch(f"{name}: expected 3xn with n >= 3, got {V.shape}")
    if not np.isfinite(V).all():
        raise ValueError(f"{name}: non-finite entries")
    s = np.linalg.svd(V, compute_uv=False)
    if not s[2] >= RANK_RTOL * s[0]:
        raise SingularProfile(
            f"{name}: rank deficient (singular values {s}); problem is ill-posed"
        )
    if unit:
        norms = np.linalg.norm(V, axis=0)
        if np.abs(norms - 1.0).max() > 1e-6:
            raise ValueError(f"{name}: columns are not unit vectors")
    return V


def check_weights(w, n: int | None = None) -> np.ndarray:
    """Validate a vector of positive diagonal weights."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise ShapeMismatch(f"weights must be 1-d, got shape {w.shape}")
    if n is not None and w.shape[0] != n:
        raise ShapeMismatch(f"expected {n} weights, got {w.shape[0]}")
    if not (np.isfinite(w).all() and (w > 0.0).all()):
        raise ValueError("weights must be finite and strictly positive")
    return w


def profile_from_matrix(M) -> AttitudeProfile:
    """Wrap a precomputed 3x3 profile matrix, enforcing nonsingularity."""
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise ShapeMismatch(f"profile must be 3x3, got {M.shape}")
    det = float(np.linalg.det(M))
    scale = float(np.linalg.norm(M))
    if not abs(det) > DET_RTOL * scale**3:
        raise SingularProfile(f"profile determinant {det:.3e} below noise floor")
    return AttitudeProfile(matrix=M, det=det)


def build_profile(refs, weights, body) -> AttitudeProfile:
    """Accumulate the attitude profile matrix sum_i w_i e_i b_i^T.

    refs and body are 3xn vector sets (inertial references and measured body
    directions, matched column by column); weights are the n positive design
    weights. Measured vectors are used as given, without re-normalization.
    """
    refs = check_vector_set(refs, name="reference vectors")
    body = check_vector_set(body, name="body vectors")
    if refs.shape != body.shape:
        raise ShapeMismatch(
            f"reference set {refs.shape} and body set {body.shape} differ"
        )
    weights = check_weights(weights, n=refs.shape[1])
    return profile_from_matrix(refs @ (weights[:, None] * body.T))


def solve_attitude(
    profile: AttitudeProfile, allow_reflection: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Solve for the rotation best aligning the profiled vector pairs.

    Returns (attitude, factor): the optimal rotation and the symmetric
    positive definite matrix S such that attitude = S @ profile.matrix.
    S is the inverse principal square root of L L^T, evaluated through a
    proper-orthogonal QR factorization L = Q R as Q sqrt((R R^T)^-1) Q^T.

    A profile with non-positive determinant raises ReflectionProfile unless
    allow_reflection is set, in which case the sign-corrected SVD Procrustes
    rotation is substituted and the factor is the one implied by it.
    """
    L = profile.matrix
    if profile.det <= 0.0:
        if not allow_reflection:
            raise ReflectionProfile(
                f"profile determinant {profile.det:.3e} is not positive"
            )
        U, s, Vt = np.linalg.svd(L)
        D = np.diag([1.0, 1.0, float(np.sign(np.linalg.det(U @ Vt)))])
        C = U @ D @ Vt
        S = C @ np.linalg.inv(L)
        return C, 0.5 * (S + S.T)

    Q, R = np.linalg.qr(L)
    if np.linalg.det(Q) < 0.0:
        # Standard QR returns Q in O(3); flip the last column into SO(3).
        Q = Q.copy()
        R = R.copy()
        Q[:, 2] = -Q[:, 2]
        R[2, :] = -R[2, :]
    w, V = np.linalg.eigh(R @ R.T)
    if not w[0] > SQRT_EIG_RTOL * w[2]:
        raise SingularProfile(f"profile effectively singular (eigenvalues {w})")
    S = Q @ (V @ ((1.0 / np.sqrt(w))[:, None] * V.T)) @ Q.T
    S = 0.5 * (S + S.T)
    return S @ L, S


def alignment_cost(attitude, refs, body, weights) -> float:
    """Weighted least-squares cost 0.5 * sum_i w_i |e_i - C b_i|^2."""
    refs = np.asarray(refs, dtype=float)
    body = np.asarray(body, dtype=float)
    if refs.shape != body.shape or refs.shape[0] != 3:
        raise ShapeMismatch(
            f"reference set {refs.shape} and body set {body.shape} differ"
        )
    weights = check_weights(weights, n=refs.shape[1])
    D = refs - np.asarray(attitude, dtype=float) @ body
    return float(0.5 * np.sum(weights * np.einsum("ij,ij->j", D, D)))


def check_local_minimality(
    attitude,
    refs,
    body,
    weights,
    n_probes: int = 100,
    eps: float = 1e-3,
    rng: np.random.Generator | None = None,
) -> bool:
    """Probe whether a candidate attitude is a local minimum of the cost.

    Perturbs the candidate by eps about n_probes random unit tangent
    directions and reports False as soon as the cost drops by more than
    1e-12 below the candidate's cost.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    attitude = np.asarray(attitude, dtype=float)
    base = alignment_cost(attitude, refs, body, weights)
    for _ in range(n_probes):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        probe = attitude @ so3._exp_vec(eps * u)
        if alignment_cost(probe, refs, body, weights) < base - 1e-12:
            return False
    return True
