"""Core algebra on the rotation group SO(3) and its Lie algebra so(3).

Rotations and skew matrices are carried as plain 3x3 float arrays; the
validators below enforce the invariants that the rest of the package
relies on. All functions are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import NotRotation, NotSkew, NotSymmetricPD, ShapeMismatch

# Orthogonality/determinant slack for rotations. Loose enough that long
# integrator runs pass without re-orthogonalization.
ROTATION_TOL = 1e-9
# Symmetry slack for skew and symmetric matrices.
SKEW_TOL = 1e-12
SYM_TOL = 1e-12

_I3 = np.eye(3)


def hat(v) -> np.ndarray:
    """Map a 3-vector to the skew matrix with hat(v) @ w == cross(v, w)."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(X, tol: float = SKEW_TOL) -> np.ndarray:
    """Inverse of hat. Raises NotSkew if X is not skew within tol."""
    X = np.asarray(X, dtype=float)
    if X.shape != (3, 3):
        raise ShapeMismatch(f"expected 3x3 matrix, got {X.shape}")
    resid = np.abs(X + X.T).max()
    if not resid <= tol:
        raise NotSkew(f"symmetry residual {resid:.3e} exceeds {tol:.1e}")
    return np.array([X[2, 1], X[0, 2], X[1, 0]])


def exp_so3(X) -> np.ndarray:
    """Exponential map so(3) -> SO(3) of a skew matrix, by the Rodrigues formula.

    A series branch is used below rotation angle 1e-6 to avoid the 0/0 in
    sin(t)/t and (1-cos(t))/t^2.
    """
    w = vee(X)
    return _exp_vec(w)


def _exp_vec(w) -> np.ndarray:
    # Rodrigues formula in axis-angle coordinates; w is a plain 3-sequence.
    x, y, z = w
    t2 = x * x + y * y + z * z
    t = np.sqrt(t2)
    if t < 1e-6:
        a = 1.0 - t2 / 6.0
        b = 0.5 - t2 / 24.0
    else:
        a = np.sin(t) / t
        b = (1.0 - np.cos(t)) / t2
    W = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return _I3 + a * W + b * (W @ W)


def trace_inner(A, B) -> float:
    """Trace inner product trace(A^T B) of two equally shaped matrices."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes {A.shape} and {B.shape} differ")
    return float(np.sum(A * B))


def principal_angle(C1, C2) -> float:
    """Rotation angle in [0, pi] separating two rotations.

    Computed as arccos((trace(C1^T C2) - 1) / 2) with the argument clamped
    to [-1, 1] to guard rounding just outside the domain. Both inputs are
    assumed to be valid rotations.
    """
    c = (np.tensordot(C1, C2) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def attitude_error_matrix(C_est, C_true) -> np.ndarray:
    """Multiplicative attitude error C_est^T C_true minus the identity."""
    return np.asarray(C_est).T @ np.asarray(C_true) - _I3


def check_rotation(C, tol: float = ROTATION_TOL) -> np.ndarray:
    """Validate a proper rotation matrix; returns it as a float array."""
    C = np.asarray(C, dtype=float)
    if C.shape != (3, 3):
        raise NotRotation(f"expected 3x3 matrix, got {C.shape}")
    ortho = np.abs(C.T @ C - _I3).max()
    if not ortho <= tol:
        raise NotRotation(f"orthogonality residual {ortho:.3e} exceeds {tol:.1e}")
    det = np.linalg.det(C)
    if not abs(det - 1.0) <= tol:
        raise NotRotation(f"determinant {det!r} not within {tol:.1e} of 1")
    return C


def check_skew(X, tol: float = SKEW_TOL) -> np.ndarray:
    """Validate a skew-symmetric matrix; returns it as a float array."""
    X = np.asarray(X, dtype=float)
    vee(X, tol=tol)
    return X


def check_spd(S, sym_tol: float = SYM_TOL) -> np.ndarray:
    """Validate a symmetric positive definite matrix; returns it as a float array."""
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise NotSymmetricPD(f"expected 3x3 matrix, got {S.shape}")
    resid = np.abs(S - S.T).max()
    if not resid <= sym_tol:
        raise NotSymmetricPD(f"symmetry residual {resid:.3e} exceeds {sym_tol:.1e}")
    lo = np.linalg.eigvalsh(S)[0]
    if not lo > 0.0:
        raise NotSymmetricPD(f"smallest eigenvalue {lo!r} is not positive")
    return S


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Draw a uniformly distributed rotation matrix."""
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0.0:
        Q[:, 2] = -Q[:, 2]
    return Q
