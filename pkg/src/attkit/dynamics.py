"""Rigid-body attitude dynamics in an attitude-dependent potential.

State is the pair (C, Omega) of a rotation matrix and a body angular
velocity in so(3). The kinematics is Cdot = C Omega and the momentum form
of Euler's equation is J(Omegadot) = [J(Omega), Omega] + moment(C), where
J(X) = S X + X S for the body's symmetric positive definite second moment
matrix S, and the moment induced by a potential V(C) with ambient gradient
G = dV/dC is G^T C - C^T G.

Propagation preserves SO(3) by construction: attitude updates are right
multiplications by exponentials of so(3) increments computed with a
4th-order Munthe-Kaas Runge-Kutta scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import so3
from .errors import PotentialGradientNotSkewCompatible, StepTooLarge

# Skew residual allowed in the Euler equation right-hand side.
MOMENT_SKEW_TOL = 1e-12
# Guard: no single integrator step may rotate the body by more than this.
MAX_STEP_ROTATION = math.pi / 4


@dataclass(frozen=True, eq=False)
class InertiaSpec:
    """Inertia of the rigid body.

    second_moment is the symmetric positive definite matrix S entering the
    momentum operator J(X) = S X + X S (the second moment of the mass
    distribution, in kg m^2). The classical inertia matrix acting on
    axis-angle coordinates, trace(S) I - S, is cached together with its
    inverse; it is automatically positive definite because each of its
    eigenvalues is a sum of two eigenvalues of S.
    """

    second_moment: np.ndarray
    classical: np.ndarray = field(init=False)
    classical_inv: np.ndarray = field(init=False)

    def __post_init__(self):
        S = so3.check_spd(self.second_moment)
        object.__setattr__(self, "second_moment", S)
        K = np.trace(S) * np.eye(3) - S
        object.__setattr__(self, "classical", K)
        object.__setattr__(self, "classical_inv", np.linalg.inv(K))

    @classmethod
    def from_classical(cls, K) -> "InertiaSpec":
        """Build from a classical inertia matrix (must map back to a positive
        definite second moment, which excludes degenerate flat bodies)."""
        K = so3.check_spd(K)
        return cls(0.5 * np.trace(K) * np.eye(3) - K)


@dataclass(frozen=True)
class PotentialModel:
    """Attitude-dependent potential with its ambient 3x3 gradient.

    value maps a rotation C to the scalar potential energy; gradient maps C
    to the 3x3 matrix of partial derivatives with respect to the entries of
    C. The library forms the skew moment from the gradient itself.
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    is_zero: bool = False


def zero_potential() -> PotentialModel:
    """Free rigid body: identically zero potential."""
    return PotentialModel(
        value=lambda C: 0.0, gradient=lambda C: np.zeros((3, 3)), is_zero=True
    )


def linear_potential(A) -> PotentialModel:
    """Potential trace(A^T C) with constant gradient A (uniform-field model)."""
    A = np.array(A, dtype=float)
    return PotentialModel(
        value=lambda C, _A=A: float(np.tensordot(_A, C)),
        gradient=lambda C, _A=A: _A,
    )


@dataclass(frozen=True, eq=False)
class BodyState:
    """Instantaneous state: time (s), attitude C, body angular velocity Omega."""

    t: float
    C: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "C", so3.check_rotation(self.C))
        object.__setattr__(self, "Omega", so3.check_skew(self.Omega))


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings."""

    step: float = 1e-3
    scheme: str = "rkmk4"

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError(f"integrator step must be positive, got {self.step!r}")
        if self.scheme != "rkmk4":
            raise ValueError(f"unknown integrator scheme {self.scheme!r}")


def j_apply(inertia, Omega) -> np.ndarray:
    """Momentum operator J(Omega) = S Omega + Omega S.

    Accepts an InertiaSpec or a bare symmetric positive definite matrix.
    """
    S = inertia.second_moment if isinstance(inertia, InertiaSpec) else np.asarray(
        inertia, dtype=float
    )
    Omega = np.asarray(Omega, dtype=float)
    return S @ Omega + Omega @ S


def j_solve(K_mat, M) -> np.ndarray:
    """Invert the operator X -> K X + X K on skew matrices.

    For symmetric positive definite K the map is an isomorphism of so(3);
    the unique skew solution is recovered through the 3-vector reduction
    (trace(K) I - K)^-1 applied to vee(M).
    """
    K_mat = np.asarray(K_mat, dtype=float)
    m = so3.vee(M)
    red = np.trace(K_mat) * np.eye(3) - K_mat
    return so3.hat(np.linalg.solve(red, m))


def _moment_matrix(C, G) -> np.ndarray:
    # Skew moment induced by the ambient potential gradient G at attitude C.
    M = np.asarray(G, dtype=float).T @ C
    return M - M.T


def euler_rhs(
    state: BodyState, inertia: InertiaSpec, potential: PotentialModel
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives (Cdot, Omegadot) of the attitude state.

    Cdot = C Omega. Omegadot solves J(Omegadot) = [J(Omega), Omega] + moment,
    after verifying the assembled right-hand side is skew; a violation can
    only come from a malformed potential gradient (NaN or wrong shape).
    """
    C, Omega = state.C, state.Omega
    JO = j_apply(inertia, Omega)
    rhs = JO @ Omega - Omega @ JO
    if not potential.is_zero:
        rhs = rhs + _moment_matrix(C, potential.gradient(C))
    resid = np.abs(rhs + rhs.T).max()
    if not resid <= MOMENT_SKEW_TOL:
        raise PotentialGradientNotSkewCompatible(
            f"skew residual {resid!r} in the dynamics right-hand side"
        )
    return C @ Omega, j_solve(inertia.second_moment, rhs)


def _make_free_step(K, Kinv):
    # Munthe-Kaas RK4 step for the free body, on plain floats: numpy call
    # dispatch dominates the cost at 3-vector sizes.
    (k00, k01, k02), (k10, k11, k12), (k20, k21, k22) = K
    (i00, i01, i02), (i10, i11, i12), (i20, i21, i22) = Kinv

    def f(w0, w1, w2):
        m0 = k00 * w0 + k01 * w1 + k02 * w2
        m1 = k10 * w0 + k11 * w1 + k12 * w2
        m2 = k20 * w0 + k21 * w1 + k22 * w2
        c0 = m1 * w2 - m2 * w1
        c1 = m2 * w0 - m0 * w2
        c2 = m0 * w1 - m1 * w0
        return (
            i00 * c0 + i01 * c1 + i02 * c2,
            i10 * c0 + i11 * c1 + i12 * c2,
            i20 * c0 + i21 * c1 + i22 * c2,
        )

    def step(C, w, h):
        w0, w1, w2 = w
        l1 = f(w0, w1, w2)
        hh = 0.5 * h
        a2 = _dexpinv_tuple(hh * w0, hh * w1, hh * w2,
                            w0 + hh * l1[0], w1 + hh * l1[1], w2 + hh * l1[2])
        l2 = f(w0 + hh * l1[0], w1 + hh * l1[1], w2 + hh * l1[2])
        a3 = _dexpinv_tuple(hh * a2[0], hh * a2[1], hh * a2[2],
                            w0 + hh * l2[0], w1 + hh * l2[1], w2 + hh * l2[2])
        l3 = f(w0 + hh * l2[0], w1 + hh * l2[1], w2 + hh * l2[2])
        a4 = _dexpinv_tuple(h * a3[0], h * a3[1], h * a3[2],
                            w0 + h * l3[0], w1 + h * l3[1], w2 + h * l3[2])
        l4 = f(w0 + h * l3[0], w1 + h * l3[1], w2 + h * l3[2])
        s = h / 6.0
        th = (
            s * (w0 + 2.0 * a2[0] + 2.0 * a3[0] + a4[0]),
            s * (w1 + 2.0 * a2[1] + 2.0 * a3[1] + a4[1]),
            s * (w2 + 2.0 * a2[2] + 2.0 * a3[2] + a4[2]),
        )
        wn = (
            w0 + s * (l1[0] + 2.0 * l2[0] + 2.0 * l3[0] + l4[0]),
            w1 + s * (l1[1] + 2.0 * l2[1] + 2.0 * l3[1] + l4[1]),
            w2 + s * (l1[2] + 2.0 * l2[2] + 2.0 * l3[2] + l4[2]),
        )
        return C @ so3._exp_vec(th), wn

    return step


def _dexpinv_tuple(s0, s1, s2, w0, w1, w2):
    # Algebra-coordinate derivative for C = C0 exp(hat(s)) under the
    # body-frame kinematics Cdot = C hat(w):
    # s' = w + 1/2 s x w + 1/12 s x (s x w), truncated at the order an RK4
    # scheme requires. The plus sign on the first commutator matters; the
    # minus variant drops the scheme to 3rd order.
    c0 = s1 * w2 - s2 * w1
    c1 = s2 * w0 - s0 * w2
    c2 = s0 * w1 - s1 * w0
    d0 = s1 * c2 - s2 * c1
    d1 = s2 * c0 - s0 * c2
    d2 = s0 * c1 - s1 * c0
    return (
        w0 + 0.5 * c0 + d0 / 12.0,
        w1 + 0.5 * c1 + d1 / 12.0,
        w2 + 0.5 * c2 + d2 / 12.0,
    )


def _dexpinv_vec(s, w):
    c = np.cross(s, w)
    return w + 0.5 * c + np.cross(s, c) / 12.0


def _make_potential_step(K, Kinv, gradient):
    # General Munthe-Kaas RK4 step; stage attitudes are needed because the
    # moment depends on C.
    def f(C, w):
        Mm = np.asarray(gradient(C), dtype=float).T @ C
        m = np.cross(K @ w, w)
        m[0] += Mm[2, 1] - Mm[1, 2]
        m[1] += Mm[0, 2] - Mm[2, 0]
        m[2] += Mm[1, 0] - Mm[0, 1]
        return Kinv @ m

    def step(C, w, h):
        w = np.asarray(w)
        l1 = f(C, w)
        hh = 0.5 * h
        t2 = hh * w
        u2 = w + hh * l1
        a2 = _dexpinv_vec(t2, u2)
        l2 = f(C @ so3._exp_vec(t2), u2)
        t3 = hh * a2
        u3 = w + hh * l2
        a3 = _dexpinv_vec(t3, u3)
        l3 = f(C @ so3._exp_vec(t3), u3)
        t4 = h * a3
        u4 = w + h * l3
        a4 = _dexpinv_vec(t4, u4)
        l4 = f(C @ so3._exp_vec(t4), u4)
        th = (h / 6.0) * (w + 2.0 * a2 + 2.0 * a3 + a4)
        wn = w + (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
        return C @ so3._exp_vec(th), tuple(wn)

    return step


def propagate(
    state: BodyState,
    inertia: InertiaSpec,
    potential: PotentialModel,
    t_end: float,
    cfg: IntegratorConfig | None = None,
) -> BodyState:
    """Integrate the attitude dynamics from state.t to t_end.

    Fixed step cfg.step with a final partial step; raises StepTooLarge if
    any step would rotate the body by more than pi/4, where the local
    accuracy of the exponential update degrades.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    span = t_end - state.t
    if span < 0.0:
        raise ValueError(f"t_end {t_end!r} precedes state time {state.t!r}")
    if span == 0.0:
        return state

    K = inertia.classical
    if potential.is_zero:
        step = _make_free_step(
            tuple(map(tuple, K)), tuple(map(tuple, inertia.classical_inv))
        )
    else:
        step = _make_potential_step(K, inertia.classical_inv, potential.gradient)

    h = cfg.step
    n_full = int(math.floor(span / h + 1e-12))
    rem = span - n_full * h
    if rem <= 1e-12 * max(1.0, abs(span)):
        rem = 0.0

    C = state.C
    w = tuple(so3.vee(state.Omega))
    for i in range(n_full):
        wmag = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
        if wmag * h > MAX_STEP_ROTATION:
            raise StepTooLarge(
                f"step {h} at rate {wmag:.3f} rad/s exceeds the pi/4 guard"
            )
        C, w = step(C, w, h)
    if rem > 0.0:
        wmag = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
        if wmag * rem > MAX_STEP_ROTATION:
            raise StepTooLarge(
                f"step {rem} at rate {wmag:.3f} rad/s exceeds the pi/4 guard"
            )
        C, w = step(C, w, rem)
    return BodyState(t=t_end, C=C, Omega=so3.hat(w))


@dataclass(frozen=True)
class PotentialReport:
    """Outcome of a finite-difference audit of a potential gradient."""

    max_rel_error: float
    n_samples: int
    passed: bool


def validate_potential(
    potential: PotentialModel,
    n_samples: int = 20,
    rng: np.random.Generator | None = None,
    fd_eps: float = 1e-5,
) -> PotentialReport:
    """Check the gradient against central differences of the value.

    Samples random attitudes and random unit tangent directions, compares
    the directional derivative predicted by the gradient with a central
    finite difference of the value, and reports the worst relative error
    (relative to the finite-difference estimate).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(n_samples):
        C = so3.random_rotation(rng)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        d_plus = potential.value(C @ so3._exp_vec(fd_eps * u))
        d_minus = potential.value(C @ so3._exp_vec(-fd_eps * u))
        fd = (d_plus - d_minus) / (2.0 * fd_eps)
        predicted = float(
            np.tensordot(np.asarray(potential.gradient(C), dtype=float), C @ so3.hat(u))
        )
        rel = abs(predicted - fd) / max(abs(fd), 1e-12)
        worst = max(worst, rel)
    return PotentialReport(max_rel_error=worst, n_samples=n_samples, passed=worst <= 1e-5)


def kinetic_energy(inertia: InertiaSpec, Omega) -> float:
    """Rotational kinetic energy 0.5 <Omega, Omega S> = 0.5 w^T K w."""
    w = so3.vee(Omega)
    return float(0.5 * w @ inertia.classical @ w)


def spatial_momentum(state: BodyState, inertia: InertiaSpec) -> np.ndarray:
    """Angular momentum in the inertial frame, C J(Omega) C^T (skew matrix).

    Conserved along free motion (zero potential).
    """
    return state.C @ j_apply(inertia, state.Omega) @ state.C.T
