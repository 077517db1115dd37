import numpy as np
import pytest

from attkit import reference_case as rc
from attkit import so3, wahba
from attkit.errors import ReflectionProfile, ShapeMismatch, SingularProfile

ONES7 = np.ones(7)


def _random_unit_set(rng, n=5):
    V = rng.normal(size=(3, n))
    return V / np.linalg.norm(V, axis=0, keepdims=True)


# ---------------------------------------------------------------------------
# profile construction

def test_build_profile_identity_case():
    p = wahba.build_profile(np.eye(3), np.ones(3), np.eye(3))
    assert np.abs(p.matrix - np.eye(3)).max() == 0.0
    assert abs(p.det - 1.0) <= 1e-15


def test_build_profile_reference_data_positive_det():
    p = wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS)
    assert p.det > 0.0


def test_build_profile_outer_product_sum_oracle():
    rng = np.random.default_rng(20)
    E = _random_unit_set(rng)
    B = _random_unit_set(rng)
    w = rng.uniform(0.5, 2.0, size=5)
    expected = sum(w[i] * np.outer(E[:, i], B[:, i]) for i in range(5))
    p = wahba.build_profile(E, w, B)
    assert np.abs(p.matrix - expected).max() <= 1e-13


def test_build_profile_shape_and_weight_errors():
    with pytest.raises(ShapeMismatch):
        wahba.build_profile(np.eye(3), np.ones(4), np.eye(3))
    with pytest.raises(ShapeMismatch):
        wahba.build_profile(np.eye(3)[:, :2], np.ones(2), np.eye(3)[:, :2])
    with pytest.raises(ValueError):
        wahba.build_profile(np.eye(3), np.array([1.0, -1.0, 1.0]), np.eye(3))


def test_build_profile_rank_deficient_raises():
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    planar = np.stack([e1, e2, (e1 + e2) / np.sqrt(2.0)], axis=1)
    with pytest.raises(SingularProfile):
        wahba.build_profile(planar, np.ones(3), np.eye(3))


def test_check_vector_set_unit_flag():
    rng = np.random.default_rng(29)
    V = _random_unit_set(rng)
    wahba.check_vector_set(V, unit=True)
    with pytest.raises(ValueError):
        wahba.check_vector_set(2.0 * V, unit=True)


# ---------------------------------------------------------------------------
# the solver

def test_solve_identity_fixed_point():
    C, S = wahba.solve_attitude(wahba.profile_from_matrix(np.eye(3)))
    assert np.abs(C - np.eye(3)).max() <= 1e-14
    assert np.abs(S - np.eye(3)).max() <= 1e-14


def test_solve_reproduces_reference_results():
    p = wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS)
    C, S = wahba.solve_attitude(p)
    assert np.abs(C - rc.ATTITUDE_EST).max() <= rc.TOLERANCE
    err = so3.attitude_error_matrix(C, rc.ATTITUDE_TRUE)
    assert np.abs(err).max() <= rc.TOLERANCE
    so3.check_rotation(C, tol=1e-12)
    so3.check_spd(S)


def test_solve_matches_svd_procrustes_oracle():
    rng = np.random.default_rng(21)
    count = 0
    while count < 1000:
        E = _random_unit_set(rng)
        B = _random_unit_set(rng)
        w = rng.uniform(0.2, 3.0, size=5)
        L = E @ (w[:, None] * B.T)
        if np.linalg.det(L) <= 1e-6:
            continue
        count += 1
        C, _ = wahba.solve_attitude(wahba.profile_from_matrix(L))
        U, _, Vt = np.linalg.svd(L)
        oracle = U @ np.diag([1.0, 1.0, np.linalg.det(U @ Vt)]) @ Vt
        assert np.abs(C - oracle).max() <= 1e-9


def test_solve_unbiased_on_exact_measurements():
    rng = np.random.default_rng(22)
    for _ in range(200):
        C_true = so3.random_rotation(rng)
        E = _random_unit_set(rng, n=4)
        B = C_true.T @ E
        w = rng.uniform(0.1, 5.0, size=4)
        C, _ = wahba.solve_attitude(wahba.build_profile(E, w, B))
        assert np.abs(C - C_true).max() <= 1e-9


def test_solve_stationarity_residual():
    rng = np.random.default_rng(23)
    for _ in range(200):
        E = _random_unit_set(rng)
        B = so3.random_rotation(rng).T @ E + 0.01 * rng.normal(size=(3, 5))
        p = wahba.build_profile(E, np.ones(5), B)
        C, _ = wahba.solve_attitude(p)
        L = p.matrix
        assert np.abs(C.T @ L - L.T @ C).max() <= 1e-10


def test_solver_factor_is_inverse_sqrt_of_LLT():
    p = wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS)
    C, S = wahba.solve_attitude(p)
    L = p.matrix
    assert np.abs(S @ (L @ L.T) @ S - np.eye(3)).max() <= 1e-9


def test_solve_invariant_to_global_weight_scale():
    p0 = wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS)
    C0, _ = wahba.solve_attitude(p0)
    for alpha in (1e-3, 7.0, 1e4):
        p = wahba.build_profile(rc.REFS, alpha * ONES7, rc.BODY_MEAS)
        C, _ = wahba.solve_attitude(p)
        assert np.abs(C - C0).max() <= 1e-12


def test_solve_left_invariance():
    rng = np.random.default_rng(24)
    Q = so3.random_rotation(rng)
    C0, _ = wahba.solve_attitude(wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS))
    CQ, _ = wahba.solve_attitude(wahba.build_profile(Q @ rc.REFS, ONES7, rc.BODY_MEAS))
    assert np.abs(CQ - Q @ C0).max() <= 1e-10


def test_solve_rejects_reflection_profile():
    with pytest.raises(ReflectionProfile):
        wahba.solve_attitude(wahba.profile_from_matrix(np.diag([1.0, 1.0, -1.0])))


def test_solve_reflection_fallback_is_sign_corrected_procrustes():
    rng = np.random.default_rng(25)
    L = np.diag([2.0, 1.0, -0.5]) @ so3.random_rotation(rng)
    p = wahba.profile_from_matrix(L)
    C, S = wahba.solve_attitude(p, allow_reflection=True)
    so3.check_rotation(C, tol=1e-10)
    U, _, Vt = np.linalg.svd(L)
    oracle = U @ np.diag([1.0, 1.0, np.linalg.det(U @ Vt)]) @ Vt
    assert np.abs(C - oracle).max() <= 1e-10
    assert np.abs(C - S @ L).max() <= 1e-10


def test_profile_from_matrix_rejects_singular():
    with pytest.raises(SingularProfile):
        wahba.profile_from_matrix(np.zeros((3, 3)))
    with pytest.raises(SingularProfile):
        wahba.profile_from_matrix(np.diag([1.0, 1.0, 1e-16]))


# ---------------------------------------------------------------------------
# cost and minimality

def test_cost_zero_for_exact_alignment():
    rng = np.random.default_rng(26)
    C = so3.random_rotation(rng)
    E = _random_unit_set(rng)
    B = C.T @ E
    assert wahba.alignment_cost(C, E, B, np.ones(5)) <= 1e-28


def test_cost_on_reference_data_has_noise_scale():
    C, _ = wahba.solve_attitude(wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS))
    cost = wahba.alignment_cost(C, rc.REFS, rc.BODY_MEAS, ONES7)
    # Seven vectors at roughly 0.002 rad of noise: 0.5 * n * sigma^2 scale.
    assert 1e-6 < cost < 5e-5
    resid = rc.REFS - C @ rc.BODY_MEAS
    assert np.abs(resid).max() < 2.5e-3


def test_cost_columnwise_oracle():
    rng = np.random.default_rng(27)
    C = so3.random_rotation(rng)
    E = _random_unit_set(rng)
    B = _random_unit_set(rng)
    w = rng.uniform(0.1, 2.0, size=5)
    manual = 0.5 * sum(
        w[i] * np.linalg.norm(E[:, i] - C @ B[:, i]) ** 2 for i in range(5)
    )
    assert abs(wahba.alignment_cost(C, E, B, w) - manual) <= 1e-13


def test_minimality_probe_on_reference_solution():
    C, _ = wahba.solve_attitude(wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS))
    assert wahba.check_local_minimality(C, rc.REFS, rc.BODY_MEAS, ONES7)


def test_minimality_probe_rejects_displaced_solution():
    C, _ = wahba.solve_attitude(wahba.build_profile(rc.REFS, ONES7, rc.BODY_MEAS))
    displaced = C @ so3.exp_so3(so3.hat([0.3, 0.0, 0.0]))
    assert not wahba.check_local_minimality(displaced, rc.REFS, rc.BODY_MEAS, ONES7)


def test_minimality_probe_at_global_minimum():
    rng = np.random.default_rng(28)
    C = so3.random_rotation(rng)
    E = _random_unit_set(rng)
    B = C.T @ E
    assert wahba.check_local_minimality(C, E, B, np.ones(5))
