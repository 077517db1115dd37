"""Ground-truth trajectory generation and synthetic sensor models.

Measured body vectors are the rotated references plus per-axis Gaussian
noise, re-normalized to unit length (the usual star-tracker model); gyro
readings are the true angular velocity plus per-axis Gaussian noise. All
generators take an explicit counter-based random generator, so scenarios
are bit-reproducible given a seed and independent trials can use spawned
streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import so3, wahba
from .dynamics import BodyState, InertiaSpec, IntegratorConfig, PotentialModel, propagate
from .filters import MeasurementBatch


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) for reproducible, splittable streams."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class NoiseSpec:
    """Sensor noise levels: per-axis standard deviations and the stream seed."""

    sigma_vec: float = 0.0
    sigma_gyro: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_vec < 0.0 or self.sigma_gyro < 0.0:
            raise ValueError("noise standard deviations must be non-negative")


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    """Everything needed to generate truth and measurements for one run."""

    refs: np.ndarray
    inertia: InertiaSpec
    potential: PotentialModel
    init: BodyState
    schedule: np.ndarray
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        object.__setattr__(
            self, "refs", wahba.check_vector_set(self.refs, name="scenario refs")
        )
        sched = np.asarray(self.schedule, dtype=float)
        if sched.ndim != 1:
            raise ValueError("schedule must be a 1-d sequence of times")
        if sched.size and (np.diff(sched) <= 0.0).any():
            raise ValueError("schedule times must be strictly increasing")
        if sched.size and sched[0] < self.init.t:
            raise ValueError("schedule starts before the initial state time")
        object.__setattr__(self, "schedule", sched)


def gen_truth(scn: ScenarioSpec, cfg: IntegratorConfig | None = None) -> list[BodyState]:
    """True states at every scheduled epoch, propagated from the initial state."""
    if cfg is None:
        cfg = IntegratorConfig()
    out = []
    state = scn.init
    for t in scn.schedule:
        state = propagate(state, scn.inertia, scn.potential, float(t), cfg)
        out.append(state)
    return out


def gen_vector_measurements(
    state: BodyState, refs, noise: NoiseSpec, rng: np.random.Generator
) -> np.ndarray:
    """Measured body-frame unit vectors for the given true state.

    Each column is normalize(C^T e + nu) with nu drawn per axis from
    N(0, sigma_vec^2). With sigma_vec = 0 the exact rotated references are
    returned unchanged.
    """
    refs = np.asarray(refs, dtype=float)
    body = state.C.T @ refs
    if noise.sigma_vec > 0.0:
        body = body + rng.normal(0.0, noise.sigma_vec, size=body.shape)
        body = body / np.linalg.norm(body, axis=0, keepdims=True)
    return body


def gen_gyro_measurement(
    Omega_true, noise: NoiseSpec, rng: np.random.Generator
) -> np.ndarray:
    """Measured angular velocity: truth plus per-axis N(0, sigma_gyro^2) noise."""
    Omega_true = np.asarray(Omega_true, dtype=float)
    if noise.sigma_gyro > 0.0:
        return Omega_true + so3.hat(rng.normal(0.0, noise.sigma_gyro, size=3))
    return Omega_true.copy()


def clustered_references(
    n: int,
    half_angle: float,
    axis=(0.0, 0.0, 1.0),
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """n unit directions drawn uniformly from a cone of the given half-angle.

    Mimics the clustered field of view of an optical sensor such as a star
    tracker.
    """
    if n < 3:
        raise ValueError("need at least 3 reference directions")
    if not 0.0 < half_angle <= math.pi:
        raise ValueError("half_angle must be in (0, pi]")
    if rng is None:
        rng = make_rng(0)
    z = rng.uniform(math.cos(half_angle), 1.0, size=n)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
    r = np.sqrt(1.0 - z * z)
    local = np.vstack([r * np.cos(phi), r * np.sin(phi), z])

    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    zhat = np.array([0.0, 0.0, 1.0])
    v = np.cross(zhat, axis)
    s = np.linalg.norm(v)
    if s < 1e-12:
        R = np.eye(3) if axis[2] > 0 else so3._exp_vec((math.pi, 0.0, 0.0))
    else:
        R = so3._exp_vec(v / s * math.atan2(s, float(zhat @ axis)))
    return R @ local


def gen_batches_from_truth(
    truth: list[BodyState],
    scn: ScenarioSpec,
    rng: np.random.Generator,
    omega_weight=None,
) -> list[MeasurementBatch]:
    """Draw one measurement batch per true state.

    Every batch carries a gyro reading so the result serves both filter
    modes; omega_weight defaults to the identity and identity vector
    weights are used.
    """
    if omega_weight is None:
        omega_weight = np.eye(3)
    batches = []
    for state in truth:
        body = gen_vector_measurements(state, scn.refs, scn.noise, rng)
        omega_meas = gen_gyro_measurement(state.Omega, scn.noise, rng)
        batches.append(
            MeasurementBatch(
                t=state.t,
                refs=scn.refs,
                body=body,
                omega_meas=omega_meas,
                omega_weight=omega_weight,
            )
        )
    return batches


def simulate_scenario(
    scn: ScenarioSpec,
    rng: np.random.Generator | None = None,
    cfg: IntegratorConfig | None = None,
    omega_weight=None,
) -> tuple[list[BodyState], list[MeasurementBatch]]:
    """Generate (truth, measurement batches) for a scenario.

    Deterministic given the scenario: the default rng is seeded from
    scn.noise.seed.
    """
    if rng is None:
        rng = make_rng(scn.noise.seed)
    truth = gen_truth(scn, cfg)
    return truth, gen_batches_from_truth(truth, scn, rng, omega_weight=omega_weight)
