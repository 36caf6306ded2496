"""
Tests for error ellipsoids and worst-case errors.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from robustik.error_propagation import (
    build_ellipsoids,
    joint_error_bound,
    max_orientation_error,
    max_position_error,
    sample_joint_noise,
    weighted_metric,
    worst_case_error,
)
from robustik.errors import InvalidArgumentError
from robustik.kinematics import quaternion_jacobian, relative_analytical_jacobian
from robustik.models import JacobianMatrix, JointNoiseModel, UnitQuaternion, WorstCaseError


def boundary_samples(rng, count, dim, c):
    """Points on the sphere dTheta^T dTheta = c."""
    x = rng.normal(size=(count, dim))
    return np.sqrt(c) * x / np.linalg.norm(x, axis=1, keepdims=True)


def ball_samples(rng, count, dim, c):
    radii = rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / dim)
    return radii * boundary_samples(rng, count, dim, c)


class TestJointErrorBound:
    """Test the joint error ball radius."""

    @pytest.mark.parametrize('sigma, k, expected', [(0.0045, 2, 8.1e-5), (1.0, 1.0, 1.0), (0.0020, 2, 1.6e-5)])
    def test_values(self, sigma, k, expected):
        """c = (k sigma)^2."""
        assert joint_error_bound(JointNoiseModel(sigma, k, 14)) == pytest.approx(expected)

    def test_rejects_bad_model(self):
        """Negative sigma or non-positive k is invalid."""
        with pytest.raises(InvalidArgumentError):
            JointNoiseModel(-0.1, 2, 14)
        with pytest.raises(InvalidArgumentError):
            JointNoiseModel(0.1, 0, 14)


class TestPositionError:
    """Test the worst-case position error."""

    def test_identity(self):
        """Unit sphere image has radius sqrt(c)."""
        assert max_position_error(np.eye(3), 4e-4) == pytest.approx(0.02)

    def test_axis_scaling(self):
        """Longest semi-axis of diag(2, 1, 1)."""
        assert max_position_error(np.diag([2.0, 1.0, 1.0]), 1.0) == pytest.approx(2.0)

    def test_sampling_oracle(self, rng):
        """Matches the sampled maximum of |J_p dTheta| within 1%."""
        c = 8.1e-5
        for _ in range(20):
            J_p = rng.normal(size=(3, 14))
            p_star = max_position_error(J_p, c)
            # only the row-space component of dTheta moves the image
            _, _, Vt = np.linalg.svd(J_p, full_matrices=False)
            samples = boundary_samples(rng, 100000, 3, c) @ Vt
            sampled = np.max(np.linalg.norm(samples @ J_p.T, axis=1))
            assert sampled <= p_star * (1 + 1e-9)
            assert sampled >= 0.99 * p_star
            # generic boundary points never exceed the bound
            generic = boundary_samples(rng, 10000, 14, c)
            assert np.max(np.linalg.norm(generic @ J_p.T, axis=1)) <= p_star * (1 + 1e-9)

    def test_attained_at_top_singular_vector(self, rng):
        """The bound is reached at sqrt(c) times the top right-singular vector."""
        J_p = rng.normal(size=(3, 7))
        _, _, Vt = np.linalg.svd(J_p)
        assert np.linalg.norm(J_p @ (np.sqrt(0.01) * Vt[0])) == pytest.approx(max_position_error(J_p, 0.01))

    def test_rejects_non_finite(self):
        """Non-finite Jacobians are invalid."""
        J_p = np.eye(3)
        J_p[0, 0] = np.nan
        with pytest.raises(InvalidArgumentError):
            max_position_error(J_p, 1.0)


class TestOrientationError:
    """Test the worst-case orientation error."""

    def test_zero_jacobian(self):
        """No orientation sensitivity means no error."""
        q = UnitQuaternion.identity()
        o_star, q_star = max_orientation_error(np.zeros((3, 5)), q, 1e-4)
        assert o_star == 0.0
        assert q_star is q

    def test_hand_evaluated(self):
        """lambda_max = 4/c along e1 from identity gives pi/4."""
        c = 1e-4
        J_r = np.zeros((3, 3))
        J_r[0, 0] = np.sqrt(4.0 / c)
        o_star, q_star = max_orientation_error(J_r, UnitQuaternion.identity(), c)
        assert o_star == pytest.approx(np.pi / 4)
        assert_allclose(q_star.as_array(), [1 / np.sqrt(2), 1 / np.sqrt(2), 0.0, 0.0], atol=1e-12)

    def test_sign_invariance(self, rng):
        """Flipping q_rel does not change o_star."""
        J_r = rng.normal(size=(3, 14))
        q = UnitQuaternion.from_vector(rng.normal(size=4), normalize=True)
        o_plus, _ = max_orientation_error(J_r, q.as_array(), 8.1e-5)
        o_minus, _ = max_orientation_error(J_r, -q.as_array(), 8.1e-5)
        assert o_plus == pytest.approx(o_minus)

    def test_upper_bounds_linearized_samples(self, rng):
        """o_star bounds the angle of every linearized perturbation in the ball."""
        c = 8.1e-5
        for _ in range(5):
            J_r = rng.normal(size=(3, 14))
            q = UnitQuaternion.from_vector(rng.normal(size=4), normalize=True)
            o_star, _ = max_orientation_error(J_r, q, c)
            dq = 0.5 * (ball_samples(rng, 10000, 14, c) @ J_r.T) @ q.h_matrix()
            perturbed = q.as_array() + dq
            perturbed /= np.linalg.norm(perturbed, axis=1, keepdims=True)
            angles = np.arccos(np.clip(np.abs(perturbed @ q.as_array()), -1.0, 1.0))
            assert np.max(angles) <= 1.05 * o_star


class TestWeightedMetric:
    """Test M* = P* + gamma O*."""

    @pytest.mark.parametrize('p, o, gamma, expected', [
        (0.01, 0.0, 3.0, 0.01),
        (0.0, np.pi / 2, 0.1, 0.05 * np.pi),
        (0.0079, 0.0, 0.0, 0.0079),
    ])
    def test_values(self, p, o, gamma, expected):
        """Weighted sum."""
        assert weighted_metric(p, o, gamma) == pytest.approx(expected)

    def test_record_invariant(self):
        """WorstCaseError enforces the exact sum."""
        with pytest.raises(InvalidArgumentError):
            WorstCaseError(0.01, 0.1, 0.5, 0.1)
        assert WorstCaseError.from_components(0.01, 0.1, 0.1).m_star == 0.01 + 0.1 * 0.1

    def test_worst_case_uses_weighted_metric(self, baxter, published_pairs):
        """M* of a configuration is the weighted sum of its P* and O*."""
        pair = published_pairs['theta_star']
        J_a, _ = relative_analytical_jacobian(baxter, pair.theta_left, pair.theta_right)
        _, q_rel = quaternion_jacobian(baxter, pair.theta_left, pair.theta_right)
        score = worst_case_error(J_a, q_rel, 8.1e-5, 0.1)
        assert score.m_star == weighted_metric(score.p_star, score.o_star, 0.1)
        with pytest.raises(InvalidArgumentError):
            worst_case_error(J_a, q_rel, 8.1e-5, -0.1)

    def test_monotone_in_c(self, baxter, published_pairs):
        """Larger joint error never lowers M*."""
        pair = published_pairs['theta_star']
        J_a, _ = relative_analytical_jacobian(baxter, pair.theta_left, pair.theta_right)
        _, q_rel = quaternion_jacobian(baxter, pair.theta_left, pair.theta_right)
        scores = [worst_case_error(J_a, q_rel, c, 0.1).m_star for c in (0.0, 1e-6, 1e-5, 8.1e-5)]
        assert scores[0] == 0.0
        assert all(a <= b for a, b in zip(scores, scores[1:]))


class TestEllipsoids:
    """Test the task-space error ellipsoids."""

    def test_identity_position(self):
        """J_p = I gives characteristic I and bound c."""
        J = np.zeros((6, 3))
        J[:3] = np.eye(3)
        J[3:] = np.eye(3)
        position, orientation = build_ellipsoids(JacobianMatrix(J, 'analytical_relative'),
                                                  UnitQuaternion.identity(), 2e-4)
        assert_allclose(position.characteristic, np.eye(3), atol=1e-12)
        assert position.bound == 2e-4
        assert orientation.bound == pytest.approx(5e-5)
        assert not position.degenerate

    def test_degenerate_flag(self):
        """Rank-deficient blocks are flagged, not rejected."""
        J = np.zeros((6, 2))
        J[0, 0] = 1.0
        J[3, 1] = 1.0
        position, orientation = build_ellipsoids(JacobianMatrix(J, 'analytical_relative'),
                                                 UnitQuaternion.identity(), 1e-4)
        assert position.degenerate and orientation.degenerate

    def test_containment(self, baxter, published_pairs, rng):
        """Every linearized sample in the ball satisfies both ellipsoid inequalities."""
        c = 8.1e-5
        pair = published_pairs['theta_star']
        J_a, _ = relative_analytical_jacobian(baxter, pair.theta_left, pair.theta_right)
        _, q_rel = quaternion_jacobian(baxter, pair.theta_left, pair.theta_right)
        position, orientation = build_ellipsoids(J_a, q_rel, c)
        assert orientation.bound == pytest.approx(c / 4)

        samples = boundary_samples(rng, 10000, 14, c)
        dx = samples @ J_a.linear.T
        dq = 0.5 * (samples @ J_a.angular.T) @ q_rel.h_matrix()
        assert np.all(position.contains(dx, rtol=1e-6))
        assert np.all(orientation.contains(dq, rtol=1e-6))

    def test_requires_analytical(self):
        """Spatial Jacobians are rejected."""
        with pytest.raises(InvalidArgumentError):
            build_ellipsoids(JacobianMatrix(np.zeros((6, 3))), UnitQuaternion.identity(), 1.0)


class TestNoiseSampling:
    """Test Gaussian joint noise draws."""

    def test_zero_sigma(self):
        """sigma = 0 draws zeros."""
        assert not np.any(sample_joint_noise(JointNoiseModel(0.0, 2, 14), 10, 0))

    def test_variance(self):
        """Per-joint sample variance within 3% of sigma^2."""
        samples = sample_joint_noise(JointNoiseModel(0.0045, 2, 14), 100000, 7)
        assert_allclose(samples.var(axis=0), 0.0045 ** 2, rtol=0.03)

    def test_deterministic(self):
        """Same seed, same bytes."""
        model = JointNoiseModel(0.003, 2, 14)
        assert sample_joint_noise(model, 50, 42).tobytes() == sample_joint_noise(model, 50, 42).tobytes()

    def test_not_truncated(self):
        """Samples outside the k-sigma ball occur."""
        model = JointNoiseModel(0.01, 1, 14)
        samples = sample_joint_noise(model, 1000, 3)
        assert np.any(np.sum(samples ** 2, axis=1) > model.c)

    def test_count(self):
        """At least one sample is required."""
        with pytest.raises(InvalidArgumentError):
            sample_joint_noise(JointNoiseModel(0.01, 2, 3), 0, 1)
