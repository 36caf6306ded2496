"""
Tests for IK enumeration, scoring and robust selection.
"""
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation

from robustik.config import IKSettings, TestingConfig
from robustik.errors import InvalidArgumentError, NoSolutionError
from robustik.kinematics import forward_kinematics, relative_pose
from robustik.models import IKPair, JointNoiseModel, Pose, WorstCaseError
from robustik.models.se3 import pose_distance
from robustik.robust_ik import (
    check_literal_pairs,
    dedupe,
    enumerate_ik_pairs,
    enumerate_relative_ik_pairs,
    feasibility_check,
    score_pair,
    score_pairs,
    select_robust_pair,
    solve_arm_ik,
    worst_pair,
)
from robustik.utils.helpers import derive_int_seed, halton_seeds, parse_float_list, wrap_angles

KNOWN_LEFT = np.array([0.3, 0.9, -0.6])
KNOWN_RIGHT = np.array([-0.2, 0.7, 0.4])


def planar_ik(target):
    """Both analytic elbow branches of a planar 3R arm (links 1.0, 0.8, 0.5)."""
    x, y = target.p[0], target.p[1]
    phi = np.arctan2(target.R[1, 0], target.R[0, 0])
    wx, wy = x - 0.5 * np.cos(phi), y - 0.5 * np.sin(phi)
    c2 = (wx ** 2 + wy ** 2 - 1.0 - 0.64) / 1.6
    solutions = []
    for t2 in (np.arccos(c2), -np.arccos(c2)):
        t1 = np.arctan2(wy, wx) - np.arctan2(0.8 * np.sin(t2), 1.0 + 0.8 * np.cos(t2))
        solutions.append(wrap_angles([t1, t2, phi - t1 - t2], np.ones(3, dtype=bool)))
    return solutions


def planar_targets(planar):
    g_L = forward_kinematics(planar.left, KNOWN_LEFT)
    g_R = forward_kinematics(planar.right, KNOWN_RIGHT)
    return g_L, g_R


@pytest.fixture
def wide_settings():
    """Test budgets with the full seed count."""
    return IKSettings.from_config(TestingConfig, seeds=64)


class TestHelpers:
    """Test enumeration helpers."""

    def test_wrap_angles(self):
        """Revolute joints land in (-pi, pi]."""
        out = wrap_angles([3 * np.pi / 2, -np.pi, 0.5, 7.0], [True, True, True, False])
        assert_allclose(out, [-np.pi / 2, np.pi, 0.5, 7.0])

    def test_wrap_angles_respects_limits(self):
        """A 2 pi shift is used when it lands inside the limits."""
        out = wrap_angles([3.0], [True], np.array([[0.0, 4.0]]))
        assert_allclose(out, [3.0])
        out = wrap_angles([-3.0], [True], np.array([[0.0, 4.0]]))
        assert_allclose(out, [2 * np.pi - 3.0])

    def test_halton_seeds(self):
        """Seeds lie within bounds and are reproducible."""
        bounds = np.array([[-1.0, 1.0], [0.0, 2.0], [-3.0, 3.0]])
        seeds = halton_seeds(bounds, 16, 5)
        assert seeds.shape == (16, 3)
        assert np.all(seeds >= bounds[:, 0]) and np.all(seeds <= bounds[:, 1])
        assert_allclose(seeds, halton_seeds(bounds, 16, 5))

    def test_derive_seed(self):
        """Child seeds depend on every index."""
        assert derive_int_seed(0, 1) == derive_int_seed(0, 1)
        assert derive_int_seed(0, 1) != derive_int_seed(0, 2)

    def test_parse_float_list(self):
        """Comma-separated numbers."""
        assert parse_float_list('0.002, 0.003,') == [0.002, 0.003]
        with pytest.raises(InvalidArgumentError):
            parse_float_list('0.1,abc')

    def test_dedupe(self):
        """Solutions within tolerance collapse onto the first."""
        kept = dedupe([np.zeros(3), np.full(3, 5e-4), np.ones(3)], 1e-3)
        assert len(kept) == 2
        assert_allclose(kept[0], np.zeros(3))


class TestSolveArm:
    """Test single-arm damped least squares."""

    def test_round_trip(self, planar, settings):
        """Converges back to a configuration reaching the target."""
        target = forward_kinematics(planar.left, KNOWN_LEFT)
        solution = solve_arm_ik(planar.left, target, KNOWN_LEFT + 0.1, settings)
        assert solution is not None
        position, rotation = pose_distance(forward_kinematics(planar.left, solution), target)
        assert position < 1e-9 and rotation < 1e-9

    def test_unreachable(self, planar, settings):
        """Out-of-reach targets do not converge."""
        assert solve_arm_ik(planar.left, Pose.translation(10.0, 0.0, 0.0), KNOWN_LEFT, settings) is None

    def test_locked_joint_stays(self, baxter, settings, published_pairs):
        """The locked joint keeps its seed value."""
        theta = published_pairs['theta_star'].theta_left.values
        target = forward_kinematics(baxter.left, theta)
        seed = theta + 0.05
        seed[0] = theta[0]
        solution = solve_arm_ik(baxter.left, target, seed, settings, locked_joint=0)
        assert solution is not None
        assert solution[0] == pytest.approx(theta[0])


class TestEnumeration:
    """Test candidate pair enumeration."""

    def test_planar_finds_all_branches(self, planar, wide_settings):
        """Elbow-up/down per arm gives four pairs matching the analytic solutions."""
        g_L, g_R = planar_targets(planar)
        diagnostics = {}
        pairs = enumerate_ik_pairs(planar, g_L, g_R, wide_settings, diagnostics)
        assert len(pairs) == 4
        assert diagnostics['pairs'] == 4

        right_local = Pose(np.diag([-1.0, -1.0, 1.0]), [2.5, 0.0, 0.0]).inverse() @ g_R
        expected_left = planar_ik(g_L)
        expected_right = planar_ik(right_local)
        for left in expected_left:
            for right in expected_right:
                assert any(np.max(np.abs(p.theta_left.values - left)) < 1e-6
                           and np.max(np.abs(p.theta_right.values - right)) < 1e-6 for p in pairs)

    def test_round_trip_contains_known_pair(self, planar, wide_settings):
        """FK of a known pair is recovered."""
        g_L, g_R = planar_targets(planar)
        pairs = enumerate_ik_pairs(planar, g_L, g_R, wide_settings)
        assert any(np.max(np.abs(p.theta_left.values - KNOWN_LEFT)) < 1e-6
                   and np.max(np.abs(p.theta_right.values - KNOWN_RIGHT)) < 1e-6 for p in pairs)

    def test_pairs_meet_relative_target(self, planar, settings):
        """Every pair reaches g_L^-1 g_R within the pose tolerance."""
        g_L, g_R = planar_targets(planar)
        target = g_L.inverse() @ g_R
        for pair in enumerate_ik_pairs(planar, g_L, g_R, settings):
            position, rotation = pose_distance(relative_pose(planar, pair.theta_left, pair.theta_right), target)
            assert position <= 1e-6 and rotation <= 1e-6

    def test_unreachable_is_empty(self, planar, settings):
        """Beyond total reach nothing is returned."""
        diagnostics = {}
        pairs = enumerate_ik_pairs(planar, Pose.translation(10.0, 0.0, 0.0), Pose.identity(), settings, diagnostics)
        assert pairs == []
        assert diagnostics['left_solutions'] == 0
        assert diagnostics['dropped'] == diagnostics['seeds']

    def test_deterministic(self, planar, settings):
        """Same settings, bit-identical candidates."""
        g_L, g_R = planar_targets(planar)
        first = enumerate_ik_pairs(planar, g_L, g_R, settings)
        second = enumerate_ik_pairs(planar, g_L, g_R, settings)
        assert [p.pseudo.values.tobytes() for p in first] == [p.pseudo.values.tobytes() for p in second]

    def test_relative_only(self, planar):
        """Relative-only mode returns pairs meeting the relative target."""
        settings = IKSettings.from_config(TestingConfig, relative_left_samples=32)
        g_rel = Pose(Rotation.from_rotvec([0, 0, np.pi]).as_matrix(), [0.3, 0.0, 0.0])
        pairs = enumerate_relative_ik_pairs(planar, g_rel, settings)
        assert pairs
        for pair in pairs:
            position, rotation = pose_distance(relative_pose(planar, pair.theta_left, pair.theta_right), g_rel)
            assert position <= 1e-6 and rotation <= 1e-6

    @pytest.mark.slow
    def test_baxter_task_targets(self, baxter, baxter_task, settings):
        """The published targets are reachable within joint limits."""
        g_L, g_R = baxter_task.task.gripper_targets()
        pairs = enumerate_ik_pairs(baxter, g_L, g_R, settings)
        assert pairs
        for pair in pairs:
            assert baxter.left.within_limits(pair.theta_left.values)
            assert baxter.right.within_limits(pair.theta_right.values)
            assert pair.residual <= 2e-6


class TestSelection:
    """Test scoring, selection and feasibility."""

    def test_selection_matches_exhaustive(self, planar, wide_settings):
        """Selected M* is the minimum over all candidates."""
        noise = JointNoiseModel(0.0045, 2, 6)
        g_L, g_R = planar_targets(planar)
        pairs = enumerate_ik_pairs(planar, g_L, g_R, wide_settings)
        best = select_robust_pair(planar, pairs, noise)
        scores = [score_pair(planar, p, noise).m_star for p in pairs]
        assert best.score.m_star == min(scores)
        assert worst_pair(planar, pairs, noise).score.m_star == max(scores)

    def test_single_candidate(self, planar):
        """One candidate is selected as is."""
        pair = IKPair(KNOWN_LEFT, KNOWN_RIGHT)
        best = select_robust_pair(planar, [pair], JointNoiseModel(0.003, 2, 6))
        assert_allclose(best.theta_left.values, KNOWN_LEFT)
        assert best.score is not None

    def test_ties_keep_input_order(self, planar):
        """Identical candidates resolve to the first."""
        first, second = IKPair(KNOWN_LEFT, KNOWN_RIGHT, label='a'), IKPair(KNOWN_LEFT, KNOWN_RIGHT, label='b')
        assert select_robust_pair(planar, [first, second], JointNoiseModel(0.003, 2, 6)).label == 'a'
        assert worst_pair(planar, [first, second], JointNoiseModel(0.003, 2, 6)).label == 'a'

    def test_scale_invariance(self, planar, wide_settings):
        """Doubling sigma doubles every score and keeps the minimizer."""
        g_L, g_R = planar_targets(planar)
        pairs = enumerate_ik_pairs(planar, g_L, g_R, wide_settings)
        small_noise, large_noise = JointNoiseModel(0.002, 2, 6), JointNoiseModel(0.004, 2, 6)
        small = select_robust_pair(planar, pairs, small_noise)
        large_scores = [score_pair(planar, p, large_noise).m_star for p in pairs]
        picked = score_pair(planar, small, large_noise).m_star
        assert picked == pytest.approx(min(large_scores), rel=1e-12)
        assert picked == pytest.approx(2 * small.score.m_star, rel=1e-12)

    def test_monotone_in_candidates(self, planar, wide_settings):
        """A larger candidate set never raises the selected M*."""
        noise = JointNoiseModel(0.0045, 2, 6)
        g_L, g_R = planar_targets(planar)
        pairs = enumerate_ik_pairs(planar, g_L, g_R, wide_settings)
        subset = select_robust_pair(planar, pairs[:2], noise).score.m_star
        assert select_robust_pair(planar, pairs, noise).score.m_star <= subset

    def test_vanishing_noise(self, planar):
        """c = 0 gives M* = 0."""
        score = score_pair(planar, IKPair(KNOWN_LEFT, KNOWN_RIGHT), JointNoiseModel(0.0, 2, 6), 0.5)
        assert score.m_star == 0.0

    def test_empty(self, planar):
        """No candidates is a no-solution error."""
        with pytest.raises(NoSolutionError):
            select_robust_pair(planar, [], JointNoiseModel(0.003, 2, 6))

    def test_residual_violation(self, planar):
        """A pair missing its target is rejected."""
        g_L, g_R = planar_targets(planar)
        pair = IKPair(KNOWN_LEFT + 0.1, KNOWN_RIGHT)
        with pytest.raises(InvalidArgumentError):
            score_pair(planar, pair, JointNoiseModel(0.003, 2, 6), target_rel=g_L.inverse() @ g_R)

    def test_score_pairs_keeps_existing_scores(self, planar):
        """Already scored pairs are passed through."""
        scored = IKPair(KNOWN_LEFT, KNOWN_RIGHT, score=WorstCaseError.from_components(1.0, 0.0))
        assert score_pairs(planar, [scored], JointNoiseModel(0.003, 2, 6))[0] is scored

    def test_ranking_refreshes_stale_scores(self, planar):
        """A noise model given to the ranking replaces scores carried by the pairs."""
        noise = JointNoiseModel(0.003, 2, 6)
        stale = IKPair(KNOWN_LEFT, KNOWN_RIGHT, score=WorstCaseError.from_components(1.0, 0.0))
        expected = score_pair(planar, stale, noise).m_star
        assert select_robust_pair(planar, [stale], noise).score.m_star == expected
        assert worst_pair(planar, [stale], noise).score.m_star == expected

    def test_ranking_existing_scores(self, planar):
        """Without a noise model the carried scores are ranked."""
        high = IKPair(KNOWN_LEFT, KNOWN_RIGHT, score=WorstCaseError.from_components(0.2, 0.0), label='high')
        low = IKPair(KNOWN_LEFT, KNOWN_RIGHT, score=WorstCaseError.from_components(0.1, 0.0), label='low')
        assert select_robust_pair(planar, [high, low]).label == 'low'
        assert worst_pair(planar, [high, low]).label == 'high'
        with pytest.raises(InvalidArgumentError):
            select_robust_pair(planar, [IKPair(KNOWN_LEFT, KNOWN_RIGHT)])

    def test_literal_pairs_checked_against_target(self, planar):
        """Literal pairs get their measured residual; pairs off target are dropped."""
        g_L, g_R = planar_targets(planar)
        pairs = [IKPair(KNOWN_LEFT, KNOWN_RIGHT, residual=None, label='on'),
                 IKPair(KNOWN_LEFT + 0.1, KNOWN_RIGHT, residual=None, label='off')]
        diagnostics = {}
        kept = check_literal_pairs(planar, pairs, g_L.inverse() @ g_R, 1e-6, diagnostics)
        assert [p.label for p in kept] == ['on']
        assert kept[0].residual is not None and kept[0].residual < 1e-8
        assert diagnostics['literal_dropped'] == 1

    def test_published_pairs_have_unknown_residual(self, published_pairs):
        """Pairs read from a file carry no residual until checked."""
        assert all(pair.residual is None for pair in published_pairs.values())

    def test_published_pairs_ordering(self, baxter, published_pairs, noise):
        """The published robust pair scores below the comparison pair."""
        star = score_pair(baxter, published_pairs['theta_star'], noise)
        minus = score_pair(baxter, published_pairs['theta_minus'], noise)
        assert star.m_star < minus.m_star
        for value, published in ((star.m_star, 0.0079), (minus.m_star, 0.0093)):
            if abs(value - published) > 0.2 * published:
                warnings.warn(f"M* = {value:.4f} m differs from the published {published} m by more than 20%")


class TestFeasibility:
    """Test the feasibility self-assessment."""

    @staticmethod
    def scored(m_star):
        return IKPair(KNOWN_LEFT, KNOWN_RIGHT, score=WorstCaseError.from_components(m_star, 0.0))

    def test_infeasible(self):
        """M* above the clearance."""
        report = feasibility_check(self.scored(0.0079), 0.006)
        assert not report.feasible
        assert report.margin == pytest.approx(-0.0019)

    def test_zero_error(self):
        """No error is always feasible."""
        assert feasibility_check(self.scored(0.0), 1e-6).feasible

    def test_boundary(self):
        """M* equal to epsilon counts as feasible."""
        report = feasibility_check(self.scored(0.005), 0.005)
        assert report.feasible
        assert report.margin == 0.0

    def test_unscored(self):
        """Feasibility needs a score."""
        with pytest.raises(InvalidArgumentError):
            feasibility_check(IKPair(KNOWN_LEFT, KNOWN_RIGHT), 0.005)
