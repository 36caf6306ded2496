"""
Result records produced by scoring, selection and simulation.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from robustik.errors import InvalidArgumentError
from robustik.models.arm import JointVector
from robustik.models.se3 import Pose


@dataclass(frozen=True, eq=False)
class ErrorEllipsoid:
    """
    Task-space error set x^T C x <= bound.

    Attributes:
        characteristic: Symmetric positive-semidefinite matrix C
        bound: c for position, c/4 for orientation
        space: 'position' or 'orientation'
        degenerate: True when the propagating Jacobian was rank deficient
    """

    characteristic: np.ndarray
    bound: float
    space: str
    degenerate: bool = False

    def __post_init__(self):
        C = np.array(self.characteristic, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise InvalidArgumentError("characteristic matrix must be square")
        if np.max(np.abs(C - C.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(C))):
            raise InvalidArgumentError("characteristic matrix must be symmetric")
        if self.space not in ('position', 'orientation'):
            raise InvalidArgumentError(f"unknown error space '{self.space}'")
        C = 0.5 * (C + C.T)
        C.setflags(write=False)
        object.__setattr__(self, 'characteristic', C)

    def quadratic_form(self, delta: np.ndarray) -> np.ndarray:
        """x^T C x for one vector or a stack of row vectors."""
        delta = np.asarray(delta, dtype=float)
        return np.einsum('...i,ij,...j->...', delta, self.characteristic, delta)

    def contains(self, delta: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
        return self.quadratic_form(delta) <= self.bound * (1.0 + rtol) + 1e-15

    def to_dict(self):
        return {
            'space': self.space,
            'bound': self.bound,
            'degenerate': self.degenerate,
            'characteristic': self.characteristic.tolist(),
        }


@dataclass(frozen=True)
class WorstCaseError:
    """
    Worst-case task-space errors of one IK pair.

    Attributes:
        p_star: Worst relative position error, m
        o_star: Worst relative orientation error, rad (quaternion distance)
        m_star: p_star + gamma * o_star
        gamma: Orientation weight, m/rad
    """

    p_star: float
    o_star: float
    m_star: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.p_star < 0.0:
            raise InvalidArgumentError("p_star must be non-negative")
        if not 0.0 <= self.o_star <= np.pi:
            raise InvalidArgumentError("o_star must lie in [0, pi]")
        if self.m_star != self.p_star + self.gamma * self.o_star:
            raise InvalidArgumentError("m_star must equal p_star + gamma * o_star")

    @classmethod
    def from_components(cls, p_star: float, o_star: float, gamma: float = 0.0) -> 'WorstCaseError':
        p_star, o_star, gamma = float(p_star), float(o_star), float(gamma)
        return cls(p_star, o_star, p_star + gamma * o_star, gamma)

    def to_dict(self):
        return {'p_star': self.p_star, 'o_star': self.o_star,
                'm_star': self.m_star, 'gamma': self.gamma}


@dataclass(frozen=True, eq=False)
class IKPair:
    """
    Joint solutions of both arms for one relative placement.

    Attributes:
        theta_left: Left arm joints (n)
        theta_right: Right arm joints (m)
        residual: Relative pose residual, position m + orientation rad;
            None for literal pairs not yet checked against a target
        score: Worst-case error once scored
        label: Optional name (e.g. a literal pair injected from a file)
    """

    theta_left: JointVector
    theta_right: JointVector
    residual: Optional[float] = 0.0
    score: Optional[WorstCaseError] = None
    label: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.theta_left, JointVector):
            object.__setattr__(self, 'theta_left', JointVector(self.theta_left, 'left'))
        if not isinstance(self.theta_right, JointVector):
            object.__setattr__(self, 'theta_right', JointVector(self.theta_right, 'right'))

    @property
    def pseudo(self) -> JointVector:
        return JointVector.pseudo(self.theta_left, self.theta_right)

    def with_score(self, score: WorstCaseError) -> 'IKPair':
        return replace(self, score=score)

    def with_residual(self, residual: float) -> 'IKPair':
        return replace(self, residual=float(residual))

    def to_dict(self):
        data = {
            'theta_left': self.theta_left.tolist(),
            'theta_right': self.theta_right.tolist(),
            'residual': self.residual,
        }
        if self.label is not None:
            data['label'] = self.label
        if self.score is not None:
            data.update(self.score.to_dict())
        return data


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """
    Whether the best pair meets the task tolerance.

    Attributes:
        epsilon: Task tolerance, m
        best: Selected, scored pair
        feasible: m_star <= epsilon
        margin: epsilon - m_star, m
    """

    epsilon: float
    best: IKPair
    feasible: bool
    margin: float

    def to_dict(self):
        return {'epsilon': self.epsilon, 'feasible': self.feasible, 'margin': self.margin,
                'm_star': self.best.score.m_star if self.best.score else None}


@dataclass(frozen=True, eq=False)
class TrialOutcome:
    """
    One simulated insertion attempt.

    Attributes:
        success: All projected peg vertices inside the hole
        achieved_rel: Achieved hole-tip frame relative to the peg-tip frame
        error_measure: Assembly error measure against the desired placement, m
        vertex_margins: Signed distance of each projected vertex to the hole edge, m
        diagnostic: Set when the peg axis never meets the hole plane
    """

    success: bool
    achieved_rel: Pose
    error_measure: float
    vertex_margins: Tuple[float, float, float, float]
    diagnostic: Optional[str] = None

    def to_dict(self):
        """Report form; infinite margins of a parallel axis become null."""
        data = {'success': self.success, 'error_measure': self.error_measure,
                'vertex_margins': [float(m) if np.isfinite(m) else None for m in self.vertex_margins]}
        if self.diagnostic:
            data['diagnostic'] = self.diagnostic
        return data


@dataclass
class SweepResult:
    """
    Success rates over a sigma x clearance grid for several pairs.

    Attributes:
        sigmas: Joint standard deviations, rad
        clearances: Clearances, m
        pair_ids: Pair names in output order
        trials: Trials per cell
        rates: (sigma index, clearance index, pair id) -> success percent
    """

    sigmas: List[float]
    clearances: List[float]
    pair_ids: List[str]
    trials: int
    rates: Dict[Tuple[int, int, str], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.trials <= 0:
            raise InvalidArgumentError("trials must be positive")

    def rate(self, sigma_index: int, clearance_index: int, pair_id: str) -> float:
        return self.rates[(sigma_index, clearance_index, pair_id)]

    def rows(self):
        """CSV rows in grid order: sigma, clearance, pair_id, trials, success_pct."""
        for i, sigma in enumerate(self.sigmas):
            for j, clearance in enumerate(self.clearances):
                for pair_id in self.pair_ids:
                    yield sigma, clearance, pair_id, self.trials, self.rates[(i, j, pair_id)]

    def to_dict(self):
        return {
            'sigmas': list(self.sigmas),
            'clearances': list(self.clearances),
            'pair_ids': list(self.pair_ids),
            'trials': self.trials,
            'cells': [
                {'sigma': s, 'clearance': c, 'pair_id': p, 'success_pct': r}
                for s, c, p, _, r in self.rows()
            ],
        }
