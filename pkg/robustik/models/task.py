"""
Square peg-in-hole task geometry.
"""
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from robustik.errors import InvalidArgumentError
from robustik.models.se3 import Pose

DEFAULT_PEG_HEIGHT = 0.05
DEFAULT_PEG_WIDTH = 0.03


@dataclass(frozen=True, eq=False)
class TaskSpec:
    """
    Desired peg/hole placement and part dimensions.

    The peg is held by the left gripper, the hole by the right one; both
    tip frames sit on the gripper z-axis with identity rotation.

    Attributes:
        g_bp: Desired peg-tip frame in the base frame
        g_bh: Desired hole-tip frame in the base frame
        l_p: Peg tip offset along the left gripper z-axis, m
        l_h: Hole tip offset along the right gripper z-axis, m
        h_p: Peg height, m
        w_p: Peg square width, m
        w_h: Hole square width, m
    """

    g_bp: Pose
    g_bh: Pose
    l_p: float = 0.05
    l_h: float = 0.05
    h_p: float = DEFAULT_PEG_HEIGHT
    w_p: float = DEFAULT_PEG_WIDTH
    w_h: float = DEFAULT_PEG_WIDTH + 2 * 0.005

    def __post_init__(self):
        if self.w_p <= 0.0:
            raise InvalidArgumentError("peg width must be positive")
        if self.w_h <= self.w_p:
            raise InvalidArgumentError(
                f"hole width {self.w_h} must exceed peg width {self.w_p} (positive clearance)")
        if self.h_p < 0.0:
            raise InvalidArgumentError("peg height must be non-negative")

    @property
    def clearance(self) -> float:
        return (self.w_h - self.w_p) / 2.0

    @property
    def peg_offset(self) -> Pose:
        """Peg tip frame in the left gripper frame."""
        return Pose.translation(0.0, 0.0, self.l_p)

    @property
    def hole_offset(self) -> Pose:
        """Hole tip frame in the right gripper frame."""
        return Pose.translation(0.0, 0.0, self.l_h)

    def with_clearance(self, clearance: float) -> 'TaskSpec':
        """Same task with the hole widened or narrowed to ``clearance``."""
        return replace(self, w_h=self.w_p + 2.0 * clearance)

    def gripper_targets(self) -> Tuple[Pose, Pose]:
        """Left and right gripper poses placing the tips at g_bp and g_bh."""
        return (self.g_bp @ self.peg_offset.inverse(),
                self.g_bh @ self.hole_offset.inverse())

    def desired_relative_pose(self) -> Pose:
        g_left, g_right = self.gripper_targets()
        return g_left.inverse() @ g_right

    def to_dict(self):
        return {
            'g_bp': self.g_bp.as_matrix().tolist(),
            'g_bh': self.g_bh.as_matrix().tolist(),
            'l_p': self.l_p,
            'l_h': self.l_h,
            'h_p': self.h_p,
            'w_p': self.w_p,
            'w_h': self.w_h,
            'clearance': self.clearance,
        }


@dataclass(frozen=True, eq=False)
class TaskConfig:
    """
    A task file: geometry plus the experiment grid.

    Attributes:
        task: Task geometry (hole width set from the first clearance)
        clearances: Clearance grid, m
        sigmas: Joint standard deviation grid, rad
        trials: Monte Carlo trials per cell
        seed: Root seed
        epsilon: Feasibility tolerance, m (defaults to the task clearance)
    """

    task: TaskSpec
    clearances: Tuple[float, ...] = field(default_factory=tuple)
    sigmas: Tuple[float, ...] = field(default_factory=tuple)
    trials: int = 10000
    seed: int = 0
    epsilon: Optional[float] = None

    @property
    def tolerance(self) -> float:
        return self.task.clearance if self.epsilon is None else self.epsilon
