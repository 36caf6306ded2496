"""
Config file loading and deterministic report writing.

Config files are YAML; plain JSON parses as YAML as well.
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import yaml

from robustik.errors import ConfigError, RobustIKError
from robustik.models.arm import ArmModel, DualArmModel
from robustik.models.noise import NoiseConfig
from robustik.models.results import IKPair
from robustik.models.se3 import Pose, Twist, project_to_rotation
from robustik.models.task import DEFAULT_PEG_HEIGHT, DEFAULT_PEG_WIDTH, TaskConfig, TaskSpec

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-2

PathLike = Union[str, Path]


def read_config(path: PathLike) -> Dict[str, Any]:
    """
    Parse a YAML/JSON config file into a mapping.

    Args:
        path: File path

    Returns:
        Top-level mapping
    """
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror or e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def _require(data: Mapping, key: str, where: str):
    if key not in data:
        raise ConfigError(f"missing key '{where}{key}'")
    return data[key]


def _floats(value, shape, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"'{where}' must be numeric")
    if arr.shape != tuple(shape):
        raise ConfigError(f"'{where}' must have shape {tuple(shape)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"'{where}' has non-finite values")
    return arr


def _rotation(value, where: str) -> np.ndarray:
    R = _floats(value, (3, 3), where)
    if np.max(np.abs(R.T @ R - np.eye(3))) > PROJECTION_TOLERANCE or np.linalg.det(R) <= 0.0:
        raise ConfigError(f"'{where}' is not a rotation matrix")
    return project_to_rotation(R)


def parse_pose(value, where: str) -> Pose:
    """
    Pose from a 4x4 row-major matrix or a {rotation, position} mapping.

    Rotations within 1e-2 of orthonormal are projected onto SO(3).
    """
    if isinstance(value, Mapping):
        R = _rotation(_require(value, 'rotation', f'{where}.'), f'{where}.rotation')
        p = _floats(_require(value, 'position', f'{where}.'), (3,), f'{where}.position')
        return Pose(R, p)
    T = _floats(value, (4, 4), where)
    if not np.allclose(T[3], [0.0, 0.0, 0.0, 1.0], atol=1e-9):
        raise ConfigError(f"'{where}' last row must be [0, 0, 0, 1]")
    return Pose(_rotation(T[:3, :3], where), T[:3, 3])


def _parse_twist(value, where: str) -> Twist:
    try:
        if isinstance(value, Mapping):
            if value.get('type') == 'prismatic':
                return Twist.prismatic(_floats(_require(value, 'direction', f'{where}.'), (3,),
                                               f'{where}.direction'))
            axis = _floats(_require(value, 'axis', f'{where}.'), (3,), f'{where}.axis')
            point = _floats(_require(value, 'point', f'{where}.'), (3,), f'{where}.point')
            return Twist.revolute(axis, point)
        return Twist.from_vector(_floats(value, (6,), where))
    except RobustIKError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"'{where}': {e}")


def _parse_arm(data, name: str) -> ArmModel:
    if not isinstance(data, Mapping):
        raise ConfigError(f"'{name}' must be a mapping")
    entries = _require(data, 'twists', f'{name}.')
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"'{name}.twists' must be a nonempty list")
    twists = tuple(_parse_twist(entry, f'{name}.twists[{i}]') for i, entry in enumerate(entries))
    g0 = parse_pose(_require(data, 'g0', f'{name}.'), f'{name}.g0')
    limits = data.get('limits')
    if limits is not None:
        limits = _floats(limits, (len(twists), 2), f'{name}.limits')
        bad = np.nonzero(limits[:, 0] > limits[:, 1])[0]
        if bad.size:
            raise ConfigError(f"'{name}.limits[{int(bad[0])}]' has min > max")
    arm = ArmModel(twists, g0, limits)
    if 'base' in data:
        arm = arm.transformed(parse_pose(data['base'], f'{name}.base'))
    return arm


def load_model(path: PathLike) -> DualArmModel:
    """
    Load a dual-arm twist model.

    Each of ``left`` and ``right`` holds ``twists`` (6-vectors [v, w],
    {axis, point} or {type: prismatic, direction}), ``g0``, optional
    ``limits`` and an optional ``base`` mount transform.

    Args:
        path: Model file

    Returns:
        DualArmModel in the common base frame
    """
    data = read_config(path)
    model = DualArmModel(_parse_arm(_require(data, 'left', ''), 'left'),
                         _parse_arm(_require(data, 'right', ''), 'right'))
    logger.debug("loaded model %s: %d + %d joints", path, model.n, model.m)
    return model


def _positive(data: Mapping, key: str, default: Optional[float], where: str = '') -> float:
    value = data.get(key, default)
    if value is None:
        raise ConfigError(f"missing key '{where}{key}'")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{where}{key}' must be a number")
    if not np.isfinite(value) or value < 0.0:
        raise ConfigError(f"'{where}{key}' must be >= 0")
    return value


def _integer(data: Mapping, key: str, default: int, minimum: int = 0) -> int:
    value = data.get(key, default)
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be an integer")
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    try:
        number = int(value) if isinstance(value, (int, str)) else None
    except ValueError:
        number = None
    if number is None:
        raise ConfigError(f"'{key}' must be an integer")
    if number < minimum:
        raise ConfigError(f"'{key}' must be >= {minimum}")
    return number


def _float_list(data: Mapping, key: str) -> tuple:
    values = data.get(key, [])
    if not isinstance(values, list):
        raise ConfigError(f"'{key}' must be a list")
    return tuple(_floats(values, (len(values),), key).tolist())


def load_task(path: PathLike) -> TaskConfig:
    """
    Load a peg-in-hole task with its experiment grid.

    The hole width is w_p + 2 * clearances[0] unless ``w_h`` is given.

    Args:
        path: Task file

    Returns:
        TaskConfig
    """
    data = read_config(path)
    clearances = _float_list(data, 'clearances')
    sigmas = _float_list(data, 'sigmas')
    w_p = _positive(data, 'w_p', DEFAULT_PEG_WIDTH)
    if 'w_h' in data:
        w_h = _positive(data, 'w_h', None)
    elif clearances:
        w_h = w_p + 2.0 * clearances[0]
    else:
        raise ConfigError("task needs 'w_h' or a nonempty 'clearances' list")
    if any(c <= 0.0 for c in clearances):
        raise ConfigError("'clearances' must be positive")
    try:
        task = TaskSpec(
            g_bp=parse_pose(_require(data, 'g_bp', ''), 'g_bp'),
            g_bh=parse_pose(_require(data, 'g_bh', ''), 'g_bh'),
            l_p=_positive(data, 'l_p', 0.05),
            l_h=_positive(data, 'l_h', 0.05),
            h_p=_positive(data, 'h_p', DEFAULT_PEG_HEIGHT),
            w_p=w_p,
            w_h=w_h,
        )
    except ConfigError:
        raise
    except RobustIKError as e:
        raise ConfigError(f"{path}: {e}")
    epsilon = data.get('epsilon')
    return TaskConfig(
        task=task,
        clearances=clearances,
        sigmas=sigmas,
        trials=_integer(data, 'trials', 10000, minimum=1),
        seed=_integer(data, 'seed', 0),
        epsilon=None if epsilon is None else _positive(data, 'epsilon', None),
    )


def load_noise(path: PathLike) -> NoiseConfig:
    """Load a {sigma, k, gamma, seed} noise block."""
    data = read_config(path)
    defaults = NoiseConfig()
    k = _positive(data, 'k', defaults.k)
    if k == 0.0:
        raise ConfigError("'k' must be > 0")
    return NoiseConfig(
        sigma=_positive(data, 'sigma', defaults.sigma),
        k=k,
        gamma=_positive(data, 'gamma', defaults.gamma),
        seed=_integer(data, 'seed', defaults.seed),
    )


def load_pairs(path: PathLike, model: Optional[DualArmModel] = None) -> List[IKPair]:
    """
    Load named literal joint vectors.

    Expected layout: ``pairs: {name: {theta_left: [...], theta_right: [...]}}``.

    Args:
        path: Pairs file
        model: When given, vector lengths are checked against it

    Returns:
        IKPairs labelled with their names, in file order
    """
    data = read_config(path)
    entries = _require(data, 'pairs', '')
    if not isinstance(entries, Mapping) or not entries:
        raise ConfigError("'pairs' must be a nonempty mapping")
    pairs = []
    for name, entry in entries.items():
        where = f'pairs.{name}'
        if not isinstance(entry, Mapping):
            raise ConfigError(f"'{where}' must be a mapping")
        left = _require(entry, 'theta_left', f'{where}.')
        right = _require(entry, 'theta_right', f'{where}.')
        n = model.n if model else len(left)
        m = model.m if model else len(right)
        pairs.append(IKPair(_floats(left, (n,), f'{where}.theta_left'),
                            _floats(right, (m,), f'{where}.theta_right'),
                            residual=None, label=str(name)))
    return pairs


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def dumps_json(data: Any) -> str:
    """JSON text with indent 2, sorted keys and a trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, default=_plain) + '\n'


def write_json(data: Any, path: Optional[PathLike] = None) -> str:
    """
    Serialize ``data`` deterministically and optionally write it.

    Args:
        data: JSON-compatible data (numpy values allowed)
        path: Output file

    Returns:
        The JSON text
    """
    text = dumps_json(data)
    if path is not None:
        Path(path).write_text(text)
    return text


def format_float(value: float) -> str:
    return f'{value:.6g}'


def write_csv(header: Sequence[str], rows: Iterable[Sequence], path: Optional[PathLike] = None) -> str:
    """
    Write rows with fixed float formatting ('\\n' line endings).

    Args:
        header: Column names
        rows: Row sequences; floats are formatted with 6 significant digits
        path: Output file

    Returns:
        The CSV text
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
