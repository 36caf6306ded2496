"""
Helper utility functions.
"""
import logging
from typing import Iterable, List, Union

import numpy as np
from scipy.stats import qmc

from robustik.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def wrap_angles(theta: np.ndarray, revolute: np.ndarray, bounds: np.ndarray = None) -> np.ndarray:
    """
    Bring revolute joint values into range.

    Revolute joints are wrapped into (-pi, pi]; when bounds are given and
    the wrapped value lies outside them, a shift by 2 pi that lands inside
    is used instead. Prismatic joints are left alone.

    Args:
        theta: Joint values
        revolute: Boolean mask of revolute joints
        bounds: Optional (n, 2) joint limits

    Returns:
        New array of joint values
    """
    out = np.array(theta, dtype=float)
    mask = np.asarray(revolute, dtype=bool)
    wrapped = np.pi - np.mod(np.pi - out[mask], 2.0 * np.pi)
    out[mask] = wrapped
    if bounds is None:
        return out
    bounds = np.asarray(bounds, dtype=float)
    for index in np.nonzero(mask)[0]:
        lo, hi = bounds[index]
        if lo <= out[index] <= hi:
            continue
        for shift in (2.0 * np.pi, -2.0 * np.pi):
            if lo <= out[index] + shift <= hi:
                out[index] += shift
                break
    return out


def halton_seeds(bounds: np.ndarray, count: int, seed: int) -> np.ndarray:
    """
    Scrambled Halton points scaled into the joint bounds.

    Args:
        bounds: (n, 2) array of [min, max]
        count: Number of points
        seed: Scrambling seed

    Returns:
        (count, n) array
    """
    bounds = np.asarray(bounds, dtype=float)
    if count < 1:
        return np.empty((0, bounds.shape[0]))
    sampler = qmc.Halton(d=bounds.shape[0], scramble=True, seed=seed)
    points = sampler.random(count)
    lo, hi = bounds[:, 0], bounds[:, 1]
    if np.any(hi <= lo):
        # qmc.scale rejects degenerate ranges
        return lo + points * (hi - lo)
    return qmc.scale(points, lo, hi)


def derive_seed(seed: int, *indices: int) -> np.random.SeedSequence:
    """Child seed sequence for a (seed, index, ...) tuple."""
    return np.random.SeedSequence([int(seed), *[int(i) for i in indices]])


def derive_int_seed(seed: int, *indices: int) -> int:
    """Integer form of ``derive_seed`` for APIs that take plain ints."""
    return int(derive_seed(seed, *indices).generate_state(1)[0])


def parse_float_list(value: Union[str, Iterable[float], None]) -> List[float]:
    """
    Parse '0.002,0.003' (or an iterable of numbers) into floats.

    Args:
        value: Comma-separated string or iterable

    Returns:
        List of floats
    """
    if value is None:
        return []
    items = value.split(',') if isinstance(value, str) else list(value)
    out = []
    for item in items:
        if isinstance(item, str) and not item.strip():
            continue
        try:
            out.append(float(item))
        except (TypeError, ValueError):
            raise InvalidArgumentError(f"not a number: {item!r}")
    return out


def infinity_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), initial=0.0))
