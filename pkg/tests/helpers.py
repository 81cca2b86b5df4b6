"""Reference numerics shared by the tests."""

import numpy as np


def expm_series(x, terms: int = 30) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series."""
    x = np.asarray(x, dtype=complex)
    norm = np.linalg.norm(x)
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    scaled = x / 2**squarings
    result = np.eye(x.shape[0], dtype=complex)
    term = np.eye(x.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ scaled / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def pm_distance(m, v) -> float:
    """Distance of m from v up to the sign of the centre, +-I."""
    return min(np.linalg.norm(m - v), np.linalg.norm(m + v))


def central_difference(values, dt: float) -> np.ndarray:
    """Derivative at interior points of a uniformly sampled series."""
    values = np.asarray(values)
    return (values[2:] - values[:-2]) / (2 * dt)
