"""Brute-force propagation of i dU/dt = H(t) U and comparison metrics."""

import logging
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraKind
from .dynamics import CoefficientField, Trajectory, grid_step, propagate_linear, refine_grid, rk4_step_matrices
from .errors import GridMismatchError
from .matrix_reps import ETA, adjoint_action, algebra_element
from .propagator import PropagatorSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirectSeries:
    """U(t) from direct integration, on the caller's grid."""

    kind: AlgebraKind
    times: np.ndarray
    U: np.ndarray


def propagate_direct(kind: AlgebraKind, field: CoefficientField, grid, substeps: int = 1) -> DirectSeries:
    """RK4 on dU/dt = -i H(t) U from U(0) = I, without renormalization.

    Every grid interval is split into ``substeps`` RK4 steps; U is returned at
    the grid points only.
    """
    kind = AlgebraKind.parse(kind)
    grid = np.asarray(grid, dtype=float)
    fine = refine_grid(grid, substeps)
    dt = grid_step(fine)
    stages = [-1j * algebra_element(kind, h) for h in field.stage_samples(fine)]
    steps = rk4_step_matrices(*stages, dt)
    logger.debug("Direct propagation: %d steps of %g", len(steps), dt)
    U = propagate_linear(steps, np.eye(2, dtype=complex))[::substeps]
    return DirectSeries(kind=kind, times=grid, U=U)


def pseudo_unitarity_defect(kind: AlgebraKind, U) -> np.ndarray:
    """||U^dagger U - I||_F (su(2)) or ||U^dagger eta U - eta||_F (su(1,1)) per matrix."""
    U = np.asarray(U)
    metric = np.eye(2) if AlgebraKind.parse(kind) is AlgebraKind.SU2 else ETA
    gram = np.swapaxes(U.conj(), -1, -2) @ metric @ U
    return np.linalg.norm(gram - metric, axis=(-2, -1))


def schrodinger_residual(kind: AlgebraKind, times, U, h, jumps=()) -> np.ndarray:
    """||i (dU/dt) U^-1 - H||_F at interior grid points, central differences.

    Points within one step of a time in ``jumps`` report 0, since H is
    discontinuous there.
    """
    times = np.asarray(times, dtype=float)
    dt = grid_step(times)
    U = np.asarray(U)
    derivative = (U[2:] - U[:-2]) / (2 * dt)
    generator = 1j * derivative @ np.linalg.inv(U[1:-1])
    residual = np.linalg.norm(generator - algebra_element(kind, np.asarray(h)[1:-1]), axis=(-2, -1))
    for jump in np.asarray(jumps, dtype=float):
        residual[np.abs(times[1:-1] - jump) <= dt * (1 + 1e-9)] = 0.0
    return residual


def _worst(values: np.ndarray, times: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return 0.0, 0.0
    i = int(np.argmax(values))
    return float(values[i]), float(times[i])


@dataclass(frozen=True)
class ComparisonReport:
    """Maxima of the comparison metrics and the times where they occur."""

    max_frobenius_U: float
    max_frobenius_a: float
    max_schrodinger_residual: float
    max_norm_drift: float
    worst_time_U: float
    worst_time_a: float
    worst_time_schrodinger: float
    worst_time_norm: float

    def to_dict(self) -> dict:
        return {
            "max_frobenius_U": self.max_frobenius_U,
            "max_frobenius_a": self.max_frobenius_a,
            "max_schrodinger_residual": self.max_schrodinger_residual,
            "max_norm_drift": self.max_norm_drift,
            "worst_times": {
                "frobenius_U": self.worst_time_U,
                "frobenius_a": self.worst_time_a,
                "schrodinger_residual": self.worst_time_schrodinger,
                "norm_drift": self.worst_time_norm,
            },
        }


def compare(constructed: PropagatorSeries, direct: DirectSeries, trajectory: Trajectory,
            jumps=()) -> ComparisonReport:
    """Compare the constructed series with the direct one, point by point.

    No phase alignment: both start at the identity and solve the same equation.
    ``max_frobenius_a`` measures Ad(U_direct) a(0) against the integrated a(t).
    """
    times = constructed.times
    for name, other in (("direct", direct.times), ("trajectory", trajectory.times)):
        if len(other) != len(times) or not np.array_equal(other, times):
            raise GridMismatchError(f"Constructed and {name} series are on different grids")

    frobenius_U = np.linalg.norm(constructed.U - direct.U, axis=(-2, -1))
    mapped = adjoint_action(constructed.kind, direct.U) @ trajectory.a[0]
    frobenius_a = np.linalg.norm(mapped - trajectory.a, axis=-1)
    residual = schrodinger_residual(constructed.kind, times, constructed.U, trajectory.h, jumps)
    drift = trajectory.norm_drift

    max_U, t_U = _worst(frobenius_U, times)
    max_a, t_a = _worst(frobenius_a, times)
    max_res, t_res = _worst(residual, times[1:-1])
    max_drift, t_drift = _worst(drift, times)
    return ComparisonReport(
        max_frobenius_U=max_U,
        max_frobenius_a=max_a,
        max_schrodinger_residual=max_res,
        max_norm_drift=max_drift,
        worst_time_U=t_U,
        worst_time_a=t_a,
        worst_time_schrodinger=t_res,
        worst_time_norm=t_drift,
    )
