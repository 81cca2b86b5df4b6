"""Coefficient fields h(t) and the special solution a(t) of a' = h x a.

Both the adjoint flow here and the matrix oracle are linear ODEs y' = A(t) y,
so classical RK4 reduces to one step matrix per grid interval. The step
matrices are built for the whole grid at once and multiplied in sequence.
"""

import csv
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .algebra import AdjointVector, AlgebraKind, bracket_matrix, killing_array
from .errors import ConfigError, FieldDomainError, NonFiniteError

logger = logging.getLogger(__name__)

# Default threshold on z below which a trajectory is flagged as degenerate.
DEFAULT_EPSILON = 1e-9

GRID_RTOL = 1e-9


class CoefficientField(ABC):
    """Time-dependent Hamiltonian coefficients h(t) in R^3."""

    type_name: str = ""

    @abstractmethod
    def evaluate(self, t) -> np.ndarray:
        """h at time(s) t; returns shape t.shape + (3,)."""

    def stage_samples(self, grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """h at (t_n, t_n + dt/2, t_{n+1}) for every step of the grid."""
        grid = np.asarray(grid, dtype=float)
        start, end = grid[:-1], grid[1:]
        return self.evaluate(start), self.evaluate((start + end) / 2), self.evaluate(end)

    @abstractmethod
    def to_dict(self) -> dict:
        """Serializable parameters, including the ``type`` tag."""

    def discontinuities(self) -> np.ndarray:
        """Times where h jumps."""
        return np.empty(0)


@dataclass(frozen=True)
class ConstantField(CoefficientField):
    """h(t) = h0."""

    h0: tuple[float, float, float]
    type_name = "constant"

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.h0, dtype=float), t.shape + (3,)).copy()

    def to_dict(self) -> dict:
        return {"type": self.type_name, "h": list(self.h0)}


@dataclass(frozen=True)
class RotatingTransverseField(CoefficientField):
    """h(t) = (w1 cos(w t), w1 sin(w t), w0)."""

    omega1: float
    omega: float
    omega0: float
    type_name = "rotating"

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = self.omega * t
        return np.stack([
            self.omega1 * np.cos(phase),
            self.omega1 * np.sin(phase),
            np.full_like(t, self.omega0),
        ], axis=-1)

    def to_dict(self) -> dict:
        return {"type": self.type_name, "omega1": self.omega1, "omega": self.omega, "omega0": self.omega0}


@dataclass(frozen=True)
class LinearSweepField(CoefficientField):
    """h(t) = (w1, 0, offset + rate t)."""

    omega1: float
    rate: float
    offset: float = 0.0
    type_name = "sweep"

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([
            np.full_like(t, self.omega1),
            np.zeros_like(t),
            self.offset + self.rate * t,
        ], axis=-1)

    def to_dict(self) -> dict:
        return {"type": self.type_name, "omega1": self.omega1, "rate": self.rate, "offset": self.offset}


class TabulatedField(CoefficientField):
    """Linear interpolation between samples (t_k, h_k)."""

    type_name = "tabulated"

    def __init__(self, times, values, source: str | None = None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.source = source
        if self.times.ndim != 1 or self.times.size < 2:
            raise ConfigError("Tabulated field needs at least two samples")
        if self.values.shape != (self.times.size, 3):
            raise ConfigError(f"Tabulated values must have shape ({self.times.size}, 3), got {self.values.shape}")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("Tabulated sample times must be strictly increasing")
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise ConfigError("Tabulated samples must be finite")

    @classmethod
    def from_csv(cls, path: str | Path, source: str | None = None) -> "TabulatedField":
        """Load samples from a CSV file with header ``t,h1,h2,h3``.

        ``source`` is the path echoed by ``to_dict`` (defaults to ``path``).
        """
        path = Path(path)
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = [cell.strip() for cell in next(reader, [])]
            if header != ["t", "h1", "h2", "h3"]:
                raise ConfigError(f"{path}: expected header t,h1,h2,h3, got {','.join(header)}")
            rows = [row for row in reader if row and any(cell.strip() for cell in row)]
        try:
            data = np.array([[float(cell) for cell in row] for row in rows])
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from e
        if data.ndim != 2 or data.shape[1] != 4:
            raise ConfigError(f"{path}: every row needs 4 columns")
        return cls(data[:, 0], data[:, 1:], source=source or str(path))

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        if np.any(t < lo) or np.any(t > hi):
            raise FieldDomainError(f"Tabulated field is defined on [{lo}, {hi}]; got t outside the table")
        return np.stack([np.interp(t, self.times, self.values[:, j]) for j in range(3)], axis=-1)

    def to_dict(self) -> dict:
        if self.source is not None:
            return {"type": self.type_name, "path": self.source}
        return {"type": self.type_name, "times": self.times.tolist(), "values": self.values.tolist()}


class PiecewiseConstantField(CoefficientField):
    """h(t) = values[k] on [breakpoints[k], breakpoints[k+1]), right-continuous.

    ``breakpoints`` holds the interior switching times; there is one more value
    than breakpoints.
    """

    type_name = "piecewise"

    def __init__(self, breakpoints, values):
        self.breakpoints = np.asarray(breakpoints, dtype=float).reshape(-1)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (self.breakpoints.size + 1, 3):
            raise ConfigError("Piecewise field needs len(breakpoints) + 1 values of 3 components")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ConfigError("Piecewise breakpoints must be strictly increasing")

    @classmethod
    def random(cls, rng: np.random.Generator, t_end: float, segments: int, scale: float = 1.0,
               dt: float | None = None) -> "PiecewiseConstantField":
        """Random segment values in [-scale, scale]; breakpoints snapped to dt multiples."""
        cuts = np.sort(rng.uniform(0, t_end, size=segments - 1))
        if dt is not None:
            cuts = np.unique(np.round(cuts / dt) * dt)
            cuts = cuts[(cuts > 0) & (cuts < t_end)]
        values = rng.uniform(-scale, scale, size=(cuts.size + 1, 3))
        return cls(cuts, values)

    def _segment(self, t) -> np.ndarray:
        return np.searchsorted(self.breakpoints, t, side="right")

    def evaluate(self, t) -> np.ndarray:
        return self.values[self._segment(np.asarray(t, dtype=float))]

    def stage_samples(self, grid):
        grid = np.asarray(grid, dtype=float)
        h = self.evaluate((grid[:-1] + grid[1:]) / 2)
        return h, h, h

    def discontinuities(self) -> np.ndarray:
        return self.breakpoints

    def to_dict(self) -> dict:
        return {"type": self.type_name, "breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}


def field_from_dict(data: dict, base_dir: Path | None = None) -> CoefficientField:
    """Build a field from its config table (see ``CoefficientField.to_dict``)."""
    data = dict(data)
    kind = data.pop("type", None)
    try:
        if kind == "constant":
            return ConstantField(tuple(float(x) for x in data["h"]))
        if kind == "rotating":
            return RotatingTransverseField(float(data["omega1"]), float(data["omega"]), float(data["omega0"]))
        if kind == "sweep":
            return LinearSweepField(float(data["omega1"]), float(data["rate"]), float(data.get("offset", 0.0)))
        if kind == "tabulated":
            if "path" in data:
                path = Path(data["path"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                return TabulatedField.from_csv(path, source=str(data["path"]))
            return TabulatedField(data["times"], data["values"])
        if kind == "piecewise":
            return PiecewiseConstantField(data["breakpoints"], data["values"])
    except (KeyError, TypeError, ValueError, OSError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Invalid {kind} field: {e!r}") from e
    raise ConfigError(f"Unknown field type: {kind!r}. Must be constant, rotating, sweep, tabulated or piecewise")


def evaluate_field(field: CoefficientField, t: float) -> np.ndarray:
    """h(t) as a length-3 array."""
    return field.evaluate(float(t))


def uniform_grid(t_end: float, dt: float) -> np.ndarray:
    """Times 0, dt, ..., t_end; t_end must be a multiple of dt."""
    if not (dt > 0 and t_end > 0):
        raise ValueError(f"Need dt > 0 and t_end > 0, got dt={dt}, t_end={t_end}")
    steps = int(round(t_end / dt))
    if steps < 1 or abs(steps * dt - t_end) > GRID_RTOL * t_end:
        raise ValueError(f"t_end={t_end} is not a multiple of dt={dt}")
    return dt * np.arange(steps + 1)


def grid_step(grid) -> float:
    """Step of a uniform grid starting at 0."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("Grid needs at least two points")
    if grid[0] != 0:
        raise ValueError(f"Grid must start at 0, got {grid[0]}")
    steps = np.diff(grid)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > GRID_RTOL * max(1.0, grid[-1]):
        raise ValueError("Grid must be uniform and increasing")
    return dt


def refine_grid(grid, substeps: int) -> np.ndarray:
    """Subdivide every interval of a uniform grid into ``substeps`` parts."""
    dt = grid_step(grid)
    return (dt / substeps) * np.arange((len(grid) - 1) * substeps + 1)


def rk4_step_matrices(a_start, a_mid, a_end, dt: float) -> np.ndarray:
    """Classical RK4 step matrices for y' = A(t) y, one per interval.

    Inputs are the generator matrices at the stage times, shape (N, d, d).
    """
    eye = np.eye(a_start.shape[-1])
    k1 = a_start
    k2 = a_mid @ (eye + dt / 2 * k1)
    k3 = a_mid @ (eye + dt / 2 * k2)
    k4 = a_end @ (eye + dt * k3)
    return eye + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def propagate_linear(steps, y0) -> np.ndarray:
    """Apply step matrices in sequence: y_{n+1} = M_n y_n, returning all y_n."""
    y0 = np.asarray(y0)
    out = np.empty((len(steps) + 1,) + y0.shape, dtype=np.result_type(steps, y0))
    out[0] = y0
    y = out[0]
    for n, step in enumerate(steps):
        y = step @ y
        out[n + 1] = y
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("Propagation produced non-finite values")
    return out


def stage_generators(field: CoefficientField, grid, generator: Callable[[np.ndarray], np.ndarray]):
    """Generator matrices at the RK4 stage times of every interval."""
    return tuple(generator(h) for h in field.stage_samples(grid))


@dataclass(frozen=True)
class Trajectory:
    """Special solution a(t) on a uniform grid, with h sampled at the grid points."""

    kind: AlgebraKind
    times: np.ndarray
    a: np.ndarray
    h: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def a0(self) -> AdjointVector:
        return AdjointVector.of(self.a[0])

    @property
    def z(self) -> np.ndarray:
        return np.hypot(self.a[:, 0], self.a[:, 1])

    @property
    def min_z(self) -> float:
        return float(self.z.min())

    def is_degenerate(self, epsilon: float = DEFAULT_EPSILON) -> bool:
        """True when z(t) drops below epsilon somewhere on the grid."""
        return self.min_z < epsilon

    @property
    def killing_norms(self) -> np.ndarray:
        return killing_array(self.kind, self.a, self.a)

    @property
    def norm_drift(self) -> np.ndarray:
        """|<a(t)|a(t)> - <a(0)|a(0)>| along the grid."""
        norms = self.killing_norms
        return np.abs(norms - norms[0])

    @property
    def a_dot(self) -> np.ndarray:
        """Exact derivative h x a at the grid points."""
        return np.einsum("nlm,nm->nl", bracket_matrix(self.kind, self.h), self.a)


def integrate_special_solution(kind: AlgebraKind, field: CoefficientField, a0, grid,
                               epsilon: float = DEFAULT_EPSILON) -> Trajectory:
    """Integrate a' = h x a from a(0) = a0 with fixed-step RK4."""
    kind = AlgebraKind.parse(kind)
    grid = np.asarray(grid, dtype=float)
    dt = grid_step(grid)
    start = AdjointVector.of(a0).components
    generators = stage_generators(field, grid, lambda h: bracket_matrix(kind, h))
    steps = rk4_step_matrices(*generators, dt)
    a = propagate_linear(steps, start)
    trajectory = Trajectory(kind=kind, times=grid, a=a, h=field.evaluate(grid))
    logger.debug("Integrated %s trajectory: %d steps, dt=%g, min z=%.3e",
                 kind.value, len(steps), dt, trajectory.min_z)
    if trajectory.is_degenerate(epsilon):
        logger.warning("Trajectory approaches the axis-3 singularity: min z = %.3e < %g",
                       trajectory.min_z, epsilon)
    return trajectory


def norm_tolerance(kind: AlgebraKind, a0, tol: float) -> float:
    """Absolute Killing-norm drift tolerance ``tol * (1 + |<a0|a0>|)``."""
    a0 = AdjointVector.of(a0).components
    return tol * (1.0 + abs(float(killing_array(kind, a0, a0))))
