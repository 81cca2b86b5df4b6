"""CSV and JSON artifacts of a run."""

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .algebra import AlgebraKind
from .dynamics import Trajectory
from .factorization import FactorizationRecord
from .propagator import PropagatorSeries

TRAJECTORY_HEADER = ["t", "a1", "a2", "a3", "z", "lambda_or_mu"]
FACTORIZATION_HEADER = ["t", "phi", "second_angle", "alpha", "tau", "branch"]
_ENTRIES = ["11", "12", "21", "22"]
PROPAGATOR_HEADER = (
    ["t"]
    + [f"{part}V{entry}" for entry in _ENTRIES for part in ("Re", "Im")]
    + [f"{part}U{entry}" for entry in _ENTRIES for part in ("Re", "Im")]
)


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


class ArtifactStore:
    """Writes run artifacts into one output directory.

    Every file is written to a temp file first and moved into place, so a
    failed run never leaves a truncated artifact.
    """

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)

    def _write_atomic(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        temp_fd, temp_path = tempfile.mkstemp(dir=self.out_dir, prefix=".lieprop_tmp_", suffix=target.suffix)
        try:
            with os.fdopen(temp_fd, "w", newline="") as f:
                f.write(text)
                f.flush()
                os.fsync(f.fileno())
            os.replace(temp_path, target)
        except Exception:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise
        return target

    def _write_csv(self, name: str, header: list[str], rows) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
        return self._write_atomic(name, buffer.getvalue())

    def write_trajectory(self, trajectory: Trajectory) -> Path:
        a = trajectory.a
        z = trajectory.z
        if trajectory.kind is AlgebraKind.SU2:
            scale = np.linalg.norm(a, axis=-1)
        else:
            scale = np.sqrt(np.abs(z**2 - a[:, 2] ** 2))
        rows = zip(trajectory.times, a[:, 0], a[:, 1], a[:, 2], z, scale)
        return self._write_csv("trajectory.csv", TRAJECTORY_HEADER, rows)

    def write_factorization(self, record: FactorizationRecord) -> Path:
        rows = zip(record.times, record.phi, record.second_angle, record.alpha, record.tau,
                   (branch.value for branch in record.branches))
        return self._write_csv("factorization.csv", FACTORIZATION_HEADER, rows)

    def write_propagator(self, series: PropagatorSeries) -> Path:
        n = len(series)
        V = series.V.reshape(n, 4)
        U = series.U.reshape(n, 4)
        parts = [series.times[:, None]]
        for matrix in (V, U):
            parts.append(np.stack([matrix.real, matrix.imag], axis=-1).reshape(n, 8))
        return self._write_csv("propagator.csv", PROPAGATOR_HEADER, np.hstack(parts))

    def write_json(self, name: str, data: dict) -> Path:
        return self._write_atomic(name, json.dumps(data, indent=2) + "\n")

    def write_report(self, report: dict) -> Path:
        return self.write_json("report.json", report)
