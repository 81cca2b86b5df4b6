"""Integrate, factorize, assemble and verify one scenario."""

import logging
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .dynamics import Trajectory, integrate_special_solution, norm_tolerance, uniform_grid
from .factorization import FactorizationRecord, KCoefficients, factorize, k_coefficients, proposition_residual
from .oracle import ComparisonReport, DirectSeries, compare, propagate_direct, pseudo_unitarity_defect
from .propagator import PropagatorSeries, assemble

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    """One acceptance check: a measured value against its tolerance."""

    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance, "passed": self.passed}


@dataclass(frozen=True)
class PipelineResult:
    config: ScenarioConfig
    trajectory: Trajectory
    record: FactorizationRecord
    k: KCoefficients
    series: PropagatorSeries
    direct: DirectSeries
    report: ComparisonReport
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def branch(self) -> str:
        return self.record.branch.value

    def failed_checks(self) -> list[Check]:
        return [check for check in self.checks if not check.passed]

    def to_report(self) -> dict:
        """The report.json payload."""
        return {
            "scenario": self.config.to_dict(),
            "branch": self.branch,
            "comparison": self.report.to_dict(),
            "checks": [check.to_dict() for check in self.checks],
            "passed": self.passed,
        }


def evaluate_checks(config: ScenarioConfig, trajectory: Trajectory, record: FactorizationRecord,
                    k: KCoefficients, series: PropagatorSeries, report: ComparisonReport) -> list[Check]:
    tol = config.tolerances
    proposition = float(proposition_residual(record, trajectory, k).max())
    unitarity = float(pseudo_unitarity_defect(config.algebra, series.U).max())
    return [
        Check("proposition", proposition, tol.proposition),
        Check("norm_drift", report.max_norm_drift, norm_tolerance(config.algebra, config.a0, tol.norm_drift)),
        Check("schrodinger", report.max_schrodinger_residual, tol.schrodinger),
        Check("unitarity", unitarity, tol.unitarity),
        Check("frobenius_a", report.max_frobenius_a, tol.frobenius_a),
        Check("frobenius_U", report.max_frobenius_U, tol.frobenius_U),
    ]


def run_scenario(config: ScenarioConfig) -> PipelineResult:
    """Run the full pipeline.

    Raises:
        FactorizationError: If the trajectory is rejected by the two-angle construction
    """
    grid = uniform_grid(config.t_end, config.dt)
    logger.debug("Scenario %s: %s, %d grid points, oracle substeps %d",
                 config.name, config.algebra.value, len(grid), config.oracle_substeps)
    trajectory = integrate_special_solution(config.algebra, config.field, config.a0, grid, config.epsilon)
    record = factorize(trajectory, config.epsilon)
    k = k_coefficients(record, trajectory)
    series = assemble(record, config.a0)
    direct = propagate_direct(config.algebra, config.field, grid, config.oracle_substeps)
    report = compare(series, direct, trajectory, jumps=config.field.discontinuities())
    checks = evaluate_checks(config, trajectory, record, k, series, report)
    result = PipelineResult(config, trajectory, record, k, series, direct, report, checks)
    logger.debug("Scenario %s %s", config.name, "passed" if result.passed else "failed")
    return result
