"""Tests for coefficient fields, grids and the special-solution integrator."""

import logging

import numpy as np
import pytest

from lieprop.algebra import AlgebraKind, bracket_array
from lieprop.dynamics import (
    ConstantField,
    LinearSweepField,
    PiecewiseConstantField,
    RotatingTransverseField,
    TabulatedField,
    evaluate_field,
    field_from_dict,
    grid_step,
    integrate_special_solution,
    norm_tolerance,
    propagate_linear,
    refine_grid,
    uniform_grid,
)
from lieprop.errors import ConfigError, FieldDomainError, NonFiniteError
from lieprop.matrix_reps import axis_angle_rotation


class TestFields:
    def test_constant(self):
        field = ConstantField((1.0, 2.0, 3.0))
        assert field.evaluate(np.zeros(4)).shape == (4, 3)
        assert np.array_equal(evaluate_field(field, 7.0), [1.0, 2.0, 3.0])

    def test_rotating(self):
        field = RotatingTransverseField(omega1=2.0, omega=np.pi, omega0=0.5)
        assert np.allclose(evaluate_field(field, 0.5), [0.0, 2.0, 0.5], atol=1e-15)

    def test_sweep_with_offset(self):
        field = LinearSweepField(omega1=1.0, rate=0.4, offset=-2.0)
        assert np.allclose(evaluate_field(field, 5.0), [1.0, 0.0, 0.0])

    def test_tabulated_interpolates(self):
        field = TabulatedField([0.0, 1.0, 2.0], [[0, 0, 0], [2, 0, 1], [2, 2, 1]])
        assert np.allclose(evaluate_field(field, 0.5), [1.0, 0.0, 0.5])
        assert np.allclose(evaluate_field(field, 1.5), [2.0, 1.0, 1.0])

    def test_tabulated_outside_domain(self):
        field = TabulatedField([0.0, 1.0], [[0, 0, 0], [1, 1, 1]])
        with pytest.raises(FieldDomainError):
            field.evaluate(np.array([0.5, 1.5]))

    def test_tabulated_rejects_unsorted_times(self):
        with pytest.raises(ConfigError, match="increasing"):
            TabulatedField([0.0, 2.0, 1.0], np.zeros((3, 3)))

    def test_tabulated_from_csv(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("t,h1,h2,h3\n0,0,0,1\n1,1,0,1\n")
        field = TabulatedField.from_csv(path)
        assert np.allclose(evaluate_field(field, 0.25), [0.25, 0.0, 1.0])

    def test_tabulated_csv_header(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("time,x,y,z\n0,0,0,1\n1,1,0,1\n")
        with pytest.raises(ConfigError, match="header"):
            TabulatedField.from_csv(path)

    def test_piecewise_is_right_continuous(self):
        field = PiecewiseConstantField([1.0], [[1, 0, 0], [0, 0, 1]])
        h = field.evaluate(np.array([0.5, 1.0, 1.5]))
        assert np.array_equal(h, [[1, 0, 0], [0, 0, 1], [0, 0, 1]])
        assert np.array_equal(field.discontinuities(), [1.0])

    def test_piecewise_stage_samples_use_midpoints(self):
        field = PiecewiseConstantField([1.0], [[1, 0, 0], [0, 0, 1]])
        start, mid, end = field.stage_samples(np.array([0.0, 0.5, 1.0, 1.5]))
        assert np.array_equal(start, mid) and np.array_equal(mid, end)
        assert np.array_equal(end[1], [1, 0, 0])
        assert np.array_equal(end[2], [0, 0, 1])

    def test_random_piecewise_breakpoints_on_grid(self, rng):
        field = PiecewiseConstantField.random(rng, t_end=10.0, segments=6, dt=1e-3)
        assert np.allclose(field.breakpoints / 1e-3, np.round(field.breakpoints / 1e-3))
        assert field.values.shape == (field.breakpoints.size + 1, 3)

    @pytest.mark.parametrize("field", [
        ConstantField((0.0, 0.0, 1.0)),
        RotatingTransverseField(1.0, 2.0, 3.0),
        LinearSweepField(1.0, 0.5, -1.0),
        PiecewiseConstantField([0.5], [[1, 0, 0], [0, 1, 0]]),
        TabulatedField([0.0, 1.0], [[0, 0, 0], [1, 1, 1]]),
    ], ids=lambda field: field.type_name)
    def test_to_dict_round_trip(self, field):
        rebuilt = field_from_dict(field.to_dict())
        t = np.linspace(0, 1, 7)
        assert np.array_equal(rebuilt.evaluate(t), field.evaluate(t))

    def test_unknown_field_type(self):
        with pytest.raises(ConfigError, match="Unknown field type"):
            field_from_dict({"type": "noise"})

    def test_missing_parameter(self):
        with pytest.raises(ConfigError, match="rotating"):
            field_from_dict({"type": "rotating", "omega1": 1.0})

    def test_tabulated_path_relative_to_base_dir(self, tmp_path):
        (tmp_path / "h.csv").write_text("t,h1,h2,h3\n0,0,0,1\n2,0,0,3\n")
        field = field_from_dict({"type": "tabulated", "path": "h.csv"}, base_dir=tmp_path)
        assert np.allclose(evaluate_field(field, 1.0), [0, 0, 2])
        assert field.to_dict()["path"] == "h.csv"


class TestGrids:
    def test_uniform_grid(self):
        grid = uniform_grid(1.0, 0.25)
        assert np.allclose(grid, [0, 0.25, 0.5, 0.75, 1.0])

    def test_uniform_grid_requires_multiple(self):
        with pytest.raises(ValueError, match="multiple"):
            uniform_grid(1.0, 0.3)

    def test_grid_step_rejects_non_uniform(self):
        with pytest.raises(ValueError, match="uniform"):
            grid_step([0.0, 0.1, 0.3])

    def test_grid_step_requires_zero_start(self):
        with pytest.raises(ValueError, match="start at 0"):
            grid_step([0.5, 1.0])

    def test_refine_grid(self):
        fine = refine_grid(uniform_grid(1.0, 0.5), 4)
        assert len(fine) == 9
        assert grid_step(fine) == pytest.approx(0.125)


class TestLinearPropagation:
    def test_non_finite_detected(self):
        steps = np.array([np.eye(2), np.full((2, 2), np.nan)])
        with pytest.raises(NonFiniteError):
            propagate_linear(steps, np.ones(2))


def _exact_rotation(h, a0, times):
    h = np.asarray(h, dtype=float)
    norm = np.linalg.norm(h)
    return np.array([axis_angle_rotation(h / norm, norm * t) @ a0 for t in times])


class TestSpecialSolution:
    def test_larmor(self):
        grid = uniform_grid(10.0, 1e-3)
        trajectory = integrate_special_solution(AlgebraKind.SU2, ConstantField((0.0, 0.0, 1.0)), [0, 1, 0], grid)
        expected = np.stack([-np.sin(grid), np.cos(grid), np.zeros_like(grid)], axis=-1)
        assert np.abs(trajectory.a - expected).max() <= 1e-9

    def test_a_dot_is_bracket(self):
        field = RotatingTransverseField(1.0, 0.7, 0.3)
        trajectory = integrate_special_solution(AlgebraKind.SU11, field, [1.0, 0.2, 0.4], uniform_grid(1.0, 1e-2))
        assert np.allclose(trajectory.a_dot, bracket_array(AlgebraKind.SU11, trajectory.h, trajectory.a))

    def test_fourth_order_convergence(self):
        h, a0 = (0.3, 0.5, 1.0), np.array([1.0, 0.0, 0.0])
        errors = []
        for dt in (0.1, 0.05):
            grid = uniform_grid(10.0, dt)
            trajectory = integrate_special_solution(AlgebraKind.SU2, ConstantField(h), a0, grid)
            errors.append(np.abs(trajectory.a - _exact_rotation(h, a0, grid)).max())
        assert 12 <= errors[0] / errors[1] <= 20

    def test_linear_in_initial_condition(self, kind, rng):
        field = RotatingTransverseField(0.8, 1.1, 0.4)
        grid = uniform_grid(2.0, 1e-2)
        x, y = rng.normal(size=(2, 3))
        combined = integrate_special_solution(kind, field, 2 * x - y, grid).a
        separate = 2 * integrate_special_solution(kind, field, x, grid).a - integrate_special_solution(kind, field, y, grid).a
        assert np.abs(combined - separate).max() <= 1e-12

    def test_norm_conserved_for_random_piecewise_fields(self, kind, rng):
        grid = uniform_grid(10.0, 1e-3)
        for _ in range(20):
            field = PiecewiseConstantField.random(rng, t_end=10.0, segments=8, scale=0.3, dt=1e-3)
            a0 = rng.normal(size=3)
            trajectory = integrate_special_solution(kind, field, a0, grid)
            assert trajectory.norm_drift.max() <= norm_tolerance(kind, a0, 1e-7)

    def test_degenerate_trajectory_warns(self, caplog):
        grid = uniform_grid(1.0, 0.1)
        with caplog.at_level(logging.WARNING, logger="lieprop.dynamics"):
            trajectory = integrate_special_solution(AlgebraKind.SU2, ConstantField((0.0, 0.0, 1.0)), [0, 0, 1], grid)
        assert trajectory.is_degenerate()
        assert "axis-3 singularity" in caplog.text

    def test_trajectory_properties(self):
        grid = uniform_grid(1.0, 0.5)
        trajectory = integrate_special_solution(AlgebraKind.SU11, ConstantField((0.0, 0.0, 1.0)), [3, 4, 1], grid)
        assert trajectory.dt == 0.5
        assert trajectory.a0.to_list() == [3.0, 4.0, 1.0]
        assert trajectory.z[0] == pytest.approx(5.0)
        # a coarse step lets z wander slightly off its conserved value
        assert np.allclose(trajectory.z, 5.0, rtol=1e-3)
        assert trajectory.killing_norms[0] == pytest.approx(-2 * 25 + 2 * 1)
