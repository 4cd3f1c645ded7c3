""" tests for the nonlinear perturbation flow and the blowup time tuning
"""
import math

from types import SimpleNamespace

import numpy as np
import pytest

from blowup_lab import evolve
from blowup_lab.coords import C5
from blowup_lab.coords import RadialGrid
from blowup_lab.coords import norm_state_H
from blowup_lab.errors import BracketError
from blowup_lab.errors import ConfigError
from blowup_lab.errors import DomainError
from blowup_lab.evolve import BlowupProfile
from blowup_lab.evolve import BlowupTimeTuner
from blowup_lab.evolve import ExperimentConfig
from blowup_lab.evolve import PhysicalPerturbation
from blowup_lab.evolve import StabilityReport
from blowup_lab.evolve import correction_norm
from blowup_lab.evolve import evolve_nonlinear
from blowup_lab.evolve import initial_from_physical
from blowup_lab.evolve import largest_tunable_delta
from blowup_lab.evolve import nonlinearity
from blowup_lab.evolve import nonlinearity_constant
from blowup_lab.evolve import perturbation_shape
from blowup_lab.evolve import strichartz_diagnostic
from blowup_lab.evolve import tune_blowup_time
from blowup_lab.semigroup import riesz_setup
from blowup_lab.utils import seeded_generator


@pytest.fixture(name="grid", scope="module")
def fixture_grid():
    """the smallest grid the harness accepts"""
    return RadialGrid(8)


def test_nonlinearity_is_quadratic_at_zero():
    """N(x) / x^2 tends to F''(c5) / 2"""
    assert float(nonlinearity(0.0)) == 0.0
    x = 1e-4
    expected = 14.0 / 9.0 * C5 ** (1.0 / 3.0)
    assert float(nonlinearity(x)) / x ** 2 == pytest.approx(expected, rel=1e-3)


def test_nonlinearity_constant_skips_zero():
    """the supremum is finite on a grid through 0"""
    assert 0 < nonlinearity_constant(np.linspace(-1.0, 1.0, 401)) < math.inf


def test_blowup_profile():
    """u^T(0) = c5 T^(-3/2)"""
    profile = BlowupProfile(T=1.0)
    assert profile(0.0) == pytest.approx(C5)
    assert profile.c5 == C5
    with pytest.raises(DomainError):
        profile(1.0)


def test_initial_data(grid):
    """no perturbation at T = 1 is the blowup profile itself"""
    zero = PhysicalPerturbation.zero()
    assert norm_state_H(initial_from_physical(zero, 1.0, grid)) == 0.0
    shifted = initial_from_physical(zero, 1.05, grid)
    assert shifted.first.values[0] == pytest.approx(C5 * (1.05 ** 1.5 - 1))
    with pytest.raises(DomainError):
        initial_from_physical(zero, 1.2, grid)


@pytest.mark.parametrize("kind", ["random", "tangent", "stable"])
def test_perturbation_shapes_are_normalized(grid, kind):
    """every shape has unit H norm on the unit ball"""
    shape = perturbation_shape(kind, grid, seeded_generator(0))
    assert norm_state_H(shape.sample(grid)) == pytest.approx(1.0)


def test_stable_shape_has_no_growing_component(grid):
    """the g component is removed"""
    projection = riesz_setup(grid)
    shape = perturbation_shape("stable", grid, seeded_generator(1), projection)
    assert abs(projection.coefficient(shape.sample(grid))) < 1e-10
    with pytest.raises(DomainError):
        perturbation_shape("spiky", grid, seeded_generator(1))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"delta": 0.0},
        {"window": 1.0},
        {"tau_max": -1.0},
        {"dt": 0.0},
        {"grid_order": 4},
        {"shape": "spiky"},
        {"method": "secant"},
    ],
    ids=["delta", "window", "tau_max", "dt", "grid order", "shape", "method"],
)
def test_experiment_validation(kwargs):
    """invalid experiments are configuration errors"""
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_experiment_from_mapping():
    """hyphenated keys map onto fields, overrides win"""
    cfg = ExperimentConfig.from_mapping({"tau-max": 4.0, "grid-order": 16}, delta=5e-3)
    assert cfg.tau_max == 4.0
    assert cfg.grid_order == 16
    assert cfg.delta == 5e-3
    assert cfg.with_delta(1e-3).delta == 1e-3
    assert cfg.t_window == (0.9, 1.1)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"tau-min": 1.0})


def test_perturbation_is_reproducible(grid):
    """one seed, one shape"""
    cfg = ExperimentConfig(seed=7, grid_order=8)
    first = cfg.perturbation(grid).sample(grid).as_vector()
    second = cfg.perturbation(grid).sample(grid).as_vector()
    assert np.array_equal(first, second)
    assert norm_state_H(cfg.perturbation(grid).sample(grid)) == pytest.approx(cfg.delta)


def test_perturbation_uses_the_shared_stream(grid):
    """the same draws as every other seeded sample"""
    cfg = ExperimentConfig(seed=11, grid_order=8)
    shape = perturbation_shape(
        cfg.shape, grid, seeded_generator(11), None, cfg.modes, 1 + cfg.window
    )
    expected = shape.scaled(cfg.delta).sample(grid).as_vector()
    assert np.array_equal(cfg.perturbation(grid).sample(grid).as_vector(), expected)


def test_unperturbed_flow_stays_at_rest(grid):
    """the blowup profile is a fixed point"""
    cfg = ExperimentConfig(tau_max=0.5, grid_order=8)
    trajectory = evolve_nonlinear(cfg, 1.0, PhysicalPerturbation.zero(), grid)
    assert np.max(trajectory.norms) == 0.0
    assert strichartz_diagnostic(trajectory) == 0.0
    assert correction_norm(trajectory, trajectory.states[0]) == 0.0
    assert trajectory.meta["T"] == 1.0


def test_unperturbed_tuning_stops_at_one(grid):
    """with v = 0 the first trial at T = 1 already has no growing component"""
    cfg = ExperimentConfig(tau_max=0.5, grid_order=8)
    t_star, report = tune_blowup_time(cfg, PhysicalPerturbation.zero(), grid)
    assert t_star == 1.0
    assert report.converged
    assert report.evaluations == 1
    assert "trace_times" not in report.as_row()


def test_report_validation():
    """a negative Strichartz integral is impossible"""
    with pytest.raises(DomainError):
        StabilityReport(
            delta=1e-2,
            T_star=1.0,
            strichartz_integral=-1.0,
            sup_H_norm=0.0,
            initial_H_norm=0.0,
            terminal_coefficient=0.0,
            correction_norm=0.0,
            correction_tail=0.0,
            converged=True,
            evaluations=1,
        )


@pytest.mark.slow
def test_tuned_run_stays_small():
    """a random perturbation is tuned inside the window and the de-tuned runs grow"""
    cfg = ExperimentConfig(delta=1e-2, tau_max=6.0, grid_order=16)
    tuner = BlowupTimeTuner(cfg)
    t_star = tuner.tune()
    report = tuner.report(t_star)
    assert 0.9 <= t_star <= 1.1
    assert report.converged
    tuned = abs(tuner.coefficient(t_star))
    assert abs(tuner.coefficient(t_star + 0.02)) >= 10 * tuned


def test_largest_tunable_delta(monkeypatch):
    """the largest delta that tunes, attempts without a bracket map to None"""

    def fake_tune(cfg):
        if cfg.delta > 0.015:
            raise BracketError("no sign change")
        return 1.0, SimpleNamespace(converged=cfg.delta < 0.008)

    monkeypatch.setattr(evolve, "tune_blowup_time", fake_tune)
    best, reports = largest_tunable_delta(ExperimentConfig(), [5e-3, 2e-2, 1e-2])
    assert best == 5e-3
    assert reports[2e-2] is None
    assert not reports[1e-2].converged
    assert sorted(reports) == [5e-3, 1e-2, 2e-2]
