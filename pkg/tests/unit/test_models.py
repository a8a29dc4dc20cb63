"""Unit tests for data models."""

from pathlib import Path

import numpy as np
import pytest

from theta_quant.models import (
    BandEdge,
    BandStructure,
    Gap,
    LegendrePartials,
    PolyState,
    RunConfig,
    StraightState,
    ThetaState,
    Trajectory,
)


class TestStates:
    """Tests for the state containers."""

    def test_theta_state_round_trip(self):
        s = ThetaState(1, 2, 3, 4, 5, t=0.5)
        back = ThetaState.from_array(s.as_array(), t=0.5)
        assert back == s

    def test_poly_state_dimensions(self):
        s = PolyState(1, 2j, 3, 4)
        assert len(s.as_array()) == 5
        assert list(s.as_array(4)) == [1, 2j, 3, 4]
        assert PolyState.from_array([1, 2, 3, 4]).u == 0

    def test_straight_state(self):
        assert list(StraightState(1, 2, 3, 4).as_array()) == [1, 2, 3, 4]

    def test_legendre_partials_dict(self):
        partials = LegendrePartials(*range(7))
        assert list(partials.as_dict()) == ['F_x', 'F_k', 'E_x', 'E_k', 'Pi_x', 'Pi_k', 'Pi_alpha']
        assert partials.as_dict()['Pi_alpha'] == 6


class TestTrajectory:
    """Tests for the Trajectory container."""

    def test_final_sample(self):
        run = Trajectory(times=np.array([0.0, 0.5]), states=np.array([[1.0], [2.0]]))
        assert run.final_time == 0.5
        assert run.final_state[0] == 2.0
        assert len(run) == 2
        assert run.error_estimates == []


class TestBands:
    """Tests for gaps and band structures."""

    def test_gap_properties(self):
        gap = Gap(index=1, low=0.2, high=0.7)
        assert abs(gap.width - 0.5) < 1e-15
        assert gap.midpoint == pytest.approx(0.45)
        assert not gap.closed
        assert Gap(index=2, low=1.0, high=1.0 + 1e-12).closed

    def test_bands_between_gaps(self):
        energies = [-0.5, 0.1, 0.6, 0.9, 1.3]
        edges = [BandEdge(e, 'periodic', j) for j, e in enumerate(energies)]
        structure = BandStructure(A=1.0, edges=edges)
        assert structure.bands() == [(-0.5, 0.1), (0.6, 0.9)]
        assert structure.energies('periodic') == energies
        assert structure.energies('antiperiodic') == []

    def test_bands_of_empty_structure(self):
        assert BandStructure(A=0.0, edges=[]).bands() == []
        assert BandStructure(A=0.0, edges=[BandEdge(0.0, 'periodic', 0)]).bands() == []


class TestRunConfig:
    """Tests for RunConfig derived values."""

    def test_a_grid(self):
        config = RunConfig(command='mathieu-bands', a_min=0.0, a_max=1.0, a_steps=5)
        assert config.a_grid == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert RunConfig(command='mathieu-bands', a_min=2.0, a_steps=1).a_grid == [2.0]

    def test_output_format(self):
        assert RunConfig(command='integrate').output_format == 'csv'
        assert RunConfig(command='integrate', out=Path('run.JSON')).output_format == 'json'
        assert RunConfig(command='integrate', out=Path('run.json'), format='csv').output_format == 'csv'
