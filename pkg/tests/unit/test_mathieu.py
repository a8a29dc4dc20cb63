"""Unit tests for Mathieu band edges, gaps and the Hill discriminant."""

import math

import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b

from theta_quant.errors import NotConverged
from theta_quant.mathieu import (
    ANTIPERIODIC,
    CHART_HEADER,
    PERIODIC,
    a_direction_scan,
    band_chart,
    band_edges,
    fourier_spectrum,
    gaps,
    hill_band_edges,
    hill_discriminant,
    hill_order,
    in_lacuna,
    solve_bands,
    standard_form,
)
from theta_quant.models import MathieuProblem


class TestFourierSpectrum:
    """Tests for the truncated Fourier eigenproblem."""

    def test_free_spectrum(self):
        """At A = 0 the edges are n^2 and (n + 1/2)^2, each doubly degenerate above zero."""
        periodic = fourier_spectrum(0.0, 10, PERIODIC)
        antiperiodic = fourier_spectrum(0.0, 10, ANTIPERIODIC)
        assert np.allclose(periodic[:5], [0, 1, 1, 4, 4], rtol=0, atol=1e-14)
        assert np.allclose(antiperiodic[:4], [0.25, 0.25, 2.25, 2.25], rtol=0, atol=1e-14)

    def test_lowest_edge_at_unit_amplitude(self):
        """E_0(A = 1) = a_0(q = 2)/4 = -0.37849..."""
        E0 = fourier_spectrum(1.0, 40, PERIODIC)[0]
        assert abs(E0 - mathieu_a(0, 2.0) / 4) < 1e-8
        assert abs(E0 + 0.378489) < 1e-6

    @pytest.mark.parametrize("A", [0.5, 1.0, 2.5])
    def test_matches_characteristic_values(self, A):
        """Periodic edges are the even-order characteristic values, antiperiodic the odd ones."""
        q = 2 * A
        even = sorted([mathieu_a(0, q), mathieu_b(2, q), mathieu_a(2, q), mathieu_b(4, q), mathieu_a(4, q)])
        odd = sorted([mathieu_a(1, q), mathieu_b(1, q), mathieu_a(3, q), mathieu_b(3, q)])
        assert np.allclose(fourier_spectrum(A, 40, PERIODIC)[:5], np.array(even) / 4, rtol=0, atol=1e-7)
        assert np.allclose(fourier_spectrum(A, 40, ANTIPERIODIC)[:4], np.array(odd) / 4, rtol=0, atol=1e-7)

    def test_sign_of_amplitude(self):
        """A and -A give the same spectrum."""
        for parity in (PERIODIC, ANTIPERIODIC):
            assert np.allclose(fourier_spectrum(1.7, 30, parity), fourier_spectrum(-1.7, 30, parity),
                               rtol=0, atol=1e-10)

    def test_unknown_parity(self):
        with pytest.raises(ValueError):
            fourier_spectrum(1.0, 10, 'quasiperiodic')


class TestHillOrder:
    """Tests for interlacing the two spectra."""

    def test_pattern(self):
        edges = hill_order(np.array([0, 1, 1, 4, 4.0]), np.array([0.25, 0.25, 2.25, 2.25]))
        assert [(e.parity[0], e.index) for e in edges] == [
            ('p', 0), ('a', 0), ('a', 1), ('p', 1), ('p', 2), ('a', 2), ('a', 3), ('p', 3), ('p', 4)]

    def test_edges_are_ordered(self):
        edges = band_edges(MathieuProblem(A=2.0)).edges
        energies = [e.energy for e in edges]
        assert energies == sorted(energies)


class TestGaps:
    """Tests for the gap list."""

    def test_closed_gaps_at_zero_amplitude(self):
        structure = band_edges(MathieuProblem(A=0.0, E_max=25.0))
        assert len(structure.gaps) == 9
        assert all(g.closed for g in structure.gaps)
        assert structure.gaps[0].low == pytest.approx(0.25)

    def test_open_gaps(self):
        """At A = 0.5 there are nine lacunae below 25; the first has width close to A."""
        found = gaps(MathieuProblem(A=0.5, E_max=25.0))
        assert len(found) == 9
        low, high = found[0]
        assert 0.4 < high - low < 0.6

    def test_bands(self):
        structure = band_edges(MathieuProblem(A=1.0, E_max=10.0))
        bands = structure.bands()
        assert bands[0][0] == structure.edges[0].energy
        assert all(lo <= hi for lo, hi in bands)

    def test_not_converged(self):
        problem = MathieuProblem(A=20.0, M=8, E_max=25.0)
        assert not solve_bands(problem).converged
        with pytest.raises(NotConverged) as excinfo:
            band_edges(problem)
        assert excinfo.value.shift > problem.tolerance

    def test_minimum_truncation(self):
        with pytest.raises(ValueError):
            solve_bands(MathieuProblem(A=1.0, M=4))

    def test_in_lacuna(self):
        low, high = gaps(MathieuProblem(A=1.0))[0]
        assert in_lacuna(0.5 * (low + high), 1.0)
        assert not in_lacuna(0.5 * (low + high), 0.0)


class TestHillDiscriminant:
    """Tests for the monodromy oracle."""

    @pytest.mark.parametrize("E", [0.3, 1.7, 5.0])
    def test_free_discriminant(self, E):
        """Delta(E) = 2 cos(2 pi sqrt E) at A = 0."""
        assert abs(hill_discriminant(E, 0.0) - 2 * math.cos(2 * math.pi * math.sqrt(E))) < 1e-8

    @pytest.mark.parametrize("A", [0.5, 1.0, 2.0, 5.0])
    def test_oracle_agrees_with_matrix_edges(self, A):
        matrix = hill_order(fourier_spectrum(A, 40, PERIODIC), fourier_spectrum(A, 40, ANTIPERIODIC))[:8]
        oracle = hill_band_edges(A, count=8)
        assert max(abs(a.energy - b.energy) for a, b in zip(matrix, oracle)) < 1e-6

    def test_edges_solve_discriminant(self):
        for edge in hill_band_edges(1.0, count=4):
            target = 2.0 if edge.parity == PERIODIC else -2.0
            assert abs(hill_discriminant(edge.energy, 1.0) - target) < 1e-7


class TestBandChart:
    """Tests for the gap chart over an amplitude grid."""

    def test_rows(self):
        rows = band_chart([0.5, 1.0], E_max=10.0)
        assert set(rows[0]) == set(CHART_HEADER)
        assert [r['A'] for r in rows] == sorted(r['A'] for r in rows)
        assert all(r['converged'] for r in rows)

    def test_threads_do_not_change_rows(self):
        grid = [0.25 * j for j in range(9)]
        assert band_chart(grid, threads=4) == band_chart(grid, threads=1)

    def test_continuity(self):
        """Gap edges move continuously with A."""
        rows = band_chart([1.0, 1.01], E_max=10.0)
        first = [r for r in rows if r['gap_index'] == 1]
        assert abs(first[0]['E_low'] - first[1]['E_low']) < 0.05
        assert abs(first[0]['E_high'] - first[1]['E_high']) < 0.05

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            band_chart([])


class TestScans:
    """Tests for scanning the amplitude at fixed energy."""

    def test_two_lacunae(self):
        """E = 3/8 leaves the first gap through a narrow band and enters the second."""
        intervals = a_direction_scan(0.375, list(np.linspace(0.0, 6.0, 601)))
        assert len(intervals) >= 2
        assert 0.0 < intervals[0][0] < 0.5
        assert intervals[0][1] < intervals[1][0]

    def test_standard_form(self):
        assert standard_form(0.5, 1.0) == (2.0, 2.0)
