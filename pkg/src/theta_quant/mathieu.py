"""Band and gap structure of Psi'' = (A cos(gamma) - E) Psi."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq, minimize_scalar

from .errors import NotConverged
from .models import BandEdge, BandStructure, Gap, MathieuProblem


logger = logging.getLogger(__name__)

MIN_MODES = 8
MODE_STEP = 8
CLOSED_GAP = 1e-9
HILL_RTOL = 1e-12
HILL_ATOL = 1e-12
ORACLE_HALF_WIDTH = 1e-3

PERIODIC = 'periodic'
ANTIPERIODIC = 'antiperiodic'

CHART_HEADER = ('A', 'gap_index', 'E_low', 'E_high', 'converged')


def fourier_spectrum(A: float, M: int, parity: str) -> np.ndarray:
    """
    Eigenvalues of -d^2/dgamma^2 + A cos(gamma) on a truncated Fourier basis.

    The periodic basis is exp(i n gamma), |n| <= M; the antiperiodic one uses
    half-integer n + 1/2 for -M - 1 <= n <= M. cos(gamma) couples n to n +- 1
    with weight 1/2, so the matrix is tridiagonal.
    """
    if parity == PERIODIC:
        ns = np.arange(-M, M + 1, dtype=float)
    elif parity == ANTIPERIODIC:
        ns = np.arange(-M - 1, M + 1, dtype=float) + 0.5
    else:
        raise ValueError(f"parity must be '{PERIODIC}' or '{ANTIPERIODIC}', got {parity!r}")
    diagonal = ns ** 2
    off_diagonal = np.full(len(ns) - 1, A / 2.0)
    return eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)


def hill_order(periodic: np.ndarray, antiperiodic: np.ndarray) -> List[BandEdge]:
    """
    Interlace the two spectra in the Hill pattern p0, a0, a1, p1, p2, a2, a3, ...

    Gap n is bounded by (a_{n-1}, a_n) for odd n and (p_{n-1}, p_n) for even n.
    """
    edges = [BandEdge(float(periodic[0]), PERIODIC, 0)]
    n = 1
    while True:
        source, parity = (antiperiodic, ANTIPERIODIC) if n % 2 else (periodic, PERIODIC)
        if n >= len(source):
            break
        edges.append(BandEdge(float(source[n - 1]), parity, n - 1))
        edges.append(BandEdge(float(source[n]), parity, n))
        n += 1
    return edges


def _gaps_below(edges: List[BandEdge], E_max: float) -> List[Gap]:
    gaps = []
    n = 1
    while 2 * n < len(edges):
        low, high = edges[2 * n - 1].energy, edges[2 * n].energy
        if low >= E_max:
            break
        gaps.append(Gap(index=n, low=low, high=high, closed_threshold=CLOSED_GAP))
        n += 1
    return gaps


def solve_bands(p: MathieuProblem) -> BandStructure:
    """
    Band structure with a convergence flag instead of an exception.

    The reported shift is the largest movement of any edge below E_max
    (and of its gap partner) when the truncation grows from M to M + 8.
    """
    if p.M < MIN_MODES:
        raise ValueError(f"M must be >= {MIN_MODES}, got {p.M}")
    if p.tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {p.tolerance}")

    def edges_at(M: int) -> List[BandEdge]:
        return hill_order(fourier_spectrum(p.A, M, PERIODIC), fourier_spectrum(p.A, M, ANTIPERIODIC))

    coarse = edges_at(p.M)
    fine = edges_at(p.M + MODE_STEP)
    gap_list = _gaps_below(coarse, p.E_max)
    kept = coarse[:2 * len(gap_list) + 1]
    shift = max(abs(a.energy - b.energy) for a, b in zip(kept, fine))
    converged = shift < p.tolerance
    if not converged:
        logger.debug(f"A={p.A}: edge shift {shift:.3e} at M={p.M} exceeds {p.tolerance:.1e}")
    return BandStructure(
        A=p.A,
        edges=kept,
        gaps=gap_list,
        converged=converged,
        max_shift=float(shift),
    )


def band_edges(p: MathieuProblem) -> BandStructure:
    """
    Periodic and antiperiodic edges in Hill order, with the derived gaps.

    Raises:
        NotConverged: If an edge moves by more than p.tolerance from M to M + 8
    """
    structure = solve_bands(p)
    if not structure.converged:
        raise NotConverged(structure.max_shift, p.tolerance)
    return structure


def gaps(p: MathieuProblem) -> List[Tuple[float, float]]:
    """Lacunae (E_low, E_high) whose lower edge lies below E_max; closed gaps have width < 1e-9."""
    return [(g.low, g.high) for g in band_edges(p).gaps]


def standard_form(E: float, A: float) -> Tuple[float, float]:
    """Map (E, A) to the characteristic-value form y'' + (a - 2q cos 2v) y = 0."""
    return 4.0 * E, 2.0 * A


def _monodromy(E: float, A: float) -> np.ndarray:
    def rhs(gamma, w):
        factor = A * np.cos(gamma) - E
        return [w[1], factor * w[0], w[3], factor * w[2]]

    sol = solve_ivp(rhs, (0.0, 2 * np.pi), [1.0, 0.0, 0.0, 1.0],
                    method='DOP853', rtol=HILL_RTOL, atol=HILL_ATOL)
    if not sol.success:
        raise ArithmeticError(f"monodromy integration failed at E={E}, A={A}: {sol.message}")
    y1, dy1, y2, dy2 = sol.y[:, -1]
    return np.array([[y1, y2], [dy1, dy2]])


def hill_discriminant(E: float, A: float) -> float:
    """Trace of the monodromy matrix over one period 2 pi."""
    return float(np.trace(_monodromy(E, A)))


def _refine_edge(E0: float, A: float, target: float, half_width: float) -> float:
    def f(E):
        return hill_discriminant(E, A) - target

    lo, hi = E0 - half_width, E0 + half_width
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi < 0:
        return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    # touching root of a closed gap
    result = minimize_scalar(lambda E: abs(f(E)), bounds=(lo, hi), method='bounded',
                             options={'xatol': 1e-12})
    return float(result.x)


def hill_band_edges(A: float, count: int = 8, M: int = 40) -> List[BandEdge]:
    """
    The first count band edges recomputed as roots of Delta(E) = +-2.

    Each root is bracketed around the matching matrix edge with a half width
    of at most 1e-3 and half the distance to the neighbouring edges.
    """
    reference = hill_order(fourier_spectrum(A, M, PERIODIC), fourier_spectrum(A, M, ANTIPERIODIC))[:count]
    energies = [e.energy for e in reference]
    refined = []
    for j, edge in enumerate(reference):
        gaps_around = [abs(edge.energy - energies[i]) for i in (j - 1, j + 1) if 0 <= i < len(energies)]
        nonzero = [d for d in gaps_around if d > CLOSED_GAP]
        half_width = min([ORACLE_HALF_WIDTH] + [d / 2 for d in nonzero])
        target = 2.0 if edge.parity == PERIODIC else -2.0
        refined.append(BandEdge(_refine_edge(edge.energy, A, target, half_width), edge.parity, edge.index))
    return refined


def _chart_rows(A: float, E_max: float, M: int, tolerance: float) -> List[Dict]:
    structure = solve_bands(MathieuProblem(A=A, M=M, E_max=E_max, tolerance=tolerance))
    if not structure.converged:
        logger.warning(f"band chart row A={A} did not converge (shift {structure.max_shift:.3e})")
    return [
        {'A': float(A), 'gap_index': g.index, 'E_low': g.low, 'E_high': g.high,
         'converged': structure.converged}
        for g in structure.gaps
    ]


def band_chart(
    A_grid: Sequence[float],
    E_max: float = 25.0,
    M: int = 40,
    threads: int = 1,
    tolerance: float = 1e-8,
) -> List[Dict]:
    """
    Gap table over a grid of amplitudes, one row per (A, gap).

    Rows come back in grid order regardless of the worker count. Rows whose
    truncation did not converge are kept with converged = False.

    Args:
        A_grid: Amplitudes (non-empty)
        E_max: Energy ceiling for the lower gap edge
        M: Fourier truncation
        threads: Worker pool size
        tolerance: Convergence threshold for the M -> M + 8 shift

    Returns:
        List of dicts with keys A, gap_index, E_low, E_high, converged
    """
    if len(A_grid) == 0:
        raise ValueError("A_grid must not be empty")
    logger.info(f"Computing band chart for {len(A_grid)} amplitudes with {threads} worker(s)")
    if threads <= 1:
        per_row = [_chart_rows(A, E_max, M, tolerance) for A in A_grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            per_row = list(executor.map(lambda A: _chart_rows(A, E_max, M, tolerance), A_grid))
    return [row for rows in per_row for row in rows]


def in_lacuna(E: float, A: float, M: int = 40) -> bool:
    """True if E lies strictly inside an open gap at amplitude A."""
    structure = solve_bands(MathieuProblem(A=A, M=M, E_max=max(2 * E, E + 5.0)))
    return any(not g.closed and g.low < E < g.high for g in structure.gaps)


def a_direction_scan(E: float, A_grid: Sequence[float], M: int = 40) -> List[Tuple[float, float]]:
    """
    Maximal runs of the grid on which E sits in a lacuna.

    Returns:
        (first A, last A) of each run, in grid order
    """
    intervals = []
    start: Optional[float] = None
    previous: Optional[float] = None
    for A in A_grid:
        if in_lacuna(E, A, M):
            if start is None:
                start = A
            previous = A
        elif start is not None:
            intervals.append((start, previous))
            start = None
    if start is not None:
        intervals.append((start, previous))
    return intervals
