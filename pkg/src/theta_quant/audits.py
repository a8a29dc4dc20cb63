"""Check suites behind the CLI audit commands.

Every suite returns a list of CheckResult; a suite never raises for a failed
check, only for invalid input.
"""

import logging
from typing import List, Sequence

import numpy as np
import sympy as sp

from .calculus import compatibility_residuals
from .dynamics import (
    closed_solution,
    commuting_field,
    euler_casimir,
    euler_energy,
    euler_field,
    pole_free_window,
    poly_field,
    rhs_poly,
    rhs_theta,
    theta_field,
    theta_to_poly,
)
from .elliptic import (
    legendre_integrals,
    legendre_partials,
    series_state,
    theta_constants,
    theta_series,
    zeta_partials,
    jacobi_Z,
)
from .errors import IdentityViolation, ThetaQuantError
from .integrator import integrate
from .mathieu import hill_band_edges, solve_bands
from .models import CheckResult, InertiaParams, MathieuProblem, PolyState, SolutionParams, ThetaState
from .poisson import (
    antisymmetry_residual,
    bracket_of,
    commuting_observable,
    flipped_omega_tensor,
    hamiltonian_observable,
    hamiltonian_vector_field,
    jacobi_residual,
    omega_block_tensor,
    omega_symbolic,
    omega_tensor,
    planar_omega12,
    so3_tensor,
    weierstrass_field,
)
from .quantize import angular_check, commutator_table_check, heisenberg_check, real_form_lower_bound
from .straightening import from_straight, to_straight


logger = logging.getLogger(__name__)

WEIERSTRASS_POINTS = ((1.0, 3.0), (0.5, 2.0), (2.0, -5.0))


def _check(name: str, value: float, threshold: float, detail: str = "") -> CheckResult:
    value = float(value)
    return CheckResult(name=name, passed=bool(np.isfinite(value) and value < threshold),
                       value=value, threshold=threshold, detail=detail)


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def _guarded(name: str, threshold: float, compute) -> CheckResult:
    try:
        return _check(name, compute(), threshold)
    except ThetaQuantError as e:
        logger.warning(f"{name} could not be evaluated: {e}")
        return CheckResult(name, False, float('nan'), threshold, f"{type(e).__name__}: {e}")


# ---------------------------------------------------------------------------
# theta-eval
# ---------------------------------------------------------------------------

def theta_ode_residual(tau: complex, t0: float, t1: float, samples: int = 11) -> float:
    """Largest relative mismatch between the theta field and the series derivatives."""
    c = theta_constants(tau)
    worst = 0.0
    for t in np.linspace(t0, t1, samples):
        state = series_state(tau, t)
        field = rhs_theta(state, c).as_array()
        exact = np.array([
            theta_series(1, t, tau, derivative=1),
            theta_series(2, t, tau, derivative=1),
            theta_series(3, t, tau, derivative=1),
            theta_series(4, t, tau, derivative=1),
            theta_series(1, t, tau, derivative=2),
        ])
        worst = max(worst, _relative(field, exact))
    return worst


def theta_conjugacy_error(tau: complex, t0: float, t1: float, tol: float = 1e-12) -> float:
    """Endpoint mismatch between the integrated theta flow and the integrated polynomial flow."""
    c = theta_constants(tau)
    start = series_state(tau, t0)
    theta_run = integrate(theta_field(c), start.as_array(), t0, t1, tol=tol, t_eval=[t0, t1])
    poly_run = integrate(poly_field(5), theta_to_poly(start, c).as_array(), t0, t1, tol=tol, t_eval=[t0, t1])
    mapped = theta_to_poly(ThetaState.from_array(theta_run.final_state, t1), c).as_array()
    return _relative(mapped, poly_run.final_state)


def theta_audit(tau: complex = 1j, t0: float = 0.1, t1: float = 1.0, tol: float = 1e-12) -> List[CheckResult]:
    """Series states solve the theta system; the polynomial map conjugates the flows."""
    start, end = pole_free_window(t0, t1, tau)
    return [
        _guarded('theta ODE residual', 1e-8, lambda: theta_ode_residual(tau, start, end)),
        _guarded('theta-polynomial conjugacy', 1e-7, lambda: theta_conjugacy_error(tau, start, end, tol)),
    ]


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def closed_form_residual(params: SolutionParams, times: Sequence[float], h: float = 1e-3) -> float:
    """Five-point derivative of the closed solution against the polynomial field."""
    worst = 0.0
    for t in times:
        values = [closed_solution(params, t + j * h).as_array(4) for j in (-2, -1, 1, 2)]
        derivative = (values[0] - 8 * values[1] + 8 * values[2] - values[3]) / (12 * h)
        field = rhs_poly(closed_solution(params, t), dim=4).as_array(4)
        worst = max(worst, _relative(derivative, field))
    return worst


def quadratic_integral_drift(params: SolutionParams, t1: float, tol: float, samples: int = 41) -> float:
    """Worst drift of x^2 - y^2 and x^2 - z^2 along an integrated 4D trajectory on [0, t1]."""
    times = np.linspace(0.0, t1, samples)
    run = integrate(poly_field(4), closed_solution(params, 0.0).as_array(4), 0.0, t1, tol=tol, t_eval=times)
    x, y, z = run.states[:, 0], run.states[:, 1], run.states[:, 2]
    return max(float(np.max(np.abs((x ** 2 - y ** 2) - (x[0] ** 2 - y[0] ** 2)))),
               float(np.max(np.abs((x ** 2 - z ** 2) - (x[0] ** 2 - z[0] ** 2)))))


def straightening_drift(params: SolutionParams, t0: float, t1: float, tol: float, samples: int = 9):
    """(slope error of N, drift of I, J, K) along an integrated closed-form trajectory."""
    times = np.linspace(t0, t1, samples)
    run = integrate(poly_field(4), closed_solution(params, t0).as_array(4), t0, t1, tol=tol, t_eval=times)
    straight = [to_straight(PolyState.from_array(s)).as_array() for s in run.states]
    N = np.array([s[0] for s in straight])
    slope = float(np.max(np.abs((N - N[0]) - (run.times - run.times[0]))))
    constants = np.array([s[1:] for s in straight])
    drift = float(np.max(np.abs(constants - constants[0])))
    return slope, drift


def round_trip_error(rng: np.random.Generator, samples: int) -> float:
    """from_straight(to_straight(s)) on the real domain x real, y = i y', z = i z', 0 < z' < y'."""
    worst = 0.0
    for _ in range(samples):
        y_im = rng.uniform(0.5, 2.0)
        z_im = rng.uniform(0.1, 0.9) * y_im
        s = PolyState(x=rng.uniform(-1.0, 1.0), y=1j * y_im, z=1j * z_im, xi=rng.uniform(-1.0, 1.0))
        worst = max(worst, _relative(from_straight(to_straight(s)).as_array(4), s.as_array(4)))
    return worst


def euler_drift(inertia: InertiaParams, t1: float, tol: float) -> float:
    start = np.array([1.0, 0.5, -0.3], dtype=complex)
    run = integrate(euler_field(inertia), start, 0.0, t1, tol=tol)
    energy = [euler_energy(tuple(s), inertia) for s in run.states]
    casimir = [euler_casimir(tuple(s)) for s in run.states]
    return max(float(np.max(np.abs(np.array(energy) - energy[0]))),
               float(np.max(np.abs(np.array(casimir) - casimir[0]))))


def invariant_audit(
    tau: complex = 1j,
    k: float = 0.6,
    alpha: complex = 1.0,
    K0: complex = 0.0,
    eps: complex = 0.0,
    t0: float = 0.1,
    t1: float = 1.0,
    tol: float = 1e-10,
    seed: int = 20240607,
    samples: int = 100,
) -> List[CheckResult]:
    """Closed form, integrator agreement, straightening and conserved quantities."""
    params = SolutionParams(k=k, alpha=alpha, K0=K0, eps=eps)
    rng = np.random.default_rng(seed)
    endpoint_tol = max(1e-9, 10 * tol)

    def endpoint_error():
        run = integrate(poly_field(4), closed_solution(params, t0).as_array(4), t0, t1, tol=tol, t_eval=[t0, t1])
        return _relative(run.final_state, closed_solution(params, t1).as_array(4))

    results = [
        _guarded('closed-form residual', 1e-8, lambda: closed_form_residual(params, np.linspace(t0, t1, 9))),
        _guarded('integrated vs closed endpoint', endpoint_tol, endpoint_error),
    ]
    try:
        slope, drift = straightening_drift(params, t0, t1, tol)
        results += [_check('straightened N slope', slope, 1e-7), _check('straightened I, J, K drift', drift, 1e-7)]
    except ThetaQuantError as e:
        results.append(CheckResult('straightened N slope', False, float('nan'), 1e-7, f"{type(e).__name__}: {e}"))
    results += [
        _guarded('straightening round trip', 1e-9, lambda: round_trip_error(rng, min(samples, 20))),
        _guarded('x^2 - y^2 and x^2 - z^2 drift on [0, 2]', max(1e-8, 100 * tol),
                 lambda: quadratic_integral_drift(params, 2.0, tol)),
        _guarded('Euler energy and Casimir drift', max(1e-8, 100 * tol),
                 lambda: euler_drift(InertiaParams(1.0, 2.0, 3.0), 2.0, tol)),
    ]
    start, end = pole_free_window(t0, t1, tau)
    results.append(_guarded('theta-polynomial conjugacy', 1e-7, lambda: theta_conjugacy_error(tau, start, end)))
    return results


# ---------------------------------------------------------------------------
# bracket-check
# ---------------------------------------------------------------------------

def _random_points(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    return rng.uniform(-2, 2, (count, dim)) + 1j * rng.uniform(-2, 2, (count, dim))


def bracket_audit(seed: int = 20240607, samples: int = 100, fd_tol: float = 1e-6) -> List[CheckResult]:
    """Antisymmetry, Jacobi identity, Hamiltonian field and determinant of the brackets."""
    rng = np.random.default_rng(seed)
    points4 = _random_points(rng, samples, 4)
    points3 = _random_points(rng, samples, 3)
    omega, H, G = omega_tensor(), hamiltonian_observable(), commuting_observable()

    field_error = max(
        float(np.max(np.abs(hamiltonian_vector_field(omega, H, p) - rhs_poly(PolyState.from_array(p), 4).as_array(4))))
        for p in points4
    )
    x, y = sp.symbols('x y')
    det_residual = sp.expand(omega_symbolic().det() - (x ** 2 - y ** 2) ** 2)

    results = [
        _check('Omega grad H reproduces the flow', field_error, 1e-12),
        _check('det Omega - (x^2 - y^2)^2', 0.0 if det_residual == 0 else 1.0, 0.5, str(det_residual)),
        _check('Omega antisymmetry', max(antisymmetry_residual(omega, p) for p in points4), 1e-15),
        _check('Omega Jacobi residual', max(jacobi_residual(omega, p) for p in points4), 1e-10),
        _check('Omega 3x3 block Jacobi residual', max(jacobi_residual(omega_block_tensor(), p) for p in points3), 1e-10),
        _check('so(3) Jacobi residual', max(jacobi_residual(so3_tensor(), p) for p in points3), 1e-10),
        _check('{H, y^2 - x^2}', max(abs(bracket_of(H, G, omega, p)) for p in points4), 1e-12),
        _check('commuting flow preserves H',
               max(abs(np.dot(H.gradient(p), commuting_field(0.0, p))) for p in points4), 1e-12),
    ]

    # negative control: must violate the Jacobi identity
    flipped = flipped_omega_tensor()
    violation = jacobi_residual(flipped, [1, 2, 3, 4], stencil='five_point')
    results.append(CheckResult('flipped Omega violates Jacobi', violation > 1.0, violation, 1.0,
                               'negative control'))

    weierstrass = weierstrass_field()
    omega12 = [abs(planar_omega12(weierstrass, p) - 1) for p in WEIERSTRASS_POINTS]
    results.append(_check('Weierstrass Omega^12 = 1', max(omega12), max(fd_tol, 1e-6)))
    return results


# ---------------------------------------------------------------------------
# quantize-check
# ---------------------------------------------------------------------------

def _identity_check(name: str, run) -> CheckResult:
    try:
        report = run()
        return CheckResult(name, True, 0.0, 0.0, f"{len(report)} identities")
    except IdentityViolation as e:
        return CheckResult(name, False, 1.0, 0.0, str(e))


def _expect_violation(name: str, run) -> CheckResult:
    try:
        run()
    except IdentityViolation as e:
        return CheckResult(name, True, 1.0, 0.0, f"fails as expected: {e}")
    return CheckResult(name, False, 0.0, 0.0, "negative control unexpectedly holds")


def quantize_audit(truncation: int = 8) -> List[CheckResult]:
    """Exact commutator table, Heisenberg equations, angular action and the real-form bound."""
    bound = min(real_form_lower_bound(r) for r in (0.0, 0.5, 1.0, 2.0, 4.0))
    return [
        _identity_check('commutator table', lambda: commutator_table_check(truncation)),
        _identity_check('Weyl-ordered Heisenberg equations', lambda: heisenberg_check(truncation)),
        _identity_check('angular action of z', lambda: angular_check((0, 1, 2, 3))),
        _expect_violation('unsymmetrized Heisenberg equation fails', lambda: heisenberg_check(truncation, weyl_ordered=False)),
        CheckResult('real-form Hamiltonian is bounded below', bound > -1e-9, bound, 0.0),
    ]


# ---------------------------------------------------------------------------
# legendre-check
# ---------------------------------------------------------------------------

LEGENDRE_X = (0.1, 0.25, 0.4, 0.55, 0.7)
LEGENDRE_K = (0.2, 0.35, 0.5, 0.65, 0.8)
LEGENDRE_ALPHA = (0.3, 0.5, 0.85)


def _fd_partial(fn, values, index, h=1e-5):
    lo, hi = list(values), list(values)
    lo[index] -= h
    hi[index] += h
    return (fn(*hi) - fn(*lo)) / (2 * h)


def legendre_partial_errors(xv: float, kv: float, av: float) -> float:
    """Largest relative error of the seven closed partials against central differences."""
    closed = legendre_partials(xv, kv, av)
    point = (xv, kv, av)
    F = lambda a, b, c: legendre_integrals(a, b).F
    E = lambda a, b, c: legendre_integrals(a, b).E
    P = lambda a, b, c: legendre_integrals(a, b, c).Pi
    pairs = [
        (closed.F_x, _fd_partial(F, point, 0)), (closed.F_k, _fd_partial(F, point, 1)),
        (closed.E_x, _fd_partial(E, point, 0)), (closed.E_k, _fd_partial(E, point, 1)),
        (closed.Pi_x, _fd_partial(P, point, 0)), (closed.Pi_k, _fd_partial(P, point, 1)),
        (closed.Pi_alpha, _fd_partial(P, point, 2)),
    ]
    return max(abs(a - b) / max(1.0, abs(a)) for a, b in pairs)


def zeta_partial_errors(u: float, kv: float) -> float:
    dZ_du, dZ_dk = zeta_partials(u, kv)
    fd_u = _fd_partial(lambda a, b: jacobi_Z(a, b), (u, kv), 0)
    fd_k = _fd_partial(lambda a, b: jacobi_Z(a, b), (u, kv), 1)
    return max(abs(dZ_du - fd_u) / max(1.0, abs(dZ_du)), abs(dZ_dk - fd_k) / max(1.0, abs(dZ_dk)))


def legendre_audit(fd_tol: float = 1e-6) -> List[CheckResult]:
    """Closed partials against finite differences and compatibility of mixed partials."""
    grid = [(xv, kv, av) for xv in LEGENDRE_X for kv in LEGENDRE_K for av in LEGENDRE_ALPHA]
    partial_error = max(legendre_partial_errors(*p) for p in grid)
    zeta_error = max(zeta_partial_errors(xv, kv) for xv in LEGENDRE_X for kv in LEGENDRE_K)
    compatibility = max(max(abs(v) for v in compatibility_residuals(*p).values()) for p in grid)
    return [
        _check('Legendre partials vs finite differences', partial_error, fd_tol),
        _check('Z partials vs finite differences', zeta_error, fd_tol),
        _check('mixed-partial compatibility', compatibility, 1e-8),
    ]


# ---------------------------------------------------------------------------
# band oracle (used by mathieu-bands --verify)
# ---------------------------------------------------------------------------

def band_oracle_audit(amplitudes: Sequence[float] = (0.5, 1.0, 2.0, 5.0), count: int = 8,
                      M: int = 40) -> List[CheckResult]:
    """Fourier-matrix edges against roots of the Hill discriminant."""
    results = []
    for A in amplitudes:
        matrix = solve_bands(MathieuProblem(A=A, M=M, E_max=(count // 2 + 1) ** 2 + abs(A))).edges[:count]
        oracle = hill_band_edges(A, count, M)
        error = max(abs(a.energy - b.energy) for a, b in zip(matrix, oracle))
        results.append(_check(f'band edges at A={A} vs Hill discriminant', error, 1e-6))
    return results
