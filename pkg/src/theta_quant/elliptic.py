"""Theta series, Jacobi elliptic functions and the Legendre integral calculus."""

import cmath
import logging
import math
from typing import Iterator, Tuple

from .errors import (
    BranchError,
    BranchPointOnPath,
    NonConvergent,
    PoleError,
    SingularParameter,
)
from .models import LegendrePartials, LegendreTriple, ThetaConstants, ThetaState
from .quadrature import distance_to_segment, polyline_quad, segment_quad


logger = logging.getLogger(__name__)

PI = math.pi

THETA_TOL = 1e-12
MAX_THETA_PAIRS = 2000
ETA_PROBE_T = 0.3

LANDEN_BASE = 1e-8
MAX_LANDEN_DEPTH = 60
POLE_TOL = 1e-14

QUAD_TOL = 1e-12
PATH_TOL = 1e-10
SINGULAR_TOL = 1e-12


# ---------------------------------------------------------------------------
# Theta series
# ---------------------------------------------------------------------------

def _theta_term(j: int, n: int, z: complex, tau: complex, derivative: int) -> complex:
    if j in (1, 2):
        frequency = (2 * n + 1) * PI * 1j
        term = cmath.exp(PI * 1j * tau * (n + 0.5) ** 2 + frequency * z)
        if j == 1:
            term *= -1j * (-1) ** (n % 2)
    else:
        frequency = 2 * n * PI * 1j
        term = cmath.exp(PI * 1j * tau * n * n + frequency * z)
        if j == 4:
            term *= (-1) ** (n % 2)
    if derivative:
        term *= frequency ** derivative
    return term


def _theta_pairs(j: int, z: complex, tau: complex, derivative: int) -> Iterator[Tuple[complex, float]]:
    """Yield (pair sum, pair magnitude) in symmetric order.

    theta_1, theta_2 pair the indices n and -n-1; theta_3, theta_4 start
    with n = 0 and then pair +n and -n.
    """
    if j in (1, 2):
        n = 0
        while True:
            a = _theta_term(j, n, z, tau, derivative)
            b = _theta_term(j, -n - 1, z, tau, derivative)
            yield a + b, abs(a) + abs(b)
            n += 1
    else:
        a = _theta_term(j, 0, z, tau, derivative)
        yield a, abs(a)
        n = 1
        while True:
            a = _theta_term(j, n, z, tau, derivative)
            b = _theta_term(j, -n, z, tau, derivative)
            yield a + b, abs(a) + abs(b)
            n += 1


def _check_theta_args(j: int, tau: complex, derivative: int) -> None:
    if j not in (1, 2, 3, 4):
        raise ValueError(f"theta index must be 1..4, got {j}")
    if derivative < 0:
        raise ValueError(f"derivative order must be non-negative, got {derivative}")
    if complex(tau).imag <= 0:
        raise NonConvergent(f"theta series diverges for Im tau = {complex(tau).imag} <= 0")


def theta_partial_sum(j: int, z: complex, tau: complex, n_pairs: int, derivative: int = 0) -> complex:
    """Sum exactly the first n_pairs symmetric pairs of the theta_j series."""
    _check_theta_args(j, tau, derivative)
    total = 0j
    for count, (pair, _) in enumerate(_theta_pairs(j, complex(z), complex(tau), derivative)):
        if count >= n_pairs:
            break
        total += pair
    return total


def theta_series(j: int, z: complex, tau: complex, tol: float = THETA_TOL, derivative: int = 0) -> complex:
    """
    Evaluate theta_j(z|tau), or its z-derivative, by symmetric summation.

    Summation stops once the magnitude of the pair just added drops below
    tol times the running sum of magnitudes.

    Args:
        j: Theta index 1..4
        z: Argument
        tau: Lattice parameter with Im tau > 0
        tol: Relative truncation tolerance
        derivative: Order of the z-derivative (0, 1, 2, ...)

    Returns:
        The truncated series value

    Raises:
        NonConvergent: If Im tau <= 0 or the series does not settle
    """
    _check_theta_args(j, tau, derivative)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    total = 0j
    running = 0.0
    for count, (pair, magnitude) in enumerate(_theta_pairs(j, complex(z), complex(tau), derivative)):
        total += pair
        running += magnitude
        if magnitude < tol * running:
            logger.debug(f"theta_{j}^({derivative}) at z={z}, tau={tau}: {count + 1} pairs")
            return total
        if count >= MAX_THETA_PAIRS:
            break
    raise NonConvergent(f"theta_{j} series did not converge in {MAX_THETA_PAIRS} pairs (tau={tau})")


def series_state(tau: complex, t: float, tol: float = THETA_TOL) -> ThetaState:
    """The ThetaState (theta_1..theta_4, theta_1') given by the Fourier series at time t."""
    return ThetaState(
        th1=theta_series(1, t, tau, tol),
        th2=theta_series(2, t, tau, tol),
        th3=theta_series(3, t, tau, tol),
        th4=theta_series(4, t, tau, tol),
        dth1=theta_series(1, t, tau, tol, derivative=1),
        t=t,
    )


def theta_constants(tau: complex, tol: float = THETA_TOL) -> ThetaConstants:
    """
    Compute the vartheta-constants and eta for a lattice parameter.

    eta is pinned by the theta_1'' row of the theta ODE system: with the
    series values of theta_1, theta_1', theta_1'' and theta_2 at a generic
    probe time the row is linear in eta and is solved for it.

    Args:
        tau: Lattice parameter with Im tau > 0
        tol: Series truncation tolerance

    Returns:
        ThetaConstants with v_j = theta_j(0|tau) and the matching eta
    """
    v2 = theta_series(2, 0, tau, tol)
    v3 = theta_series(3, 0, tau, tol)
    v4 = theta_series(4, 0, tau, tol)

    t = ETA_PROBE_T
    th1 = theta_series(1, t, tau, tol)
    th2 = theta_series(2, t, tau, tol)
    d1 = theta_series(1, t, tau, tol, derivative=1)
    d2 = theta_series(1, t, tau, tol, derivative=2)
    lam = (d1 * d1 / th1 - PI ** 2 * v3 ** 2 * v4 ** 2 * th2 ** 2 / th1 - d2) / th1
    eta = (lam - PI ** 2 / 3 * (v3 ** 4 + v4 ** 4)) / 4
    return ThetaConstants(v2=v2, v3=v3, v4=v4, eta=eta)


# ---------------------------------------------------------------------------
# Jacobi elliptic functions
# ---------------------------------------------------------------------------

def _scd_small_modulus(u: complex, k: complex) -> Tuple[complex, complex, complex]:
    m = k * k
    s = cmath.sin(u)
    c = cmath.cos(u)
    shift = 0.25 * m * (u - s * c)
    return s - shift * c, c + shift * s, 1 - 0.5 * m * s * s


def _scd_descend(u: complex, k: complex, depth: int) -> Tuple[complex, complex, complex]:
    if abs(k) < LANDEN_BASE:
        return _scd_small_modulus(u, k)
    if depth >= MAX_LANDEN_DEPTH:
        raise NonConvergent(f"Landen descent did not reach a small modulus (k={k})")

    kp = cmath.sqrt(1 - k * k)
    k1 = (1 - kp) / (1 + kp)
    s, c, d = _scd_descend(u / (1 + k1), k1, depth + 1)
    den = 1 + k1 * s * s
    if abs(den) < POLE_TOL:
        raise PoleError(f"sn, cn, dn have a pole at u={u} (k={k})")
    return (1 + k1) * s / den, c * d / den, (1 - k1 * s * s) / den


def jacobi_scd(u: complex, k: complex) -> Tuple[complex, complex, complex]:
    """
    Evaluate (sn, cn, dn)(u; k) by the descending Landen transformation.

    The modulus is reduced by k -> (1 - k')/(1 + k') until it is tiny,
    where the trigonometric limit applies, and the result is carried back
    up. |k| > 1 goes through the reciprocal-modulus transformation first.

    Raises:
        PoleError: If u lies on (or numerically at) a pole
    """
    u = complex(u)
    k = complex(k)
    if abs(k * k - 1) == 0:
        sech = 1 / cmath.cosh(u)
        if not cmath.isfinite(sech):
            raise PoleError(f"sech has a pole at u={u}")
        return cmath.tanh(u), sech, sech

    if abs(k) > 1:
        s, c, d = _scd_descend(k * u, 1 / k, 0)
        result = (s / k, d, c)
    else:
        result = _scd_descend(u, k, 0)

    if not all(cmath.isfinite(v) for v in result):
        raise PoleError(f"sn, cn, dn overflow at u={u} (k={k})")
    return result


# ---------------------------------------------------------------------------
# Complete and incomplete Legendre integrals
# ---------------------------------------------------------------------------

def _agm_step(a: complex, b: complex) -> Tuple[complex, complex]:
    a_next = (a + b) / 2
    b_next = cmath.sqrt(a * b)
    if abs(a_next - b_next) > abs(a_next + b_next):
        b_next = -b_next
    return a_next, b_next


def agm(a: complex, b: complex, max_iter: int = 64) -> complex:
    """Arithmetic-geometric mean with the right choice of square-root sign."""
    a, b = complex(a), complex(b)
    for _ in range(max_iter):
        if abs(a - b) <= 1e-15 * abs(a):
            return (a + b) / 2
        a, b = _agm_step(a, b)
    raise NonConvergent(f"AGM({a}, {b}) did not converge")


def complete_integrals(k: complex) -> Tuple[complex, complex]:
    """
    Complete integrals (K(k), E(k)) by the arithmetic-geometric mean.

    K = pi / (2 AGM(1, k')) and E = K (1 - sum 2^(n-1) c_n^2), c_0 = k.

    Raises:
        SingularParameter: If k = +-1
    """
    k = complex(k)
    if abs(k * k - 1) < SINGULAR_TOL:
        raise SingularParameter(f"complete integrals diverge at k={k}")

    a, b = 1 + 0j, cmath.sqrt(1 - k * k)
    weight = 0.5
    total = weight * k * k
    for _ in range(64):
        c = (a - b) / 2
        if abs(c) <= 1e-16 * abs(a):
            break
        a, b = _agm_step(a, b)
        weight *= 2
        total += weight * c * c
    else:
        raise NonConvergent(f"complete integrals did not converge at k={k}")

    K = PI / (2 * a)
    return K, K * (1 - total)


def _elliptic_root(s: complex, k: complex) -> complex:
    return cmath.sqrt(1 - s * s) * cmath.sqrt(1 - k * k * s * s)


def _check_path(x: complex, k: complex, alpha: complex) -> None:
    """Reject singular points of the integrands that lie on the segment [0, x]."""
    branch_points = [1, -1]
    if k != 0:
        branch_points += [1 / k, -1 / k]
    for p in branch_points:
        if distance_to_segment(p, 0, x) < PATH_TOL:
            endpoint = abs(p - x) < PATH_TOL
            doubled = abs(k * k - 1) < SINGULAR_TOL
            if not endpoint or doubled:
                raise BranchPointOnPath(f"branch point {p} lies on the path from 0 to {x}")
    if alpha != 0:
        root = 1 / cmath.sqrt(alpha)
        for p in (root, -root):
            if distance_to_segment(p, 0, x) < PATH_TOL:
                raise BranchPointOnPath(f"pole {p} of the third-kind integrand lies on the path to {x}")


def legendre_integrals(x: complex, k: complex, alpha: complex = 0, tol: float = QUAD_TOL) -> LegendreTriple:
    """
    Evaluate the Legendre integrals F(x;k), E(x;k) and Pi_alpha(x;k).

    The integrals run along the straight segment from 0 to x with the
    principal square roots sqrt(1 - s^2) sqrt(1 - k^2 s^2). At x = +-1
    F and E come from the AGM; everything else is adaptive quadrature.

    Args:
        x: Upper limit
        k: Modulus
        alpha: Parameter of the third-kind integral
        tol: Relative quadrature tolerance

    Returns:
        LegendreTriple

    Raises:
        BranchPointOnPath: If a branch point or pole lies on the segment
    """
    x, k, alpha = complex(x), complex(k), complex(alpha)
    _check_path(x, k, alpha)

    if x == 0:
        return LegendreTriple(0j, 0j, 0j, x, k, alpha)

    if abs(x * x - 1) < SINGULAR_TOL:
        sign = 1 if x.real > 0 else -1
        K, E = complete_integrals(k)

        def pi_phi(phi: complex) -> complex:
            s = cmath.sin(phi)
            return 1 / ((1 - alpha * s * s) * cmath.sqrt(1 - k * k * s * s))

        Pi = segment_quad(pi_phi, 0, PI / 2, epsrel=tol)
        return LegendreTriple(sign * K, sign * E, sign * Pi, x, k, alpha)

    F = segment_quad(lambda s: 1 / _elliptic_root(s, k), 0, x, epsrel=tol)
    E = segment_quad(lambda s: cmath.sqrt(1 - k * k * s * s) / cmath.sqrt(1 - s * s), 0, x, epsrel=tol)
    if alpha == 0:
        Pi = F
    else:
        Pi = segment_quad(lambda s: 1 / ((1 - alpha * s * s) * _elliptic_root(s, k)), 0, x, epsrel=tol)
    return LegendreTriple(F, E, Pi, x, k, alpha)


# ---------------------------------------------------------------------------
# Z-function
# ---------------------------------------------------------------------------

def jacobi_Z(u: complex, k: complex, tol: float = QUAD_TOL) -> complex:
    """
    Evaluate Z(u;k) = E(sn(u;k);k) continued analytically along the u-path.

    Z is the integral of dn^2 from 0 to u. dn^2 has residue-free double
    poles, so the value does not depend on the path. For real 0 <= k < 1
    the real part of u is reduced modulo 2K (each period adds 2E) and the
    remainder is integrated along a path that keeps clear of the poles at
    odd multiples of iK'.

    Raises:
        PoleError: At poles of sn
    """
    u = complex(u)
    k = complex(k)
    jacobi_scd(u, k)
    if u == 0:
        return 0j
    if k == 0:
        return u

    def dn2(v: complex) -> complex:
        return jacobi_scd(v, k)[2] ** 2

    if k.imag == 0 and abs(k.real) < 1:
        K, E = (val.real for val in complete_integrals(k.real))
        periods = round(u.real / (2 * K))
        r = u - 2 * K * periods
        head = 2 * periods * E
        if r.imag == 0:
            vertices = [0, r]
        elif abs(r.real) > 0.1 * K:
            vertices = [0, complex(r.real, 0), r]
        else:
            vertices = [0, complex(K / 2, 0), complex(K / 2, r.imag), r]
        return head + polyline_quad(dn2, vertices, epsrel=tol)

    return segment_quad(dn2, 0, u, epsrel=tol)


# ---------------------------------------------------------------------------
# Closed differential rules
# ---------------------------------------------------------------------------

def legendre_partials(x: complex, k: complex, alpha: complex = 0, tol: float = QUAD_TOL) -> LegendrePartials:
    """
    Closed-form first partials of (F, E, Pi_alpha) in (x, k, alpha).

    The removable cases k = 0 and alpha = 0 use their limit values.

    Raises:
        SingularParameter: For k = +-1 or alpha in {1, k^2}
        BranchError: If y^2 = (1 - x^2)(1 - k^2 x^2) vanishes
    """
    x, k, alpha = complex(x), complex(k), complex(alpha)
    k2 = k * k
    if abs(k2 - 1) < SINGULAR_TOL:
        raise SingularParameter(f"k={k} is singular for the Legendre partials")
    if abs(alpha - 1) < SINGULAR_TOL or (alpha != 0 and abs(alpha - k2) < SINGULAR_TOL):
        raise SingularParameter(f"alpha={alpha} is singular for k={k}")

    y = _elliptic_root(x, k)
    if abs(y) < SINGULAR_TOL:
        raise BranchError(f"y vanishes at x={x}, k={k}")

    tri = legendre_integrals(x, k, alpha, tol)
    F, E, P = tri.F, tri.E, tri.Pi

    F_x = 1 / y
    E_x = (1 - k2 * x * x) / y
    Pi_x = 1 / ((1 - alpha * x * x) * y)

    if k == 0:
        F_k = E_k = Pi_k = 0j
    else:
        F_k = -F / k - E / (k * (k2 - 1)) + k / (k2 - 1) * x * y / (1 - k2 * x * x)
        E_k = (E - F) / k
        Pi_k = -k / ((k2 - alpha) * (k2 - 1)) * (E + (k2 - 1) * P - k2 * x * y / (1 - k2 * x * x))

    if alpha == 0:
        if k == 0:
            Pi_alpha = (cmath.asin(x) - x * cmath.sqrt(1 - x * x)) / 2
        else:
            Pi_alpha = (F - E) / k2
    else:
        Pi_alpha = ((k2 - alpha) * F + alpha * E - (k2 - alpha * alpha) * P
                    - alpha * alpha * x * y / (1 - alpha * x * x)) / (2 * alpha * (alpha - 1) * (k2 - alpha))

    return LegendrePartials(F_x=F_x, F_k=F_k, E_x=E_x, E_k=E_k, Pi_x=Pi_x, Pi_k=Pi_k, Pi_alpha=Pi_alpha)


def zeta_partials(u: complex, k: complex, tol: float = QUAD_TOL) -> Tuple[complex, complex]:
    """Return (dZ/du, dZ/dk) from the closed rules.

    Raises:
        SingularParameter: At k = +-1
    """
    u, k = complex(u), complex(k)
    k2 = k * k
    if abs(k2 - 1) < SINGULAR_TOL:
        raise SingularParameter(f"k={k} is singular for the Z partials")
    sn, cn, dn = jacobi_scd(u, k)
    Z = jacobi_Z(u, k, tol)
    dZ_du = 1 - k2 * sn * sn
    dZ_dk = k / (k2 - 1) * (Z * cn * cn - (k2 - 1) * u * sn * sn - sn * cn * dn)
    return dZ_du, dZ_dk
