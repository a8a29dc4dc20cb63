"""Vector fields of the theta system, its polynomial form and the Euler top."""

import cmath
import logging
import math
from typing import Callable, Literal, Tuple, Union

import numpy as np

from .elliptic import jacobi_scd, jacobi_Z
from .errors import DegenerateInertia, DegenerateState, PoleState
from .models import InertiaParams, PolyState, SolutionParams, ThetaConstants, ThetaState


logger = logging.getLogger(__name__)

PI = math.pi
POLE_STATE_TOL = 1e-12

Direction = Literal['forward', 'inverse']
Field = Callable[[complex, np.ndarray], np.ndarray]


def lambda_of(c: ThetaConstants) -> complex:
    """Lambda = 4 eta + (pi^2/3)(v3^4 + v4^4)."""
    return 4 * c.eta + PI ** 2 / 3 * (c.v3 ** 4 + c.v4 ** 4)


def rhs_theta(s: ThetaState, c: ThetaConstants) -> ThetaState:
    """
    Time derivatives of (theta_1, theta_2, theta_3, theta_4, theta_1').

    Args:
        s: Current state
        c: vartheta-constants and eta

    Returns:
        The tangent vector packed as a ThetaState at the same time

    Raises:
        PoleState: If theta_1 vanishes (every row divides by it)
    """
    if abs(s.th1) < POLE_STATE_TOL:
        raise PoleState(f"theta_1 = {s.th1} at t={s.t}: the theta field has a pole")
    ratio = s.dth1 / s.th1
    return ThetaState(
        th1=s.dth1,
        th2=ratio * s.th2 - PI * c.v2 ** 2 * s.th3 * s.th4 / s.th1,
        th3=ratio * s.th3 - PI * c.v3 ** 2 * s.th2 * s.th4 / s.th1,
        th4=ratio * s.th4 - PI * c.v4 ** 2 * s.th2 * s.th3 / s.th1,
        dth1=(s.dth1 ** 2 / s.th1 - PI ** 2 * c.v3 ** 2 * c.v4 ** 2 * s.th2 ** 2 / s.th1
              - lambda_of(c) * s.th1),
        t=s.t,
    )


def rhs_poly(s: PolyState, dim: int = 5) -> PolyState:
    """(yz, xz, xy, -x^2, xi u); the 4D subsystem returns u' = 0."""
    if dim not in (4, 5):
        raise ValueError(f"dim must be 4 or 5, got {dim}")
    u_dot = s.xi * s.u if dim == 5 else 0j
    return PolyState(s.y * s.z, s.x * s.z, s.x * s.y, -s.x ** 2, u_dot)


def theta_to_poly(s: ThetaState, c: ThetaConstants) -> PolyState:
    """Forward map (theta_1..theta_4, theta_1') -> (x, y, z, xi, u) at time s.t."""
    if abs(s.th1) < POLE_STATE_TOL:
        raise PoleState(f"theta_1 = {s.th1} at t={s.t}")
    lam = lambda_of(c)
    return PolyState(
        x=-PI * c.v3 * c.v4 * s.th2 / s.th1,
        y=-PI * c.v2 * c.v4 * s.th3 / s.th1,
        z=-PI * c.v2 * c.v3 * s.th4 / s.th1,
        xi=s.dth1 / s.th1 + lam * s.t,
        u=cmath.exp(lam * s.t ** 2 / 2) * s.th1,
    )


def poly_to_theta(p: PolyState, c: ThetaConstants, t: Union[float, complex]) -> ThetaState:
    """Inverse map (x, y, z, xi, u) -> theta state at time t."""
    if p.u == 0 or (p.x == 0 and p.y == 0 and p.z == 0):
        raise DegenerateState(f"cannot invert the theta map at {p}")
    if c.v2 == 0 or c.v3 == 0 or c.v4 == 0:
        raise DegenerateState("vartheta-constants must be nonzero to invert the theta map")
    lam = lambda_of(c)
    th1 = p.u * cmath.exp(-lam * t ** 2 / 2)
    return ThetaState(
        th1=th1,
        th2=-p.x * th1 / (PI * c.v3 * c.v4),
        th3=-p.y * th1 / (PI * c.v2 * c.v4),
        th4=-p.z * th1 / (PI * c.v2 * c.v3),
        dth1=(p.xi - lam * t) * th1,
        t=t,
    )


def theta_poly_map(s: Union[ThetaState, PolyState], c: ThetaConstants,
                   t: Union[float, complex, None] = None,
                   direction: Direction = 'forward') -> Union[PolyState, ThetaState]:
    """
    Transform between theta coordinates and polynomial coordinates.

    Args:
        s: ThetaState (forward) or PolyState (inverse)
        c: vartheta-constants and eta
        t: Time; defaults to s.t in the forward direction
        direction: 'forward' or 'inverse'

    Returns:
        PolyState for 'forward', ThetaState for 'inverse'
    """
    if direction == 'forward':
        if t is not None and t != s.t:
            s = ThetaState(s.th1, s.th2, s.th3, s.th4, s.dth1, t)
        return theta_to_poly(s, c)
    if direction == 'inverse':
        if t is None:
            raise ValueError("the inverse theta map needs the time t")
        return poly_to_theta(s, c, t)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


# ---------------------------------------------------------------------------
# Euler top
# ---------------------------------------------------------------------------

def _embedding_coefficients(inertia: InertiaParams) -> Tuple[complex, complex, complex]:
    A, B, C = inertia.A, inertia.B, inertia.C
    if A == B or B == C or C == A:
        raise DegenerateInertia(f"moments must be pairwise distinct, got ({A}, {B}, {C})")
    root = cmath.sqrt((C - B) * (A - C) * (B - A))
    return (
        -A * cmath.sqrt(B * C * (C - B)) / root,
        -B * cmath.sqrt(C * A * (A - C)) / root,
        -C * cmath.sqrt(A * B * (B - A)) / root,
    )


def euler_embedding(p: Tuple[complex, complex, complex], inertia: InertiaParams,
                    direction: Direction = 'forward') -> Tuple[complex, complex, complex]:
    """Linear map (x, y, z) <-> (X, Y, Z) onto a free asymmetric top (principal roots)."""
    a, b, c = _embedding_coefficients(inertia)
    u, v, w = (complex(val) for val in p)
    if direction == 'forward':
        return a * u, b * v, c * w
    if direction == 'inverse':
        return u / a, v / b, w / c
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def euler_rhs(p: Tuple[complex, complex, complex], inertia: InertiaParams) -> Tuple[complex, complex, complex]:
    X, Y, Z = p
    A, B, C = inertia.A, inertia.B, inertia.C
    return (1 / C - 1 / B) * Y * Z, (1 / A - 1 / C) * X * Z, (1 / B - 1 / A) * X * Y


def euler_energy(p: Tuple[complex, complex, complex], inertia: InertiaParams) -> complex:
    X, Y, Z = p
    return 0.5 * (X * X / inertia.A + Y * Y / inertia.B + Z * Z / inertia.C)


def euler_casimir(p: Tuple[complex, complex, complex]) -> complex:
    X, Y, Z = p
    return X * X + Y * Y + Z * Z


# ---------------------------------------------------------------------------
# Closed-form solution
# ---------------------------------------------------------------------------

def closed_solution(p: SolutionParams, t: Union[float, complex]) -> PolyState:
    """
    Closed-form solution of the 4D system.

    x = -k alpha sn, y = i alpha dn, z = i k alpha cn,
    xi = K0 + alpha Z - alpha^2 t, all at argument alpha t + eps.

    Raises:
        PoleError: At poles of sn
    """
    arg = p.alpha * t + p.eps
    sn, cn, dn = jacobi_scd(arg, p.k)
    Z = jacobi_Z(arg, p.k)
    return PolyState(
        x=-p.k * p.alpha * sn,
        y=1j * p.alpha * dn,
        z=1j * p.k * p.alpha * cn,
        xi=p.K0 + p.alpha * Z - p.alpha ** 2 * t,
    )


# ---------------------------------------------------------------------------
# Array fields for the integrator
# ---------------------------------------------------------------------------

def poly_field(dim: int = 4) -> Field:
    """Polynomial vector field on complex arrays of length dim."""
    def field(t, state):
        x, y, z, xi = state[0], state[1], state[2], state[3]
        values = [y * z, x * z, x * y, -x * x]
        if dim == 5:
            values.append(xi * state[4])
        return np.array(values, dtype=complex)
    return field


def theta_field(c: ThetaConstants) -> Field:
    """Theta vector field on arrays (theta_1, theta_2, theta_3, theta_4, theta_1')."""
    def field(t, state):
        return rhs_theta(ThetaState.from_array(state, t), c).as_array()
    return field


def euler_field(inertia: InertiaParams) -> Field:
    def field(t, state):
        return np.array(euler_rhs(tuple(state), inertia), dtype=complex)
    return field


def commuting_field(t, state) -> np.ndarray:
    """Hamiltonian field of y^2 - x^2 under the 4x4 bracket: (0, 0, 0, 2(y^2 - x^2))."""
    x, y = state[0], state[1]
    return np.array([0, 0, 0, 2 * (y * y - x * x)], dtype=complex)


def pole_free_window(t0: float, t1: float, tau: complex, margin: float = 0.05) -> Tuple[float, float]:
    """
    Pull a real time window away from the zeros of theta_1.

    On the real axis theta_1(t|tau) vanishes at the integers. The start is
    pushed up and the end pulled back so both stay at least margin away,
    and the window is cut before the first zero it would cross.

    Raises:
        PoleState: If nothing of the window survives
    """
    if complex(tau).imag <= 0:
        raise ValueError(f"Im tau must be positive, got {tau}")
    start, end = float(t0), float(t1)
    nearest = round(start)
    if abs(start - nearest) < margin:
        start = nearest + margin
    first_zero = math.floor(start) + 1
    if end > first_zero - margin:
        end = first_zero - margin
    if (start, end) != (t0, t1):
        logger.warning(f"Window [{t0}, {t1}] clipped to [{start}, {end}] to avoid zeros of theta_1")
    if end <= start:
        raise PoleState(f"no pole-free window inside [{t0}, {t1}]")
    return start, end
