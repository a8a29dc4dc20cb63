"""Change of variables (x, y, z, xi) <-> (N, I, J, K) that straightens the 4D flow."""

import cmath
import logging
from typing import Union

import numpy as np

from .dynamics import closed_solution
from .elliptic import jacobi_scd, jacobi_Z, legendre_integrals, legendre_partials
from .errors import DegenerateState, SingularJacobian
from .models import HamiltonianCoefficients, PolyState, SolutionParams, StraightState


logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-14
JACOBIAN_COND_LIMIT = 1e12


def _integrals(s: PolyState):
    P = s.x ** 2 - s.z ** 2
    Q = s.x ** 2 - s.y ** 2
    if abs(Q) < DEGENERACY_TOL:
        raise DegenerateState(f"x^2 = y^2 at {s}: the bracket degenerates here")
    if abs(P) < DEGENERACY_TOL:
        raise DegenerateState(f"x^2 = z^2 at {s}")
    return cmath.sqrt(P), cmath.sqrt(Q)


def to_straight(s: PolyState) -> StraightState:
    """
    Straighten a 4D state.

    With I = sqrt(x^2 - z^2), J = sqrt(x^2 - y^2) (principal roots) and the
    elliptic argument -x/I at modulus I/J:

        N = F(-x/I; I/J) / J,  K = xi + J (F - E)

    so that N advances with unit speed and I, J, K are constant.

    Raises:
        DegenerateState: When x^2 = y^2 or x^2 = z^2
    """
    I, J = _integrals(s)
    tri = legendre_integrals(-s.x / I, I / J)
    return StraightState(N=tri.F / J, I=I, J=J, K=s.xi + J * (tri.F - tri.E))


def from_straight(s: StraightState) -> PolyState:
    """
    Invert the straightening map.

    x = -I sn(JN), y = iJ dn(JN), z = iI cn(JN), xi = K + J Z(JN) - J^2 N
    at modulus I/J.

    Raises:
        DegenerateState: At J = 0
        PoleError: At poles of sn
    """
    if s.J == 0:
        raise DegenerateState("J = 0: the straightened chart is undefined")
    k = s.I / s.J
    v = s.J * s.N
    sn, cn, dn = jacobi_scd(v, k)
    return PolyState(
        x=-s.I * sn,
        y=1j * s.J * dn,
        z=1j * s.I * cn,
        xi=s.K + s.J * jacobi_Z(v, k) - s.J ** 2 * s.N,
    )


def fit_closed_solution(s: PolyState, t: Union[float, complex]) -> SolutionParams:
    """Closed-solution constants whose trajectory passes through s at time t."""
    pi = to_straight(s)
    return SolutionParams(
        k=pi.I / pi.J,
        alpha=pi.J,
        K0=pi.K + pi.J ** 2 * (t - pi.N),
        eps=pi.J * (pi.N - t),
    )


def as_closed_solution(s: StraightState) -> PolyState:
    """from_straight expressed through closed_solution at time N."""
    return closed_solution(SolutionParams(k=s.I / s.J, alpha=s.J, K0=s.K, eps=0), s.N)


def to_straight_jacobian(s: PolyState) -> np.ndarray:
    """
    Closed-form jacobian d(N, I, J, K)/d(x, y, z, xi).

    Built from the differential rules of F and E through the chain rule in
    the elliptic argument -x/I and the modulus I/J.
    """
    x, y, z = s.x, s.y, s.z
    I, J = _integrals(s)
    kappa = I / J
    arg = -x / I

    dI = np.array([x / I, 0, -z / I, 0], dtype=complex)
    dJ = np.array([x / J, -y / J, 0, 0], dtype=complex)
    d_arg = np.array([z * z / I ** 3, 0, -x * z / I ** 3, 0], dtype=complex)
    d_kappa = dI / J - I * dJ / J ** 2

    tri = legendre_integrals(arg, kappa)
    partials = legendre_partials(arg, kappa)
    dF = partials.F_x * d_arg + partials.F_k * d_kappa
    dE = partials.E_x * d_arg + partials.E_k * d_kappa

    dN = dF / J - tri.F * dJ / J ** 2
    dK = np.array([0, 0, 0, 1], dtype=complex) + dJ * (tri.F - tri.E) + J * (dF - dE)
    return np.vstack([dN, dI, dJ, dK])


def from_straight_jacobian(p: StraightState) -> np.ndarray:
    """
    Jacobian d(x, y, z, xi)/d(N, I, J, K) as the inverse of the forward one.

    Raises:
        SingularJacobian: If the forward jacobian is (numerically) singular
    """
    forward = to_straight_jacobian(from_straight(p))
    if not np.all(np.isfinite(forward)) or np.linalg.cond(forward) > JACOBIAN_COND_LIMIT:
        raise SingularJacobian(f"straightening jacobian is singular at {p}")
    return np.linalg.inv(forward)


def hamiltonian(h: HamiltonianCoefficients, s: PolyState) -> complex:
    """H = a(x^2 - z^2) + b(x^2 - y^2)."""
    return h.a * (s.x ** 2 - s.z ** 2) + h.b * (s.x ** 2 - s.y ** 2)
