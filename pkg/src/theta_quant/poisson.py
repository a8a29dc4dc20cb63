"""Poisson bracket tensors, their pushforward and the Jacobi identity."""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import sympy as sp

from .errors import FieldZero, SingularJacobian
from .models import PolyState
from .quadrature import segment_quad


logger = logging.getLogger(__name__)

FD_STEP = 1e-5
SINGULAR_DET_TOL = 1e-14

Point = Union[Sequence[complex], np.ndarray, PolyState]


def _point(p: Point, dim: Optional[int] = None) -> np.ndarray:
    if isinstance(p, PolyState):
        return p.as_array(dim or 4)
    return np.asarray(p, dtype=complex)


@dataclass(frozen=True)
class BracketTensor:
    """
    Antisymmetric matrix field T^{jk}(p) defining {f, g} = grad f . T . grad g.

    Attributes:
        dim: Number of coordinates
        entries: Map from a point to the dim x dim matrix
        derivative: Optional exact derivative, p -> D with D[l, j, k] = d_l T^{jk}
        name: Label used in reports
    """
    dim: int
    entries: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = 'bracket'

    def at(self, p: Point) -> np.ndarray:
        return np.asarray(self.entries(_point(p, self.dim)), dtype=complex)


@dataclass(frozen=True)
class Observable:
    """A scalar function with an optional analytic gradient."""
    value: Callable[[np.ndarray], complex]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ''


# ---------------------------------------------------------------------------
# Concrete tensors
# ---------------------------------------------------------------------------

def omega_at(p: Point) -> np.ndarray:
    """The 4x4 bracket of the (x, y, z, xi) system; det = (x^2 - y^2)^2."""
    x, y = _point(p, 4)[:2]
    return np.array([
        [0, 0, y, -x],
        [0, 0, x, -y],
        [-y, -x, 0, 0],
        [x, y, 0, 0],
    ], dtype=complex)


_OMEGA_DX = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=complex)
_OMEGA_DY = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]], dtype=complex)


def _omega_derivative(p: np.ndarray) -> np.ndarray:
    zero = np.zeros((4, 4), dtype=complex)
    return np.array([_OMEGA_DX, _OMEGA_DY, zero, zero])


def so3_at(p: Point) -> np.ndarray:
    """The Lie-Poisson bracket of so(3) in (X, Y, Z)."""
    X, Y, Z = _point(p)[:3]
    return np.array([
        [0, -Z, Y],
        [Z, 0, -X],
        [-Y, X, 0],
    ], dtype=complex)


def _so3_derivative(p: np.ndarray) -> np.ndarray:
    return np.array([
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
        [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
    ], dtype=complex)


def omega_tensor() -> BracketTensor:
    return BracketTensor(4, omega_at, _omega_derivative, 'omega')


def so3_tensor() -> BracketTensor:
    return BracketTensor(3, so3_at, _so3_derivative, 'so3')


def omega_block_tensor() -> BracketTensor:
    """Upper-left 3x3 block of the 4x4 bracket, a bracket in (x, y, z) on its own."""
    def entries(p):
        return omega_at(np.append(np.asarray(p, dtype=complex)[:3], 0))[:3, :3]

    def derivative(p):
        return _omega_derivative(p)[:3, :3, :3]

    return BracketTensor(3, entries, derivative, 'omega_block')


def flipped_omega_tensor(row: int = 1, col: int = 3) -> BracketTensor:
    """Negative control: the 4x4 bracket with one antisymmetric entry pair sign-flipped."""
    def entries(p):
        T = omega_at(p)
        T[row, col] *= -1
        T[col, row] *= -1
        return T

    return BracketTensor(4, entries, None, f'omega_flipped_{row}{col}')


def omega_symbolic() -> sp.Matrix:
    """The 4x4 bracket as a sympy matrix in the symbols x, y, z, xi."""
    x, y = sp.symbols('x y')
    return sp.Matrix([
        [0, 0, y, -x],
        [0, 0, x, -y],
        [-y, -x, 0, 0],
        [x, y, 0, 0],
    ])


# ---------------------------------------------------------------------------
# Differential operations
# ---------------------------------------------------------------------------

def _fd_steps(p: np.ndarray, h: float) -> np.ndarray:
    return h * np.maximum(1.0, np.abs(p))


def fd_derivative(entries: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                  h: float = FD_STEP, stencil: str = 'central') -> np.ndarray:
    """Finite-difference D[l, ...] = d_l entries(p) (central or five-point stencil)."""
    steps = _fd_steps(p, h)
    derivs = []
    for l in range(len(p)):
        e = np.zeros(len(p), dtype=complex)
        e[l] = steps[l]
        if stencil == 'five_point':
            d = (-entries(p + 2 * e) + 8 * entries(p + e) - 8 * entries(p - e) + entries(p - 2 * e)) / (12 * steps[l])
        elif stencil == 'central':
            d = (entries(p + e) - entries(p - e)) / (2 * steps[l])
        else:
            raise ValueError(f"unknown stencil {stencil!r}")
        derivs.append(np.asarray(d, dtype=complex))
    return np.array(derivs)


def jacobi_residual(T: BracketTensor, p: Point, h: float = FD_STEP, stencil: str = 'central') -> float:
    """
    Largest violation of the Jacobi identity over all index triples at p.

    Uses T.derivative when the tensor provides one, finite differences
    with step h (scaled by coordinate magnitude) otherwise.
    """
    p = _point(p, T.dim)
    P = T.at(p)
    if T.derivative is not None:
        D = np.asarray(T.derivative(p), dtype=complex)
    else:
        D = fd_derivative(T.at, p, h, stencil)
    R = (np.einsum('il,ljk->ijk', P, D)
         + np.einsum('jl,lki->ijk', P, D)
         + np.einsum('kl,lij->ijk', P, D))
    return float(np.max(np.abs(R)))


def antisymmetry_residual(T: BracketTensor, p: Point) -> float:
    M = T.at(p)
    return float(np.max(np.abs(M + M.T)))


def gradient(f: Observable, p: Point, h: float = FD_STEP) -> np.ndarray:
    p = _point(p)
    if f.gradient is not None:
        return np.asarray(f.gradient(p), dtype=complex)
    return fd_derivative(lambda q: np.asarray(f.value(q), dtype=complex), p, h)


def bracket_of(f: Observable, g: Observable, T: BracketTensor, p: Point) -> complex:
    """{f, g}(p) = grad f . T(p) . grad g."""
    p = _point(p, T.dim)
    return complex(gradient(f, p) @ T.at(p) @ gradient(g, p))


def hamiltonian_vector_field(T: BracketTensor, H: Observable, p: Point) -> np.ndarray:
    """T(p) . grad H(p)."""
    p = _point(p, T.dim)
    return T.at(p) @ gradient(H, p)


def coordinate(index: int, dim: int, name: str = '') -> Observable:
    """The coordinate function p -> p[index]."""
    unit = np.zeros(dim, dtype=complex)
    unit[index] = 1
    return Observable(lambda p: p[index], lambda p: unit, name or f'p{index}')


def quadratic_observable(coefficients: Sequence[complex], name: str = '') -> Observable:
    """sum_i c_i p_i^2 with its analytic gradient."""
    c = np.asarray(coefficients, dtype=complex)
    return Observable(lambda p: complex(np.sum(c * p[:len(c)] ** 2)),
                      lambda p: np.concatenate([2 * c * p[:len(c)], np.zeros(len(p) - len(c))]),
                      name)


def hamiltonian_observable() -> Observable:
    """H = (z^2 - x^2)/2 on (x, y, z, xi)."""
    return quadratic_observable([-0.5, 0, 0.5, 0], 'H')


def commuting_observable() -> Observable:
    """y^2 - x^2, the integral whose flow commutes with H."""
    return quadratic_observable([-1, 1, 0, 0], 'y2_minus_x2')


# ---------------------------------------------------------------------------
# Transformation law
# ---------------------------------------------------------------------------

def push_bracket(K: BracketTensor, transform: Callable[[np.ndarray], np.ndarray], p: Point,
                 jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 h: float = FD_STEP) -> np.ndarray:
    """
    Push a bracket in pi-coordinates forward to x = transform(pi) at pi = p.

    Omega^{jk}(x) = (dx^j/dpi^n)(dx^k/dpi^m) K^{nm}(pi)

    Args:
        K: Bracket tensor in pi-coordinates
        transform: The map pi -> x
        p: Point pi
        jacobian: Closed-form dx/dpi; finite differences of transform otherwise
        h: Finite-difference step

    Raises:
        SingularJacobian: If the jacobian is singular at p
    """
    p = _point(p, K.dim)
    if jacobian is not None:
        Jm = np.asarray(jacobian(p), dtype=complex)
    else:
        Jm = fd_derivative(lambda q: np.asarray(transform(q), dtype=complex), p, h).T
    _check_jacobian(Jm, p)
    return Jm @ K.at(p) @ Jm.T


def _check_jacobian(Jm: np.ndarray, p: np.ndarray) -> None:
    if Jm.shape[0] == Jm.shape[1]:
        scale = max(1.0, float(np.max(np.abs(Jm)))) ** Jm.shape[0]
        if not np.all(np.isfinite(Jm)) or abs(np.linalg.det(Jm)) < SINGULAR_DET_TOL * scale:
            raise SingularJacobian(f"jacobian is singular at {p}")


def pushforward_tensor(K: BracketTensor, to_pi: Callable[[np.ndarray], np.ndarray],
                       jacobian_x_pi: Callable[[np.ndarray], np.ndarray], name: str = 'pushforward') -> BracketTensor:
    """
    Bracket in x-coordinates induced by a bracket in pi-coordinates.

    Args:
        K: Bracket in pi-coordinates
        to_pi: The inverse map x -> pi
        jacobian_x_pi: x -> dx/dpi evaluated at pi = to_pi(x)
    """
    def entries(x):
        Jm = np.asarray(jacobian_x_pi(x), dtype=complex)
        _check_jacobian(Jm, x)
        return Jm @ K.at(to_pi(x)) @ Jm.T

    return BracketTensor(K.dim, entries, None, name)


def constant_tensor(matrix: Sequence[Sequence[complex]], name: str = 'constant') -> BracketTensor:
    M = np.asarray(matrix, dtype=complex)
    if np.max(np.abs(M + M.T)) > 0:
        raise ValueError("bracket matrix must be antisymmetric")
    zero = np.zeros((len(M),) * 3, dtype=complex)
    return BracketTensor(len(M), lambda p: M, lambda p: zero, name)


# ---------------------------------------------------------------------------
# Planar fields
# ---------------------------------------------------------------------------

PX, PY, PW = sp.symbols('x y w')


@dataclass
class PlanarField:
    """
    Planar polynomial field x' = A(x, y), y' = B(x, y) with a first integral R.

    The fields are sympy expressions in x, y. The level curve R(z, w) = c is
    resolved for w symbolically; the branch through a given point is picked
    by matching the sign of y there.
    """
    A: sp.Expr
    B: sp.Expr
    R: sp.Expr
    name: str = 'planar'
    _A: Callable = field(init=False, repr=False)
    _R: Callable = field(init=False, repr=False)
    _R_x: Callable = field(init=False, repr=False)
    _R_y: Callable = field(init=False, repr=False)
    _branches: List[Callable] = field(init=False, repr=False)

    def __post_init__(self):
        c = sp.Symbol('c')
        self._A = sp.lambdify((PX, PY), self.A, modules='numpy')
        self._R = sp.lambdify((PX, PY), self.R, modules='numpy')
        self._R_x = sp.lambdify((PX, PY), sp.diff(self.R, PX), modules='numpy')
        self._R_y = sp.lambdify((PX, PY), sp.diff(self.R, PY), modules='numpy')
        solutions = sp.solve(sp.Eq(self.R.subs(PY, PW), c), PW)
        self._branches = [sp.lambdify((PX, c), sol, modules='numpy') for sol in solutions]

    def first_integral_residual(self) -> sp.Expr:
        """A R_x + B R_y expanded; zero for a genuine first integral."""
        return sp.expand(self.A * sp.diff(self.R, PX) + self.B * sp.diff(self.R, PY))

    def A_at(self, x: complex, y: complex) -> complex:
        return complex(self._A(complex(x), complex(y)))

    def R_at(self, x: complex, y: complex) -> complex:
        return complex(self._R(complex(x), complex(y)))

    def R_grad(self, x: complex, y: complex):
        return complex(self._R_x(complex(x), complex(y))), complex(self._R_y(complex(x), complex(y)))

    def branch(self, x: complex, y: complex) -> Callable[[complex, complex], complex]:
        """The solution w(z, c) of R(z, w) = c passing through (x, y)."""
        c = self.R_at(x, y)
        best = min(self._branches, key=lambda b: abs(complex(b(complex(x), c)) - complex(y)))
        return lambda z, cv: complex(best(complex(z), complex(cv)))


def weierstrass_field() -> PlanarField:
    """x' = y, y' = 6 x^2 with R = (y^2 - 4 x^3)/2."""
    return PlanarField(PY, 6 * PX ** 2, (PY ** 2 - 4 * PX ** 3) / 2, 'weierstrass')


def harmonic_field() -> PlanarField:
    """x' = y, y' = -x with R = (x^2 + y^2)/2."""
    return PlanarField(PY, -PX, (PX ** 2 + PY ** 2) / 2, 'harmonic')


def aleph(f: PlanarField, x: complex, c: complex, x0: complex, branch) -> complex:
    """The quadrature of dz / A(z, w(z, c)) from x0 to x along the level curve."""
    return segment_quad(lambda zv: 1 / f.A_at(zv, branch(zv, c)), x0, x)


def planar_omega12(f: PlanarField, p: Sequence[complex], x0: Optional[complex] = None,
                   h: float = FD_STEP) -> complex:
    """
    The Omega^{12} component of the planar bracket at p = (x, y).

    (Omega^{12})^{-1} = R_y d_x aleph - R_x d_y aleph where aleph(x; R(x, y))
    depends on (x, y) through both arguments. d_1 aleph = 1/A; d_2 aleph is a
    central difference of the quadrature in its second argument.

    Args:
        f: Planar field
        p: Point (x, y)
        x0: Lower quadrature limit (default x - 0.25)
        h: Relative finite-difference step in c

    Raises:
        FieldZero: If A vanishes at p
    """
    x, y = complex(p[0]), complex(p[1])
    A = f.A_at(x, y)
    if abs(A) < 1e-14:
        raise FieldZero(f"A({x}, {y}) = 0")
    if x0 is None:
        x0 = x - 0.25
    c = f.R_at(x, y)
    R_x, R_y = f.R_grad(x, y)
    branch = f.branch(x, y)

    hc = h * max(1.0, abs(c))
    d2 = (aleph(f, x, c + hc, x0, branch) - aleph(f, x, c - hc, x0, branch)) / (2 * hc)
    aleph_x = 1 / A + d2 * R_x
    aleph_y = d2 * R_y
    inverse = R_y * aleph_x - R_x * aleph_y
    logger.debug(f"planar_omega12 at {p}: d2 aleph = {d2}, inverse = {inverse}")
    return 1 / inverse
