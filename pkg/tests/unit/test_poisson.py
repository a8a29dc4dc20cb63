"""Unit tests for bracket tensors, the Jacobi identity and planar brackets."""

import numpy as np
import pytest
import sympy as sp

from theta_quant.dynamics import rhs_poly
from theta_quant.errors import FieldZero, SingularJacobian
from theta_quant.models import PolyState
from theta_quant.poisson import (
    Observable,
    antisymmetry_residual,
    bracket_of,
    commuting_observable,
    constant_tensor,
    coordinate,
    flipped_omega_tensor,
    gradient,
    hamiltonian_observable,
    hamiltonian_vector_field,
    harmonic_field,
    jacobi_residual,
    omega_block_tensor,
    omega_symbolic,
    omega_tensor,
    planar_omega12,
    push_bracket,
    pushforward_tensor,
    so3_tensor,
    weierstrass_field,
)


@pytest.fixture(scope="module")
def points():
    rng = np.random.default_rng(7)
    return [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(10)]


CANONICAL = [[0, 1], [-1, 0]]


class TestOmega:
    """Tests for the 4x4 bracket of the polynomial system."""

    def test_antisymmetric(self, points):
        assert max(antisymmetry_residual(omega_tensor(), p) for p in points) == 0

    def test_hamiltonian_field_is_the_flow(self, points):
        """Omega grad H with H = (z^2 - x^2)/2 is (yz, xz, xy, -x^2)."""
        H = hamiltonian_observable()
        for p in points:
            expected = rhs_poly(PolyState.from_array(p), dim=4).as_array(4)
            assert np.allclose(hamiltonian_vector_field(omega_tensor(), H, p), expected, rtol=0, atol=1e-14)

    def test_determinant(self):
        x, y = sp.symbols('x y')
        assert sp.expand(omega_symbolic().det() - (x ** 2 - y ** 2) ** 2) == 0

    def test_commuting_integral(self, points):
        """{H, y^2 - x^2} vanishes identically."""
        H, G = hamiltonian_observable(), commuting_observable()
        assert max(abs(bracket_of(H, G, omega_tensor(), p)) for p in points) < 1e-13

    def test_coordinate_brackets(self):
        """{x, z} = y and {xi, x} = x at a sample point."""
        p = [1.5, -0.5, 2.0, 0.3]
        x, z, xi = coordinate(0, 4), coordinate(2, 4), coordinate(3, 4)
        assert bracket_of(x, z, omega_tensor(), p) == -0.5
        assert bracket_of(xi, x, omega_tensor(), p) == 1.5


class TestJacobi:
    """Tests for the Jacobi residual."""

    @pytest.mark.parametrize("tensor", [omega_tensor, so3_tensor, omega_block_tensor])
    def test_brackets_satisfy_jacobi(self, tensor, points):
        T = tensor()
        assert max(jacobi_residual(T, p[:T.dim]) for p in points) < 1e-12

    def test_finite_difference_path(self, points):
        """Without an exact derivative the residual still vanishes for linear entries."""
        T = omega_tensor()
        fd_only = type(T)(T.dim, T.entries, None, 'omega_fd')
        assert max(jacobi_residual(fd_only, p) for p in points) < 1e-8

    def test_flipped_entry_violates_jacobi(self):
        """Sign-flipping Omega^{13} leaves a residual of 4 at (1, 2, 3, 4)."""
        residual = jacobi_residual(flipped_omega_tensor(), [1, 2, 3, 4], stencil='five_point')
        assert residual == pytest.approx(4.0, abs=1e-6)

    def test_unknown_stencil(self):
        with pytest.raises(ValueError):
            jacobi_residual(flipped_omega_tensor(), [1, 2, 3, 4], stencil='backward')


class TestTransformationLaw:
    """Tests for pushing brackets through coordinate changes."""

    def test_linear_pushforward(self):
        """A K A^T = det(A) K in two dimensions."""
        A = np.array([[2.0, 1.0], [0.0, 3.0]])
        K = constant_tensor(CANONICAL)
        pushed = push_bracket(K, lambda p: A @ p, [0.3, 0.7])
        assert np.allclose(pushed, 6 * np.array(CANONICAL), rtol=0, atol=1e-8)
        exact = push_bracket(K, lambda p: A @ p, [0.3, 0.7], jacobian=lambda p: A)
        assert np.allclose(exact, 6 * np.array(CANONICAL), rtol=0, atol=1e-14)

    def test_singular_jacobian(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularJacobian):
            push_bracket(constant_tensor(CANONICAL), lambda p: A @ p, [1.0, 1.0], jacobian=lambda p: A)

    def test_pushforward_tensor_is_a_bracket(self):
        A = np.array([[1.0, 2.0], [-1.0, 1.0]])
        A_inv = np.linalg.inv(A)
        T = pushforward_tensor(constant_tensor(CANONICAL), lambda x: A_inv @ x, lambda x: A)
        assert np.allclose(T.at([0.2, 0.5]), 3 * np.array(CANONICAL), rtol=0, atol=1e-14)
        assert jacobi_residual(T, [0.2, 0.5]) < 1e-10

    def test_constant_tensor_must_be_antisymmetric(self):
        with pytest.raises(ValueError):
            constant_tensor([[0, 1], [1, 0]])


class TestGradient:
    """Finite-difference gradients against analytic ones."""

    def test_fd_gradient(self):
        H = hamiltonian_observable()
        numeric = Observable(H.value)
        p = np.array([0.4, -1.0, 0.8, 2.0], dtype=complex)
        assert np.allclose(gradient(numeric, p), H.gradient(p), rtol=0, atol=1e-8)


class TestPlanar:
    """Tests for brackets of planar polynomial fields."""

    def test_first_integrals(self):
        assert weierstrass_field().first_integral_residual() == 0
        assert harmonic_field().first_integral_residual() == 0

    @pytest.mark.parametrize("p", [(1.0, 3.0), (0.5, 2.0), (2.0, -5.0)])
    def test_weierstrass_bracket_is_canonical(self, p):
        assert abs(planar_omega12(weierstrass_field(), p) - 1) < 1e-6

    def test_harmonic_bracket_is_canonical(self):
        assert abs(planar_omega12(harmonic_field(), (0.5, 1.0)) - 1) < 1e-6

    def test_branch_matches_point(self):
        f = weierstrass_field()
        branch = f.branch(2.0, -5.0)
        assert abs(branch(2.0, f.R_at(2.0, -5.0)) + 5.0) < 1e-12

    def test_field_zero(self):
        with pytest.raises(FieldZero):
            planar_omega12(weierstrass_field(), (1.0, 0.0))
