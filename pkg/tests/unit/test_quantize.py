"""Unit tests for the exact operator quantization on polynomials in x and y."""

from fractions import Fraction

import numpy as np
import pytest

from theta_quant.errors import IdentityViolation, TruncationOverflow
from theta_quant.quantize import (
    COMMUTATOR_TABLE,
    X,
    X_OP,
    XI_OP,
    Y,
    Y_OP,
    Z_OP,
    Polynomial,
    angular_check,
    apply_op,
    assert_identity,
    commutator,
    commutator_table_check,
    first_difference,
    hamiltonian_op,
    heisenberg_check,
    mathieu_reduction,
    monomials,
    real_form_lower_bound,
    real_form_matrix,
    weyl,
)


class TestPolynomial:
    """Tests for the sparse rational polynomial."""

    def test_zero_coefficients_are_dropped(self):
        p = X + Y - X
        assert p == {(0, 1): Fraction(1)}
        assert (X - X) == {}
        assert (X - X).degree == -1

    def test_exact_arithmetic(self):
        p = (X * Fraction(1, 3)).times(X + Y)
        assert p[(2, 0)] == Fraction(1, 3)
        assert p[(1, 1)] == Fraction(1, 3)

    def test_power_and_degree(self):
        p = (X + Y).power(3)
        assert p.degree == 3
        assert p[(1, 2)] == 3

    def test_str(self):
        assert str(Polynomial()) == "0"
        assert str(X * 2 + Polynomial.monomial(0, 0, -1)) == "(2)*x + (-1)"

    def test_negative_exponent(self):
        with pytest.raises(ValueError):
            Polynomial.monomial(-1, 0)

    def test_monomials(self):
        assert list(monomials(1)) == [(0, 0), (1, 0), (0, 1)]
        assert len(list(monomials(4))) == 15


class TestBaseOperators:
    """Actions of x^, y^, z^ and xi^ on monomials."""

    def test_z_is_a_derivation(self):
        """z^ = -x d/dy - y d/dx."""
        assert Z_OP(X) == -Y
        assert Z_OP(Y) == -X
        assert Z_OP(X.times(Y)) == -(X.times(X)) - Y.times(Y)

    def test_xi_counts_degree(self):
        p = X.times(Y) + X
        assert XI_OP(p) == X.times(Y) * 2 + X

    def test_apply_op(self):
        assert apply_op('y', X, 2) == X.times(Y)
        with pytest.raises(KeyError):
            apply_op('w', X, 2)

    def test_truncation_overflow(self):
        with pytest.raises(TruncationOverflow):
            apply_op('x', Polynomial.monomial(3, 0), 3)
        assert apply_op('z', Polynomial.monomial(3, 0), 3) == Polynomial.monomial(2, 1) * -3

    def test_hamiltonian_on_x(self):
        """H^ x = x/2 - x^3/2."""
        H = hamiltonian_op(4)
        assert H(X) == X * Fraction(1, 2) - X.power(3) * Fraction(1, 2)

    def test_hamiltonian_needs_degree_two(self):
        with pytest.raises(TruncationOverflow):
            hamiltonian_op(1)


class TestCommutators:
    """Exact commutator identities."""

    def test_table(self):
        report = commutator_table_check(8)
        assert len(report) == len(COMMUTATOR_TABLE)
        assert all(entry['passed'] for entry in report)

    def test_safe_degree(self):
        _, safe = commutator(X_OP, Y_OP, 6)
        assert safe == 4
        with pytest.raises(TruncationOverflow):
            commutator(X_OP, Y_OP, 1)

    def test_x_z(self):
        op, safe = commutator(X_OP, Z_OP, 6)
        assert first_difference(op, Y_OP, safe) is None

    def test_violation_names_monomial(self):
        """[x, z] = -y fails on the constant monomial."""
        op, safe = commutator(X_OP, Z_OP, 6)
        with pytest.raises(IdentityViolation) as excinfo:
            assert_identity('[x, z] = -y', op, Y_OP.scaled(-1), safe)
        assert excinfo.value.monomial == (0, 0)
        assert excinfo.value.identity == '[x, z] = -y'

    def test_weyl_differs_from_plain_product(self):
        assert first_difference(weyl(Y_OP, Z_OP), Y_OP @ Z_OP, 3) is not None


class TestHeisenberg:
    """Heisenberg equations for H^ = (z^2 - x^2)/2."""

    @pytest.mark.parametrize("D", [4, 6, 10])
    def test_weyl_ordered_equations_hold(self, D):
        report = heisenberg_check(D)
        assert [entry['identity'] for entry in report] == [
            '[x, H] = {yz}', '[y, H] = {xz}', '[z, H] = {xy}', '[xi, H] = -x^2']
        assert report[0]['safe_degree'] == D - 3

    def test_plain_product_fails(self):
        with pytest.raises(IdentityViolation) as excinfo:
            heisenberg_check(6, weyl_ordered=False)
        assert excinfo.value.monomial == (0, 0)

    def test_small_truncation(self):
        with pytest.raises(TruncationOverflow):
            heisenberg_check(3)


class TestRadialReduction:
    """Angular action, the Mathieu reduction and the real form."""

    def test_angular_check(self):
        report = angular_check((0, 1, 2, 3))
        assert len(report) == 8
        assert report[2]['identity'] == 'z (x + y)^2 = -2 (x + y)^2'

    def test_mathieu_reduction(self):
        A, energy = mathieu_reduction(2.0)
        assert A == 2.0
        assert energy.to_normalized(1.0) == 2.5
        assert energy.to_physical(energy.to_normalized(-3.25)) == -3.25

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            mathieu_reduction(-1.0)

    def test_real_form_matrix_structure(self):
        H = real_form_matrix(1.5, modes=4)
        assert H.shape == (9, 9)
        assert np.allclose(H, H.T)
        assert H[4, 4] == 2.25
        assert H[4, 6] == 1.125
        assert H[4, 5] == 0

    @pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 2.0, 4.0])
    def test_real_form_is_bounded_below(self, r):
        assert real_form_lower_bound(r) > -1e-9
