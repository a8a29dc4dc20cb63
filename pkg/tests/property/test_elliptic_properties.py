"""Property-based tests for theta constants, Jacobi functions and the Legendre integrals."""

from hypothesis import given, settings
from hypothesis import strategies as st

from theta_quant.elliptic import jacobi_scd, legendre_integrals, theta_constants
from theta_quant.models import PolyState
from theta_quant.straightening import from_straight, to_straight


moduli = st.floats(min_value=0.0, max_value=0.95)
arguments = st.floats(min_value=-3.0, max_value=3.0)


@given(re=st.floats(min_value=-0.5, max_value=0.5), im=st.floats(min_value=0.5, max_value=2.0))
@settings(max_examples=50, deadline=None)
def test_quartic_relation(re, im):
    """vartheta_3^4 = vartheta_2^4 + vartheta_4^4 for every tau in the upper half plane."""
    c = theta_constants(complex(re, im))
    assert abs(c.v3 ** 4 - c.v2 ** 4 - c.v4 ** 4) < 1e-12 * max(1.0, abs(c.v3) ** 4)


@given(u=arguments, k=moduli)
@settings(max_examples=100, deadline=None)
def test_jacobi_quadratic_identities(u, k):
    """sn^2 + cn^2 = 1 and k^2 sn^2 + dn^2 = 1."""
    sn, cn, dn = jacobi_scd(u, k)
    assert abs(sn ** 2 + cn ** 2 - 1) < 1e-12
    assert abs(k ** 2 * sn ** 2 + dn ** 2 - 1) < 1e-12


@given(x=st.floats(min_value=0.01, max_value=0.9), k=st.floats(min_value=0.0, max_value=0.9))
@settings(max_examples=50, deadline=None)
def test_legendre_integrals_are_odd(x, k):
    plus = legendre_integrals(x, k)
    minus = legendre_integrals(-x, k)
    assert abs(plus.F + minus.F) < 1e-12
    assert abs(plus.E + minus.E) < 1e-12


@given(
    x=st.floats(min_value=-1.0, max_value=1.0),
    y_im=st.floats(min_value=0.5, max_value=2.0),
    ratio=st.floats(min_value=0.1, max_value=0.9),
    xi=st.floats(min_value=-1.0, max_value=1.0),
)
@settings(max_examples=50, deadline=None)
def test_straightening_round_trip(x, y_im, ratio, xi):
    """from_straight inverts to_straight on the real domain."""
    s = PolyState(x=x, y=1j * y_im, z=1j * ratio * y_im, xi=xi)
    back = from_straight(to_straight(s))
    scale = max(1.0, abs(y_im))
    assert max(abs(a - b) for a, b in zip(back.as_array(4), s.as_array(4))) < 1e-10 * scale
