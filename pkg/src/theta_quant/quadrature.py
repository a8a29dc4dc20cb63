"""Adaptive quadrature of complex integrands along straight segments."""

import logging
from typing import Callable, Sequence

from scipy import integrate


logger = logging.getLogger(__name__)

DEFAULT_EPSABS = 1e-14
DEFAULT_EPSREL = 1e-12
DEFAULT_LIMIT = 200


def segment_quad(
    f: Callable[[complex], complex],
    a: complex,
    b: complex,
    epsabs: float = DEFAULT_EPSABS,
    epsrel: float = DEFAULT_EPSREL,
    limit: int = DEFAULT_LIMIT,
) -> complex:
    """
    Integrate f along the straight segment from a to b.

    The segment is parametrized as w = a + s (b - a), s in [0, 1], and the
    real and imaginary parts are integrated separately with QUADPACK's
    adaptive Gauss-Kronrod rule.

    Args:
        f: Complex integrand
        a: Start of the segment
        b: End of the segment
        epsabs: Absolute error target
        epsrel: Relative error target
        limit: Maximum number of subintervals

    Returns:
        The complex value of the line integral
    """
    a = complex(a)
    b = complex(b)
    d = b - a
    if d == 0:
        return 0j

    cache = {}

    def integrand(s: float) -> complex:
        # shared by the real and imaginary passes
        if s not in cache:
            cache[s] = complex(f(a + s * d)) * d
        return cache[s]

    re, re_err = integrate.quad(lambda s: integrand(s).real, 0.0, 1.0,
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
    im, im_err = integrate.quad(lambda s: integrand(s).imag, 0.0, 1.0,
                                epsabs=epsabs, epsrel=epsrel, limit=limit)
    logger.debug(f"segment_quad {a} -> {b}: error estimate {re_err:.2e}, {im_err:.2e}")
    return complex(re, im)


def polyline_quad(f: Callable[[complex], complex], vertices: Sequence[complex], **kwargs) -> complex:
    """Integrate f along the polygonal path through the given vertices."""
    total = 0j
    for a, b in zip(vertices[:-1], vertices[1:]):
        total += segment_quad(f, a, b, **kwargs)
    return total


def distance_to_segment(p: complex, a: complex, b: complex) -> float:
    """Euclidean distance in the complex plane from p to the segment [a, b]."""
    d = complex(b) - complex(a)
    if d == 0:
        return abs(complex(p) - complex(a))
    s = ((complex(p) - complex(a)) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(complex(p) - (complex(a) + s * d))
