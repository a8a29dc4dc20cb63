"""Symbolic model of the closed differential rules for F, E and Pi_alpha.

The three Legendre integrals are represented as sympy functions whose
``fdiff`` returns the closed first-derivative rules. Differentiating those
rules once more and comparing mixed partials checks that the rules are
compatible.
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, Tuple

import sympy as sp

from .elliptic import legendre_integrals


logger = logging.getLogger(__name__)

x, k, alpha = sp.symbols('x k alpha')


def _y(xv, kv):
    return sp.sqrt(1 - xv ** 2) * sp.sqrt(1 - kv ** 2 * xv ** 2)


class LegendreF(sp.Function):
    """F(x; k)."""
    nargs = 2

    def fdiff(self, argindex=1):
        xv, kv = self.args
        y = _y(xv, kv)
        if argindex == 1:
            return 1 / y
        if argindex == 2:
            return (-LegendreF(xv, kv) / kv - LegendreE(xv, kv) / (kv * (kv ** 2 - 1))
                    + kv / (kv ** 2 - 1) * xv * y / (1 - kv ** 2 * xv ** 2))
        raise sp.ArgumentIndexError(self, argindex)


class LegendreE(sp.Function):
    """E(x; k)."""
    nargs = 2

    def fdiff(self, argindex=1):
        xv, kv = self.args
        if argindex == 1:
            return (1 - kv ** 2 * xv ** 2) / _y(xv, kv)
        if argindex == 2:
            return (LegendreE(xv, kv) - LegendreF(xv, kv)) / kv
        raise sp.ArgumentIndexError(self, argindex)


class LegendrePi(sp.Function):
    """Pi_alpha(x; k) with the argument order (x, k, alpha)."""
    nargs = 3

    def fdiff(self, argindex=1):
        xv, kv, av = self.args
        y = _y(xv, kv)
        F = LegendreF(xv, kv)
        E = LegendreE(xv, kv)
        P = LegendrePi(xv, kv, av)
        if argindex == 1:
            return 1 / ((1 - av * xv ** 2) * y)
        if argindex == 2:
            return (-kv / ((kv ** 2 - av) * (kv ** 2 - 1))
                    * (E + (kv ** 2 - 1) * P - kv ** 2 * xv * y / (1 - kv ** 2 * xv ** 2)))
        if argindex == 3:
            return (((kv ** 2 - av) * F + av * E - (kv ** 2 - av ** 2) * P
                     - av ** 2 * xv * y / (1 - av * xv ** 2))
                    / (2 * av * (av - 1) * (kv ** 2 - av)))
        raise sp.ArgumentIndexError(self, argindex)


F_SYM = LegendreF(x, k)
E_SYM = LegendreE(x, k)
PI_SYM = LegendrePi(x, k, alpha)

_ARGUMENTS = {'F': (x, k), 'E': (x, k), 'Pi': (x, k, alpha)}
_FUNCTIONS = {'F': F_SYM, 'E': E_SYM, 'Pi': PI_SYM}

_F, _E, _P = sp.symbols('F_val E_val Pi_val')


def partial_expression(name: str, variable: sp.Symbol) -> sp.Expr:
    """First partial of F, E or Pi with respect to x, k or alpha."""
    return sp.diff(_FUNCTIONS[name], variable)


@lru_cache(maxsize=None)
def _compiled_residuals():
    return {key: _numeric(expr) for key, expr in mixed_residual_expressions().items()}


def mixed_residual_expressions() -> Dict[str, sp.Expr]:
    """
    Differences of mixed second partials for every function and argument pair.

    Keys look like ``'E:x,k'`` meaning d/dx(dE/dk) - d/dk(dE/dx).
    """
    residuals = {}
    for name, args in _ARGUMENTS.items():
        for p, q in itertools.combinations(args, 2):
            expr = sp.diff(_FUNCTIONS[name], p, q) - sp.diff(_FUNCTIONS[name], q, p)
            residuals[f"{name}:{p},{q}"] = expr
    return residuals


def _numeric(expr: sp.Expr):
    placeholder = expr.xreplace({F_SYM: _F, E_SYM: _E, PI_SYM: _P})
    return sp.lambdify((x, k, alpha, _F, _E, _P), placeholder, modules='numpy')


def evaluate(expr: sp.Expr, xv: complex, kv: complex, av: complex = 0) -> complex:
    """Evaluate an expression in (x, k, alpha, F, E, Pi) at a numeric point."""
    tri = legendre_integrals(xv, kv, av)
    return complex(_numeric(expr)(complex(xv), complex(kv), complex(av), tri.F, tri.E, tri.Pi))


def compatibility_residuals(xv: complex, kv: complex, av: complex) -> Dict[str, complex]:
    """
    Numerically evaluate every mixed-partial difference at (x, k, alpha).

    Args:
        xv: Upper limit
        kv: Modulus (not 0 or +-1)
        av: Third-kind parameter (not 0, 1 or k^2)

    Returns:
        Mapping from residual name to its complex value
    """
    tri = legendre_integrals(xv, kv, av)
    values = {}
    for key, fn in _compiled_residuals().items():
        values[key] = complex(fn(complex(xv), complex(kv), complex(av), tri.F, tri.E, tri.Pi))
    logger.debug(f"compatibility residuals at ({xv}, {kv}, {av}): {values}")
    return values


def symbolic_partials() -> Dict[Tuple[str, str], sp.Expr]:
    """All seven first partials as sympy expressions."""
    table = {}
    for name, args in _ARGUMENTS.items():
        for variable in args:
            table[(name, str(variable))] = partial_expression(name, variable)
    return table
