"""
Theta-Quant: theta functions as a dynamical system.

This package evaluates Jacobi theta functions and Legendre elliptic
integrals, integrates the polynomial ODE systems the theta functions
satisfy, checks the Poisson structure of those systems, verifies the
canonical quantization on an exact polynomial model, and computes the
band/gap spectrum of the resulting Mathieu equation.
"""

__version__ = "0.1.0"
