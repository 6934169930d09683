"""Numerical toolkit for sharp weighted fourth-order inequalities.

Closed-form sharp constants, explicit minimizing profiles, double-exponential
radial quadrature, exact-arithmetic identity checks, spectral scans of the
mode-decomposed quadratic forms, and a verification harness tying them
together.
"""
from .errors import CertificateError, ConvergenceError, DomainError, ValidityError

__all__ = [
    "CertificateError",
    "ConvergenceError",
    "DomainError",
    "ValidityError",
]

__version__ = "0.1.0"
