"""The multiplicative formal group law u + v + beta*u*v and its inverse.

Both functions accept anything with ring operators, ``has_zero_constant_term``
and ``inverse`` -- algebra elements as well as cone Laurent series.
"""
from __future__ import annotations

from .graded_core import BETA, BetaPolynomial


def _require_nilpotent(u, name: str):
    if not u.has_zero_constant_term():
        raise ValueError(f"{name} must have zero constant term")


def fgl_add(u, v, beta: BetaPolynomial = BETA):
    _require_nilpotent(u, "u")
    _require_nilpotent(v, "v")
    return u + v + u * v * beta


def fgl_inverse(u, beta: BetaPolynomial = BETA):
    """-u / (1 + beta*u), expanded as a terminating geometric series."""
    _require_nilpotent(u, "u")
    return -(u * (u * beta + 1).inverse())
