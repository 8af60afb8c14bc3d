"""Closed-form concentration tails and convergence-rate envelopes.

All tails are computed in log space and exponentiated at the end, so large
``n * t**2`` products underflow to exactly 0.0 instead of overflowing.
"""

from __future__ import annotations

import math

from .errors import DomainError

__all__ = [
    "dkw_tail",
    "thm1_envelope",
    "thm2_rate",
    "binomial_tails",
    "chebyshev_standardized",
    "power_inequality_holds",
]

_LOG_FLOOR = -745.0  # exp underflows to 0 below this


def _exp_clip(log_value: float) -> float:
    if log_value >= 0.0:
        return 1.0
    if log_value < _LOG_FLOOR:
        return 0.0
    return math.exp(log_value)


def dkw_tail(n: int, t: float) -> float:
    """Uniform CDF deviation tail: min(1, 2 exp(-2 n t^2))."""
    if n < 1:
        raise DomainError("n must be at least 1")
    if t <= 0.0:
        raise DomainError("t must be positive")
    return _exp_clip(math.log(2.0) - 2.0 * n * t * t)


def thm1_envelope(lam: float, n: int, M: float) -> float:
    """High-probability envelope (1/lam) * sqrt(log(2M) / (2n)).

    The accompanying guarantee: the envelope is violated with probability
    at most 1/M for densities bounded below by ``lam``.
    """
    if lam <= 0.0:
        raise DomainError("lambda must be positive")
    if M <= 1.0:
        raise DomainError("M must exceed 1")
    if n < 1:
        raise DomainError("n must be at least 1")
    return math.sqrt(math.log(2.0 * M) / (2.0 * n)) / lam


def thm2_rate(n: int, orders, C: float) -> float:
    """Rate envelope C * max_k (log n / n)^(1 / (2 (k + 1))).

    The maximum is attained at the largest order; order 0 recovers the
    square-root rate with the log factor.
    """
    orders = tuple(int(k) for k in orders)
    if n < 2:
        raise DomainError("n must be at least 2 for a meaningful rate")
    if not orders:
        raise DomainError("orders must be nonempty")
    if any(k < 0 for k in orders):
        raise DomainError("orders must be nonnegative integers")
    if C <= 0.0:
        raise DomainError("C must be positive")
    base = math.log(n) / n
    return C * max(base ** (1.0 / (2.0 * (k + 1))) for k in orders)


def binomial_tails(n: int, p: float, t: float) -> tuple[float, float, float]:
    """(chebyshev, chernoff, bernstein) bounds on P(|S_n/n - p| >= t).

    The Chebyshev bound is stated for the standardized variable
    |S_n - np| / sqrt(np(1-p)) >= u with bound 1/u^2; here it is converted
    to the plain normalization via u = t * sqrt(n / (p(1-p))), giving
    p(1-p) / (n t^2).  Use :func:`chebyshev_standardized` for the
    standardized form directly.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie strictly inside (0, 1)")
    if t <= 0.0:
        raise DomainError("t must be positive")
    if n < 1:
        raise DomainError("n must be at least 1")
    pq = p * (1.0 - p)
    chebyshev = min(1.0, pq / (n * t * t))
    chernoff = _exp_clip(math.log(2.0) - 2.0 * n * t * t)
    bernstein = _exp_clip(
        math.log(2.0) - 0.5 * n * n * t * t / (n * pq + n * t / 3.0))
    return chebyshev, chernoff, bernstein


def chebyshev_standardized(u: float) -> float:
    """P(|S_n - np| / sqrt(np(1-p)) >= u) <= 1/u^2, clipped to [0, 1]."""
    if u <= 0.0:
        raise DomainError("u must be positive")
    return min(1.0, 1.0 / (u * u))


def power_inequality_holds(a: float, b: float, k: int) -> bool:
    """Whether a^k - b^k >= (a - b)^k for a > b > 0 and integer k >= 1.

    This holds for every admissible input; it is exposed as a checkable
    predicate rather than assumed, and the test suite exercises it as a
    property.
    """
    if not (a > b > 0.0):
        raise DomainError("arguments must satisfy a > b > 0")
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    return a ** k - b ** k >= (a - b) ** k
