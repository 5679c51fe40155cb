"""Degenerate special functions.

The kernel everything else is built on: generalized falling factorials,
degenerate exponentials, degenerate Stirling numbers of the second kind,
and degenerate Bell polynomials, together with their classical (order
zero) counterparts used as limit references.

Conventions
-----------
``lam`` is the degeneracy order.  The falling-factorial kernel is total
(any real ``lam``, including 0, where it reduces to plain powers, and 1,
where it reduces to the ordinary falling factorial).  The degenerate
exponential requires ``lam != 0`` and ``1 + lam*t > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, ParameterError

# Linear-domain triangles lose headroom to overflow / digit loss well
# before this; values past n ~ 100 with large x should not be trusted
# blindly (the log-domain triangle below is the tool for big n).
MAX_TABLE_N = 200
MAX_LOG_TABLE_N = 2000

_DOBINSKI_MAX_TERMS = 10_000

# Tolerance for recognizing lam = 1/m (reciprocal integer), the regime
# in which every triangle entry is provably nonnegative.
RECIPROCAL_INT_TOL = 1e-9


def falling_factorial(x: float, n: int, lam: float) -> float:
    """Generalized falling factorial x(x-lam)(x-2*lam)...(x-(n-1)*lam).

    Total function: returns 1.0 for n = 0; lam may be any real.  lam = 0
    gives x**n and lam = 1 the ordinary falling factorial.
    """
    if n < 0:
        raise ParameterError(f"order n must be >= 0, got {n}")
    out = 1.0
    for j in range(n):
        out *= x - j * lam
    return out


def degenerate_exp(x: float, lam: float, t: float) -> float:
    """Degenerate exponential (1 + lam*t)**(x/lam).

    Defined on the principal real branch, so 1 + lam*t must be positive;
    lam must be nonzero.  Reduces to exp(x*t) as lam -> 0.
    """
    if lam == 0.0:
        raise ParameterError("degenerate_exp requires lam != 0 (use exp for the limit)")
    base = 1.0 + lam * t
    if base <= 0.0:
        raise ParameterError(
            f"degenerate_exp outside principal branch: 1 + lam*t = {base} <= 0"
        )
    return base ** (x / lam)


@dataclass(frozen=True)
class StirlingTable:
    """Lower-triangular cache of degenerate Stirling numbers (2nd kind).

    ``entries[n, k]`` expands the generalized falling factorial of order
    n over the ordinary falling-factorial basis.  Immutable; safe to
    share between threads.
    """

    lam: float
    max_n: int
    entries: np.ndarray

    def value(self, n: int, k: int) -> float:
        if not 0 <= n <= self.max_n:
            raise ParameterError(f"n={n} outside table range 0..{self.max_n}")
        if not 0 <= k <= n:
            return 0.0
        return float(self.entries[n, k])


@dataclass(frozen=True)
class LogStirlingTable:
    """Log-domain triangle for reciprocal-integer lam.

    Only for lam = 1 or lam = 1/m: there every entry is nonnegative
    (the generating function ((1 + t/m)**m - 1)**k / k! has nonnegative
    coefficients), so the recurrence never subtracts and the whole
    triangle is representable as logs, with -inf marking exact zeros.
    Needed for distribution work at indices far past linear-domain
    overflow.
    """

    lam: float
    max_n: int
    log_entries: np.ndarray

    def log_value(self, n: int, k: int) -> float:
        if not 0 <= n <= self.max_n:
            raise ParameterError(f"n={n} outside table range 0..{self.max_n}")
        if not 0 <= k <= n:
            return -math.inf
        return float(self.log_entries[n, k])


def _check_cap(max_n: int, cap: int) -> None:
    if max_n < 0:
        raise ParameterError(f"max_n must be >= 0, got {max_n}")
    if max_n > cap:
        raise ConvergenceError(f"max_n={max_n} exceeds table cap {cap}")


def build_stirling_table(lam: float, max_n: int) -> StirlingTable:
    """Build the triangle of degenerate Stirling numbers up to max_n.

    Uses the triangular recurrence

        S(n+1, k) = S(n, k-1) + (k - n*lam) * S(n, k)

    obtained by multiplying the defining expansion by (x - n*lam) and
    rewriting x * (x)_k = (x)_{k+1} + k * (x)_k.  The recurrence is
    checked against the definitional identity (evaluation at integer
    points) by the test suite.
    """
    _check_cap(max_n, MAX_TABLE_N)
    entries = np.zeros((max_n + 1, max_n + 1))
    entries[0, 0] = 1.0
    for n in range(max_n):
        for k in range(1, n + 2):
            entries[n + 1, k] = entries[n, k - 1] + (k - n * lam) * entries[n, k]
    entries.setflags(write=False)
    return StirlingTable(lam=lam, max_n=max_n, entries=entries)


def build_log_stirling_table(lam: float, max_n: int) -> LogStirlingTable:
    """Log-domain triangle; requires lam = 1/m for a positive integer m.

    Entries vanish exactly for n > m*k; the factor (k - n*lam) is
    nonnegative everywhere S(n, k) is nonzero, so each row is a pure
    log-add of the previous one.  The sign guard below also absorbs the
    case where floating-point lam makes the boundary factor a tiny
    negative instead of zero.
    """
    _check_cap(max_n, MAX_LOG_TABLE_N)
    m = round(1.0 / lam)
    if m < 1 or abs(1.0 / lam - m) >= RECIPROCAL_INT_TOL:
        raise ParameterError(
            f"log-domain triangle requires lam = 1/m for integer m, got lam={lam}"
        )
    log_entries = np.full((max_n + 1, max_n + 1), -np.inf)
    log_entries[0, 0] = 0.0
    for n in range(max_n):
        k = np.arange(1, n + 2)
        factor = k - n * lam
        prev_shift = log_entries[n, 0 : n + 1]
        prev_same = log_entries[n, 1 : n + 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            grown = np.where(
                factor > 0.0, np.log(np.where(factor > 0.0, factor, 1.0)) + prev_same, -np.inf
            )
            log_entries[n + 1, 1 : n + 2] = np.logaddexp(prev_shift, grown)
    log_entries.setflags(write=False)
    return LogStirlingTable(lam=lam, max_n=max_n, log_entries=log_entries)


def bell_poly(n: int, x: float, table: StirlingTable) -> float:
    """Degenerate Bell polynomial: sum_k S(n, k) * x**k from the table.

    Compensated summation (math.fsum); the coefficients alternate in
    sign for some lam, so naive accumulation can lose digits.
    """
    if n < 0 or n > table.max_n:
        raise ParameterError(f"n={n} outside table range 0..{table.max_n}")
    if n == 0:
        return 1.0
    row = table.entries[n]
    return math.fsum(row[k] * x**k for k in range(n + 1))


def bell_number(n: int, table: StirlingTable) -> float:
    """Degenerate Bell number: the Bell polynomial at x = 1."""
    return bell_poly(n, 1.0, table)


def bell_poly_dobinski(
    n: int,
    x: float,
    lam: float,
    tol: float = 1e-12,
    max_terms: int = _DOBINSKI_MAX_TERMS,
) -> float:
    """Degenerate Bell polynomial by its exponentially weighted series.

    Sums exp(-x) * sum_k ff(k, n, lam) * x**k / k! until the remaining
    tail is certifiably below ``tol``.  Past k >= n every series term is
    positive and the term ratio

        r_k = [ff(k+1, n, lam) / ff(k, n, lam)] * x / (k + 1)

    is decreasing in k, so once r_k <= 1/2 the tail after term k is at
    most term_k * r_k / (1 - r_k); we stop when that bound (times the
    exp(-x) prefactor) drops below tol.

    Independent of the table route in bell_poly: the two are
    cross-checked by the test suite.
    """
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if x <= 0.0:
        raise ParameterError(f"series route requires x > 0, got {x}")
    if tol <= 0.0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    prefactor = math.exp(-x)
    terms: list[float] = []
    term_prev = None
    log_xk_over_kfact = 0.0  # log(x**k / k!) accumulated incrementally
    for k in range(max_terms):
        if k > 0:
            log_xk_over_kfact += math.log(x) - math.log(k)
        ff_k = falling_factorial(float(k), n, lam)
        term = ff_k * math.exp(log_xk_over_kfact)
        terms.append(term)
        if k > n and term_prev is not None and term_prev > 0.0:
            ratio = term / term_prev
            if 0.0 <= ratio <= 0.5:
                tail_bound = term * ratio / (1.0 - ratio)
                if prefactor * tail_bound <= tol:
                    return prefactor * math.fsum(terms)
        term_prev = term
    raise ConvergenceError(
        f"series for n={n}, x={x}, lam={lam} did not certify tol={tol} "
        f"within {max_terms} terms"
    )


@lru_cache(maxsize=None)
def _stirling2_classical_cached(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2_classical_cached(n - 1, k) + _stirling2_classical_cached(n - 1, k - 1)


def stirling2_classical(n: int, k: int) -> float:
    """Classical Stirling number of the second kind (limit reference).

    Standard recurrence S(n, k) = k*S(n-1, k) + S(n-1, k-1); exact
    integer arithmetic internally.  Intended for small n (<= 25).
    """
    if n < 0 or k < 0:
        raise ParameterError("indices must be nonnegative")
    if n > 25:
        raise ParameterError(f"classical reference capped at n <= 25, got n={n}")
    return float(_stirling2_classical_cached(n, k))


def bell_poly_classical(n: int, x: float) -> float:
    """Classical Bell (Touchard) polynomial: sum_k S2(n, k) * x**k."""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if n > 25:
        raise ParameterError(f"classical reference capped at n <= 25, got n={n}")
    return math.fsum(_stirling2_classical_cached(n, k) * x**k for k in range(n + 1))
