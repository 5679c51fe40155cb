"""The two-parameter degenerate Bell counting distribution.

Parameter validation, exact PMF/CDF/quantile backed by a truncated
table with a certified tail, generating functions, closed-form moments,
closure under convolution, and the compound (burst/jump) decomposition
that powers the samplers and the path simulator.

Validity regimes
----------------
The law has a genuine probability mass function only when every value
is nonnegative.  That is provable exactly when ``lam`` is 1 or the
reciprocal of a positive integer m (all triangle coefficients are then
nonnegative and the jump weights truncate at k = m).  Such parameters
are tagged ``Validity.STRICT``.  Any other ``lam`` in (0, 1] is
accepted only after a numerical scan of the table confirms no mass
below -1e-12 (``Validity.ASYMPTOTIC``); the scan rejects, for example,
lam = 0.6 with small rate, where the k = 3 coefficient goes negative.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import logsumexp

from .errors import (
    ConvergenceError,
    IncompatibleParametersError,
    ParameterError,
    TailSliverError,
)
from .special import (
    MAX_LOG_TABLE_N,
    MAX_TABLE_N,
    RECIPROCAL_INT_TOL,
    LogStirlingTable,
    StirlingTable,
    bell_poly,
    build_log_stirling_table,
    build_stirling_table,
    degenerate_exp,
    falling_factorial,
)

DEFAULT_TAIL_TOL = 1e-12

# Entries this small in magnitude are floating-point dust, clamped to 0;
# anything more negative means the parameters do not define a law.
NEGATIVE_MASS_TOL = 1e-12

# Past either threshold all quantities go through logs to dodge
# overflow in theta**k / k! and in the polynomial values.
_LOG_REGIME_K = 30
_LOG_REGIME_RATE = 30.0


class Validity(Enum):
    STRICT = "strict"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class DegenParams:
    """Validated parameter triple (alpha, theta, lam) plus its regime."""

    alpha: float
    theta: float
    lam: float
    validity: Validity

    @property
    def reciprocal_order(self) -> int | None:
        """m with lam = 1/m under strict validity, else None."""
        if self.validity is Validity.STRICT:
            return round(1.0 / self.lam)
        return None


def _is_reciprocal_integer(lam: float) -> bool:
    if lam == 1.0:
        return True
    inv = 1.0 / lam
    return abs(inv - round(inv)) < RECIPROCAL_INT_TOL and round(inv) >= 1


def burst_rate(alpha: float, theta: float, lam: float) -> float:
    """Rate alpha * (e_lam(theta) - 1) of the underlying burst process."""
    return alpha * (degenerate_exp(1.0, lam, theta) - 1.0)


def validate(alpha: float, theta: float, lam: float) -> DegenParams:
    """Classify and return validated parameters, or raise ParameterError.

    Strict: lam is 1 or a reciprocal integer (law provably nonnegative).
    Asymptotic: other lam in (0, 1]; accepted only if every table entry
    up to the truncation cutoff stays above -1e-12.
    """
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise ParameterError(f"alpha must be positive and finite, got {alpha}")
    if not (theta > 0.0 and math.isfinite(theta)):
        raise ParameterError(f"theta must be positive and finite, got {theta}")
    if not (0.0 < lam <= 1.0):
        raise ParameterError(f"lam must lie in (0, 1], got {lam}")
    if _is_reciprocal_integer(lam):
        return DegenParams(alpha, theta, lam, Validity.STRICT)
    params = DegenParams(alpha, theta, lam, Validity.ASYMPTOTIC)
    # Builds the table, which itself rejects negative mass.
    _cached_table(params, DEFAULT_TAIL_TOL)
    return params


# ----------------------------------------------------------------------
# Triangle caches.  Linear triangles are shared in coarse size buckets;
# log-domain triangles (strict lam only) are kept small in number since
# a single big one costs megabytes.


@lru_cache(maxsize=32)
def _linear_table(lam: float, max_n: int) -> StirlingTable:
    return build_stirling_table(lam, max_n)


def _linear_table_for(lam: float, n: int) -> StirlingTable:
    if n > MAX_TABLE_N:
        raise ConvergenceError(f"index {n} beyond linear triangle cap {MAX_TABLE_N}")
    bucket = min(MAX_TABLE_N, ((n // 32) + 1) * 32)
    return _linear_table(lam, bucket)


@lru_cache(maxsize=4)
def _log_table(lam: float, max_n: int) -> LogStirlingTable:
    return build_log_stirling_table(lam, max_n)


def _log_table_for(lam: float, n: int) -> LogStirlingTable:
    if n > MAX_LOG_TABLE_N:
        raise ConvergenceError(f"index {n} beyond log triangle cap {MAX_LOG_TABLE_N}")
    bucket = min(MAX_LOG_TABLE_N, ((n // 128) + 1) * 128)
    return _log_table(lam, bucket)


def _log_poly(n: int, log_x: float, table: LogStirlingTable) -> float:
    """log of the degenerate Bell polynomial via the log-domain triangle."""
    if n == 0:
        return 0.0
    k = np.arange(1, n + 1)
    return float(logsumexp(table.log_entries[n, 1 : n + 1] + k * log_x))


# ----------------------------------------------------------------------
# PMF and friends.


def log_pmf(k: int, params: DegenParams) -> float:
    """Log of the mass at k.

    -rate + k*log(theta) - log(k!) + log(poly value at alpha); under
    strict validity the polynomial value is strictly positive, so this
    is always finite there.  Returns -inf for a clamped zero entry in
    asymptotic mode.
    """
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    alpha, theta, lam = params.alpha, params.theta, params.lam
    rate = burst_rate(alpha, theta, lam)
    base = -rate + k * math.log(theta) - math.lgamma(k + 1)
    if k < _LOG_REGIME_K and rate < _LOG_REGIME_RATE:
        poly = bell_poly(k, alpha, _linear_table_for(lam, k))
        if poly <= 0.0:
            return -math.inf
        return base + math.log(poly)
    if params.validity is Validity.STRICT:
        return base + _log_poly(k, math.log(alpha), _log_table_for(lam, k))
    # Asymptotic regime: restricted to the linear triangle's reach.
    poly = bell_poly(k, alpha, _linear_table_for(lam, k))
    if not math.isfinite(poly):
        raise ConvergenceError(f"polynomial value overflow at k={k} in asymptotic mode")
    if poly <= 0.0:
        return -math.inf
    return base + math.log(poly)


def pmf(k: int, params: DegenParams) -> float:
    """Mass at k: exp(-rate) * theta**k / k! * poly_k(alpha)."""
    return math.exp(log_pmf(k, params))


@dataclass(frozen=True)
class PmfTable:
    """Truncated PMF with a certified tail.

    probs[k] is the mass at k for k = 0..K; tail_mass is the residual
    beyond K, certified at construction to be at most the requested
    tolerance.  Immutable.
    """

    params: DegenParams
    probs: np.ndarray
    tail_mass: float

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @property
    def support_max(self) -> int:
        return len(self.probs) - 1

    def cdf(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(self.cumulative[min(k, self.support_max)])

    def quantile(self, u: float) -> int:
        """Least k with cdf(k) > u (right-continuous inverse)."""
        if not 0.0 <= u < 1.0:
            raise ParameterError(f"u must lie in [0, 1), got {u}")
        idx = int(np.searchsorted(self.cumulative, u, side="right"))
        if idx > self.support_max:
            raise TailSliverError(
                f"u={u} beyond covered mass {self.cumulative[-1]!r} "
                f"(tail sliver of at most {self.tail_mass!r})"
            )
        return idx

    def mean(self) -> float:
        k = np.arange(len(self.probs))
        return float(np.dot(k, self.probs))

    def variance(self) -> float:
        k = np.arange(len(self.probs))
        mu = self.mean()
        return float(np.dot((k - mu) ** 2, self.probs))

    # -- serialization: decimal text that round-trips doubles exactly --

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,p\n")
        for k, p in enumerate(self.probs):
            buf.write(f"{k},{float(p)!r}\n")
        buf.write(f"tail_mass,{self.tail_mass!r}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.params.alpha,
                "theta": self.params.theta,
                "lambda": self.params.lam,
                "validity": self.params.validity.value,
                "probs": [float(p) for p in self.probs],
                "tail_mass": self.tail_mass,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PmfTable":
        obj = json.loads(text)
        params = DegenParams(
            obj["alpha"], obj["theta"], obj["lambda"], Validity(obj["validity"])
        )
        probs = np.asarray(obj["probs"], dtype=float)
        probs.setflags(write=False)
        return cls(params=params, probs=probs, tail_mass=float(obj["tail_mass"]))


def _strict_truncation_index(params: DegenParams, tail_tol: float) -> int:
    """Cutoff K with a certified bound P(X > K) <= tail_tol/2.

    Exponential-moment (Chernoff) certificate on the closed-form moment
    generating function: for any s > 0,

        P(X >= K) <= exp(alpha*(e_lam(theta*e**s) - e_lam(theta)) - s*K),

    minimized over a grid of s.  Rigorous (Markov inequality on
    exp(s*X)) and uniformly usable: the naive alternative of dominating
    X by m * Poisson(rate) explodes for small lam = 1/m, where the jump
    bound m is huge but typical jumps are tiny.
    """
    alpha, theta, lam = params.alpha, params.theta, params.lam
    e_theta = degenerate_exp(1.0, lam, theta)
    target = math.log(tail_tol / 2.0)
    best: int | None = None
    for i in range(1, 401):
        s = 0.05 * i
        try:
            cumulant = alpha * (degenerate_exp(1.0, lam, theta * math.exp(s)) - e_theta)
        except OverflowError:
            break
        k = math.ceil((cumulant - target) / s)
        if best is None or k < best:
            best = k
    if best is None:
        raise ConvergenceError(f"no usable exponential moment for {params}")
    return max(best, 8)


def _asymptotic_raw_mass(k: int, params: DegenParams) -> float:
    """Signed mass at k for non-reciprocal lam (no clamping).

    Goes through log magnitudes so the sign survives even where k! or
    the polynomial value would overflow plain arithmetic.
    """
    alpha, theta, lam = params.alpha, params.theta, params.lam
    poly = bell_poly(k, alpha, _linear_table_for(lam, k))
    if not math.isfinite(poly):
        raise ConvergenceError(f"polynomial value overflow at k={k} in asymptotic mode")
    if poly == 0.0:
        return 0.0
    base = -burst_rate(alpha, theta, lam) + k * math.log(theta) - math.lgamma(k + 1)
    return math.copysign(math.exp(base + math.log(abs(poly))), poly)


def _asymptotic_probs(params: DegenParams, tail_tol: float) -> np.ndarray:
    """Expand masses for non-reciprocal lam until a geometric tail bound
    certifies the remainder.

    The generating function has a branch point at t = -1/(lam*theta), so
    the masses decay like (lam*theta)**k; the observed term ratio must
    settle below some q < 1 before the bound |a_K| * q/(1-q) <= tol/2
    is accepted.  Rejects (ParameterError) on any mass below -1e-12:
    the parameters do not define a probability law.
    """
    ratio_floor = params.lam * params.theta
    terms: list[float] = []
    recent: list[float] = []
    k = 0
    while True:
        raw = _asymptotic_raw_mass(k, params)
        if raw < -NEGATIVE_MASS_TOL:
            raise ParameterError(
                f"parameters (alpha={params.alpha}, theta={params.theta}, "
                f"lam={params.lam}) give negative mass {raw:.3e} at k={k}: "
                "not a probability law"
            )
        if k >= 1 and terms[-1] > 0.0 and raw > 0.0:
            recent.append(raw / terms[-1])
            recent = recent[-5:]
        else:
            recent = []
        terms.append(max(raw, 0.0))
        if k >= 10 and len(recent) == 5:
            q = max(max(recent), ratio_floor)
            if q < 0.95 and terms[-1] * q / (1.0 - q) <= tail_tol / 2.0:
                return np.asarray(terms)
        k += 1
        if k > MAX_TABLE_N:
            raise ConvergenceError(
                f"asymptotic-mode expansion for lam={params.lam}, "
                f"theta={params.theta} exceeded the cap before certifying the "
                f"tail (lam*theta={ratio_floor:.3g})"
            )


def build_pmf_table(params: DegenParams, tail_tol: float = DEFAULT_TAIL_TOL) -> PmfTable:
    """Tabulate the law with tail mass certified at most tail_tol."""
    if not 0.0 < tail_tol < 1.0:
        raise ParameterError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    if params.validity is Validity.STRICT:
        cutoff = _strict_truncation_index(params, tail_tol)
        probs = np.array([math.exp(log_pmf(k, params)) for k in range(cutoff + 1)])
    else:
        probs = _asymptotic_probs(params, tail_tol)
    if probs.min() < -NEGATIVE_MASS_TOL:
        raise ParameterError(
            f"negative mass {probs.min():.3e} survived construction for {params}"
        )
    probs = np.maximum(probs, 0.0)
    residual = 1.0 - math.fsum(probs)
    if abs(residual) > tail_tol:
        raise ConvergenceError(
            f"residual mass {residual:.3e} exceeds certified tolerance {tail_tol:.3e}"
        )
    probs.setflags(write=False)
    return PmfTable(params=params, probs=probs, tail_mass=max(residual, 0.0))


@lru_cache(maxsize=128)
def _cached_table(params: DegenParams, tail_tol: float) -> PmfTable:
    return build_pmf_table(params, tail_tol)


def cdf(k: int, params: DegenParams, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Partial sum of the masses through k."""
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    return _cached_table(params, tail_tol).cdf(k)


def quantile(u: float, params: DegenParams, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Least k with cdf(k) > u, for u in [0, 1)."""
    return _cached_table(params, tail_tol).quantile(u)


# ----------------------------------------------------------------------
# Generating functions and moments (closed forms).


def pgf(t: float, params: DegenParams) -> float:
    """Probability generating function exp(alpha*(e_lam(theta*t) - e_lam(theta)))."""
    alpha, theta, lam = params.alpha, params.theta, params.lam
    return math.exp(
        alpha * (degenerate_exp(1.0, lam, theta * t) - degenerate_exp(1.0, lam, theta))
    )


def mgf(t: float, params: DegenParams) -> float:
    """Moment generating function; identically pgf evaluated at exp(t).

    Raises OverflowError for t large enough to overflow the double
    range (reported rather than silently saturated).
    """
    return pgf(math.exp(t), params)


def mean(params: DegenParams) -> float:
    """Closed-form expectation theta * alpha * e_lam^(1-lam)(theta)."""
    alpha, theta, lam = params.alpha, params.theta, params.lam
    return theta * alpha * degenerate_exp(1.0 - lam, lam, theta)


def variance(params: DegenParams) -> float:
    """Closed-form variance; exceeds the mean whenever lam < 1."""
    alpha, theta, lam = params.alpha, params.theta, params.lam
    return (
        theta
        * alpha
        * (1.0 + theta * (1.0 - lam) * degenerate_exp(-lam, lam, theta))
        * degenerate_exp(1.0 - lam, lam, theta)
    )


def convolve(p1: DegenParams, p2: DegenParams) -> DegenParams:
    """Law of the sum of independent variables: rates add.

    Only within the family: theta and lam must agree, otherwise the sum
    is not of this type and IncompatibleParametersError is raised.
    """
    if abs(p1.theta - p2.theta) > 1e-12 or abs(p1.lam - p2.lam) > 1e-12:
        raise IncompatibleParametersError(
            "sum of laws with different theta or lam is not a degenerate Bell law "
            f"(theta {p1.theta} vs {p2.theta}, lam {p1.lam} vs {p2.lam})"
        )
    return validate(p1.alpha + p2.alpha, p1.theta, p1.lam)


# ----------------------------------------------------------------------
# Compound (burst/jump) decomposition.


@dataclass(frozen=True)
class JumpLaw:
    """Zero-truncated jump-size law of the compound decomposition.

    jump_probs[i] is P(J = i+1); under strict validity with lam = 1/m
    the support is exactly {1, ..., m}.  burst_rate is the intensity of
    the Poisson process of jump epochs.
    """

    burst_rate: float
    jump_probs: np.ndarray
    support_bound: int

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.jump_probs)

    def prob(self, k: int) -> float:
        if 1 <= k <= self.support_bound:
            return float(self.jump_probs[k - 1])
        return 0.0

    def pgf(self, t: float) -> float:
        """Generating function of the jump size: (e_lam(theta*t)-1)/(e_lam(theta)-1)
        evaluated through the stored weights."""
        k = np.arange(1, self.support_bound + 1)
        return float(np.dot(self.jump_probs, np.power(float(t), k)))

    def mean(self) -> float:
        k = np.arange(1, self.support_bound + 1)
        return float(np.dot(k, self.jump_probs))


def decompose(params: DegenParams) -> JumpLaw:
    """Split the law into Poisson bursts of iid positive jumps.

    Writing the PGF as exp(R*(H(t) - 1)) with R the burst rate forces H
    to be the normalized zero-truncated series of the degenerate
    exponential, i.e. jump weights proportional to ff(1, k, lam) *
    theta**k / k!.  Requires strict validity: for other lam some weight
    is negative and no such decomposition exists.
    """
    if params.validity is not Validity.STRICT:
        raise ParameterError(
            "compound decomposition requires strict validity (lam = 1 or 1/m); "
            f"got lam={params.lam}"
        )
    alpha, theta, lam = params.alpha, params.theta, params.lam
    m = params.reciprocal_order
    rate = burst_rate(alpha, theta, lam)
    weights = np.array(
        [falling_factorial(1.0, k, lam) * theta**k / math.factorial(k) for k in range(1, m + 1)]
    )
    normalizer = degenerate_exp(1.0, lam, theta) - 1.0
    probs = weights / normalizer
    probs.setflags(write=False)
    return JumpLaw(burst_rate=rate, jump_probs=probs, support_bound=m)
