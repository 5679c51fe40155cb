"""Distribution tests: validation, PMF/CDF/quantile, generating
functions, moments, convolution closure, and the compound split."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import bellproc as bp
from bellproc import (
    ConvergenceError,
    IncompatibleParametersError,
    ParameterError,
    TailSliverError,
    Validity,
)

GRID = [
    bp.validate(a, th, lam)
    for a in (0.5, 1.0, 2.0, 5.0)
    for th in (0.25, 0.5, 1.0, 2.0)
    for lam in (1.0, 0.5, 0.25, 0.2, 0.1)
]


# ----------------------------------------------------------------------
# validate


def test_validate_order_one_is_strict():
    assert bp.validate(1.0, 1.0, 1.0).validity is Validity.STRICT


def test_validate_reciprocal_integer_is_strict():
    p = bp.validate(2.0, 0.5, 0.5)
    assert p.validity is Validity.STRICT
    assert p.reciprocal_order == 2


def test_validate_rejects_law_with_negative_mass():
    # the cubic coefficient (1)(1-0.6)(1-1.2) < 0 eventually surfaces as
    # negative mass; at alpha=1 the first offender is k=15
    with pytest.raises(ParameterError, match="negative mass"):
        bp.validate(1.0, 1.0, 0.6)
    with pytest.raises(ParameterError, match="negative mass"):
        bp.validate(0.05, 1.0, 0.6)


def test_validate_accepts_numerically_clean_general_order():
    p = bp.validate(1.0, 1.0, 0.013)
    assert p.validity is Validity.ASYMPTOTIC
    assert p.reciprocal_order is None


def test_validate_recognizes_inexact_reciprocals():
    # 1/3 and 1/7 are not representable exactly; the reciprocal test
    # must still classify them as strict
    for m in (3, 6, 7, 10, 10_000):
        p = bp.validate(1.0, 1.0, 1.0 / m)
        assert p.validity is Validity.STRICT
        assert p.reciprocal_order == m


def test_extreme_scale_rejected_honestly():
    # mean ~ 1e33: no table can certify this, and the failure must be an
    # explicit cap/convergence error rather than a silent wrong answer
    with pytest.raises((ConvergenceError, ParameterError)):
        bp.build_pmf_table(bp.validate(1.0, 60.0, 0.013))


@pytest.mark.parametrize(
    "alpha,theta,lam",
    [(-1.0, 1.0, 0.5), (0.0, 1.0, 0.5), (1.0, 0.0, 0.5), (1.0, -2.0, 0.5),
     (1.0, 1.0, 0.0), (1.0, 1.0, 1.5), (1.0, 1.0, -0.5), (math.inf, 1.0, 0.5)],
)
def test_validate_domain_errors(alpha, theta, lam):
    with pytest.raises(ParameterError):
        bp.validate(alpha, theta, lam)


# ----------------------------------------------------------------------
# pmf / log_pmf


def test_pmf_at_zero_is_exp_of_minus_rate():
    for p in (bp.validate(1, 1, 1), bp.validate(2, 0.5, 0.25)):
        rate = bp.burst_rate(p.alpha, p.theta, p.lam)
        assert bp.pmf(0, p) == pytest.approx(math.exp(-rate), rel=1e-14)


def test_pmf_poisson_point():
    p = bp.validate(1.0, 1.0, 1.0)
    assert bp.pmf(1, p) == pytest.approx(math.exp(-1.0), rel=1e-13)


def test_pmf_half_order_point():
    p = bp.validate(1.0, 1.0, 0.5)
    assert bp.pmf(2, p) == pytest.approx(math.exp(-1.25) * 0.75, rel=1e-13)


def test_log_pmf_consistency():
    p = bp.validate(2.0, 1.0, 0.25)
    for k in (0, 1, 5, 31, 60):
        assert math.exp(bp.log_pmf(k, p)) == pytest.approx(bp.pmf(k, p), rel=1e-12)


def test_pmf_rejects_negative_k():
    with pytest.raises(ParameterError):
        bp.pmf(-1, bp.validate(1, 1, 1))


def test_pmf_beyond_cap():
    with pytest.raises(ConvergenceError):
        bp.pmf(5000, bp.validate(1, 1, 0.5))


def test_log_pmf_crosses_linear_log_boundary_smoothly():
    # k = 29 uses plain arithmetic, k >= 30 the log-domain triangle
    p = bp.validate(1.5, 1.0, 0.5)
    ratios = [bp.pmf(k + 1, p) / bp.pmf(k, p) for k in (27, 28, 29, 30, 31)]
    diffs = np.abs(np.diff(ratios))
    assert (diffs < 0.05).all()


# ----------------------------------------------------------------------
# tables


def test_table_poisson_collapse_entrywise():
    p = bp.validate(1.0, 1.0, 1.0)
    table = bp.build_pmf_table(p, 1e-12)
    k = np.arange(len(table.probs))
    ref = stats.poisson.pmf(k, 1.0)
    assert np.abs(table.probs - ref).max() <= 1e-13


@pytest.mark.parametrize("params", GRID, ids=lambda p: f"a{p.alpha}-t{p.theta}-l{p.lam}")
def test_table_normalization(params):
    table = bp.build_pmf_table(params, 1e-12)
    assert table.tail_mass <= 1e-12
    assert abs(float(table.probs.sum()) + table.tail_mass - 1.0) <= 1e-12
    assert table.probs.min() >= 0.0


def test_table_mean_example():
    table = bp.build_pmf_table(bp.validate(2.0, 0.5, 0.5), 1e-12)
    assert table.mean() == pytest.approx(1.25, abs=1e-9)


def test_table_moments_match_closed_forms():
    for params in GRID:
        table = bp.build_pmf_table(params, 1e-12)
        assert abs(table.mean() - bp.mean(params)) <= 1e-9
        assert abs(table.variance() - bp.variance(params)) <= 1e-8


def test_table_tail_tol_respected():
    p = bp.validate(1.0, 1.0, 0.5)
    loose = bp.build_pmf_table(p, 1e-6)
    tight = bp.build_pmf_table(p, 1e-12)
    assert loose.support_max <= tight.support_max
    assert loose.tail_mass <= 1e-6
    with pytest.raises(ParameterError):
        bp.build_pmf_table(p, 0.0)


# ----------------------------------------------------------------------
# cdf / quantile


def test_quantile_zero_gives_zero():
    p = bp.validate(1.0, 1.0, 0.5)
    assert bp.quantile(0.0, p) == 0


def test_cdf_saturates_at_one():
    p = bp.validate(2.0, 1.0, 0.25)
    assert bp.cdf(10_000, p) == pytest.approx(1.0, abs=1e-12)


def test_quantile_poisson_point():
    p = bp.validate(1.0, 1.0, 1.0)
    assert bp.quantile(0.9, p) == 2


def test_quantile_domain():
    p = bp.validate(1.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        bp.quantile(1.0, p)
    with pytest.raises(ParameterError):
        bp.quantile(-0.1, p)


def test_quantile_tail_sliver():
    table = bp.build_pmf_table(bp.validate(1.0, 1.0, 0.5), 1e-12)
    covered = float(table.cumulative[-1])
    if covered < 1.0:
        with pytest.raises(TailSliverError):
            table.quantile(covered + (1.0 - covered) / 2)


@given(u=st.floats(0.0, 0.999999, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_quantile_cdf_adjunction(u):
    # least k with cdf(k) > u: cdf at the quantile exceeds u, cdf below misses
    table = bp.build_pmf_table(bp.validate(1.0, 1.0, 0.5), 1e-12)
    k = table.quantile(u)
    assert table.cdf(k) > u
    if k > 0:
        assert table.cdf(k - 1) <= u


# ----------------------------------------------------------------------
# generating functions


def test_pgf_at_one():
    for p in (bp.validate(1, 1, 0.5), bp.validate(2, 0.5, 0.25)):
        assert bp.pgf(1.0, p) == pytest.approx(1.0, rel=1e-14)


def test_pgf_at_zero_equals_mass_at_zero():
    p = bp.validate(1.0, 1.0, 1.0)
    assert bp.pgf(0.0, p) == pytest.approx(bp.pmf(0, p), rel=1e-14)


def test_pgf_half_order_value():
    p = bp.validate(1.0, 1.0, 0.5)
    assert bp.pgf(0.5, p) == pytest.approx(math.exp(1.5625 - 2.25), rel=1e-14)


def test_pgf_series_consistency():
    for params in GRID[:20]:
        table = bp.build_pmf_table(params, 1e-12)
        k = np.arange(len(table.probs))
        for t in (0.0, 0.3, 0.7, 1.0):
            series = float(np.dot(table.probs, np.power(t, k)))
            assert abs(series - bp.pgf(t, params)) <= 1e-10


def test_pgf_domain_error():
    p = bp.validate(1.0, 2.0, 0.5)
    with pytest.raises(ParameterError):
        bp.pgf(-1.5, p)  # 1 + lam*theta*t = -0.5


def test_mgf_at_zero():
    assert bp.mgf(0.0, bp.validate(1, 1, 0.5)) == pytest.approx(1.0, rel=1e-14)


def test_mgf_is_pgf_at_exp():
    p = bp.validate(1.0, 1.0, 0.5)
    for t in (-1.0, 0.0, 0.3):
        assert bp.mgf(t, p) == bp.pgf(math.exp(t), p)


def test_mgf_derivative_is_mean():
    h = 1e-5
    for p in GRID[:20]:
        d = (bp.mgf(h, p) - bp.mgf(-h, p)) / (2 * h)
        assert d == pytest.approx(bp.mean(p), abs=1e-6)


def test_mgf_overflow_reported():
    with pytest.raises(OverflowError):
        bp.mgf(500.0, bp.validate(1, 1, 0.5))


# ----------------------------------------------------------------------
# moments


def test_poisson_moments():
    p = bp.validate(1.0, 1.0, 1.0)
    assert bp.mean(p) == pytest.approx(1.0)
    assert bp.variance(p) == pytest.approx(1.0)


def test_mean_example():
    assert bp.mean(bp.validate(2.0, 0.5, 0.5)) == pytest.approx(1.25)


def test_overdispersion_identity():
    # variance - mean = theta^2 * alpha * (1-lam) * e_lam^(1-2lam)(theta) >= 0
    for p in GRID:
        gap = bp.variance(p) - bp.mean(p)
        closed = (
            p.theta**2
            * p.alpha
            * (1 - p.lam)
            * bp.degenerate_exp(1 - 2 * p.lam, p.lam, p.theta)
        )
        assert gap == pytest.approx(closed, rel=1e-12, abs=1e-12)
        assert gap >= -1e-12


# ----------------------------------------------------------------------
# convolution


def test_convolve_adds_rates():
    p = bp.convolve(bp.validate(1, 1, 1), bp.validate(2, 1, 1))
    assert (p.alpha, p.theta, p.lam) == (3.0, 1.0, 1.0)


def test_convolve_near_identity():
    base = bp.validate(1.0, 1.0, 0.5)
    merged = bp.convolve(base, bp.validate(1e-12, 1.0, 0.5))
    assert merged.alpha == pytest.approx(1.0, abs=1e-11)
    table = bp.build_pmf_table(merged)
    ref = bp.build_pmf_table(base)
    top = min(table.support_max, ref.support_max)
    assert np.abs(table.probs[: top + 1] - ref.probs[: top + 1]).max() < 1e-11


def test_convolve_rejects_mismatched_theta():
    with pytest.raises(IncompatibleParametersError):
        bp.convolve(bp.validate(1, 0.5, 0.5), bp.validate(1, 0.7, 0.5))


def test_convolve_rejects_mismatched_order():
    with pytest.raises(IncompatibleParametersError):
        bp.convolve(bp.validate(1, 1, 0.5), bp.validate(1, 1, 0.25))


def test_convolution_matches_discrete_convolution():
    pa, pb = bp.validate(1.0, 1.0, 0.5), bp.validate(2.0, 1.0, 0.5)
    ta, tb = bp.build_pmf_table(pa), bp.build_pmf_table(pb)
    tsum = bp.build_pmf_table(bp.convolve(pa, pb))
    for k in range(31):
        conv = math.fsum(
            float(ta.probs[i]) * float(tb.probs[k - i])
            for i in range(k + 1)
            if i <= ta.support_max and k - i <= tb.support_max
        )
        assert abs(conv - float(tsum.probs[k])) <= 1e-10


# ----------------------------------------------------------------------
# compound decomposition


def test_decompose_poisson_degenerates():
    law = bp.decompose(bp.validate(1.0, 1.0, 1.0))
    assert law.burst_rate == pytest.approx(1.0)
    assert law.support_bound == 1
    assert law.prob(1) == pytest.approx(1.0)
    assert law.prob(2) == 0.0


def test_decompose_half_order():
    law = bp.decompose(bp.validate(1.0, 1.0, 0.5))
    assert law.burst_rate == pytest.approx(1.25)
    assert law.prob(1) == pytest.approx(0.8)
    assert law.prob(2) == pytest.approx(0.2)


def test_decompose_probs_sum_to_one():
    for params in GRID:
        law = bp.decompose(params)
        assert abs(float(law.jump_probs.sum()) - 1.0) <= 1e-12
        assert law.jump_probs.min() >= 0.0
        assert law.support_bound == round(1.0 / params.lam)


def test_decompose_requires_strict():
    p = bp.validate(1.0, 1.0, 0.013)
    with pytest.raises(ParameterError):
        bp.decompose(p)


def test_decompose_pgf_identity():
    # exp(R*(H(t) - 1)) must equal the distribution's pgf everywhere
    for params in (bp.validate(1, 1, 0.5), bp.validate(2, 0.5, 0.25), bp.validate(1, 2, 0.1)):
        law = bp.decompose(params)
        for t in np.linspace(0.0, 1.0, 10):
            lhs = math.exp(law.burst_rate * (law.pgf(float(t)) - 1.0))
            assert lhs == pytest.approx(bp.pgf(float(t), params), abs=1e-10)


def test_jump_mean_times_rate_is_distribution_mean():
    for params in GRID[:20]:
        law = bp.decompose(params)
        assert law.burst_rate * law.mean() == pytest.approx(bp.mean(params), rel=1e-12)


# ----------------------------------------------------------------------
# near-classical limit


def test_near_zero_order_matches_bell_touchard():
    p = bp.validate(1.0, 1.0, 1e-4)
    table = bp.build_pmf_table(p)
    pref = math.exp(-(math.e - 1.0))
    for k in range(21):
        classical = pref / math.factorial(k) * bp.bell_poly_classical(k, 1.0)
        assert abs(float(table.probs[k]) - classical) <= 1e-3


# ----------------------------------------------------------------------
# high-precision oracle for the log-domain route


def _oracle_pmf(k, alpha, theta, lam):
    # 60-digit arithmetic end to end: triangle by the same recurrence,
    # then the mass assembled without any log-domain tricks
    from mpmath import mp, mpf

    mp.dps = 60
    a, th, lm = mpf(alpha), mpf(theta), mpf(lam)
    prev = [mpf(1)]
    for n in range(k):
        cur = [mpf(0)] * (n + 2)
        for j in range(1, n + 2):
            left = prev[j - 1] if j - 1 <= n else mpf(0)
            same = prev[j] if j <= n else mpf(0)
            cur[j] = left + (j - n * lm) * same
        prev = cur
    phi = sum(prev[j] * a**j for j in range(k + 1)) if k else mpf(1)
    e_lam = (1 + lm * th) ** (1 / lm)
    return float(mp.e ** (-a * (e_lam - 1)) * th**k / mp.factorial(k) * phi)


def test_log_domain_route_against_high_precision_oracle():
    # k = 164 is the deepest certified entry at these parameters; the
    # whole bulk (k >= 30) goes through logsumexp over the log triangle
    params = bp.validate(5.0, 2.0, 0.1)
    for k in (0, 3, 30, 50, 100, 164):
        oracle = _oracle_pmf(k, 5.0, 2.0, 0.1)
        assert bp.pmf(k, params) == pytest.approx(oracle, rel=1e-12)


def test_large_rate_poisson_collapse_all_log_regime():
    # rate 40 >= 30 pushes even k = 0 through the log-domain path
    params = bp.validate(40.0, 1.0, 1.0)
    table = bp.build_pmf_table(params, 1e-12)
    k = np.arange(len(table.probs))
    ref = stats.poisson.pmf(k, 40.0)
    assert np.abs(table.probs - ref).max() <= 1e-13


# ----------------------------------------------------------------------
# serialization


def test_table_json_round_trip():
    table = bp.build_pmf_table(bp.validate(1.5, 0.75, 0.25), 1e-12)
    back = bp.PmfTable.from_json(table.to_json())
    assert back.params == table.params
    assert back.tail_mass == table.tail_mass
    assert (back.probs == table.probs).all()


def test_table_csv_round_trip():
    table = bp.build_pmf_table(bp.validate(1.5, 0.75, 0.25), 1e-12)
    lines = table.to_csv().strip().splitlines()
    assert lines[0] == "k,p"
    *rows, tail_row = lines[1:]
    probs = []
    for k, row in enumerate(rows):
        key, value = row.split(",")
        assert int(key) == k
        probs.append(float(value))
    label, tail = tail_row.split(",")
    assert label == "tail_mass"
    assert float(tail) == table.tail_mass
    assert probs == [float(p) for p in table.probs]


def test_table_json_is_17_digit_safe():
    table = bp.build_pmf_table(bp.validate(1.0, 1.0, 0.5), 1e-12)
    payload = json.loads(table.to_json())
    assert payload["probs"] == [float(p) for p in table.probs]
