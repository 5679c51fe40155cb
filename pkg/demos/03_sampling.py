"""Tour of the samplers.

Two independent exact routes to the same law: inversion of the
certified table, and the compound construction (Poisson number of
batches).  Their agreement is the library's core cross-check.
"""

import bellproc as bp
from bellproc.verify import chisq_pvalue_two_sample

params = bp.validate(1.0, 1.0, 0.5)
table = bp.build_pmf_table(params)
law = bp.decompose(params)

print("=" * 64)
print("deterministic, splittable streams")
print("=" * 64)
print("  same seed, same draws :", (bp.RngStream(7).random(5) == bp.RngStream(7).random(5)).all())
print("  split(0) vs split(1)  :", bp.RngStream(7).split(0).random(3), bp.RngStream(7).split(1).random(3))

print()
print("=" * 64)
print("100k draws from each route (seed 2024)")
print("=" * 64)
rng = bp.RngStream(2024)
inverse_draws = bp.sample_inverse_cdf(table, rng, 100_000)
compound_draws = bp.sample_compound(law, rng, 100_000)
print(f"  inverse-cdf: mean {inverse_draws.mean():.4f}  var {inverse_draws.var():.4f}")
print(f"  compound:    mean {compound_draws.mean():.4f}  var {compound_draws.var():.4f}")
print(f"  closed form: mean {bp.mean(params):.4f}  var {bp.variance(params):.4f}")

print()
print("side-by-side histogram (# = inverse-cdf, * = compound, | = analytic)")
top = 9
for k in range(top):
    p_emp_a = float((inverse_draws == k).mean())
    p_emp_b = float((compound_draws == k).mean())
    p_true = float(table.probs[k])
    bar_a = "#" * round(100 * p_emp_a)
    bar_b = "*" * round(100 * p_emp_b)
    print(f"  k={k}: {p_true:.4f} |{bar_a}")
    print(f"         {'':>6} |{bar_b}")

p_value = chisq_pvalue_two_sample(inverse_draws, compound_draws)
print(f"\n  two-sample chi-square p-value: {p_value:.4f}  (the routes agree)")

print()
print("=" * 64)
print("the jump subroutine at lam = 1/4: batches live on {1, 2, 3, 4}")
print("=" * 64)
law4 = bp.decompose(bp.validate(1.0, 1.0, 0.25))
jumps = bp.sample_jump(law4, bp.RngStream(99), 100_000)
for j in range(1, 5):
    print(f"  P(batch={j}): empirical {float((jumps == j).mean()):.4f}   analytic {law4.prob(j):.4f}")
print(f"  observed support: {jumps.min()}..{jumps.max()}")
