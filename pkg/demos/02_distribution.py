"""Tour of the counting distribution.

The law is Poisson at lam = 1 and grows overdispersed as lam shrinks:
mass arrives in batches of up to m = 1/lam at a time.
"""

import math

import numpy as np

import bellproc as bp

print("=" * 64)
print("validation: which parameters define a probability law?")
print("=" * 64)
for lam in (1.0, 0.5, 0.25, 0.013, 0.6):
    try:
        params = bp.validate(1.0, 1.0, lam)
        print(f"  lam={lam:<6g} -> {params.validity.value}")
    except bp.ParameterError as exc:
        print(f"  lam={lam:<6g} -> rejected ({str(exc)[:60]}...)")

print()
print("=" * 64)
print("the certified table: masses plus a provable tail bound")
print("=" * 64)
params = bp.validate(1.0, 1.0, 0.5)
table = bp.build_pmf_table(params, tail_tol=1e-12)
print(f"  entries 0..{table.support_max}, tail mass {table.tail_mass:.3e}")
print(f"  sum + tail = {float(table.probs.sum()) + table.tail_mass!r}")
for k in range(6):
    bar = "#" * round(120 * float(table.probs[k]))
    print(f"  k={k}: {float(table.probs[k]):.6f} {bar}")

print()
print("=" * 64)
print("overdispersion: variance/mean as the order shrinks (alpha=theta=1)")
print("=" * 64)
print(f"  {'lam':>6} {'mean':>10} {'variance':>10} {'var/mean':>10}")
for lam in (1.0, 0.5, 0.25, 0.1):
    p = bp.validate(1.0, 1.0, lam)
    mu, var = bp.mean(p), bp.variance(p)
    print(f"  {lam:>6g} {mu:>10.4f} {var:>10.4f} {var / mu:>10.4f}")
print("  lam = 1 is equidispersed (Poisson); smaller lam, heavier batches")

print()
print("=" * 64)
print("generating functions agree with the table")
print("=" * 64)
k = np.arange(len(table.probs))
for t in (0.0, 0.5, 1.0):
    series = float(np.dot(table.probs, np.power(t, k)))
    print(f"  t={t}: sum p_k t^k = {series:.12f}   pgf = {bp.pgf(t, params):.12f}")
h = 1e-5
deriv = (bp.mgf(h, params) - bp.mgf(-h, params)) / (2 * h)
print(f"  mgf'(0) by central difference = {deriv:.10f}  (mean = {bp.mean(params)})")

print()
print("=" * 64)
print("closure under sums: rates add when theta and lam agree")
print("=" * 64)
merged = bp.convolve(bp.validate(1.0, 1.0, 0.5), bp.validate(2.0, 1.0, 0.5))
print(f"  (1, 1, 1/2) + (2, 1, 1/2) -> alpha = {merged.alpha}")
try:
    bp.convolve(bp.validate(1.0, 0.5, 0.5), bp.validate(1.0, 0.7, 0.5))
except bp.IncompatibleParametersError:
    print("  mixing theta = 0.5 with theta = 0.7 is refused: not in the family")

print()
print("=" * 64)
print("compound decomposition: Poisson bursts of bounded batches")
print("=" * 64)
law = bp.decompose(params)
print(f"  burst rate = {law.burst_rate}")
for j in range(1, law.support_bound + 1):
    print(f"  P(batch = {j}) = {law.prob(j):.4f}")
check = math.exp(law.burst_rate * (law.pgf(0.5) - 1.0))
print(f"  exp(R*(H(t)-1)) at t=0.5 = {check:.12f}   pgf = {bp.pgf(0.5, params):.12f}")
