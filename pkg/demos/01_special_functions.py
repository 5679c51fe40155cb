"""Tour of the special-function kernel.

The degeneracy order `lam` interpolates between plain powers (lam -> 0)
and ordinary falling factorials (lam = 1); everything downstream is
built from these kernels.
"""

import math

import bellproc as bp

print("=" * 64)
print("degenerate exponential e_lam(t) = (1 + lam*t)^(1/lam)")
print("=" * 64)
for lam in (1.0, 0.5, 0.1, 0.01, 1e-6):
    print(f"  lam={lam:<8g} e_lam(1) = {bp.degenerate_exp(1.0, lam, 1.0):.10f}")
print(f"  exp(1)          = {math.e:.10f}   <- the lam -> 0 limit")

print()
print("=" * 64)
print("generalized falling factorial (x)_{n,lam} = x(x-lam)...(x-(n-1)lam)")
print("=" * 64)
x, n = 2.0, 3
for lam in (0.0, 0.5, 1.0):
    print(f"  (2)_{{3,{lam}}} = {bp.falling_factorial(x, n, lam):g}")
print("  lam=0 gives x^n = 8; lam=1 gives 2*1*0 = 0")

print()
print("=" * 64)
print("degenerate Stirling triangle at lam = 1/2 (rows n = 0..5)")
print("=" * 64)
table = bp.build_stirling_table(0.5, 8)
for row in range(6):
    entries = "  ".join(f"{table.value(row, k):8.4f}" for k in range(row + 1))
    print(f"  n={row}: {entries}")
print("  column k=1 is the weight (1)_{n,lam}; it hits zero at n = 3 (= m+1)")

print()
print("=" * 64)
print("Bell polynomial, two independent routes")
print("=" * 64)
print(f"  {'n':>3} {'table route':>22} {'series route':>22}")
for order in (0, 1, 2, 5, 8):
    by_table = bp.bell_poly(order, 2.0, table)
    by_series = bp.bell_poly_dobinski(order, 2.0, 0.5, tol=1e-12)
    print(f"  {order:>3} {by_table:>22.12f} {by_series:>22.12f}")

print()
print("=" * 64)
print("lam = 1 collapse: the polynomial degenerates to plain powers")
print("=" * 64)
one = bp.build_stirling_table(1.0, 10)
print("  phi_n(x) - x^n:", [bp.bell_poly(k, 3.0, one) - 3.0**k for k in range(6)])

print()
print("=" * 64)
print("lam -> 0: degenerate Bell numbers approach the classical ones")
print("=" * 64)
small = bp.build_stirling_table(1e-6, 8)
for order in range(8):
    degen = bp.bell_number(order, small)
    classical = bp.bell_poly_classical(order, 1.0)
    print(f"  n={order}: {degen:14.8f}   classical {classical:10.1f}")
