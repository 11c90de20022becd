"""The Jacobian-quotient series over the reflection rectangles.

Each removed interval contributes an integral of psi to a power that depends
on (alpha, kappa).  Summing by generation gives a geometric series whose ratio
decides whether the extension operator is bounded from W^{1,p} to W^{1,q}.
"""
from cantorcusp import cminus, cplus, kappa, per_interval_integral, q_upper

a, p = 0.7, 2.0
print("q_upper =", q_upper(a, p))

# Single interval contributions shrink geometrically with the generation.
k = kappa(p, 1.2)
for n in (1, 2, 3, 10):
    print(f"n={n:>2}: per-interval integral {per_interval_integral(a, k, n):.6e}")

# Below q_upper the series is finite with a rigorous tail bound.
rep = cplus(a, p, 1.2)
print("C+ at q=1.2:", rep.verdict, "tail", rep.tail_bound)

# Past q_upper the ratio exceeds 1 and the verdict flips.
rep = cplus(a, p, 1.35)
print("C+ at q=1.35:", rep.verdict)
print("C- at q=1.2:", cminus(a, p, 1.2).verdict)
