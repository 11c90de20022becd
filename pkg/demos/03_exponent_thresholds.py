"""How much integrability the extension loses.

For alpha in (0, 1) an exponent p has to exceed p_lower(alpha) before any
W^{1,q} extension with q > 1 is available; above that the best q is q_upper.
"""
import numpy as np

from cantorcusp import alpha_p, beta_default, p_lower, q_upper, series_ratio
from cantorcusp.exponents import admissible, alpha_critical

# p_lower only exists above a critical alpha (about 0.3155); below it every p > 1 works.
print("alpha_critical =", alpha_critical())
for a in (0.4, 0.5, 0.7, 0.9):
    print(f"alpha={a}: p_lower={p_lower(a):.7f}")

a = 0.7
print(f"\nalpha={a}")
print(f"{'p':>6} {'q_upper':>10} {'alpha_p':>10} {'beta':>10}")
for p in np.arange(1.5, 5.01, 0.5):
    print(f"{p:6.2f} {q_upper(a, p):10.7f} {alpha_p(a, p):10.7f} {beta_default(a, p):10.7f}")

# The series that controls the extension norm is geometric with this ratio.
# It drops below 1 exactly when q is below q_upper.
p = 2.0
for q in (1.1, 1.2, 1.28, 1.29, 1.5):
    print(f"q={q}: ratio={series_ratio(a, p, q):.7f}  admissible={admissible(a, p, q)}")
