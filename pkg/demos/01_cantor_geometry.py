"""Walking through the middle-thirds Cantor set with exact arithmetic.

Every removed interval at generation n has endpoints a/3^n and (a+1)/3^n with
integer a, so nothing here is ever rounded.
"""
from fractions import Fraction

from cantorcusp import geometry as geo

# Generation 1 removes the middle third, generation 2 two ninths, and so on.
for n in (1, 2, 3):
    print(n, [str(iv) for iv in geo.removed_intervals(n)])

# The numerators alone are enough to describe a generation.  They fit in int64
# up to generation 39, which is where the vectorised path stops.
print("generation 5 numerators:", geo.removed_numerators(5)[:8], "...")

# The removed lengths add up to 1 - (2/3)^n exactly.
for n in (1, 5, 20):
    total = geo.total_removed_length(n)
    assert total == 1 - Fraction(2, 3) ** n
    print(f"removed length up to generation {n}: {float(total):.12f}")

# Distances to the Cantor set are certified enclosures.  For the rational 2/5
# the point sits inside the removed (1/3, 2/3) and the distance is exactly 1/15.
d = geo.dist_to_cantor(Fraction(2, 5))
print("d(2/5, C) =", d.lo, "exact:", d.exact)

# A float input is converted exactly, so 0.4 is not quite 2/5.
d = geo.dist_to_cantor(0.4)
print("d(0.4, C) - 1/15 =", float(d.lo - Fraction(1, 15)))

# 1/4 is in the Cantor set (ternary 0.0202...), so no finite depth decides it.
print("locate(1/4):", geo.locate(Fraction(1, 4), depth=30))
