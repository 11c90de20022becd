"""The cusp profile psi = d(x1, C)^alpha and the reflection across its graph.

Above a removed interval the domain is folded onto the region below the graph
by a piecewise-affine map.  The map fixes x1 and is its own inverse.
"""
from cantorcusp import CuspProfile, PlanePoint, psi, psi_derivative, reflect, reflect_jet, zone
from cantorcusp.reflection import det_abs

prof = CuspProfile(alpha=0.7)

# psi comes with a certified enclosure and its derivative exists off the Cantor set.
for x in (0.1, 0.4, 0.5, 0.25):
    enc = psi(prof, x)
    print(f"x1={x:<5} psi in [{enc.lo:.15f}, {enc.hi:.15f}]  psi'={psi_derivative(prof, x)}")

# Points strictly above the graph and below twice its height land in the
# lower rectangle, and the other way round.
x1 = 0.45
h = psi(prof, x1).hi
for x2 in (1.5 * h, -0.5 * h, 3.0 * h):
    p = PlanePoint(x1, x2)
    img = reflect(prof, p)
    back = reflect(prof, img)
    print(f"{zone(prof, p).label:>24}: ({x1}, {x2:+.4f}) -> ({img.x1}, {img.x2:+.4f}), "
          f"roundtrip error {abs(back.x2 - x2):.1e}")

# The Jacobian determinant is 3 on the upper rectangles and 1/3 on the lower ones.
jet = reflect_jet(prof, PlanePoint(x1, 1.5 * h))
print("Jacobian:\n", jet.differential, "\n|det| =", det_abs(jet.differential), jet.jacobian_abs)
