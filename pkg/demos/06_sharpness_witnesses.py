"""Witness functions showing the thresholds cannot be improved.

The upper witness stacks ramps of height c_n in the window left of each removed
interval of generation n.  Its W^{1,p} norm is a convergent series, while the
W^{1,q} norm of its extension diverges once q passes the sharp exponent.
"""
from cantorcusp import WitnessParams, divergence_witness, witness_sobolev_norm
from cantorcusp.witnesses import extension_gradient_energy, in_sharpness_regime

a, p = 0.7, 2.0
params = WitnessParams(a, p)
print("alpha_p =", params.alpha_p, " beta =", params.beta)

norm = witness_sobolev_norm(params)
print("||u||_p^p series:", norm.value.verdict, "gradient series:", norm.gradient.verdict)
# At the default beta the gradient series behaves like sum (n log n)^-s with s
# only slightly above 1, so its tail at generation 60 is still a few percent.
print("relative gradient tail at generation 60:", norm.gradient.relative_tail)

q = 1.5
print("regime at q=1.5:", in_sharpness_regime(a, p, q))
div = divergence_witness(params, q)
print("extension series factor", div.factor, "->", div.verdict)

# The semi-analytic extension energy per generation.  Its slow growth is why the
# 1.5x growth check between generations 6 and 8 is out of reach.
energies = extension_gradient_energy(params, q, generations=8, per_generation=True)
print("per-generation energy:", {n: round(float(e), 3) for n, e in energies.items()})
