"""Sobolev extension across the Cantor-cuspidal graph ``x2 = d(x1, C)**alpha``.

Submodules:

* :mod:`~cantorcusp.geometry`  exact middle-thirds Cantor set bookkeeping
* :mod:`~cantorcusp.profile`   the profile ``psi`` with certified enclosures
* :mod:`~cantorcusp.reflection` the piecewise-affine reflection over the graph
* :mod:`~cantorcusp.exponents` extension thresholds and derived exponents
* :mod:`~cantorcusp.integrals` Jacobian-quotient series over the rectangles
* :mod:`~cantorcusp.grid`      grid functions, extension and Sobolev norms
* :mod:`~cantorcusp.witnesses` counterexample functions and their series
* :mod:`~cantorcusp.verify`    the acceptance checks

``CANTORCUSP_THREADS``, if set before the first import, caps the BLAS and
OpenMP thread pools numpy may start.
"""
import os as _os

_threads = _os.environ.get("CANTORCUSP_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .exponents import (ExponentDomainError, ExponentTriple, alpha_critical, alpha_p,  # noqa: E402
                        beta_default, derive, kappa, p_lower, q_upper, series_ratio)
from .geometry import CantorInterval, TriadicRational, dist_to_cantor, locate, removed_intervals  # noqa: E402
from .grid import GridFunction, NormReport, extend, extension_ratio, sample, sobolev_norm, weak_gradient  # noqa: E402
from .integrals import cminus, cplus, jacobian_integral, per_interval_integral  # noqa: E402
from .profile import CuspProfile, PlanePoint, Region, classify, psi, psi_derivative  # noqa: E402
from .reflection import reflect, reflect_jet, zone  # noqa: E402
from .witnesses import WitnessParams, divergence_witness, witness_sobolev_norm  # noqa: E402

__version__ = "0.1.0"
