"""Finite-matrix toolkit for several-variable Aleksandrov-Clark theory.

Modules:

* ``polynomials`` — matrix-valued polynomials and the weighted monomial
  inner product of the Drury-Arveson space.
* ``kernels`` — pointwise kernel evaluation, sample plans, Gram matrices,
  sampled Schur-class evidence.
* ``truncation`` — truncated monomial models, shifts, multipliers, inner
  checks, model-space projectors.
* ``herglotz`` — the coefficient model of the Herglotz space, the partial
  d-isometry, moment functionals, quasi-extremity certification.
* ``gleason`` — contractive Gleason solutions, model-space transfer,
  minimality comparison, kernel witnesses.
* ``disk`` — classical one-variable Clark theory for finite Blaschke
  products.
* ``examples`` — the curated multiplier examples.
* ``reports``/``cli`` — deterministic machine-readable reports and the
  batch command-line entry point.
"""

__version__ = "0.1.0"

from .polynomials import MatPoly  # noqa: F401
from .kernels import SamplePlan  # noqa: F401
