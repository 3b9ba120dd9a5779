"""Adjoint-orbit integrals over compact classical groups.

Closed-form evaluation of integral over G of exp(trace(A g B g^{-1})) dg for
the unitary, special unitary, orthogonal, special orthogonal and compact
symplectic families, via the Weyl-group localization sum and the equivalent
determinant formulas, verified against a seeded Haar-measure Monte Carlo
oracle.
"""

from .cartan import (
    CartanVector,
    Family,
    GroupSpec,
    RootCovector,
    WeylElement,
    embed_cartan,
    embed_weyl,
    pairing_exponent,
    positive_roots,
    weyl_apply,
    weyl_elements,
    weyl_sign,
)
from .closedform import (
    DegenerateSpectrum,
    EvalMethod,
    IntegralResult,
    ZeroCoordinate,
    component_integral,
    component_twists,
    determinant_integral,
    hciz,
    localization_constant,
    o_even,
    o_odd,
    so_even,
    so_odd,
    su_integral,
    usp,
    weyl_sum_integral,
)
from .haarmc import (
    ExponentOverflow,
    MCEstimate,
    integrand_exponent,
    mc_integral,
    rng_for_seed,
    sample_orthogonal,
    sample_special_orthogonal,
    sample_special_unitary,
    sample_symplectic,
    sample_unitary,
)
from .sympoly import (
    SparsePolynomial,
    apply_differential,
    discriminant,
    discriminant_norm,
    expand_linear_forms,
    pairing,
    sum_of_squares,
)

__version__ = "0.1.0"
