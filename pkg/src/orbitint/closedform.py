"""Closed-form evaluation of the orbit integral

    I(a, b) = integral over G of exp(trace(A g B g^{-1})) dg,

where A = embed_cartan(spec, a), B = embed_cartan(spec, b) and dg is the
normalized Haar measure.  Two independent routes are provided:

* :func:`weyl_sum_integral` evaluates the localization formula: the integral
  equals a normalized alternating sum of the integrand over the finite set of
  group elements realizing the Weyl group.
* The family-specific determinant forms (:func:`hciz`, :func:`so_even`,
  :func:`o_even`, :func:`so_odd`, :func:`o_odd`, :func:`usp`) collapse that
  sum into determinants of exp/cosh/sinh matrices over Vandermonde factors.

Both must agree to near machine precision away from degeneracy, and both are
checked against the Monte Carlo oracle in ``haarmc``.

Normalization.  The alternating sum is weighted by norm(Pi)/|W| where Pi is
the product of the positive roots and norm(Pi) its squared length under the
differential pairing *in coordinates orthonormal for the trace form of the
defining representation*.  For the A family the natural Cartan basis is
already orthonormal and norm(Pi) is the factorial product computed by
``sympoly.discriminant_norm``.  For B, C and D the natural basis vectors
have squared trace norm 2, so each of the r root covectors picks up a factor
1/sqrt(2) on conversion to orthonormal coordinates and the constant is
``discriminant_norm / 2**r``.  The same rescaling is what makes the
exponent convention ``pairing_exponent`` (factor 2 for B/C/D) exact, and the
Monte Carlo oracle confirms the combination end to end; see
:func:`localization_constant`.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .cartan import Family, GroupSpec, positive_roots
from .sympoly import discriminant_norm

__all__ = [
    "DegenerateSpectrum",
    "ZeroCoordinate",
    "EvalMethod",
    "IntegralResult",
    "localization_constant",
    "weyl_sum_integral",
    "hciz",
    "su_integral",
    "so_even",
    "o_even",
    "so_odd",
    "o_odd",
    "usp",
    "determinant_integral",
    "component_integral",
    "component_twists",
    "DEFAULT_RANK_CAP",
    "DEGENERACY_RTOL",
]

# Smallest admissible pairwise gap (of coordinates, squared coordinates, or
# |a_i| where the formulas divide by them), relative to the coordinate scale.
DEGENERACY_RTOL = 1e-8

# |W| grows as 2^N N!; the Weyl-sum evaluator refuses larger ranks unless the
# caller raises the cap explicitly (the CLI wires this to HC_MAX_RANK).
DEFAULT_RANK_CAP = 8


class DegenerateSpectrum(ValueError):
    """Coordinates too close to a non-regular point to divide by Pi."""


class ZeroCoordinate(ValueError):
    """A coordinate is (nearly) zero where the formula divides by it."""


class EvalMethod(enum.Enum):
    WEYL_SUM = "weyl-sum"
    DETERMINANT = "determinant"


@dataclass(frozen=True)
class IntegralResult:
    """Value of the orbit integral plus a cancellation indicator.

    ``condition_estimate`` is (sum of |term|) / |sum of terms| over the
    alternating sum that produced the value (Weyl terms, or absolute Leibniz
    expansion for the determinant forms).  It is >= 1; large values flag
    catastrophic cancellation near a degenerate spectrum.
    """

    value: float
    method: EvalMethod
    condition_estimate: float


# ---------------------------------------------------------------------------
# input validation


def _as_coords(v: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d coordinate sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _min_gap(values: np.ndarray) -> tuple[float, tuple[int, int]]:
    best = math.inf
    pair = (-1, -1)
    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(values[i] - values[j])
            if gap < best:
                best = gap
                pair = (i, j)
    return best, pair


def _require_regular(letter: str, v: np.ndarray, name: str) -> None:
    """Reject inputs where the relevant closed form would divide by ~0."""
    scale = max(1.0, float(np.max(np.abs(v))))
    if letter in ("B", "C"):
        tol = DEGENERACY_RTOL * scale
        small = np.nonzero(np.abs(v) < tol)[0]
        if small.size:
            i = int(small[0])
            raise ZeroCoordinate(
                f"{name}[{i}] = {v[i]:.3e} is below the zero threshold {tol:.1e}; "
                f"the formula divides by every coordinate of {name}"
            )
    if letter == "A":
        gap, (i, j) = _min_gap(v)
        tol = DEGENERACY_RTOL * scale
        squared = False
    else:
        gap, (i, j) = _min_gap(v * v)
        tol = DEGENERACY_RTOL * scale * scale
        squared = True
    if len(v) >= 2 and gap < tol:
        what = "squared coordinates" if squared else "coordinates"
        raise DegenerateSpectrum(
            f"{what} {name}[{i}] and {name}[{j}] nearly coincide "
            f"(gap {gap:.3e} < threshold {tol:.1e}); the spectrum must be regular"
        )


# ---------------------------------------------------------------------------
# the generic Weyl-sum evaluator


@lru_cache(maxsize=None)
def localization_constant(spec: GroupSpec) -> Fraction:
    """norm(Pi) in coordinates orthonormal for the trace form, exact.

    Equals discriminant_norm(spec) for the A family; for B, C and D the
    natural basis has squared trace norm 2 and the r root covectors rescale
    by 1/sqrt(2) each, dividing the pairing by 2^r.
    """
    norm = discriminant_norm(spec)
    if spec.root_letter == "A":
        return Fraction(norm)
    return Fraction(norm, 2**spec.num_positive_roots)


@lru_cache(maxsize=None)
def _perm_arrays(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All permutations of range(n) in lexicographic order.

    Returns (perms, inverses, signs) as arrays of shape (n!, n) / (n!,).
    """
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    inverses = np.argsort(perms, axis=1)
    flips = np.zeros(len(perms), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            flips += perms[:, i] > perms[:, j]
    signs = np.where(flips % 2 == 0, 1.0, -1.0)
    return perms, inverses, signs


@lru_cache(maxsize=None)
def _sign_arrays(letter: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign patterns in binary-counter order (+1 first) with their products."""
    if letter == "A":
        patterns = np.ones((1, n))
    else:
        patterns = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
        if letter == "D":
            patterns = patterns[patterns.prod(axis=1) > 0]
    return patterns, patterns.prod(axis=1)


def _weyl_sum_parts(
    spec: GroupSpec, a: np.ndarray, b: np.ndarray
) -> tuple[float, float]:
    """(signed sum, sum of |term|) of eps(w) exp(<w(a), b>) over W.

    Term order matches the enumeration of ``cartan.weyl_elements``
    (permutations outer and lexicographic, sign patterns inner, binary
    counter); both sums are compensated.
    """
    letter = spec.root_letter
    n = spec.rank
    _, inverses, perm_signs = _perm_arrays(n)
    patterns, pattern_prods = _sign_arrays(letter, n)

    # <w(a), b> = factor * sum_j eta(j) a[sigma^{-1}(j)] b[j], for all
    # (sigma, eta) at once: rows are permutations, columns sign patterns.
    base = a[inverses] * b  # (n!, n)
    exponents = spec.exponent_factor * (base @ patterns.T)  # (n!, 2^n-ish)
    eps = perm_signs[:, None]
    if letter in ("B", "C"):
        eps = eps * pattern_prods[None, :]
    magnitudes = np.exp(exponents)
    signed = math.fsum((eps * magnitudes).ravel().tolist())
    absolute = math.fsum(magnitudes.ravel().tolist())
    return signed, absolute


def _discriminant_value(spec: GroupSpec, v: np.ndarray) -> float:
    """Pi(v) as a product over root forms (one rounding per factor).

    Numerically preferable to evaluating the expanded polynomial, whose
    monomials cancel heavily at spread-out coordinates.
    """
    return math.prod(
        math.fsum(c * x for c, x in zip(root, v) if c)
        for root in positive_roots(spec)
    )


def weyl_sum_integral(
    spec: GroupSpec,
    a: Sequence[float],
    b: Sequence[float],
    rank_cap: int = DEFAULT_RANK_CAP,
) -> IntegralResult:
    """Evaluate the orbit integral by localization over the Weyl group.

    For the two-component orthogonal groups the sum runs over both adjoint
    twists (identity and a_1 -> -a_1) and is averaged, which is the closed
    form of the component decomposition; see :func:`component_integral`.
    """
    if spec.rank > rank_cap:
        raise ValueError(
            f"rank {spec.rank} exceeds the Weyl-sum cap {rank_cap} "
            f"(|W| = {spec.weyl_order}); raise rank_cap to force it"
        )
    return component_integral(spec, component_twists(spec), a, b)


def component_twists(
    spec: GroupSpec,
) -> list[Callable[[tuple], tuple]]:
    """Cartan-level actions of one representative per connected component.

    Connected groups get [identity]; O(2N) and O(2N+1) additionally get the
    reflection a_1 -> -a_1 induced by a determinant -1 representative.
    """

    def identity(h: tuple) -> tuple:
        return tuple(h)

    def flip_first(h: tuple) -> tuple:
        return (-h[0],) + tuple(h[1:])

    if spec.components == 2:
        return [identity, flip_first]
    return [identity]


def component_integral(
    spec: GroupSpec,
    twists: Sequence[Callable[[tuple], tuple]],
    a: Sequence[float],
    b: Sequence[float],
) -> IntegralResult:
    """Average over component twists of the localized integral.

    Each twist is the Cartan-level action of a representative of one
    connected component; the integral over that component equals the Weyl
    sum evaluated at (twist(a), b), normalized by the discriminant at the
    *twisted* point.  The value is the plain average of those per-component
    values.  (Normalizing every summand by the untwisted discriminant
    instead would cancel the components of the odd orthogonal groups
    exactly, since the reflection flips the sign of both the discriminant
    and the alternating sum.)
    """
    if len(twists) != spec.components:
        raise ValueError(
            f"{spec.describe()} has {spec.components} component(s), "
            f"got {len(twists)} twists"
        )
    a_arr = _as_coords(a, "a")
    b_arr = _as_coords(b, "b")
    if len(a_arr) != spec.rank or len(b_arr) != spec.rank:
        raise ValueError(
            f"coordinate lengths {len(a_arr)}, {len(b_arr)} != rank {spec.rank}"
        )
    letter = spec.root_letter
    _require_regular(letter, a_arr, "a")
    _require_regular(letter, b_arr, "b")

    pa_ref = abs(_discriminant_value(spec, a_arr))
    pb = _discriminant_value(spec, b_arr)
    constant = float(localization_constant(spec)) / spec.weyl_order
    values = []
    spreads = []
    for twist in twists:
        ta = np.asarray(twist(tuple(a_arr)), dtype=np.float64)
        if ta.shape != a_arr.shape:
            raise ValueError("twist changed the coordinate arity")
        pa = _discriminant_value(spec, ta)
        if abs(pa) < DEGENERACY_RTOL * pa_ref:
            raise DegenerateSpectrum(
                "a component twist maps a onto a non-regular point"
            )
        signed, absolute = _weyl_sum_parts(spec, ta, b_arr)
        values.append(constant * signed / (pa * pb))
        spreads.append(constant * absolute / abs(pa * pb))
    value = math.fsum(values) / spec.components
    total = math.fsum(values)
    cond = math.fsum(spreads) / abs(total) if total != 0.0 else math.inf
    return IntegralResult(value, EvalMethod.WEYL_SUM, cond)


# ---------------------------------------------------------------------------
# specialized determinant forms


_LEIBNIZ_LIMIT = 8
_RYSER_LIMIT = 14


def _signed_det(m: np.ndarray) -> tuple[float, float]:
    """(det m, sum over permutations of prod |m[i, sigma(i)]|).

    Up to _LEIBNIZ_LIMIT the determinant is the compensated sum of the n!
    signed Leibniz products, which is accurate to entry rounding times the
    cancellation ratio; LU factorization can lose six or more digits here
    because the cosh/sinh/exp matrices are exponentially graded.  Larger
    matrices fall back to LU (np.linalg.det), with the absolute term sum
    from Ryser's formula, or its row-sum upper bound past _RYSER_LIMIT.
    """
    n = m.shape[0]
    if n <= _LEIBNIZ_LIMIT:
        perms, _, signs = _perm_arrays(n)
        products = np.prod(m[np.arange(n)[None, :], perms], axis=1)
        det = math.fsum(signs * products)
        spread = math.fsum(map(abs, products))
        return det, spread
    det = float(np.linalg.det(m))
    a = np.abs(m)
    if n > _RYSER_LIMIT:
        return det, float(np.prod(a.sum(axis=1)))
    total = 0.0
    for mask in range(1, 1 << n):
        cols = [j for j in range(n) if mask >> j & 1]
        prod = float(np.prod(a[:, cols].sum(axis=1)))
        total += (-1) ** (n - len(cols)) * prod
    return det, abs(total)


def _vandermonde(values: np.ndarray) -> float:
    out = 1.0
    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            out *= values[i] - values[j]
    return out


def _det_result(value: float, numerator_terms: float, numerator: float) -> IntegralResult:
    cond = numerator_terms / abs(numerator) if numerator != 0.0 else math.inf
    return IntegralResult(value, EvalMethod.DETERMINANT, cond)


def _factorial_prefactor(n: int, step: int, power_of_two: int) -> float:
    """prod_{p=1}^{n-1} (step*p [+1 if step==2 and odd])! / 2^power_of_two."""
    # step encodes the family: 1 -> p!, 2 -> (2p)!, 3 -> (2p+1)!.
    acc = Fraction(1)
    for p in range(1, n):
        if step == 1:
            acc *= math.factorial(p)
        elif step == 2:
            acc *= math.factorial(2 * p)
        else:
            acc *= math.factorial(2 * p + 1)
    return float(acc / Fraction(2**power_of_two))


def hciz(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """The unitary-group integral: det(exp(a_i b_j)) over Vandermondes.

    value = (prod_{p=1}^{N-1} p!) det[exp(a_i b_j)] / (Delta(a) Delta(b)).
    Input coordinates may be unsorted; determinant and Vandermonde sign flips
    cancel.  Raises DegenerateSpectrum on (nearly) coincident coordinates.
    """
    a_arr = _as_coords(a, "a")
    b_arr = _as_coords(b, "b")
    if len(a_arr) != len(b_arr):
        raise ValueError("a and b must have equal length")
    _require_regular("A", a_arr, "a")
    _require_regular("A", b_arr, "b")
    n = len(a_arr)
    m = np.exp(np.outer(a_arr, b_arr))
    det, spread = _signed_det(m)
    value = _factorial_prefactor(n, 1, 0) * det / (
        _vandermonde(a_arr) * _vandermonde(b_arr)
    )
    return _det_result(value, spread, det)


def su_integral(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """SU(N) integral: identical to the U(N) form, traceless or not."""
    return hciz(a, b)


def so_even(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """SO(2N) integral: (det cosh + det sinh) over squared Vandermondes.

    value = prod_{p=1}^{N-1} (2p)! / 2^(N^2-N)
            * (det[cosh(2 a_j b_k)] + det[sinh(2 a_j b_k)])
            / (Delta(a^(2)) Delta(b^(2)))

    where v^(2) squares coordinatewise.  Requires N >= 2 and squared
    coordinates pairwise distinct (a_i = +-a_j is degenerate).
    """
    a_arr, b_arr = _so_inputs(a, b, "D")
    n = len(a_arr)
    mc = np.cosh(2.0 * np.outer(a_arr, b_arr))
    ms = np.sinh(2.0 * np.outer(a_arr, b_arr))
    det_c, spread_c = _signed_det(mc)
    det_s, spread_s = _signed_det(ms)
    numerator = det_c + det_s
    value = (
        _factorial_prefactor(n, 2, n * n - n)
        * numerator
        / (_vandermonde(a_arr**2) * _vandermonde(b_arr**2))
    )
    return _det_result(value, spread_c + spread_s, numerator)


def o_even(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """O(2N) integral: the cosh determinant alone.

    Averaging the two components of O(2N) extends the sign-flip sum over all
    patterns, which drops the sinh determinant from the SO(2N) form.
    """
    a_arr, b_arr = _so_inputs(a, b, "D")
    n = len(a_arr)
    mc = np.cosh(2.0 * np.outer(a_arr, b_arr))
    det_c, spread_c = _signed_det(mc)
    value = (
        _factorial_prefactor(n, 2, n * n - n)
        * det_c
        / (_vandermonde(a_arr**2) * _vandermonde(b_arr**2))
    )
    return _det_result(value, spread_c, det_c)


def _sinh_form(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """Shared core of so_odd / o_odd / usp (their values coincide)."""
    a_arr, b_arr = _so_inputs(a, b, "B")
    n = len(a_arr)
    ms = np.sinh(2.0 * np.outer(a_arr, b_arr))
    det_s, spread_s = _signed_det(ms)
    value = (
        _factorial_prefactor(n, 3, n * n)
        * det_s
        / (
            _vandermonde(a_arr**2)
            * _vandermonde(b_arr**2)
            * float(np.prod(a_arr) * np.prod(b_arr))
        )
    )
    return _det_result(value, spread_s, det_s)


def so_odd(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """SO(2N+1) integral: sinh determinant over squared Vandermondes.

    value = prod_{p=1}^{N-1} (2p+1)! / 2^(N^2)
            * det[sinh(2 a_j b_k)]
            / (Delta(a^(2)) Delta(b^(2)) prod_i a_i b_i)

    Requires all coordinates nonzero on top of the regular-spectrum rule.
    """
    return _sinh_form(a, b)


def o_odd(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """O(2N+1) integral; both components contribute equally, so this is
    identical to the SO(2N+1) form."""
    return _sinh_form(a, b)


def usp(a: Sequence[float], b: Sequence[float]) -> IntegralResult:
    """USp(N) integral.

    The C root system rescales the discriminant by 2^N relative to B, but
    the factor enters the constant and the Vandermonde product squared alike
    and cancels, leaving exactly the odd orthogonal expression.
    """
    return _sinh_form(a, b)


def _so_inputs(
    a: Sequence[float], b: Sequence[float], letter: str
) -> tuple[np.ndarray, np.ndarray]:
    a_arr = _as_coords(a, "a")
    b_arr = _as_coords(b, "b")
    if len(a_arr) != len(b_arr):
        raise ValueError("a and b must have equal length")
    if letter == "D" and len(a_arr) < 2:
        raise ValueError("even orthogonal groups need rank >= 2")
    _require_regular(letter, a_arr, "a")
    _require_regular(letter, b_arr, "b")
    return a_arr, b_arr


_DET_DISPATCH = {
    Family.UNITARY_A: hciz,
    Family.SPECIAL_UNITARY_A: su_integral,
    Family.SPECIAL_ORTHOGONAL_EVEN_D: so_even,
    Family.ORTHOGONAL_EVEN_D: o_even,
    Family.SPECIAL_ORTHOGONAL_ODD_B: so_odd,
    Family.ORTHOGONAL_ODD_B: o_odd,
    Family.SYMPLECTIC_C: usp,
}


def determinant_integral(
    spec: GroupSpec, a: Sequence[float], b: Sequence[float]
) -> IntegralResult:
    """Route to the family's determinant form."""
    return _DET_DISPATCH[spec.family](a, b)
