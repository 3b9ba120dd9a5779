"""Root systems, Weyl groups and matrix realizations for the classical families.

Everything downstream is keyed on a :class:`GroupSpec`, which names one of the
compact classical families together with its rank N:

====================  ============  =====  ==============
family                root system   rank   defining matrix
====================  ============  =====  ==============
UNITARY_A             A_{N-1}       N>=1   N x N
SPECIAL_UNITARY_A     A_{N-1}       N>=1   N x N
SPECIAL_ORTHOGONAL_EVEN_D  D_N      N>=2   2N x 2N
ORTHOGONAL_EVEN_D     D_N           N>=2   2N x 2N (two components)
SPECIAL_ORTHOGONAL_ODD_B   B_N      N>=1   (2N+1) x (2N+1)
ORTHOGONAL_ODD_B      B_N           N>=1   (2N+1) x (2N+1) (two components)
SYMPLECTIC_C          C_N           N>=1   2N x 2N complex
====================  ============  =====  ==============

Cartan elements are given by their coefficient tuple (a_1, ..., a_N) in the
standard basis of the Cartan subalgebra.  The basis used by
:func:`embed_cartan` is scaled so that

    trace(embed(a) @ embed(b)) == pairing_exponent(spec, a, identity, b)

which is the bilinear form the closed-form evaluators and the Monte Carlo
oracle share.  For the A family that form is sum(a_j b_j); for B, C and D it
carries a factor 2 because the natural basis vectors of those Cartan
subalgebras have squared trace norm 2.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Family",
    "GroupSpec",
    "WeylElement",
    "CartanVector",
    "RootCovector",
    "positive_roots",
    "weyl_elements",
    "weyl_sign",
    "weyl_apply",
    "pairing_exponent",
    "embed_cartan",
    "embed_weyl",
]

# Cartan coordinates and root covectors are plain tuples; operations validate
# lengths against the GroupSpec they are used with.
CartanVector = tuple[float, ...]
RootCovector = tuple[int, ...]


class Family(enum.Enum):
    """Compact classical group family."""

    UNITARY_A = "U"
    SPECIAL_UNITARY_A = "SU"
    SPECIAL_ORTHOGONAL_EVEN_D = "SO_even"
    ORTHOGONAL_EVEN_D = "O_even"
    SPECIAL_ORTHOGONAL_ODD_B = "SO_odd"
    ORTHOGONAL_ODD_B = "O_odd"
    SYMPLECTIC_C = "USp"


_A_FAMILIES = (Family.UNITARY_A, Family.SPECIAL_UNITARY_A)
_D_FAMILIES = (Family.SPECIAL_ORTHOGONAL_EVEN_D, Family.ORTHOGONAL_EVEN_D)
_B_FAMILIES = (Family.SPECIAL_ORTHOGONAL_ODD_B, Family.ORTHOGONAL_ODD_B)
_TWO_COMPONENT = (Family.ORTHOGONAL_EVEN_D, Family.ORTHOGONAL_ODD_B)


@dataclass(frozen=True)
class GroupSpec:
    """A compact classical group: family plus rank (plus component count).

    ``components`` is derived from the family (2 for the full orthogonal
    groups O(2N) and O(2N+1), 1 otherwise) and may not be overridden to an
    inconsistent value.
    """

    family: Family
    rank: int
    components: int = field(default=0)

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if self.family in _D_FAMILIES and self.rank < 2:
            raise ValueError(
                f"{self.family.value} requires rank >= 2 "
                f"(rank-1 even orthogonal groups are abelian)"
            )
        expected = 2 if self.family in _TWO_COMPONENT else 1
        if self.components == 0:
            object.__setattr__(self, "components", expected)
        elif self.components != expected:
            raise ValueError(
                f"components must be {expected} for {self.family.value}, "
                f"got {self.components}"
            )

    @property
    def root_letter(self) -> str:
        """Root-system letter: one of 'A', 'B', 'C', 'D'."""
        if self.family in _A_FAMILIES:
            return "A"
        if self.family in _B_FAMILIES:
            return "B"
        if self.family in _D_FAMILIES:
            return "D"
        return "C"

    @property
    def matrix_dim(self) -> int:
        """Size of the defining matrix representation."""
        letter = self.root_letter
        if letter == "A":
            return self.rank
        if letter == "B":
            return 2 * self.rank + 1
        return 2 * self.rank  # C and D

    @property
    def exponent_factor(self) -> int:
        """Scale of the trace form on Cartan coordinates (1 for A, else 2)."""
        return 1 if self.root_letter == "A" else 2

    @property
    def weyl_order(self) -> int:
        n = self.rank
        letter = self.root_letter
        if letter == "A":
            return math.factorial(n)
        if letter == "D":
            return 2 ** (n - 1) * math.factorial(n)
        return 2**n * math.factorial(n)  # B and C

    @property
    def num_positive_roots(self) -> int:
        n = self.rank
        letter = self.root_letter
        if letter == "A":
            return n * (n - 1) // 2
        if letter == "D":
            return n * n - n
        return n * n  # B and C

    def connected_spec(self) -> "GroupSpec":
        """The identity component (SO for O families, self otherwise)."""
        if self.family is Family.ORTHOGONAL_EVEN_D:
            return GroupSpec(Family.SPECIAL_ORTHOGONAL_EVEN_D, self.rank)
        if self.family is Family.ORTHOGONAL_ODD_B:
            return GroupSpec(Family.SPECIAL_ORTHOGONAL_ODD_B, self.rank)
        return self

    def describe(self) -> str:
        """Display name such as 'U(3)', 'SO(5)', 'USp(2)'."""
        f = self.family
        n = self.rank
        if f is Family.UNITARY_A:
            return f"U({n})"
        if f is Family.SPECIAL_UNITARY_A:
            return f"SU({n})"
        if f is Family.SPECIAL_ORTHOGONAL_EVEN_D:
            return f"SO({2 * n})"
        if f is Family.ORTHOGONAL_EVEN_D:
            return f"O({2 * n})"
        if f is Family.SPECIAL_ORTHOGONAL_ODD_B:
            return f"SO({2 * n + 1})"
        if f is Family.ORTHOGONAL_ODD_B:
            return f"O({2 * n + 1})"
        return f"USp({n})"


@dataclass(frozen=True)
class WeylElement:
    """A signed permutation w = (sigma, eta).

    ``perm[j]`` is sigma(j) (0-indexed images) and ``signs[j]`` is eta(j+1) in
    {+1, -1}.  The action on a coordinate tuple is

        (w . h)_j = signs[j] * h[sigma^{-1}(j)]

    so that composition of elements matches composition of the induced maps.
    Family constraints (all signs +1 for A, an even number of -1 for D) are
    enforced where elements meet a GroupSpec, not at construction.
    """

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError(f"perm is not a permutation of 0..{n - 1}: {self.perm}")
        if len(self.signs) != n:
            raise ValueError("perm and signs must have equal length")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @staticmethod
    def identity(n: int) -> "WeylElement":
        return WeylElement(tuple(range(n)), (1,) * n)

    def compose(self, other: "WeylElement") -> "WeylElement":
        """self o other, acting as maps on coordinate tuples."""
        n = len(self.perm)
        perm = tuple(self.perm[other.perm[j]] for j in range(n))
        inv_self = _inverse_perm(self.perm)
        signs = tuple(self.signs[j] * other.signs[inv_self[j]] for j in range(n))
        return WeylElement(perm, signs)

    def inverse(self) -> "WeylElement":
        inv = _inverse_perm(self.perm)
        signs = tuple(self.signs[self.perm[j]] for j in range(len(self.perm)))
        return WeylElement(inv, signs)

    def apply(self, coords: Sequence[float]) -> tuple:
        if len(coords) != len(self.perm):
            raise ValueError(
                f"coordinate length {len(coords)} != element size {len(self.perm)}"
            )
        out = [0.0] * len(coords)
        for j, image in enumerate(self.perm):
            out[image] = self.signs[image] * coords[j]
        return tuple(out)


def _inverse_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for j, image in enumerate(perm):
        inv[image] = j
    return tuple(inv)


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def positive_roots(spec: GroupSpec) -> list[RootCovector]:
    """Positive roots as integer covectors in the dual Cartan basis.

    A:  e_i - e_j for i < j.
    D:  e_j - e_k and e_j + e_k for j < k.
    B:  the D roots plus the short roots e_i.
    C:  the D roots plus the long roots 2 e_i.

    Pair roots come first in lexicographic (j, k, sign) order with the
    difference before the sum; the single-index roots are appended after.
    """
    n = spec.rank
    letter = spec.root_letter
    roots: list[RootCovector] = []

    def covector(entries: dict[int, int]) -> RootCovector:
        vec = [0] * n
        for idx, c in entries.items():
            vec[idx] = c
        return tuple(vec)

    for j in range(n):
        for k in range(j + 1, n):
            roots.append(covector({j: 1, k: -1}))
            if letter != "A":
                roots.append(covector({j: 1, k: 1}))
    if letter == "B":
        roots.extend(covector({i: 1}) for i in range(n))
    elif letter == "C":
        roots.extend(covector({i: 2}) for i in range(n))
    return roots


def weyl_elements(spec: GroupSpec) -> Iterator[WeylElement]:
    """Enumerate the Weyl group in a fixed, deterministic order.

    Permutations run lexicographically; for each permutation the sign
    patterns count in binary with +1 as the zero digit.  A yields plain
    permutations, D only even numbers of sign flips, B and C all patterns.
    """
    n = spec.rank
    letter = spec.root_letter
    for perm in itertools.permutations(range(n)):
        if letter == "A":
            yield WeylElement(perm, (1,) * n)
            continue
        for signs in itertools.product((1, -1), repeat=n):
            if letter == "D" and math.prod(signs) != 1:
                continue
            yield WeylElement(perm, signs)


def weyl_sign(w: WeylElement, spec: GroupSpec) -> int:
    """The sign character eps(w).

    For A and D this is sgn(sigma); for B and C the coordinate sign flips are
    reflections too, so eps(w) = sgn(sigma) * prod(eta).
    """
    _check_element(w, spec)
    eps = _perm_sign(w.perm)
    if spec.root_letter in ("B", "C"):
        eps *= math.prod(w.signs)
    return eps


def weyl_apply(w: WeylElement, h: Sequence[float]) -> tuple:
    """Apply the signed permutation to a coordinate tuple."""
    return w.apply(h)


def pairing_exponent(
    spec: GroupSpec, a: Sequence[float], w: WeylElement, b: Sequence[float]
) -> float:
    """The bilinear pairing <w(a), b> of the trace form.

    Equals factor * sum_j eta(j) a_{sigma^{-1}(j)} b_j where the factor is 1
    for the A family and 2 for B, C and D, matching
    trace(embed(w(a)) @ embed(b)).
    """
    if len(a) != spec.rank or len(b) != spec.rank:
        raise ValueError(
            f"coordinate lengths {len(a)}, {len(b)} != rank {spec.rank}"
        )
    wa = w.apply(a)
    return spec.exponent_factor * math.fsum(x * y for x, y in zip(wa, b))


def _check_element(w: WeylElement, spec: GroupSpec) -> None:
    if len(w.perm) != spec.rank:
        raise ValueError(f"element size {len(w.perm)} != rank {spec.rank}")
    letter = spec.root_letter
    if letter == "A" and any(s != 1 for s in w.signs):
        raise ValueError("A-family Weyl elements carry no sign flips")
    if letter == "D" and math.prod(w.signs) != 1:
        raise ValueError("D-family Weyl elements need an even number of sign flips")


def embed_cartan(spec: GroupSpec, h: Sequence[float]) -> np.ndarray:
    """Matrix of the Cartan element sum_j h_j e_j in the defining rep.

    Basis vectors by family (m = matrix size):

    * A: e_j = E_jj, so embed(h) = diag(h).
    * B, D: e_j = i (E_{2j-1,2j} - E_{2j,2j-1}), a Hermitian off-diagonal
      block.  The factor is i rather than i/2 so that the trace form equals
      the exponent convention (tr(e_j e_k) = 2 delta_jk) and the associated
      root covectors come out as e_j* +- e_k* (and e_j*) exactly.
    * C: e_j = E_jj - E_{j+N,j+N}, so embed(h) = diag(h, -h).

    Returns a complex array of shape (m, m).
    """
    if len(h) != spec.rank:
        raise ValueError(f"coordinate length {len(h)} != rank {spec.rank}")
    n = spec.rank
    m = spec.matrix_dim
    letter = spec.root_letter
    out = np.zeros((m, m), dtype=np.complex128)
    if letter == "A":
        np.fill_diagonal(out, h)
    elif letter == "C":
        for j in range(n):
            out[j, j] = h[j]
            out[j + n, j + n] = -h[j]
    else:  # B, D
        for j in range(n):
            out[2 * j, 2 * j + 1] = 1j * h[j]
            out[2 * j + 1, 2 * j] = -1j * h[j]
    return out


_Q2 = np.array([[0.0, 1.0], [1.0, 0.0]])
_I2 = np.eye(2)


def embed_weyl(spec: GroupSpec, w: WeylElement) -> np.ndarray:
    """A group element realizing w by conjugation on embedded Cartan elements.

    Satisfies embed_weyl(w) @ embed_cartan(h) @ embed_weyl(w)^{-1}
    == embed_cartan(weyl_apply(w, h)) to machine precision.  Raises if w
    violates the family constraint (e.g. an odd sign pattern for D).
    """
    _check_element(w, spec)
    n = spec.rank
    letter = spec.root_letter

    if letter == "A":
        p = np.zeros((n, n))
        for j, image in enumerate(w.perm):
            p[image, j] = 1.0
        if spec.family is Family.SPECIAL_UNITARY_A and _perm_sign(w.perm) < 0:
            # Fold the -1 determinant into a column so the element stays in SU(N).
            p[:, 0] *= -1.0
        return p

    if letter in ("B", "D"):
        m = spec.matrix_dim
        out = np.zeros((m, m))
        for j, image in enumerate(w.perm):
            block = _I2 if w.signs[image] == 1 else _Q2
            out[2 * image : 2 * image + 2, 2 * j : 2 * j + 2] = block
        if letter == "B":
            # Bottom-right entry restores unit determinant.
            out[m - 1, m - 1] = math.prod(w.signs)
        return out

    # C: block permutation acting on both halves, then a quaternionic
    # rotation in the (i, i+N) plane for each sign flip.
    p = np.zeros((2 * n, 2 * n))
    for j, image in enumerate(w.perm):
        p[image, j] = 1.0
        p[image + n, j + n] = 1.0
    for i in range(n):
        if w.signs[i] == -1:
            r = np.eye(2 * n)
            r[i, i] = 0.0
            r[i + n, i + n] = 0.0
            r[i, i + n] = 1.0
            r[i + n, i] = -1.0
            p = r @ p
    return p


@lru_cache(maxsize=None)
def weyl_action_arrays(
    spec: GroupSpec,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized form of the Weyl enumeration, in enumeration order.

    Returns (source, signs, eps) where for element k the action on
    coordinates a is signs[k] * a[source[k]], and eps[k] is its sign
    character.  Used by the closed-form evaluators to keep the alternating
    sum deterministic and fast.
    """
    source = []
    signs = []
    eps = []
    for w in weyl_elements(spec):
        inv = _inverse_perm(w.perm)
        source.append(inv)
        signs.append(w.signs)
        eps.append(weyl_sign(w, spec))
    return (
        np.array(source, dtype=np.intp),
        np.array(signs, dtype=np.float64),
        np.array(eps, dtype=np.float64),
    )
