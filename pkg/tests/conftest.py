import numpy as np
import pytest

from orbitint import Family, GroupSpec

ALL_FAMILIES = [
    Family.UNITARY_A,
    Family.SPECIAL_UNITARY_A,
    Family.SPECIAL_ORTHOGONAL_EVEN_D,
    Family.ORTHOGONAL_EVEN_D,
    Family.SPECIAL_ORTHOGONAL_ODD_B,
    Family.ORTHOGONAL_ODD_B,
    Family.SYMPLECTIC_C,
]

# One spec per root system letter (the connected representative).
LETTER_FAMILIES = {
    "A": Family.UNITARY_A,
    "B": Family.SPECIAL_ORTHOGONAL_ODD_B,
    "C": Family.SYMPLECTIC_C,
    "D": Family.SPECIAL_ORTHOGONAL_EVEN_D,
}


def min_rank(family: Family) -> int:
    return 2 if GroupSpec(family, 2).root_letter == "D" else 1


def specs_up_to(max_rank: int, families=None) -> list[GroupSpec]:
    out = []
    for family in families or ALL_FAMILIES:
        for n in range(min_rank(family), max_rank + 1):
            out.append(GroupSpec(family, n))
    return out


def random_regular(rng: np.random.Generator, spec: GroupSpec, margin=5e-2):
    """Coordinates in [0.1, 1] that are safely regular for the family.

    Enforces a generous minimum gap; note the alternating sums still cancel
    heavily at this scale for rank >= 4 (see random_spread).
    """
    letter = spec.root_letter
    n = spec.rank
    while True:
        v = rng.uniform(0.1, 1.0, size=n)
        key = v if letter == "A" else v * v
        gaps = [abs(key[i] - key[j]) for i in range(n) for j in range(i + 1, n)]
        if gaps and min(gaps) < margin:
            continue
        return tuple(v)


def random_spread(rng: np.random.Generator, spec: GroupSpec, scale=1.0):
    """Well-conditioned regular coordinates: a jittered geometric ladder.

    Separating the coordinates multiplicatively keeps the Weyl sums'
    cancellation (condition estimate) low even at rank 5, which the
    evaluator-equivalence tests need.
    """
    n = spec.rank
    exponents = np.arange(n) + rng.uniform(0.0, 0.35, size=n)
    base = scale * 1.6**exponents
    rng.shuffle(base)
    return tuple(float(x) for x in base)


def rel_err(x: float, y: float) -> float:
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
