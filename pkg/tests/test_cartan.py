import itertools
import math

import numpy as np
import pytest

from orbitint import Family, GroupSpec, WeylElement
from orbitint.cartan import (
    embed_cartan,
    embed_weyl,
    pairing_exponent,
    positive_roots,
    weyl_apply,
    weyl_elements,
    weyl_sign,
)

from conftest import ALL_FAMILIES, specs_up_to

U = Family.UNITARY_A
SU = Family.SPECIAL_UNITARY_A
SO_EVEN = Family.SPECIAL_ORTHOGONAL_EVEN_D
SO_ODD = Family.SPECIAL_ORTHOGONAL_ODD_B
SP = Family.SYMPLECTIC_C


# ---------------------------------------------------------------------------
# GroupSpec


def test_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec(U, 0)
    with pytest.raises(ValueError):
        GroupSpec(SO_EVEN, 1)  # rank-1 even orthogonal is abelian
    with pytest.raises(ValueError):
        GroupSpec(U, 2, components=2)
    assert GroupSpec(Family.ORTHOGONAL_EVEN_D, 2).components == 2
    assert GroupSpec(Family.ORTHOGONAL_ODD_B, 1).components == 2
    assert GroupSpec(SP, 3).components == 1


def test_spec_dimensions():
    assert GroupSpec(U, 3).matrix_dim == 3
    assert GroupSpec(SO_EVEN, 2).matrix_dim == 4
    assert GroupSpec(SO_ODD, 2).matrix_dim == 5
    assert GroupSpec(SP, 2).matrix_dim == 4
    assert GroupSpec(SO_ODD, 2).describe() == "SO(5)"
    assert GroupSpec(Family.ORTHOGONAL_EVEN_D, 3).describe() == "O(6)"


# ---------------------------------------------------------------------------
# positive roots


def test_positive_roots_examples():
    assert positive_roots(GroupSpec(U, 2)) == [(1, -1)]
    assert positive_roots(GroupSpec(SO_EVEN, 2)) == [(1, -1), (1, 1)]
    assert positive_roots(GroupSpec(SP, 1)) == [(2,)]
    assert positive_roots(GroupSpec(SO_ODD, 2)) == [
        (1, -1),
        (1, 1),
        (1, 0),
        (0, 1),
    ]


@pytest.mark.parametrize("spec", specs_up_to(6), ids=lambda s: s.describe())
def test_positive_root_counts(spec):
    roots = positive_roots(spec)
    assert len(roots) == spec.num_positive_roots
    assert all(len(r) == spec.rank for r in roots)
    assert all(any(c != 0 for c in r) for r in roots)
    assert all(all(c in (-2, -1, 0, 1, 2) for c in r) for r in roots)


# ---------------------------------------------------------------------------
# Weyl enumeration and signs


def test_weyl_counts_examples():
    assert sum(1 for _ in weyl_elements(GroupSpec(U, 3))) == 6
    assert sum(1 for _ in weyl_elements(GroupSpec(SO_EVEN, 2))) == 4
    assert sum(1 for _ in weyl_elements(GroupSpec(SO_ODD, 2))) == 8


@pytest.mark.parametrize("spec", specs_up_to(6), ids=lambda s: s.describe())
def test_weyl_enumeration_complete(spec):
    elems = list(weyl_elements(spec))
    assert len(elems) == spec.weyl_order
    assert len({(w.perm, w.signs) for w in elems}) == len(elems)
    assert elems[0] == WeylElement.identity(spec.rank)


def test_weyl_enumeration_order_d2():
    elems = list(weyl_elements(GroupSpec(SO_EVEN, 2)))
    assert [(w.perm, w.signs) for w in elems] == [
        ((0, 1), (1, 1)),
        ((0, 1), (-1, -1)),
        ((1, 0), (1, 1)),
        ((1, 0), (-1, -1)),
    ]


def test_weyl_sign_examples():
    spec_a = GroupSpec(U, 3)
    assert weyl_sign(WeylElement.identity(3), spec_a) == 1
    assert weyl_sign(WeylElement((1, 0, 2), (1, 1, 1)), spec_a) == -1
    spec_b = GroupSpec(SO_ODD, 3)
    assert weyl_sign(WeylElement((0, 1, 2), (-1, 1, 1)), spec_b) == -1
    # D ignores (even) sign flips in the character
    spec_d = GroupSpec(SO_EVEN, 2)
    assert weyl_sign(WeylElement((0, 1), (-1, -1)), spec_d) == 1


@pytest.mark.parametrize("spec", specs_up_to(3), ids=lambda s: s.describe())
def test_weyl_sign_homomorphism(spec):
    elems = list(weyl_elements(spec))
    for w1 in elems:
        for w2 in elems:
            w = w1.compose(w2)
            assert weyl_sign(w, spec) == weyl_sign(w1, spec) * weyl_sign(w2, spec)


@pytest.mark.parametrize("spec", specs_up_to(3), ids=lambda s: s.describe())
def test_weyl_apply_composition(spec, rng):
    h = tuple(rng.uniform(-1, 1, size=spec.rank))
    elems = list(weyl_elements(spec))
    for w1, w2 in itertools.product(elems[:8], elems[:8]):
        lhs = weyl_apply(w1, weyl_apply(w2, h))
        rhs = weyl_apply(w1.compose(w2), h)
        assert lhs == rhs


def test_weyl_apply_examples():
    ident = WeylElement.identity(2)
    assert weyl_apply(ident, (1.0, 2.0)) == (1.0, 2.0)
    swap = WeylElement((1, 0), (1, 1))
    assert weyl_apply(swap, (1.0, 2.0)) == (2.0, 1.0)
    flip = WeylElement((0, 1), (-1, 1))
    assert weyl_apply(flip, (1.0, 2.0)) == (-1.0, 2.0)


def test_weyl_inverse():
    for spec in specs_up_to(3):
        for w in weyl_elements(spec):
            assert w.compose(w.inverse()) == WeylElement.identity(spec.rank)


# ---------------------------------------------------------------------------
# pairing exponent


def test_pairing_exponent_examples():
    ident2 = WeylElement.identity(2)
    assert pairing_exponent(GroupSpec(U, 2), (1, 0), ident2, (1, 0)) == 1.0
    assert pairing_exponent(GroupSpec(SO_EVEN, 2), (1, 0), ident2, (1, 0)) == 2.0
    flip = WeylElement((0, 1), (-1, 1))
    assert pairing_exponent(GroupSpec(SO_ODD, 2), (1, 1), flip, (1, 1)) == 0.0


@pytest.mark.parametrize("spec", specs_up_to(3), ids=lambda s: s.describe())
def test_pairing_exponent_ad_invariance(spec, rng):
    a = tuple(rng.uniform(-1, 1, size=spec.rank))
    b = tuple(rng.uniform(-1, 1, size=spec.rank))
    ident = WeylElement.identity(spec.rank)
    for w in weyl_elements(spec):
        direct = pairing_exponent(spec, a, w, b)
        moved = pairing_exponent(spec, weyl_apply(w, a), ident, b)
        assert direct == moved


# ---------------------------------------------------------------------------
# embeddings


def test_embed_cartan_examples():
    spec = GroupSpec(U, 2)
    assert np.allclose(embed_cartan(spec, (1.5, -2.0)), np.diag([1.5, -2.0]))
    spec_c = GroupSpec(SP, 1)
    assert np.allclose(embed_cartan(spec_c, (0.7,)), np.diag([0.7, -0.7]))
    for fam in ALL_FAMILIES:
        spec = GroupSpec(fam, 2)
        assert np.count_nonzero(embed_cartan(spec, (0.0, 0.0))) == 0


@pytest.mark.parametrize("spec", specs_up_to(4), ids=lambda s: s.describe())
def test_embed_cartan_trace_calibration(spec, rng):
    """trace(embed(a) embed(b)) must reproduce the exponent pairing."""
    ident = WeylElement.identity(spec.rank)
    for _ in range(5):
        a = tuple(rng.uniform(-1, 1, size=spec.rank))
        b = tuple(rng.uniform(-1, 1, size=spec.rank))
        tr = complex(np.trace(embed_cartan(spec, a) @ embed_cartan(spec, b)))
        assert abs(tr.imag) < 1e-14
        assert math.isclose(
            tr.real, pairing_exponent(spec, a, ident, b), rel_tol=0, abs_tol=1e-12
        )


def test_embed_weyl_examples():
    spec = GroupSpec(U, 2)
    assert np.array_equal(
        embed_weyl(spec, WeylElement.identity(2)), np.eye(2)
    )
    assert np.array_equal(
        embed_weyl(spec, WeylElement((1, 0), (1, 1))),
        np.array([[0.0, 1.0], [1.0, 0.0]]),
    )
    q2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    both_flipped = embed_weyl(
        GroupSpec(SO_EVEN, 2), WeylElement((0, 1), (-1, -1))
    )
    expected = np.zeros((4, 4))
    expected[:2, :2] = q2
    expected[2:, 2:] = q2
    assert np.array_equal(both_flipped, expected)


def test_embed_weyl_rejects_odd_d_signs():
    with pytest.raises(ValueError):
        embed_weyl(GroupSpec(SO_EVEN, 2), WeylElement((0, 1), (-1, 1)))
    with pytest.raises(ValueError):
        embed_weyl(GroupSpec(U, 2), WeylElement((0, 1), (-1, 1)))


@pytest.mark.parametrize("spec", specs_up_to(4), ids=lambda s: s.describe())
def test_embed_conjugation_identity(spec, rng):
    h = tuple(rng.uniform(-1, 1, size=spec.rank))
    mat_h = embed_cartan(spec, h)
    for w in weyl_elements(spec):
        g = embed_weyl(spec, w)
        lhs = g @ mat_h @ np.linalg.inv(g)
        rhs = embed_cartan(spec, weyl_apply(w, h))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


@pytest.mark.parametrize("spec", specs_up_to(3), ids=lambda s: s.describe())
def test_embed_weyl_group_membership(spec):
    m = spec.matrix_dim
    letter = spec.root_letter
    if letter == "C":
        j = np.zeros((m, m))
        j[: m // 2, m // 2 :] = np.eye(m // 2)
        j[m // 2 :, : m // 2] = -np.eye(m // 2)
    for w in weyl_elements(spec):
        g = embed_weyl(spec, w)
        assert np.max(np.abs(g.T @ g - np.eye(m))) < 1e-12
        if spec.family in (SU, SO_EVEN, SO_ODD):
            assert abs(np.linalg.det(g) - 1.0) < 1e-12
        if letter == "C":
            assert np.max(np.abs(g @ j @ g.T - j)) < 1e-12
