"""Exact sparse multivariate polynomials over the Cartan coordinates.

Coefficients are Python integers (arbitrary precision) throughout expansion
and pairing; floating point enters only at :meth:`SparsePolynomial.evaluate`.
The differential pairing

    pair(p, q) = p(d/dx) q |_{x=0} = sum_beta p_beta q_beta beta!

is the workhorse: applied to the discriminant (the product of the positive
roots) it produces the normalization constants of the localization formula,
which grow as products of factorials and must match closed forms exactly.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .cartan import GroupSpec, RootCovector, positive_roots

__all__ = [
    "MultiIndex",
    "SparsePolynomial",
    "expand_linear_forms",
    "pairing",
    "apply_differential",
    "discriminant",
    "discriminant_norm",
    "sum_of_squares",
]

MultiIndex = tuple[int, ...]


def _grlex_key(beta: MultiIndex) -> tuple:
    return (sum(beta), beta)


class SparsePolynomial:
    """Multivariate polynomial as a map multi-index -> exact coefficient.

    Zero coefficients are never stored; all multi-indices have length
    ``nvars``.  Instances are immutable in practice (the term dict is private
    and never mutated after construction).
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[MultiIndex, int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be >= 0")
        self.nvars = nvars
        clean: dict[MultiIndex, int] = {}
        for beta, coeff in (terms or {}).items():
            beta = tuple(int(e) for e in beta)
            if len(beta) != nvars:
                raise ValueError(f"multi-index {beta} has wrong arity for nvars={nvars}")
            if any(e < 0 for e in beta):
                raise ValueError(f"negative exponent in {beta}")
            if coeff != 0:
                clean[beta] = clean.get(beta, 0) + coeff
                if clean[beta] == 0:
                    del clean[beta]
        self._terms = clean

    # -- constructors -----------------------------------------------------

    @staticmethod
    def constant(nvars: int, value: int) -> "SparsePolynomial":
        if value == 0:
            return SparsePolynomial(nvars)
        return SparsePolynomial(nvars, {(0,) * nvars: value})

    @staticmethod
    def variable(nvars: int, index: int) -> "SparsePolynomial":
        beta = [0] * nvars
        beta[index] = 1
        return SparsePolynomial(nvars, {tuple(beta): 1})

    @staticmethod
    def from_covector(nvars: int, coeffs: Sequence[int]) -> "SparsePolynomial":
        """The linear form sum_i coeffs[i] x_i."""
        if len(coeffs) != nvars:
            raise ValueError("covector arity mismatch")
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                beta = [0] * nvars
                beta[i] = 1
                terms[tuple(beta)] = int(c)
        return SparsePolynomial(nvars, terms)

    # -- inspection --------------------------------------------------------

    def items(self) -> list[tuple[MultiIndex, int]]:
        """Terms in graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def coefficient(self, beta: MultiIndex) -> int:
        return self._terms.get(tuple(beta), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((sum(b) for b in self._terms), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if self.is_zero():
            return "SparsePolynomial(0)"
        parts = []
        for beta, coeff in self.items()[:8]:
            mono = "*".join(
                f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(beta) if e
            )
            parts.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        tail = " + ..." if len(self) > 8 else ""
        return f"SparsePolynomial({' + '.join(parts)}{tail})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_arity(other)
        terms = dict(self._terms)
        for beta, coeff in other._terms.items():
            terms[beta] = terms.get(beta, 0) + coeff
        return SparsePolynomial(self.nvars, terms)

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(
            self.nvars, {b: -c for b, c in self._terms.items()}
        )

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other) -> "SparsePolynomial":
        if isinstance(other, int):
            return SparsePolynomial(
                self.nvars, {b: c * other for b, c in self._terms.items()}
            )
        self._check_arity(other)
        prod: dict[MultiIndex, int] = {}
        for b1, c1 in self._terms.items():
            for b2, c2 in other._terms.items():
                beta = tuple(e1 + e2 for e1, e2 in zip(b1, b2))
                prod[beta] = prod.get(beta, 0) + c1 * c2
        return SparsePolynomial(self.nvars, prod)

    __rmul__ = __mul__

    def _check_arity(self, other: "SparsePolynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, h: Sequence) -> float:
        """Sum of coeff * h^beta by direct summation.

        Arithmetic follows the type of ``h``: floats give a float, ints or
        fractions.Fraction give an exact result.
        """
        if len(h) != self.nvars:
            raise ValueError(f"point arity {len(h)} != nvars {self.nvars}")
        total = 0
        for beta, coeff in self._terms.items():
            term = coeff
            for x, e in zip(h, beta):
                if e:
                    term = term * x**e
            total = total + term
        return total

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON form {nvars, terms: [{exponents, coeff}]}.

        Coefficients are decimal strings so arbitrarily large integers
        survive the round trip bit-exactly.
        """
        return {
            "nvars": self.nvars,
            "terms": [
                {"exponents": list(beta), "coeff": str(coeff)}
                for beta, coeff in self.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(data: Mapping) -> "SparsePolynomial":
        terms = {
            tuple(t["exponents"]): int(t["coeff"]) for t in data["terms"]
        }
        return SparsePolynomial(int(data["nvars"]), terms)

    @staticmethod
    def from_json(text: str) -> "SparsePolynomial":
        return SparsePolynomial.from_json_dict(json.loads(text))


def expand_linear_forms(
    roots: Sequence[RootCovector | Sequence[int]],
) -> SparsePolynomial:
    """Exact expansion of the product of linear forms prod_i <roots[i], x>.

    An empty list gives the constant polynomial 1 (with arity taken as 0 in
    that case, since there is nothing to infer it from).
    """
    if not roots:
        return SparsePolynomial.constant(0, 1)
    nvars = len(roots[0])
    if any(len(r) != nvars for r in roots):
        raise ValueError("covectors have mixed arity")
    acc = SparsePolynomial.constant(nvars, 1)
    for r in roots:
        acc = acc * SparsePolynomial.from_covector(nvars, r)
    return acc


def pairing(p: SparsePolynomial, q: SparsePolynomial) -> int:
    """sum_beta p_beta q_beta beta! in exact integer arithmetic."""
    p._check_arity(q)
    total = 0
    small, large = (p, q) if len(p) <= len(q) else (q, p)
    for beta, c1 in small._terms.items():
        c2 = large._terms.get(beta)
        if c2 is not None:
            total += c1 * c2 * _multi_factorial(beta)
    return total


def _multi_factorial(beta: MultiIndex) -> int:
    out = 1
    for e in beta:
        out *= math.factorial(e)
    return out


def apply_differential(p: SparsePolynomial, q: SparsePolynomial) -> SparsePolynomial:
    """The polynomial p(d/dx) q.

    Its constant term (value at 0) equals pairing(p, q).
    """
    p._check_arity(q)
    out: dict[MultiIndex, int] = {}
    for alpha, ca in p._terms.items():
        for beta, cb in q._terms.items():
            if any(a > b for a, b in zip(alpha, beta)):
                continue
            coeff = ca * cb
            for a, b in zip(alpha, beta):
                if a:
                    coeff *= math.factorial(b) // math.factorial(b - a)
            gamma = tuple(b - a for a, b in zip(alpha, beta))
            out[gamma] = out.get(gamma, 0) + coeff
    return SparsePolynomial(p.nvars, out)


@lru_cache(maxsize=None)
def discriminant(spec: GroupSpec) -> SparsePolynomial:
    """Product of the positive roots, expanded exactly.

    For the C family the long roots 2 e_i contribute an overall factor 2^N.
    """
    roots = positive_roots(spec)
    if not roots:
        return SparsePolynomial.constant(spec.rank, 1)
    return expand_linear_forms(roots)


def discriminant_norm(spec: GroupSpec) -> int:
    """pairing(Pi, Pi): the exact factorial-product normalization constant."""
    pi = discriminant(spec)
    return pairing(pi, pi)


def sum_of_squares(nvars: int) -> SparsePolynomial:
    """sum_i x_i^2, whose differential operator is the Laplacian."""
    return SparsePolynomial(
        nvars,
        {tuple(2 if j == i else 0 for j in range(nvars)): 1 for i in range(nvars)},
    )
