"""Graded sl2 content of nilradicals and the resulting normalizing data."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import sympy

from ..laurent import LaurentFraction, X
from ..local_factors import unramified_L, unramified_gamma
from .roots import RootSystem


@dataclass(frozen=True)
class NilradicalRoot:
    root: tuple
    grade: int
    eigenvalue: int


@dataclass(frozen=True)
class ParabolicDatum:
    """Maximal parabolic of a root system at a 1-based Bourbaki node."""

    system: RootSystem
    node: int

    def __post_init__(self):
        if not 1 <= self.node <= self.system.rank:
            raise ValueError(f"node {self.node} out of range for {self.system.label}")

    @property
    def beta(self) -> int:
        return self.node - 1

    @cached_property
    def levi_positive_roots(self) -> tuple:
        return tuple(r for r in self.system.positive_roots if r[self.beta] == 0)

    @cached_property
    def h_vector(self) -> tuple:
        """Sum of positive coroots of the Levi, in the simple-coroot basis."""
        total = [Fraction(0)] * self.system.rank
        for d in self.levi_positive_roots:
            for i, c in enumerate(self.system.coroot_coefficients(d)):
                total[i] += c
        return tuple(total)

    def eigenvalue(self, gamma) -> int:
        """<gamma, sum of positive Levi coroots>."""
        val = sum((c * self.system.simple_pairing(gamma, i) for i, c in enumerate(self.h_vector) if c),
                  Fraction(0))
        if val.denominator != 1:
            raise ArithmeticError("non-integral h-eigenvalue")
        return int(val)

    @cached_property
    def nilradical(self) -> tuple:
        out = []
        for r in self.system.positive_roots:
            if r[self.beta] > 0:
                out.append(NilradicalRoot(r, r[self.beta], self.eigenvalue(r)))
        return tuple(out)

    def grade_dimensions(self) -> dict:
        return dict(sorted(Counter(r.grade for r in self.nilradical).items()))

    def eigenvalues_by_grade(self) -> dict:
        out: dict[int, list] = {}
        for r in self.nilradical:
            out.setdefault(r.grade, []).append(r.eigenvalue)
        return {g: sorted(v, reverse=True) for g, v in sorted(out.items())}


def build_parabolic(kind: str, rank: int | None, node: int) -> ParabolicDatum:
    return ParabolicDatum(RootSystem.of(kind, rank), node)


@dataclass(frozen=True)
class Sl2Content:
    """Per grade, the multiset of highest weights (descending)."""

    grades: dict

    def as_lists(self) -> dict:
        return {int(g): list(v) for g, v in self.grades.items()}


def sl2_decompose(datum: ParabolicDatum) -> Sl2Content:
    """Peel multiplicities: mult(n) = #(eigenvalue n) - #(eigenvalue n + 2)."""
    out = {}
    for grade, values in datum.eigenvalues_by_grade().items():
        count = Counter(values)
        if any(count[e] != count[-e] for e in count):
            raise ArithmeticError(f"asymmetric eigenvalues in grade {grade}")
        weights = []
        for n in sorted((e for e in count if e >= 0), reverse=True):
            mult = count[n] - count[n + 2]
            if mult < 0:
                raise ArithmeticError(f"negative multiplicity in grade {grade}")
            weights.extend([n] * mult)
        if sum(n + 1 for n in weights) != len(values):
            raise ArithmeticError("dimension mismatch after peeling")
        out[grade] = tuple(weights)
    return Sl2Content(out)


def good_order_key(pair) -> tuple:
    s, lam = pair
    return (Fraction(s) / lam, lam, Fraction(s))


@dataclass(frozen=True)
class NormalizingData:
    """Good-ordered parameters (s_i, lambda_i) with s_i in (1/2)Z."""

    pairs: tuple

    @classmethod
    def from_pairs(cls, pairs) -> "NormalizingData":
        pairs = [(Fraction(s), int(lam)) for s, lam in pairs]
        return cls(tuple(sorted(pairs, key=good_order_key)))

    def multiset(self) -> Counter:
        return Counter(self.pairs)

    def is_good_order(self) -> bool:
        ratios = [Fraction(s) / lam for s, lam in self.pairs]
        return all(a <= b for a, b in zip(ratios, ratios[1:]))

    def dualized(self, i: int) -> tuple:
        """L(i): the top i entries replaced by their duals (-1 - s, -lambda)."""
        k = len(self.pairs)
        if not 0 <= i <= k:
            raise ValueError("i out of range")
        return self.pairs[: k - i] + tuple((-1 - s, -lam) for s, lam in self.pairs[k - i:])

    @staticmethod
    def bounds(pairs) -> tuple:
        """(A, B): max s/lambda over lambda > 0 and min over lambda < 0."""
        pos = [Fraction(s) / lam for s, lam in pairs if lam > 0]
        neg = [Fraction(s) / lam for s, lam in pairs if lam < 0]
        a = max(pos) if pos else -math.inf
        b = min(neg) if neg else math.inf
        return a, b

    @property
    def A(self):
        return self.bounds(self.pairs)[0]

    @property
    def B(self):
        return self.bounds(self.pairs)[1]

    def bounds_of_dual(self, i: int) -> tuple:
        return self.bounds(self.dualized(i))

    def a_L(self, eta: int = 1, pairs=None) -> LaurentFraction:
        """prod L(-s_i, chi^{lambda_i}) for chi = eta |.|^s, X = q^{-s}."""
        out = LaurentFraction(1)
        for s, lam in (self.pairs if pairs is None else pairs):
            out = out * unramified_L((eta ** abs(lam)) * X**lam, -s)
        return out

    def mu_L(self, eta: int = 1, pairs=None) -> LaurentFraction:
        """prod gamma(-s_i, chi^{lambda_i}, psi) for chi = eta |.|^s, X = q^{-s}."""
        out = LaurentFraction(1)
        for s, lam in (self.pairs if pairs is None else pairs):
            out = out * unramified_gamma((eta ** abs(lam)) * X**lam, -s)
        return out

    @property
    def last(self) -> tuple:
        return self.pairs[-1]


def normalizing_data(content: Sl2Content) -> NormalizingData:
    pairs = [(Fraction(n, 2), grade) for grade, ws in content.grades.items() for n in ws]
    return NormalizingData.from_pairs(pairs)


def normalizing_data_for(kind: str, rank: int | None, node: int) -> NormalizingData:
    return normalizing_data(sl2_decompose(build_parabolic(kind, rank, node)))


# Group-side labels -> system on which the normalizer runs (the dual side),
# keeping Bourbaki numbering on the target.
def dual_request(kind: str, rank: int, node: int) -> tuple:
    kind = kind.upper()
    if kind in "ADE":
        return kind, rank, node
    if kind == "B":
        return "C", rank, node
    if kind == "C":
        return "B", rank, node
    if kind == "F":
        return "F", 4, 5 - node
    if kind == "G":
        return "G", 2, 3 - node
    raise ValueError(f"unknown Cartan type {kind!r}")


@dataclass(frozen=True)
class DeltaWitness:
    holds: bool
    weight_coordinates: tuple
    r: Fraction
    expected: Fraction


def check_delta_relation(datum: ParabolicDatum, data: NormalizingData) -> DeltaWitness:
    """Sum of nilradical roots of the dual system equals (2 s_k + 2) omega_beta.

    datum is the side on which data was computed; the roots are summed in its
    coroot system (same node labels), and the sum is written in that system's
    fundamental weights.
    """
    dual = datum.system.dual()
    b = datum.beta
    total = [Fraction(0)] * dual.rank
    for r in dual.positive_roots:
        if r[b] > 0:
            for i, c in enumerate(r):
                total[i] += c
    coords = dual.fundamental_weight_coordinates(tuple(total))
    s_k, lam_k = data.last
    expected = 2 * Fraction(s_k) + 2
    r = coords[b]
    others_zero = all(c == 0 for i, c in enumerate(coords) if i != b)
    return DeltaWitness(others_zero and r == expected and lam_k == 1, coords, r, expected)
