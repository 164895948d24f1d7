"""Exact arithmetic on Q_p via rationals, the standard character and Haar measures."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import sympy

RationalLike = Union[int, Fraction, str]

INF_VALUATION = math.inf


def as_fraction(x) -> Fraction:
    if isinstance(x, PAdicScalar):
        return x.value
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass an int, Fraction or string")
    return Fraction(x)


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int):
    x = as_fraction(x)
    if x == 0:
        return INF_VALUATION
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def norm(x, p: int) -> Fraction:
    v = valuation(x, p)
    if v == INF_VALUATION:
        return Fraction(0)
    return Fraction(p) ** (-v)


def unit_part(x, p: int) -> Fraction:
    """x / p^ord(x) for nonzero x."""
    x = as_fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def frac_p(x, p: int) -> Fraction:
    """Fractional part in Z[1/p]/Z, normalised to [0, 1).

    x = a/(p^k b) with gcd(b, p) = 1; the p-part is (a * b^{-1} mod p^k) / p^k.
    """
    x = as_fraction(x)
    den = x.denominator
    k = vp_int(den, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    b = den // pk
    r = (x.numerator * pow(b, -1, pk)) % pk
    return Fraction(r, pk)


def reduce_mod(x, p: int, level: int) -> Fraction:
    """Canonical representative of x + p^level Z_p in Z[1/p] ∩ [0, p^level)."""
    x = as_fraction(x)
    scale = Fraction(p) ** level
    y = x / scale
    # integral part of y modulo Z_p is determined by frac_p; the representative is frac_p(y)
    return frac_p(y, p) * scale


@dataclass(frozen=True)
class PAdicContext:
    p: int
    psi_conductor: int = 0
    tolerance: float = 1e-9

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @property
    def q(self) -> int:
        return self.p

    @property
    def zeta1(self) -> Fraction:
        """zeta(1) = (1 - 1/q)^{-1}."""
        return Fraction(self.p, self.p - 1)


@dataclass(frozen=True)
class PAdicScalar:
    value: Fraction
    p: int

    @classmethod
    def of(cls, x, p: int) -> "PAdicScalar":
        return cls(as_fraction(x), p)

    @property
    def valuation(self):
        return valuation(self.value, self.p)

    @property
    def norm(self) -> Fraction:
        return norm(self.value, self.p)

    def uniformized(self) -> Fraction:
        """p^{ord(x)}, the uniformizer power with the same absolute value."""
        if self.value == 0:
            return Fraction(0)
        return Fraction(self.p) ** self.valuation

    def __add__(self, other):
        return PAdicScalar(self.value + as_fraction(other), self.p)

    def __mul__(self, other):
        return PAdicScalar(self.value * as_fraction(other), self.p)

    def __neg__(self):
        return PAdicScalar(-self.value, self.p)


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    def close_to(self, other, tol: float) -> bool:
        return abs(complex(self) - complex(other)) <= tol

    def to_json(self) -> dict:
        return {"re": self.re, "im": self.im}


def psi_phase(ctx: PAdicContext, x) -> Fraction:
    """The rational phase r in [0,1) with psi(x) = exp(2 pi i r)."""
    return frac_p(as_fraction(x) / Fraction(ctx.p) ** ctx.psi_conductor, ctx.p)


def psi(ctx: PAdicContext, x) -> complex:
    r = psi_phase(ctx, x)
    if r == 0:
        return 1.0 + 0j
    return cmath.exp(2j * math.pi * r.numerator / r.denominator)


def psi_eval(ctx: PAdicContext, x) -> ComplexValue:
    return ComplexValue.of(psi(ctx, x))


def ball_volume(ctx: PAdicContext, center, level: int, multiplicative: bool = False) -> Fraction:
    """Haar volume of center + p^level Z_p.

    With multiplicative=True the ball must avoid 0 and the volume is for
    d^x x = zeta(1) dx/|x|; the whole shell {|x| = p^-m} then has volume 1.
    """
    vol = Fraction(ctx.p) ** (-level)
    if not multiplicative:
        return vol
    c = as_fraction(center)
    vc = valuation(c, ctx.p)
    if vc >= level:
        raise ValueError("ball contains 0; multiplicative volume is infinite")
    return ctx.zeta1 * vol / norm(c, ctx.p)


def shell_volume(ctx: PAdicContext, m: int, multiplicative: bool = False) -> Fraction:
    """Volume of {|x| = p^-m}."""
    if multiplicative:
        return Fraction(1)
    return Fraction(ctx.p) ** (-m) * (1 - Fraction(1, ctx.p))
