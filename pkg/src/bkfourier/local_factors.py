"""Hilbert symbols, quadratic characters, Weil indices and local gamma factors."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .laurent import LaurentFraction, X, u
from .padic import PAdicContext, as_fraction, psi, unit_part, valuation
from .schwartz import GramPairing, _det


def _legendre(unit: Fraction, p: int) -> int:
    r = (unit.numerator * pow(unit.denominator, -1, p)) % p
    return sympy.legendre_symbol(r, p)


def _mod(unit: Fraction, m: int) -> int:
    return (unit.numerator * pow(unit.denominator, -1, m)) % m


def hilbert_symbol(a, b, p: int) -> int:
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    alpha, beta = valuation(a, p), valuation(b, p)
    ua, ub = unit_part(a, p), unit_part(b, p)
    if p != 2:
        eps = (p - 1) // 2
        sign = (-1) ** (alpha * beta * eps)
        return sign * _legendre(ua, p) ** beta * _legendre(ub, p) ** alpha
    u8, v8 = _mod(ua, 8), _mod(ub, 8)
    e_u, e_v = ((u8 - 1) // 2) % 2, ((v8 - 1) // 2) % 2
    w_u, w_v = ((u8 * u8 - 1) // 8) % 2, ((v8 * v8 - 1) // 8) % 2
    return (-1) ** ((e_u * e_v + alpha * w_v + beta * w_u) % 2)


def is_square(a, p: int) -> bool:
    a = as_fraction(a)
    if valuation(a, p) % 2:
        return False
    ua = unit_part(a, p)
    if p == 2:
        return _mod(ua, 8) == 1
    return _legendre(ua, p) == 1


def diagonalize(matrix, order: Sequence[int] | None = None) -> list:
    """Diagonal entries of a rational symmetric matrix after congruence.

    order permutes the basis first, so two orders give two genuinely different
    diagonalizations of the same form.
    """
    n = len(matrix)
    order = list(range(n)) if order is None else list(order)
    a = [[as_fraction(matrix[i][j]) for j in order] for i in order]
    diag = []
    for c in range(n):
        if a[c][c] == 0:
            j = next((j for j in range(c + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[c], a[j] = a[j], a[c]
                for row in a:
                    row[c], row[j] = row[j], row[c]
            else:
                j = next((j for j in range(c + 1, n) if a[c][j] != 0), None)
                if j is None:
                    raise ValueError("degenerate form")
                # replace e_c by e_c + e_j, whose norm is 2 a[c][j] != 0
                for k in range(n):
                    a[c][k] += a[j][k]
                for k in range(n):
                    a[k][c] += a[k][j]
        piv = a[c][c]
        diag.append(piv)
        for r in range(c + 1, n):
            f = a[r][c] / piv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
                for k in range(c, n):
                    a[k][r] -= f * a[k][c]
    return diag


@dataclass(frozen=True)
class QuadraticSpace:
    """Even-dimensional space with Gram matrix S and Q(v) = <v, v>/2."""

    gram: GramPairing

    def __post_init__(self):
        if self.gram.dim % 2:
            raise ValueError("quadratic spaces here are even-dimensional")

    @classmethod
    def split(cls, d: int) -> "QuadraticSpace":
        return cls(GramPairing.antidiagonal(d))

    @property
    def dim(self) -> int:
        return self.gram.dim

    def q(self, v) -> Fraction:
        return self.gram.quadratic(v)

    def discriminant(self) -> Fraction:
        """(-1)^{d/2} det S."""
        return (-1) ** (self.dim // 2) * self.gram.det()


def chi_Q(space: QuadraticSpace, a, ctx: PAdicContext) -> int:
    a = as_fraction(a)
    if a == 0:
        raise ValueError("chi_Q is defined on nonzero elements")
    return hilbert_symbol(a, space.discriminant(), ctx.p)


def _gauss_integral(ctx: PAdicContext, a: Fraction, m: int) -> complex:
    """int over p^{-m} Z_p of psi(a x^2) dx, as an exact finite character sum."""
    p, c = ctx.p, ctx.psi_conductor
    va = int(valuation(a, p))
    v2 = int(valuation(2, p))
    # psi(a x^2) is constant on x + p^M Z_p once 2 a x h and a h^2 lie in p^c Z_p
    big = max(c + m - va - v2, -((va - c) // 2), -m)
    count = p ** (m + big)
    # with x = k p^{-m} the phase of a x^2 is (w k^2 mod p^e) / p^e
    e = 2 * m + c - va
    if e <= 0:
        return complex(count) * float(p) ** (-big)
    mod = p**e
    w = unit_part(a, p)
    w = (w.numerator * pow(w.denominator, -1, mod)) % mod
    k = np.arange(count, dtype=np.int64) % mod
    phase = (w * ((k * k) % mod)) % mod
    total = np.exp(2j * np.pi * phase / mod).sum()
    return complex(total) * float(p) ** (-big)


def weil_index_scalar(a, ctx: PAdicContext) -> complex:
    """Normalized Gauss sum of x -> psi(a x^2).

    Shells |x| = p^m with ord(a) - 2m < c - 1 - 2 ord(2) integrate to zero, so
    the Gauss integral is constant from the level computed below; two
    consecutive levels are compared as a guard.
    """
    a = as_fraction(a)
    if a == 0:
        raise ValueError("Weil index needs a nonzero argument")
    v2 = int(valuation(2, ctx.p))
    start = max(0, (int(valuation(a, ctx.p)) - ctx.psi_conductor + 1 + 2 * v2) // 2 + 1)
    g0 = _gauss_integral(ctx, a, start)
    g1 = _gauss_integral(ctx, a, start + 1)
    if abs(g0 - g1) > 1e-9 * max(1.0, abs(g0)):
        raise RuntimeError("Gauss integral failed to stabilize")
    return g1 / abs(g1)


def weil_index_form(space: QuadraticSpace | GramPairing, scale, ctx: PAdicContext,
                    order: Sequence[int] | None = None) -> complex:
    """Weil index of x -> psi(scale Q(x)) as a product over a diagonalization."""
    gram = space.gram if isinstance(space, QuadraticSpace) else space
    if _det(gram.matrix) == 0:
        raise ValueError("degenerate form")
    scale = as_fraction(scale)
    out = 1 + 0j
    for d in diagonalize(gram.matrix, order):
        out *= weil_index_scalar(scale * d / 2, ctx)
    return out


def root_of_unity_exact(z: complex, order: int = 8, tol: float = 1e-9):
    """Exact sympy form of z when z is an order-th root of unity."""
    k = round(cmath.phase(z) / (2 * math.pi) * order) % order
    if abs(z - cmath.exp(2j * math.pi * k / order)) > tol:
        raise ValueError(f"{z} is not a {order}-th root of unity")
    return sympy.nsimplify(sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(k, order)).rewrite(sympy.cos))


@dataclass(frozen=True)
class QuasiCharacter:
    """chi = eta |.|^exponent with eta trivial or x -> (x, a)_p.

    exponent is a rational shift; the symbolic variable s enters through X = q^{-s}.
    """

    p: int
    quadratic_param: Fraction | None = None
    exponent: Fraction = Fraction(0)

    def unit_value(self, x) -> int:
        if self.quadratic_param is None:
            return 1
        return hilbert_symbol(x, self.quadratic_param, self.p)

    def conductor(self) -> int:
        if self.quadratic_param is None:
            return 0
        p = self.p
        for a in range(0, 4):
            mod = p ** max(a, 1)
            units = [Fraction(k) for k in range(1, mod * p) if k % p]
            if a == 0:
                test = units
            else:
                test = [x for x in units if (x - 1) % (p**a) == 0]
            if all(self.unit_value(x) == 1 for x in test):
                return a
        raise ValueError("conductor above 3 is unsupported")

    def uniformizer_value(self) -> int:
        return self.unit_value(self.p)

    def is_unramified(self) -> bool:
        return self.conductor() == 0

    def inverse(self) -> "QuasiCharacter":
        return QuasiCharacter(self.p, self.quadratic_param, -self.exponent)


def _q_power(r: Fraction):
    """q^r as a power of u = q^{1/2}; r must be a half-integer."""
    r = as_fraction(r)
    if (2 * r).denominator != 1:
        raise ValueError("only half-integral powers of q are representable")
    return u ** int(2 * r)


def unramified_L(value_at_uniformizer, shift) -> LaurentFraction:
    """L(shift, chi) = (1 - chi(p) q^{-shift})^{-1} for unramified chi."""
    c = value_at_uniformizer.expr if isinstance(value_at_uniformizer, LaurentFraction) else sympy.sympify(value_at_uniformizer)
    return LaurentFraction(1 / (1 - c * _q_power(-as_fraction(shift))))


def unramified_gamma(value_at_uniformizer, shift) -> LaurentFraction:
    """gamma(shift, chi, psi) for unramified chi and unramified psi.

    value_at_uniformizer is chi(p) written in X and u, e.g. X**lam for |.|^{lam s}.
    """
    c = value_at_uniformizer.expr if isinstance(value_at_uniformizer, LaurentFraction) else sympy.sympify(value_at_uniformizer)
    shift = as_fraction(shift)
    num = 1 - c * _q_power(-shift)
    den = 1 - _q_power(shift - 1) / c
    return LaurentFraction(num / den)


def gamma_factor(chi: QuasiCharacter, ctx: PAdicContext) -> LaurentFraction:
    """gamma(s, chi, psi) with s symbolic through X = q^{-s}.

    Unramified chi: epsilon = 1 and the L-factor ratio.  Ramified quadratic chi:
    L = 1 and gamma is the epsilon factor, computed from its Gauss sum.
    """
    if ctx.psi_conductor != 0:
        raise ValueError("gamma factors are implemented for unramified psi")
    a = chi.conductor()
    shift_u = _q_power(-chi.exponent)  # |.|^{exponent} contributes q^{-exponent} at p
    if a == 0:
        eta = chi.uniformizer_value()
        return unramified_gamma(eta * X * shift_u, 0)
    # epsilon(s, chi, psi) = int over p^{-a} Z_p^x of chi^{-1}(x) |x|^{-s} psi(x) dx
    p = ctx.p
    gauss = 0j
    for k in range(1, p ** (2 * a)):
        if k % p == 0:
            continue
        x = Fraction(k, p**a)
        gauss += chi.unit_value(x) * psi(ctx, x)
    gauss *= float(p) ** (-a)  # cells of volume p^{-a} inside p^{-a} Z_p, measured on p^{-a} scale
    # |x| = q^a on the domain; |x|^{-s-exponent} = X^a q^{-a exponent}
    # |gauss| = q^{a/2}; the root of unity carries the phase
    r = root_of_unity_exact(gauss / p ** (a / 2))
    return LaurentFraction(r * u**a * (X * shift_u) ** a)
