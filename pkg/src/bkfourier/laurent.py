"""Rational functions in X = q^{-s} with coefficients Laurent polynomials in u = q^{1/2}."""

from __future__ import annotations

from fractions import Fraction

import sympy

X, u = sympy.symbols("X u")


def _sym(c):
    if isinstance(c, Fraction):
        return sympy.Rational(c.numerator, c.denominator)
    if isinstance(c, complex):
        return sympy.nsimplify(c.real) + sympy.I * sympy.nsimplify(c.imag)
    return sympy.sympify(c)


class LaurentFraction:
    """Immutable, gcd-reduced rational function in X over Q(i)[u, 1/u].

    Equality is decided after cancellation, so two fractions compare equal
    exactly when they define the same rational function.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, expr=0):
        expr = _sym(expr)
        num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
        num = sympy.expand(num)
        den = sympy.expand(den)
        # normalise so the denominator has leading coefficient 1 in (X, u)
        lead = sympy.Poly(den, X, u).LC() if den.free_symbols else den
        self._num = sympy.expand(num / lead)
        self._den = sympy.expand(den / lead)

    @classmethod
    def monomial(cls, coeff, x_power: int = 0, u_power: int = 0) -> "LaurentFraction":
        return cls(_sym(coeff) * X**x_power * u**u_power)

    @property
    def expr(self):
        return self._num / self._den

    @property
    def numerator(self):
        return self._num

    @property
    def denominator(self):
        return self._den

    def _coerce(self, other) -> "LaurentFraction":
        return other if isinstance(other, LaurentFraction) else LaurentFraction(other)

    def __add__(self, other):
        return LaurentFraction(self.expr + self._coerce(other).expr)

    __radd__ = __add__

    def __sub__(self, other):
        return LaurentFraction(self.expr - self._coerce(other).expr)

    def __rsub__(self, other):
        return LaurentFraction(self._coerce(other).expr - self.expr)

    def __mul__(self, other):
        return LaurentFraction(self.expr * self._coerce(other).expr)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero fraction")
        return LaurentFraction(self.expr / other.expr)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        return LaurentFraction(self.expr**n)

    def __neg__(self):
        return LaurentFraction(-self.expr)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (sympy.SympifyError, TypeError):
            return NotImplemented
        return sympy.expand(self._num * other._den - other._num * self._den) == 0

    def __hash__(self):
        return hash((str(self._num), str(self._den)))

    def is_zero(self) -> bool:
        return self._num == 0

    def substitute_x(self, new_x) -> "LaurentFraction":
        new_x = new_x.expr if isinstance(new_x, LaurentFraction) else _sym(new_x)
        return LaurentFraction(self.expr.subs(X, new_x))

    def at_one_minus_s(self) -> "LaurentFraction":
        """Replace s by 1 - s, i.e. X by q^{-1} X^{-1} = u^{-2}/X."""
        return self.substitute_x(u**-2 / X)

    def conjugate_coefficients(self) -> "LaurentFraction":
        return LaurentFraction(sympy.conjugate(self.expr).subs(
            {sympy.conjugate(X): X, sympy.conjugate(u): u}))

    def evaluate(self, q: int, s: complex) -> complex:
        """Numerical value at a given q and complex s."""
        xv = complex(q) ** (-complex(s))
        uv = complex(q) ** 0.5
        return complex(self.expr.subs({X: xv, u: uv}).evalf())

    def specialize(self, q: int) -> "LaurentFraction":
        """Substitute u = sqrt(q); the result still depends on X."""
        return LaurentFraction(self.expr.subs(u, sympy.sqrt(q)))

    def equals_at(self, other, q: int) -> bool:
        """Exact equality after imposing u^2 = q."""
        return self.specialize(q) == self._coerce(other).specialize(q)

    def denominator_roots_x(self, q: int) -> list:
        """Roots in X of the denominator with u = sqrt(q), as sympy numbers."""
        den = sympy.Poly(sympy.expand(self._den.subs(u, sympy.sqrt(q))), X)
        return list(sympy.roots(den, multiple=True))

    def __repr__(self):
        return f"LaurentFraction({sympy.sstr(self.expr)})"

    def __str__(self):
        return sympy.sstr(sympy.factor(self.expr))
