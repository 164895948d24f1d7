"""Tate zeta integrals of one-variable Schwartz-Bruhat functions."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

from .laurent import LaurentFraction, X
from .padic import PAdicContext, valuation
from .schwartz import SchwartzBruhatFunction, fourier_transform

TRIVIAL = "trivial"
UNRAMIFIED_QUADRATIC = "unramified-quadratic"


def _eta_at_uniformizer(eta: str) -> int:
    if eta == TRIVIAL:
        return 1
    if eta == UNRAMIFIED_QUADRATIC:
        return -1
    raise ValueError(f"unsupported unit character {eta!r}")


def _exact(z: complex, tol: float = 1e-10, max_den: int = 10**8):
    """Exact Gaussian rational equal to z, or ValueError."""
    parts = []
    for x in (z.real, z.imag):
        r = Fraction(x).limit_denominator(max_den)
        if abs(float(r) - x) > tol:
            raise ValueError(f"shell integral {z} is not a rational number")
        parts.append(sympy.Rational(r.numerator, r.denominator))
    return parts[0] + sympy.I * parts[1]


def shell_integrals(f: SchwartzBruhatFunction, ctx: PAdicContext) -> tuple[dict, complex, int]:
    """Multiplicative-measure integrals of f over shells |x| = p^{-m}.

    Returns (finite shells {m: value}, value of f near 0, first tail shell).
    Each cell a + p^k Z_p with ord(a) = m < k has d^x-volume zeta(1) p^{m-k}.
    """
    if f.dim != 1:
        raise ValueError("zeta integrals need a one-dimensional function")
    p, k = f.p, f.level
    zeta1 = float(ctx.zeta1)
    shells: dict[int, complex] = {}
    for idx in np.nonzero(f.values)[0]:
        if idx == 0:
            continue
        x = f.point((idx,))[0]
        m = int(valuation(x, p))
        shells[m] = shells.get(m, 0j) + complex(f.values[idx]) * zeta1 * float(p) ** (m - k)
    return shells, complex(f.values[0]), k


def zeta_integral(f: SchwartzBruhatFunction, eta: str, ctx: PAdicContext) -> LaurentFraction:
    """Z(f, eta, s) = int f(x) eta(x) |x|^s d^x x with X = q^{-s}.

    Finitely many shells give monomials; below the level of f the function is
    constant and the remaining shells sum to a geometric series.
    """
    e = _eta_at_uniformizer(eta)
    shells, c0, k = shell_integrals(f, ctx)
    expr = sympy.Integer(0)
    for m, val in sorted(shells.items()):
        expr += _exact(val) * (e * X) ** m
    if abs(c0) > 0:
        expr += _exact(c0) * (e * X) ** k / (1 - e * X)
    return LaurentFraction(expr)


def zeta_numeric(f: SchwartzBruhatFunction, eta: str, ctx: PAdicContext, s: complex,
                 extra_shells: int = 200) -> complex:
    """Direct shell sum at a numerical s, used to cross-check zeta_integral."""
    e = _eta_at_uniformizer(eta)
    shells, c0, k = shell_integrals(f, ctx)
    q = float(f.p)
    total = sum(v * (e * q ** (-s)) ** m for m, v in shells.items())
    total += sum(c0 * (e * q ** (-s)) ** m for m in range(k, k + extra_shells))
    return complex(total)


def gamma_from_functional_equation(eta: str, ctx: PAdicContext,
                                   f: SchwartzBruhatFunction | None = None) -> LaurentFraction:
    """gamma(s, eta, psi) := Z(f^, eta^{-1}, 1 - s) / Z(f, eta, s), default f = 1_{Z_p}."""
    if f is None:
        f = SchwartzBruhatFunction.indicator(ctx.p, [0], 0)
    num = zeta_integral(fourier_transform(f, ctx=ctx), eta, ctx).at_one_minus_s()
    den = zeta_integral(f, eta, ctx)
    return num / den


def functional_equation_holds(f: SchwartzBruhatFunction, eta: str, ctx: PAdicContext,
                              gamma: LaurentFraction | None = None) -> bool:
    """Z(f^, eta^{-1}, 1 - s) == gamma(s) Z(f, eta, s) exactly, with u^2 = q.

    eta is quadratic, so eta^{-1} = eta.
    """
    gamma = gamma if gamma is not None else gamma_from_functional_equation(eta, ctx)
    lhs = zeta_integral(fourier_transform(f, ctx=ctx), eta, ctx).at_one_minus_s()
    return lhs.equals_at(gamma * zeta_integral(f, eta, ctx), ctx.p)
