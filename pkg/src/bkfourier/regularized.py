"""Regularized integrals: principal-value shell sums and level-set measures."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
import sympy

from .padic import PAdicContext, as_fraction, psi, valuation
from .schwartz import SchwartzBruhatFunction

PROVEN = "proven-vanishing"
STABILIZED = "stabilized"
TRUNCATED = "truncated"


@dataclass(frozen=True)
class TruncationPolicy:
    max_shell: int = 24
    window: int = 3
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.max_shell < 0 or self.window < 1:
            raise ValueError("budgets must be positive")

    def to_json(self) -> dict:
        return {"max_shell": self.max_shell, "window": self.window, "tolerance": self.tolerance}


@dataclass(frozen=True)
class ShellIntegrand:
    """A function on Q_p^r described by its integrals over |t| <= 1 and |t| = p^m.

    vanishing_from, when given, certifies that every shell m >= vanishing_from
    integrates to exactly zero.
    """

    core: complex
    shell: Callable[[int], complex]
    vanishing_from: Optional[int] = None


@dataclass(frozen=True)
class PVResult:
    value: complex
    status: str
    shells_used: int
    partial_sums: tuple = field(repr=False, default=())

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag},
                "status": self.status, "shells_used": self.shells_used}


def pv_integral(g: ShellIntegrand, policy: TruncationPolicy = TruncationPolicy()) -> PVResult:
    """Limit of the integrals over |t| <= p^B as B grows (radial cutoffs)."""
    total = complex(g.core)
    partial = [total]
    if g.vanishing_from is not None and g.vanishing_from <= policy.max_shell + 1:
        for m in range(1, g.vanishing_from):
            total += g.shell(m)
            partial.append(total)
        return PVResult(total, PROVEN, max(g.vanishing_from - 1, 0), tuple(partial))
    for m in range(1, policy.max_shell + 1):
        total += g.shell(m)
        partial.append(total)
        if len(partial) > policy.window:
            tail = partial[-(policy.window + 1):]
            scale = max(1.0, abs(total))
            if max(abs(z - total) for z in tail) <= policy.tolerance * scale:
                return PVResult(total, STABILIZED, m, tuple(partial))
    return PVResult(total, TRUNCATED, policy.max_shell, tuple(partial))


# Exponential sums  sum_j c_j psi(<a_j, t>) w_j(|t|)  on Q_p^r -------------------


def ball_character_integral(ctx: PAdicContext, a: Sequence, m: int) -> Fraction:
    """int over |t| <= p^m (t in Q_p^r) of psi(<a, t>) dt = p^{mr} [ord(a) >= m + c]."""
    r = len(a)
    vals = [valuation(x, ctx.p) for x in a]
    if min(vals) >= m + ctx.psi_conductor:
        return Fraction(ctx.p) ** (m * r)
    return Fraction(0)


def shell_character_integral(ctx: PAdicContext, a: Sequence, m: int) -> Fraction:
    return ball_character_integral(ctx, a, m) - ball_character_integral(ctx, a, m - 1)


@dataclass(frozen=True)
class ExponentialTerm:
    coeff: complex
    frequency: tuple
    radial_weight: Callable[[int], complex] = lambda m: 1.0


def exponential_sum_integrand(ctx: PAdicContext, terms: Sequence[ExponentialTerm]) -> ShellIntegrand:
    """Shell description of sum_j c_j psi(<a_j, t>) w_j(|t|), w_j constant on shells.

    A term with nonzero frequency a has shells m > ord(a) - c + 1 vanishing exactly,
    since both balls bounding such a shell miss the dual lattice of a.
    """
    terms = [ExponentialTerm(t.coeff, tuple(as_fraction(x) for x in t.frequency), t.radial_weight)
             for t in terms]
    core = 0j
    for t in terms:
        # the unit ball is a union of shells m <= 0; the weight is taken constant there
        core += t.coeff * t.radial_weight(0) * float(ball_character_integral(ctx, t.frequency, 0))

    def shell(m: int) -> complex:
        return sum(t.coeff * t.radial_weight(m) * float(shell_character_integral(ctx, t.frequency, m))
                   for t in terms)

    cert = 0
    for t in terms:
        if all(x == 0 for x in t.frequency):
            cert = None
            break
        v = min(valuation(x, ctx.p) for x in t.frequency)
        cert = max(cert, int(v) - ctx.psi_conductor + 2)
    return ShellIntegrand(core, shell, None if cert is None else max(cert, 1))


def brute_force_shell(ctx: PAdicContext, frequency: Sequence, m: int, extra: int = 0) -> complex:
    """int over |t| = p^m of psi(<a, t>) dt by summing over coset representatives.

    Independent of the closed form: enumerates t = k / p^m on a grid fine enough
    for psi(<a, t>) to be constant on cells.
    """
    p, c = ctx.p, ctx.psi_conductor
    r = len(frequency)
    a = [as_fraction(x) for x in frequency]
    va = min((valuation(x, p) for x in a if x != 0), default=0)
    level = max(c - int(va), 1 - m) + extra  # cells t + p^level Z_p^r inside the shell
    n = p ** (m + level)
    if n ** r > 4_000_000:
        raise ValueError("grid too large for brute force")
    grid = np.indices((n,) * r).reshape(r, -1).T
    total = 0j
    for k in grid:
        t = [int(x) / Fraction(p) ** m for x in k]
        # keep t with max |t_i| = p^m exactly
        if min((valuation(x, p) for x in t if x != 0), default=10**9) != -m:
            continue
        total += psi(ctx, sum((x * y for x, y in zip(a, t)), Fraction(0)))
    return total * float(p) ** (-r * level)


# Level-set measures -----------------------------------------------------------


@dataclass(frozen=True)
class LevelSetEstimate:
    value: complex
    previous: complex
    discrepancy: float
    level: int

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag},
                "discrepancy": self.discrepancy, "level": self.level}


def _poly_evaluator(poly, nvars: int):
    xs = sympy.symbols(f"x1:{nvars + 1}")
    expr = sympy.sympify(poly) if isinstance(poly, str) else poly
    if not expr.free_symbols <= set(xs):
        raise ValueError(f"polynomial {poly} uses variables outside x1..x{nvars}")
    p = sympy.Poly(expr, *xs)
    coeffs = []
    for monom, coeff in p.terms():
        c = sympy.Rational(coeff)
        coeffs.append((tuple(monom), Fraction(int(c.p), int(c.q))))
    return coeffs


def level_set_count(f: SchwartzBruhatFunction, maps, target, m: int) -> complex:
    """p^{r m} * sum over cells x + p^m Z_p^d with p_i(x) = c_i mod p^m of f(x) vol.

    f must be supported in Z_p^d and the maps must have p-integral coefficients, so
    p_i(x) mod p^m is constant on cells of level m.
    """
    p, d = f.p, f.dim
    if len(maps) >= d:
        raise ValueError("need fewer maps than variables")
    g = f.coarsen()
    if g.box > 0:
        raise ValueError("level_set_count needs f supported in Z_p^d")
    level = max(m, g.level)
    g = g.refine(level, 0)
    mod = p**m
    polys = [_poly_evaluator(q, d) for q in maps]
    for poly in polys:
        for _, c in poly:
            if c.denominator % p == 0:
                raise ValueError("maps need p-integral coefficients")
    vals = g.values
    idx = np.argwhere(vals != 0)
    if len(idx) == 0:
        return 0j
    weights = vals[tuple(idx.T)]
    ok = np.ones(len(idx), dtype=bool)
    xs = idx % mod
    for poly, c in zip(polys, target):
        acc = np.zeros(len(idx), dtype=np.int64)
        for monom, coeff in poly:
            term = np.full(len(idx), (coeff.numerator * pow(coeff.denominator, -1, mod)) % mod, dtype=np.int64)
            for var, e in enumerate(monom):
                for _ in range(e):
                    term = (term * xs[:, var]) % mod
            acc = (acc + term) % mod
        c = as_fraction(c)
        if c.denominator % p == 0:
            raise ValueError("target must be p-integral")
        cm = (c.numerator * pow(c.denominator, -1, mod)) % mod
        ok &= acc == cm
    # each level-`level` cell has volume p^{-d level}; p^{r m} rescales the thin shell
    vol = float(p) ** (-d * level)
    return complex(weights[ok].sum()) * vol * float(p) ** (len(maps) * m)


def level_set_integral(f: SchwartzBruhatFunction, maps, target, refinement: int) -> LevelSetEstimate:
    """Estimate int_{Y_c} f dmu_c at levels refinement and refinement + 1."""
    if refinement < 1:
        raise ValueError("refinement must be at least 1")
    a = level_set_count(f, maps, target, refinement)
    b = level_set_count(f, maps, target, refinement + 1)
    return LevelSetEstimate(b, a, abs(b - a), refinement + 1)
