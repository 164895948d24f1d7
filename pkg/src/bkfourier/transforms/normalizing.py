"""The normalizing operators lambda_!(mu_s) on a one-dimensional fiber."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..padic import PAdicContext, as_fraction, psi, valuation
from ..regularized import TRUNCATED, PVResult, ShellIntegrand, TruncationPolicy, pv_integral


@dataclass(frozen=True)
class FiberFunction:
    """A function h on F^x given by its values on unit cosets of each shell.

    h(y) only depends on y modulo y(1 + p^digits Z_p).  Below the shell ord(y) = low
    it continues as a power law: h(p^-1 y) = ratio * h(y) for ord(y) <= low, with
    ratio = 0 for functions vanishing near infinity.
    """

    value: Callable[[Fraction], complex]
    digits: int = 1
    low: int = 0
    ratio: complex = 0

    def __call__(self, y) -> complex:
        y = as_fraction(y)
        if y == 0:
            raise ValueError("fiber functions live on F^x")
        return complex(self.value(y))


@dataclass(frozen=True)
class MuResult:
    value: complex
    status: str
    shells_used: int

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag},
                "status": self.status, "shells_used": self.shells_used}


def _unit_reps(p: int, digits: int):
    mod = p**digits
    return [k for k in range(1, mod) if k % p]


def mu_operator(s, lam: int, h: FiberFunction, ctx: PAdicContext, x=1, weight_exponent=0,
                policy: TruncationPolicy = TruncationPolicy()) -> MuResult:
    """int psi(t) |t|^{s+1+w} h(t^-lam x) d^x t / zeta(1) at one fiber point x.

    The caller supplies the delta-weight as the |t|-power w.  Shells |t| = p^m with
    m > digits - c integrate psi against a function constant on cosets of size
    p^{-m+digits} and vanish; shells deep inside the unit ball reach the power-law
    regime of h and are summed as a geometric series.
    """
    if lam < 1:
        raise ValueError("lambda must be a positive integer")
    p, c = ctx.p, ctx.psi_conductor
    x = as_fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    exponent = complex(s) + 1 + complex(weight_exponent)
    vx = int(valuation(x, p))
    ratio_per_shell = complex(h.ratio) ** lam * float(p) ** (-exponent)

    def shell_by_order(m: int) -> complex:
        """Integral over ord(t) = m."""
        digits = max(h.digits, c - m, 1)
        reps = _unit_reps(p, digits)
        total = 0j
        base = Fraction(p) ** m
        for k in reps:
            t = base * k
            total += psi(ctx, t) * h(t ** (-lam) * x)
        return total / len(reps) * float(p) ** (-m * exponent)

    # shells with vx - lam*m < low follow the geometric regime
    geometric_from = max(0, (vx - h.low) // lam + 1)
    core = sum((shell_by_order(m) for m in range(0, geometric_from)), 0j)
    start = shell_by_order(geometric_from)
    if start != 0:
        if abs(ratio_per_shell) >= 1:
            zeta1 = float(ctx.zeta1)
            return MuResult(core / zeta1, TRUNCATED, geometric_from)
        core += start / (1 - ratio_per_shell)
    g = ShellIntegrand(core, lambda m: shell_by_order(-m), vanishing_from=max(1, h.digits - c + 1))
    res: PVResult = pv_integral(g, policy)
    return MuResult(res.value / float(ctx.zeta1), res.status, res.shells_used)
