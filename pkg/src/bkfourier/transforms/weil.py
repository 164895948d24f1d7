"""The Weil representation of SL_2 on Schwartz-Bruhat functions of even-dimensional spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from ..local_factors import QuadraticSpace, chi_Q, weil_index_form
from ..padic import PAdicContext, as_fraction, norm, valuation
from ..schwartz import SchwartzBruhatFunction, _min_valuation, fourier_transform

_COARSEN_TOL = 1e-12

# Words are sequences of generators read left to right as a matrix product:
# ("n", b) = [[1, b], [0, 1]], ("m", a) = [[a, 0], [0, 1/a]], ("w",) = [[0, 1], [-1, 0]].


def generator_matrix(gen) -> tuple:
    kind = gen[0]
    if kind == "n":
        b = as_fraction(gen[1])
        return ((Fraction(1), b), (Fraction(0), Fraction(1)))
    if kind == "m":
        a = as_fraction(gen[1])
        if a == 0:
            raise ValueError("m(a) needs a nonzero a")
        return ((a, Fraction(0)), (Fraction(0), 1 / a))
    if kind == "w":
        return ((Fraction(0), Fraction(1)), (Fraction(-1), Fraction(0)))
    raise ValueError(f"unknown generator {gen!r}")


def word_matrix(word: Sequence) -> tuple:
    m = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for gen in word:
        g = generator_matrix(gen)
        m = tuple(tuple(sum(m[i][k] * g[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return m


@dataclass(frozen=True)
class WeilRepContext:
    ctx: PAdicContext
    spaces: tuple

    def __post_init__(self):
        for s in self.spaces:
            if s.dim % 2:
                raise ValueError("the Weil representation here needs even-dimensional spaces")

    @cached_property
    def gammas(self) -> tuple:
        return tuple(weil_index_form(s, 1, self.ctx) for s in self.spaces)

    @property
    def gamma(self) -> complex:
        out = 1 + 0j
        for g in self.gammas:
            out *= g
        return out

    def chi(self, i: int, a) -> int:
        return chi_Q(self.spaces[i], a, self.ctx)


def quadratic_phase(f: SchwartzBruhatFunction, space: QuadraticSpace, b, ctx: PAdicContext) -> SchwartzBruhatFunction:
    """xi -> psi(b Q(xi)) f(xi), refined until the phase is constant on cells."""
    b = as_fraction(b)
    if b == 0:
        return f
    p, c = f.p, ctx.psi_conductor
    vb = int(valuation(b, p))
    vs = _min_valuation(space.gram.matrix, p)
    vhalf = vs - int(valuation(2, p))
    # need b <xi, h> and b Q(h) in p^c Z_p for xi in the box and h in p^L Z_p^d
    level = max(f.level, c - vb - vs + f.box, -((vb + vhalf - c) // 2))
    g = f.refine(level, f.box)
    n = g.dim
    size = g.modulus
    idx = np.indices((size,) * n).reshape(n, -1)
    # Q(xi) for xi = idx / p^box: exact rational via the integer Gram numerators
    gram = space.gram.matrix
    den = 1
    for row in gram:
        for x in row:
            den = den * x.denominator // np.gcd(den, x.denominator)
    sint = np.array([[int(x * den) for x in row] for row in gram], dtype=object)
    vals = idx.astype(object)
    quad = np.einsum("ik,ij,jk->k", vals, sint, vals)  # xi^T S xi * den * p^(2 box)
    scale = b / (2 * den * Fraction(p) ** (2 * g.box) * Fraction(p) ** c)
    phases = _fractional_parts(quad, scale, p)
    factor = np.exp(2j * np.pi * phases).reshape((size,) * n)
    return SchwartzBruhatFunction(p, n, g.level, g.box, g.values * factor)


def _fractional_parts(ints: np.ndarray, scale: Fraction, p: int) -> np.ndarray:
    """frac_p(k * scale) for an object array of integers k."""
    num, den = scale.numerator, scale.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return np.zeros(len(ints))
    mod = p**k
    residues = (ints * (num * pow(den, -1, mod))) % mod
    return residues.astype(float) / mod


def dilation(f: SchwartzBruhatFunction, space: QuadraticSpace, a, ctx: PAdicContext) -> SchwartzBruhatFunction:
    """xi -> chi_Q(a) |a|^{d/2} f(a xi)."""
    a = as_fraction(a)
    n = f.dim
    g = f.pullback([[a if i == j else 0 for j in range(n)] for i in range(n)])
    return g.scale(chi_Q(space, a, ctx) * float(norm(a, f.p)) ** (n / 2))


def weyl(f: SchwartzBruhatFunction, space: QuadraticSpace, ctx: PAdicContext, gamma: complex) -> SchwartzBruhatFunction:
    """gamma(Q) f^ with the self-dual measure of <.,.>."""
    return fourier_transform(f, space.gram, ctx).scale(gamma)


def weil_rep_apply(wctx: WeilRepContext, word: Sequence, f: SchwartzBruhatFunction, factor: int = 0,
                   expected=None) -> SchwartzBruhatFunction:
    """rho(word) f on the factor-th space; the rightmost generator acts first."""
    if expected is not None:
        got = word_matrix(word)
        exp = tuple(tuple(as_fraction(x) for x in row) for row in expected)
        if got != exp:
            raise ValueError(f"word multiplies to {got}, not {exp}")
    space = wctx.spaces[factor]
    if f.dim != space.dim:
        raise ValueError("function lives on a space of the wrong dimension")
    out = f
    for gen in reversed(list(word)):
        kind = gen[0]
        if kind == "n":
            out = quadratic_phase(out, space, gen[1], wctx.ctx)
        elif kind == "m":
            out = dilation(out, space, gen[1], wctx.ctx)
        elif kind == "w":
            out = weyl(out, space, wctx.ctx, wctx.gammas[factor])
        else:
            raise ValueError(f"unknown generator {gen!r}")
        out = out.coarsen(_COARSEN_TOL)
    return out


def weil_rep_apply_tensor(wctx: WeilRepContext, words: Sequence, fs: Sequence) -> list:
    """rho(g_1, g_2, g_3) on a pure tensor f_1 (x) f_2 (x) f_3, factor by factor."""
    if len(words) != len(wctx.spaces) or len(fs) != len(wctx.spaces):
        raise ValueError("need one word and one function per space")
    return [weil_rep_apply(wctx, w, f, i) for i, (w, f) in enumerate(zip(words, fs))]


def tensor_difference(xs: Sequence, ys: Sequence, samples: int = 0) -> float:
    """sup |prod x_i - prod y_i| for pure tensors, via the factor arrays."""
    total = 0.0
    # ||a1(x)a2(x)a3 - b1(x)b2(x)b3||_inf <= sum of telescoped differences
    for i in range(len(xs)):
        term = 1.0
        for j in range(len(xs)):
            if j < i:
                term *= float(np.max(np.abs(ys[j].values), initial=0.0))
            elif j == i:
                term *= xs[j].max_abs_difference(ys[j])
            else:
                term *= float(np.max(np.abs(xs[j].values), initial=0.0))
        total += term
    return total


def relation_words(b, a) -> dict:
    """Three relations of SL_2, each as a pair of words for the same element."""
    b, a = as_fraction(b), as_fraction(a)
    return {
        "w^2 = m(-1)": ([("w",), ("w",)], [("m", -1)]),
        "m(a) n(b) = n(a^2 b) m(a)": ([("m", a), ("n", b)], [("n", a * a * b), ("m", a)]),
        "w n(b) w = n(-1/b) m(-1/b) w n(-1/b)": (
            [("w",), ("n", b), ("w",)],
            [("n", -1 / b), ("m", -1 / b), ("w",), ("n", -1 / b)],
        ),
    }
