import itertools
from fractions import Fraction

import numpy as np
import pytest

from bkfourier.padic import PAdicContext, psi
from bkfourier.schwartz import (
    GramPairing, SchwartzBruhatFunction, dump_function, fourier_transform, inverse_fourier_transform,
    load_function, random_function,
)


def _pointwise_transform(f, xi, ctx, gram=None):
    """sum over cells of f(x) psi(<xi, x>) vol, straight from the definition."""
    total = 0j
    for x, c in f.terms.items():
        pair = gram.pair(xi, x) if gram else sum((a * b for a, b in zip(xi, x)), Fraction(0))
        total += c * psi(ctx, pair)
    scale = 1.0
    if gram is not None:
        from bkfourier.padic import valuation
        scale = float(f.p) ** (-valuation(gram.det(), f.p) / 2)
    return total * float(f.cell_volume()) * scale


def test_indicator_of_zp_is_self_dual():
    for p in (2, 3, 5):
        f = SchwartzBruhatFunction.indicator(p, [0, 0], 0)
        assert fourier_transform(f).max_abs_difference(f) < 1e-12


def test_translated_ball_closed_form():
    p, k = 3, 2
    a = Fraction(1, 3)
    ctx = PAdicContext(p)
    f = SchwartzBruhatFunction.indicator(p, [a], k)
    g = fourier_transform(f, ctx=ctx)
    for t in (Fraction(0), Fraction(1, 9), Fraction(5, 3), Fraction(2), Fraction(1, 27)):
        inside = t * Fraction(p) ** k
        expected = p ** -k * psi(ctx, a * t) if inside.denominator % p else 0
        assert abs(g((t,)) - expected) < 1e-12


@pytest.mark.parametrize("p,dim,level", [(2, 2, 2), (3, 1, 3), (5, 2, 1), (3, 3, 1)])
def test_transform_matches_definition(p, dim, level):
    rng = np.random.default_rng(7)
    ctx = PAdicContext(p)
    f = random_function(rng, p, dim, level, box=1, density=0.4)
    g = fourier_transform(f, ctx=ctx)
    for _ in range(10):
        xi = tuple(Fraction(int(rng.integers(0, p ** (level + 1))), p**level) for _ in range(dim))
        assert abs(g(xi) - _pointwise_transform(f, xi, ctx)) < 1e-10


def test_transform_with_gram_matches_definition():
    p = 3
    ctx = PAdicContext(p)
    gram = GramPairing([[2, 1], [1, 3]])
    rng = np.random.default_rng(3)
    f = random_function(rng, p, 2, 1, box=0, density=0.6)
    g = fourier_transform(f, gram, ctx)
    for _ in range(10):
        xi = tuple(Fraction(int(rng.integers(0, 9)), 3) for _ in range(2))
        assert abs(g(xi) - _pointwise_transform(f, xi, ctx, gram)) < 1e-10
    back = inverse_fourier_transform(g, gram, ctx)
    assert back.max_abs_difference(f) < 1e-12


@pytest.mark.parametrize("cond", [-1, 0, 2])
def test_inversion_and_plancherel_with_conductor(cond):
    ctx = PAdicContext(5, psi_conductor=cond)
    rng = np.random.default_rng(11)
    f = random_function(rng, 5, 2, 1)
    h = random_function(rng, 5, 2, 1)
    ff, hh = fourier_transform(f, ctx=ctx), fourier_transform(h, ctx=ctx)
    assert inverse_fourier_transform(ff, ctx=ctx).max_abs_difference(f) < 1e-12
    assert abs(ff.inner(hh, ctx=ctx) - f.inner(h, ctx=ctx)) < 1e-12


def test_translation_becomes_character_twist():
    p = 3
    ctx = PAdicContext(p)
    rng = np.random.default_rng(5)
    f = random_function(rng, p, 2, 2)
    a = (Fraction(1, 3), Fraction(2))
    lhs = fourier_transform(f.translate(a), ctx=ctx)
    rhs = fourier_transform(f, ctx=ctx)
    for idx in itertools.product(range(4), repeat=2):
        t = tuple(Fraction(i, 3) for i in idx)
        assert abs(lhs(t) - psi(ctx, sum(x * y for x, y in zip(a, t))) * rhs(t)) < 1e-12


def test_refine_and_coarsen_are_lossless():
    f = SchwartzBruhatFunction.indicator(3, [Fraction(1, 3), 1], 1, coeff=2 - 1j)
    g = f.refine(3, 2)
    assert g.max_abs_difference(f) == 0
    c = g.coarsen()
    assert (c.level, c.box) == (1, 1)


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    f = random_function(rng, 5, 2, 1, box=1)
    path = tmp_path / "f.json"
    dump_function(f, path)
    assert load_function(path).max_abs_difference(f) == 0


def test_json_rejects_decimal_centers():
    data = {"prime": 3, "dim": 1, "level": 0, "terms": [{"center": ["0.5"], "coeff": {"re": 1, "im": 0}}]}
    with pytest.raises(ValueError):
        SchwartzBruhatFunction.from_json(data)
