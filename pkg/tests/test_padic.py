import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from bkfourier.padic import (
    PAdicContext, ball_volume, frac_p, norm, psi, reduce_mod, shell_volume, unit_part, valuation,
)


def _random_rational(rng, p):
    num = int(rng.integers(-500, 500)) or 1
    return Fraction(num, int(rng.integers(1, 50))) * Fraction(p) ** int(rng.integers(-3, 4))


def test_valuation_and_norm():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(1, 18), 3) == -2
    assert valuation(0, 5) == math.inf
    assert norm(Fraction(1, 18), 3) == 9
    assert unit_part(Fraction(-45, 2), 3) == Fraction(-5, 2)


def test_frac_p_examples():
    assert frac_p(Fraction(1, 3), 3) == Fraction(1, 3)
    # 1/6 - 2/3 = -1/2 is a 3-adic integer
    assert frac_p(Fraction(1, 6), 3) == Fraction(2, 3)
    assert frac_p(7, 5) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_reduce_mod_lands_in_same_coset(p):
    rng = np.random.default_rng(p)
    for _ in range(50):
        x = _random_rational(rng, p)
        level = int(rng.integers(-2, 4))
        r = reduce_mod(x, p, level)
        assert valuation(x - r, p) >= level
        assert 0 <= r < Fraction(p) ** level


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_psi_is_a_character_trivial_on_zp(p):
    ctx = PAdicContext(p)
    rng = np.random.default_rng(100 + p)
    for _ in range(50):
        x, y = _random_rational(rng, p), _random_rational(rng, p)
        assert abs(psi(ctx, x + y) - psi(ctx, x) * psi(ctx, y)) < 1e-12
        assert psi(ctx, Fraction(int(rng.integers(-99, 99)), 1 + p * int(rng.integers(0, 9)))) == 1
    assert abs(psi(ctx, Fraction(1, p)) - cmath.exp(2j * math.pi / p)) < 1e-12


def test_psi_conductor_shifts_kernel():
    ctx = PAdicContext(3, psi_conductor=1)
    assert psi(ctx, 3) == 1
    assert abs(psi(ctx, 1) - cmath.exp(2j * math.pi / 3)) < 1e-12


@pytest.mark.parametrize("p", [2, 3, 5])
def test_multiplicative_shell_volume_sums_to_one(p):
    ctx = PAdicContext(p)
    for m in (-1, 0, 2):
        cells = [Fraction(k) * Fraction(p) ** m for k in range(1, p) if k % p]
        total = sum(ball_volume(ctx, c, m + 1, multiplicative=True) for c in cells)
        assert total == 1 == shell_volume(ctx, m, multiplicative=True)
        additive = sum(ball_volume(ctx, c, m + 1) for c in cells)
        assert additive == shell_volume(ctx, m)


def test_context_rejects_composite():
    with pytest.raises(ValueError):
        PAdicContext(4)
    with pytest.raises(ValueError):
        ball_volume(PAdicContext(3), 0, 1, multiplicative=True)
