from fractions import Fraction

import pytest

from bkfourier.padic import PAdicContext, norm, valuation
from bkfourier.regularized import PROVEN, TRUNCATED
from bkfourier.transforms.normalizing import FiberFunction, mu_operator


def _tate_power_integral(p: int, z: complex) -> complex:
    """int psi(t) |t|^z d^x t for conductor 0: shells |t| <= 1 are geometric, |t| = p gives -1/(p-1)."""
    return 1 / (1 - p ** (-z)) - p**z / (p - 1)


def _power(p, a):
    return FiberFunction(lambda y: float(norm(y, p)) ** a, digits=1, low=0, ratio=float(p) ** a)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("lam", [1, 2])
def test_power_functions_match_tate_closed_form(p, lam):
    ctx = PAdicContext(p)
    a = 0.25
    for s in (0.5, 1.0 + 0.7j):
        for x in (Fraction(1), Fraction(p), Fraction(1, p**2), Fraction(p - 1, p)):
            z = s + 1 - lam * a
            expected = float(norm(x, p)) ** a * _tate_power_integral(p, z) * (1 - 1 / p)
            res = mu_operator(s, lam, _power(p, a), ctx, x)
            assert res.status != TRUNCATED
            assert abs(res.value - expected) < 1e-9 * max(1, abs(expected))


@pytest.mark.parametrize("p", [3, 5])
def test_unit_shell_indicator(p):
    ctx = PAdicContext(p)
    h = FiberFunction(lambda y: 1.0 if valuation(y, p) == 0 else 0.0, digits=1, low=0, ratio=0)
    s, lam, w = 0.3, 2, 0.5
    e = s + 1 + w
    zeta_inv = 1 - 1 / p
    # h(t^-lam x) = 1 exactly when lam ord(t) = ord(x)
    cases = {Fraction(1): 1.0, Fraction(p**lam): p ** (-e), Fraction(1, p**lam): -(p**e) / (p - 1),
             Fraction(p): 0.0}
    for x, shell in cases.items():
        res = mu_operator(s, lam, h, ctx, x, weight_exponent=w)
        assert abs(res.value - shell * zeta_inv) < 1e-12


def test_zero_function_is_proven_zero():
    res = mu_operator(0.5, 1, FiberFunction(lambda y: 0.0), PAdicContext(3))
    assert res.value == 0 and res.status == PROVEN


def test_divergent_power_law_is_truncated():
    p = 3
    res = mu_operator(-2.0, 1, _power(p, 0.0), PAdicContext(p))
    assert res.status == TRUNCATED
    assert set(res.to_json()) == {"value", "status", "shells_used"}


def test_bad_arguments():
    ctx = PAdicContext(3)
    with pytest.raises(ValueError):
        mu_operator(0.5, 0, _power(3, 0.0), ctx)
    with pytest.raises(ValueError):
        mu_operator(0.5, 1, _power(3, 0.0), ctx, x=0)
