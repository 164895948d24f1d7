from fractions import Fraction

import pytest

from bkfourier.laurent import LaurentFraction, X
from bkfourier.padic import PAdicContext
from bkfourier.schwartz import SchwartzBruhatFunction
from bkfourier.suites import tate_basis
from bkfourier.zeta import (
    TRIVIAL, UNRAMIFIED_QUADRATIC, functional_equation_holds, gamma_from_functional_equation, zeta_integral,
    zeta_numeric,
)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_zeta_of_basic_functions(p):
    ctx = PAdicContext(p)
    one = SchwartzBruhatFunction.indicator
    # shells |x| = p^-m each have d^x-volume 1
    assert zeta_integral(one(p, [0], 0), TRIVIAL, ctx) == LaurentFraction(1 / (1 - X))
    assert zeta_integral(one(p, [0], 0), UNRAMIFIED_QUADRATIC, ctx) == LaurentFraction(1 / (1 + X))
    units = one(p, [0], 0) - one(p, [0], 1)
    assert zeta_integral(units, TRIVIAL, ctx) == LaurentFraction(1)
    # 1 + p^2 Z_p is 1/((p - 1) p) of the unit shell
    assert zeta_integral(one(p, [1], 2), TRIVIAL, ctx) == LaurentFraction(Fraction(1, (p - 1) * p))


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("eta", [TRIVIAL, UNRAMIFIED_QUADRATIC])
def test_symbolic_matches_numeric(p, eta):
    ctx = PAdicContext(p)
    for f in tate_basis(p).values():
        z = zeta_integral(f, eta, ctx)
        for s in (1.5, 2 + 3j):
            assert abs(z.evaluate(p, s) - zeta_numeric(f, eta, ctx, s)) < 1e-9


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gamma_is_independent_of_test_function(p):
    ctx = PAdicContext(p)
    for eta in (TRIVIAL, UNRAMIFIED_QUADRATIC):
        gammas = [gamma_from_functional_equation(eta, ctx, f) for f in tate_basis(p).values()]
        assert all(g.equals_at(gammas[0], p) for g in gammas)


def test_wrong_gamma_is_rejected():
    p = 3
    ctx = PAdicContext(p)
    f = tate_basis(p)["1_{1/p+pZp}"]
    right = gamma_from_functional_equation(TRIVIAL, ctx)
    assert functional_equation_holds(f, TRIVIAL, ctx, right)
    assert not functional_equation_holds(f, TRIVIAL, ctx, right * LaurentFraction(X))
