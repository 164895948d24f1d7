import itertools
from fractions import Fraction

import numpy as np
import pytest

from bkfourier.padic import PAdicContext, psi
from bkfourier.regularized import PROVEN, TRUNCATED
from bkfourier.schwartz import SchwartzBruhatFunction
from bkfourier.transforms.ytransform import (
    BudgetExceeded, YBudget, YContext, YFunction, gauss_ball_integral, plane_integral, primitive_y_cells,
    random_y_function, y_inner_integral, y_transform,
)

SMALL = YBudget((-2, 2), (-1, 1), 1, 1e-2, 200)


def _brute_box(ctx, phase, centers, level, extra):
    """int over prod (c_i + p^level Z_p) of psi(phase(x)), on a grid p^extra times finer."""
    p = ctx.p
    step = Fraction(p) ** level
    total = 0j
    for offs in itertools.product(range(p**extra), repeat=len(centers)):
        x = [c + o * step for c, o in zip(centers, offs)]
        total += psi(ctx, phase(x))
    return total * float(p) ** (-(level + extra) * len(centers))


@pytest.mark.parametrize("p", [3, 5])
def test_plane_integral_matches_grid(p):
    ctx = PAdicContext(p)
    rng = np.random.default_rng(p)
    for _ in range(25):
        alpha, omega, beta = (Fraction(int(rng.integers(-4, 5)), p ** int(rng.integers(0, 2))) for _ in range(3))
        xs, xt = (Fraction(int(rng.integers(0, p * p))) for _ in range(2))
        level = int(rng.integers(0, 2))
        exact = plane_integral(ctx, alpha, omega, beta, xs, xt, level)
        brute = _brute_box(ctx, lambda x: alpha * x[0] + omega * x[1] + beta * x[0] * x[1], [xs, xt], level, 3)
        assert abs(exact - brute) < 1e-9


def test_gauss_ball_integral_matches_grid():
    p = 3
    ctx = PAdicContext(p)
    rng = np.random.default_rng(4)
    for _ in range(6):
        eta = [Fraction(int(rng.integers(-3, 4)), 3) for _ in range(4)]
        beta = Fraction(int(rng.integers(1, 9)), 9)
        center = [Fraction(int(x)) for x in rng.integers(0, 3, size=4)]
        # <eta, u> = eta^T J u and Q(u) = u^T J u / 2 for the antidiagonal J
        q = lambda u: u[0] * u[3] + u[1] * u[2]
        exact = gauss_ball_integral(ctx, 4, eta, beta, center, 1)
        brute = _brute_box(ctx, lambda u: sum(e * x for e, x in zip(eta[::-1], u)) + beta * q(u), center, 1, 2)
        assert abs(exact - brute) < 1e-9


def _direct_inner(yctx, f, eta, shift, radius, fineness):
    """sum over (beta_1, beta_2) in (p^-radius Z_p / p^fineness Z_p)^2 of the three Gauss integrals."""
    p = yctx.ctx.p
    grid = [Fraction(n, p**radius) for n in range(p ** (radius + fineness))]
    total = 0j
    for t in f.terms:
        g = [[gauss_ball_integral(yctx.ctx, 4, eta[i], b, t.centers[i], t.level) for b in grid] for i in range(2)]
        for j1, b1 in enumerate(grid):
            if g[0][j1] == 0:
                continue
            for j2, b2 in enumerate(grid):
                if g[1][j2] == 0:
                    continue
                g3 = gauss_ball_integral(yctx.ctx, 4, eta[2], 3 * shift - b1 - b2, t.centers[2], t.level)
                total += t.coeff * g[0][j1] * g[1][j2] * g3
    return total * float(p) ** (-2 * fineness)


@pytest.mark.parametrize("shift", [Fraction(2), Fraction(1, 3), Fraction(5, 9)])
def test_inner_convolution_matches_direct_sum(shift):
    yctx = YContext(PAdicContext(3))
    rng = np.random.default_rng(8)
    f = random_y_function(rng, yctx, count=2, level=1)
    eta = tuple(tuple(Fraction(int(x), 3) for x in rng.integers(-4, 5, size=4)) for _ in range(3))
    fast = y_inner_integral(yctx, f, eta, shift)
    slow = _direct_inner(yctx, f, eta, shift, radius=3, fineness=1)
    assert abs(fast - slow) < 1e-9 * max(1.0, abs(slow))


def _anisotropic_point(f):
    return tuple(tuple(t for t in c) for c in f.terms[0].centers)


def _on_y(yctx, f):
    from bkfourier.transforms.ytransform import _lift_to_y
    return _lift_to_y(yctx, _anisotropic_point(f), f.terms[0].level)


def test_symmetries_of_the_transform():
    yctx = YContext(PAdicContext(3), budget=SMALL)
    rng = np.random.default_rng(3)
    f = random_y_function(rng, yctx, count=1, level=1)
    xi = _on_y(yctx, random_y_function(rng, yctx, count=1, level=1))
    base = y_transform(yctx, f, xi, check_resolution=False).value
    # swapping the two hyperbolic planes of every factor preserves each Q_i and <,>
    swap = lambda v: (v[1], v[0], v[3], v[2])
    swapped = YFunction.from_terms(3, [(t.coeff, [swap(c) for c in t.centers], t.level) for t in f.terms])
    assert abs(y_transform(yctx, swapped, tuple(swap(v) for v in xi), check_resolution=False).value - base) < 1e-9
    # permuting the three equal factors
    perm = YFunction.from_terms(3, [(t.coeff, [t.centers[1], t.centers[2], t.centers[0]], t.level) for t in f.terms])
    assert abs(y_transform(yctx, perm, (xi[1], xi[2], xi[0]), check_resolution=False).value - base) < 1e-9
    # linearity
    doubled = YFunction.from_terms(3, [(2 * t.coeff, t.centers, t.level) for t in f.terms])
    assert abs(y_transform(yctx, doubled, xi, check_resolution=False).value - 2 * base) < 1e-9


def test_zero_function_is_proven_zero():
    yctx = YContext(PAdicContext(3), budget=SMALL)
    res = y_transform(yctx, YFunction(3, ()), ((1, 0, 0, 1),) * 3)
    assert res.value == 0 and res.status == PROVEN


def test_result_reports_layers_and_budget():
    yctx = YContext(PAdicContext(3), budget=SMALL)
    rng = np.random.default_rng(5)
    f = random_y_function(rng, yctx, count=1, level=1)
    res = y_transform(yctx, f, _on_y(yctx, f), check_resolution=False)
    assert set(res.layers) == {"v", "a", "z", "resolution"}
    assert res.layers["v"] == PROVEN and res.layers["resolution"] == TRUNCATED
    assert res.status == TRUNCATED
    assert res.to_json()["budget"]["max_cells"] == 200


def test_primitive_cell_count_and_budget():
    p = 3
    # a split form in 4 variables takes each nonzero value p^3 - p times over F_p
    expected = (p - 1) * (p**3 - p) ** 3
    yctx = YContext(PAdicContext(p), budget=YBudget(max_cells=expected))
    cells = primitive_y_cells(yctx, 1)
    assert len(cells) == expected
    point, mass = cells[0]
    assert len({yctx.q(i, point[i]) for i in range(3)}) == 1
    assert mass == pytest.approx(float(p) ** (2 - 12))
    with pytest.raises(BudgetExceeded):
        primitive_y_cells(YContext(PAdicContext(p)), 1)


def test_json_and_ambient_restriction():
    p = 3
    yctx = YContext(PAdicContext(p))
    f = random_y_function(np.random.default_rng(9), yctx, count=2, level=1)
    again = YFunction.from_json(f.to_json())
    assert again == f
    on = [1, 0, 0, 1] * 3           # Q_i = 1 on every factor
    off = [1, 0, 0, 1] * 2 + [1, 0, 0, 2]
    amb = SchwartzBruhatFunction.indicator(p, on, 1) + SchwartzBruhatFunction.indicator(p, off, 1)
    g = YFunction.from_ambient(yctx, amb)
    assert len(g.terms) == 1 and g(((1, 0, 0, 1),) * 3) == 1


def test_invalid_inputs():
    with pytest.raises(ValueError):
        YContext(PAdicContext(2))
    with pytest.raises(ValueError):
        YContext(PAdicContext(3), dims=(4, 4, 2))
    yctx = YContext(PAdicContext(3))
    with pytest.raises(ValueError):
        yctx.check_anisotropic(((1, 0, 0, 1), (1, 0, 0, 1), (1, 0, 0, 2)))
    with pytest.raises(ValueError):
        yctx.check_anisotropic(((1, 0, 0, 0),) * 3)
    with pytest.raises(ValueError):
        YFunction.from_terms(3, [(1, [[0, 0, 0, 3]] * 3, 1)])
