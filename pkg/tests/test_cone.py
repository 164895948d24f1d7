from fractions import Fraction

import numpy as np
import pytest

from bkfourier.padic import PAdicContext, psi, valuation
from bkfourier.schwartz import SchwartzBruhatFunction
from bkfourier.transforms.cone import (
    ConeContext, ConeFunction, cone_ball_integral, cone_transform, lift_to_cone, make_ball,
    plancherel_defect, random_cone_function,
)


def _brute_ball_integral(cctx, ball, w, depth):
    """int over ball ∩ C of psi(<w, v>) by counting lattice points of the cone mod p^M.

    The cone measure of a cell is the limit of vol{|Q| <= p^-M} * p^M; points of the
    ball are enumerated on a grid p^depth times finer than the ball.
    """
    p, n, c = cctx.p, cctx.n, cctx.ctx.psi_conductor
    M = ball.level + depth
    e = int(ball.center_valuation(p))
    big = p ** (M + e + 4)
    a = np.array([x.numerator * pow(x.denominator, -1, big) % big for x in ball.center], dtype=np.int64)
    kden = max(0, -min(valuation(x, p) for x in w if x != 0))
    mod = p ** (kden + c)
    scaled = [x * p**kden for x in w]
    W = np.array([x.numerator * pow(x.denominator, -1, mod) % mod for x in scaled], dtype=np.int64)
    h = np.indices((p**depth,) * n).reshape(n, -1).T.astype(np.int64)
    pts = a + p**ball.level * h
    twoq = sum(pts[:, i] * pts[:, n - 1 - i] for i in range(n))
    on = (twoq % p ** (M + e)) == 0
    vals = np.exp(2j * np.pi * ((pts @ W[::-1]) % mod) / mod)
    return float(Fraction(p) ** (-(n - 1) * M + e)) * vals[on].sum()


@pytest.mark.parametrize("p,n", [(3, 6), (3, 5), (5, 5)])
def test_ball_integral_matches_lattice_count(p, n):
    cctx = ConeContext(PAdicContext(p), n)
    rng = np.random.default_rng(n * p)
    f = random_cone_function(rng, cctx, count=2, level=1)
    compared = 0
    for ball, _ in f.terms:
        for _ in range(3):
            y = Fraction(int(rng.integers(1, p)), p ** int(rng.integers(0, 2)))
            z = [Fraction(int(x)) for x in rng.integers(-2, 3, size=n)]
            w = [y * a + zi for a, zi in zip(ball.center, z)]
            vw = min(valuation(x, p) for x in w if x != 0)
            depth = int(max(1, -vw - ball.level + 1))
            if p ** (depth * n) > 3_000_000:
                continue
            assert abs(cone_ball_integral(cctx, ball, w) - _brute_ball_integral(cctx, ball, w, depth)) < 1e-9
            compared += 1
    assert compared >= 3


def _direct_transform(cctx, f, v, taus, digits):
    """sum over shells |t| = p^-tau of psi(1/t) |t|^weight I(t^lam v) dt, by unit cosets."""
    p = cctx.p
    lam = 2 if cctx.odd else 1
    weight = Fraction(cctx.n - 4) if cctx.odd else Fraction(cctx.n - 6, 2)
    total = 0j
    units = [k for k in range(1, p**digits) if k % p]
    for tau in taus:
        acc = 0j
        for k in units:
            t = Fraction(p) ** tau * k
            w = [t**lam * x for x in v]
            acc += psi(cctx.ctx, 1 / t) * sum(c * cone_ball_integral(cctx, b, w) for b, c in f.terms)
        shell = float(p) ** (-tau) * (1 - 1 / p)
        total += acc / len(units) * shell * float(p) ** float(-tau * weight)
    return total


@pytest.mark.parametrize("p,n", [(3, 6), (3, 5)])
def test_transform_matches_direct_shell_sum(p, n):
    cctx = ConeContext(PAdicContext(p), n)
    rng = np.random.default_rng(5)
    f = random_cone_function(rng, cctx, count=2, level=1)
    g = random_cone_function(rng, cctx, count=1, level=1)
    for v in (f.terms[0][0].center, g.terms[0][0].center):
        exact = cone_transform(cctx, f, v)
        assert exact.status != "truncated"
        # the tail at large |t| shrinks by 1/p per shell; stop where it is below 1e-9
        direct = _direct_transform(cctx, f, v, range(-20, 6), 6)
        assert abs(exact.value - direct) < 1e-6 * max(1.0, abs(exact.value))


@pytest.mark.parametrize("lam", [Fraction(2), Fraction(3), Fraction(1, 3)])
def test_dilation_equivariance(lam):
    p, n = 3, 6
    cctx = ConeContext(PAdicContext(p), n)
    rng = np.random.default_rng(17)
    f = random_cone_function(rng, cctx, count=2, level=1)
    vl = int(valuation(lam, p))
    # f(lam^-1 v) is supported on lam * ball
    dilated = ConeFunction.from_balls(cctx, [((tuple(lam * x for x in b.center), b.level + vl), c)
                                             for b, c in f.terms])
    v = random_cone_function(rng, cctx, count=1, level=1).terms[0][0].center
    lhs = cone_transform(cctx, dilated, v).value
    rhs = float(abs(float(Fraction(p) ** -vl))) ** (n - 2) * cone_transform(cctx, f, tuple(lam * x for x in v)).value
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("p", [3, 5])
def test_plancherel_symmetry(p):
    cctx = ConeContext(PAdicContext(p), 6)
    rng = np.random.default_rng(p)
    for _ in range(3):
        res = plancherel_defect(cctx, random_cone_function(rng, cctx, 2, 1), random_cone_function(rng, cctx, 2, 1))
        assert res["defect"] < 1e-6 * res["scale"]
        assert "truncated" not in res["statuses"]


def test_from_ambient_and_json_round_trip():
    p, n = 3, 6
    cctx = ConeContext(PAdicContext(p), n)
    amb = SchwartzBruhatFunction.indicator(p, [1, 0, 0, 0, 0, 0], 1)
    f = ConeFunction.from_ambient(cctx, amb)
    assert len(f.terms) == 1
    again = ConeFunction.from_json(cctx, f.to_json())
    v = (0, 0, 0, 0, 0, 1)
    assert cone_transform(cctx, again, v).value == cone_transform(cctx, f, v).value
    with pytest.raises(ValueError):
        ConeFunction.from_ambient(cctx, SchwartzBruhatFunction.indicator(p, [0] * n, 1))


def test_off_cone_inputs_rejected():
    cctx = ConeContext(PAdicContext(3), 6)
    assert lift_to_cone(cctx, (1, 0, 0, 0, 0, 1), 1) is None
    with pytest.raises(ValueError):
        make_ball(cctx, (1, 0, 0, 0, 0, 1), 1)
    with pytest.raises(ValueError):
        ConeContext(PAdicContext(2), 6)
