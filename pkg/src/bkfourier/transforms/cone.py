"""Fourier transform on the isotropic cone of the split form J_n.

Cone measures are Gelfand-Leray measures |omega| with dv = dQ ^ omega for the
standard Haar measures (vol Z_p^n = vol Z_p = 1).  A ball a + p^L Z_p^n with a
on the cone and v(a) < L meets the cone in a piece of measure p^{-(n-1)L + v(a)},
and integrals of psi(<v, w>) over such a piece have closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import sympy

from ..padic import PAdicContext, as_fraction, frac_p, psi, valuation
from ..regularized import PROVEN, TRUNCATED, TruncationPolicy
from ..schwartz import SchwartzBruhatFunction

INF = math.inf


def _vec_valuation(v: Sequence[Fraction], p: int):
    return min((valuation(x, p) for x in v), default=INF)


def _pow(p: int, k: int) -> Fraction:
    return Fraction(p) ** k


@dataclass(frozen=True)
class ConeContext:
    ctx: PAdicContext
    n: int
    policy: TruncationPolicy = TruncationPolicy()

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("the cone needs n >= 3")
        if self.ctx.p == 2:
            raise ValueError("cone integrals are implemented for odd p")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def rank(self) -> int:
        return self.n // 2

    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def middle(self) -> int | None:
        return self.n // 2 if self.odd else None

    def pair(self, v, w) -> Fraction:
        n = self.n
        return sum((as_fraction(v[i]) * as_fraction(w[n - 1 - i]) for i in range(n)), Fraction(0))

    def quadratic(self, v) -> Fraction:
        return self.pair(v, v) / 2

    def on_cone(self, v) -> bool:
        return len(v) == self.n and self.quadratic(v) == 0

    def partner(self, i: int) -> int:
        return self.n - 1 - i

    def chart_index(self, a: Sequence[Fraction]) -> int:
        """A non-middle coordinate of minimal valuation."""
        best, best_v = None, INF
        for i, x in enumerate(a):
            if i == self.middle:
                continue
            vx = valuation(x, self.p)
            if vx < best_v:
                best, best_v = i, vx
        if best is None or best_v > _vec_valuation(a, self.p):
            raise ValueError("no chart coordinate: point is not on the cone")
        return best


@dataclass(frozen=True)
class ConeBall:
    """The piece of the cone inside center + p^level Z_p^n, center on the cone."""

    center: tuple
    level: int

    @property
    def dim(self) -> int:
        return len(self.center)

    def center_valuation(self, p: int):
        return _vec_valuation(self.center, p)

    def measure(self, cctx: ConeContext) -> Fraction:
        e = self.center_valuation(cctx.p)
        return _pow(cctx.p, -(cctx.n - 1) * self.level + e)

    def contains(self, v, p: int) -> bool:
        return all(valuation(as_fraction(x) - c, p) >= self.level for x, c in zip(v, self.center))

    def to_json(self) -> dict:
        return {"center": [str(c) for c in self.center], "level": self.level}


def make_ball(cctx: ConeContext, center, level: int) -> ConeBall:
    center = tuple(as_fraction(c) for c in center)
    if not cctx.on_cone(center):
        raise ValueError("ball center must lie on the cone")
    e = _vec_valuation(center, cctx.p)
    if e == INF:
        raise ValueError("ball center must be nonzero")
    if e >= level:
        raise ValueError("ball contains the origin")
    return ConeBall(center, level)


def lift_to_cone(cctx: ConeContext, a: Sequence, level: int):
    """A cone point in a + p^level Z_p^n, or None; needs v(a) < level."""
    p = cctx.p
    a = [as_fraction(x) for x in a]
    e = _vec_valuation(a, p)
    if e >= level:
        raise ValueError("cell contains the origin")
    q = cctx.quadratic(a)
    if q != 0 and valuation(q, p) < level + e:
        return None
    if q == 0:
        return tuple(a)
    k = cctx.chart_index(a)
    j = cctx.partner(k)
    # Q is linear in v_j with slope a_k, and v(Q(a) / a_k) >= level
    a[j] = a[j] - q / a[k]
    assert cctx.quadratic(a) == 0
    return tuple(a)


# Per-ball closed forms ------------------------------------------------------


def _middle_gauss(cctx: ConeContext, sigma: Fraction) -> complex:
    """int_{Z_p} psi(sigma h^2 / 2) dh for v(sigma) < c, p odd."""
    p, c = cctx.p, cctx.ctx.psi_conductor
    a = sigma / (2 * _pow(p, c))
    m = -int(valuation(a, p))
    assert m > 0
    amp = p ** (-m / 2)
    if m % 2 == 0:
        return complex(amp)
    unit = a * _pow(p, m)
    residue = unit.numerator * pow(unit.denominator, -1, p) % p
    eps = 1 if p % 4 == 1 else 1j
    return amp * sympy.legendre_symbol(residue, p) * eps


def _scaled(cctx: ConeContext, ball: ConeBall, w):
    """Primitive center, relative level, rescaled frequency and measure factor."""
    p = cctx.p
    e = int(ball.center_valuation(p))
    a = tuple(x / _pow(p, e) for x in ball.center)
    w = tuple(as_fraction(x) * _pow(p, e) for x in w)
    return a, ball.level - e, w, _pow(p, -e * (cctx.n - 2))


def cone_ball_integral(cctx: ConeContext, ball: ConeBall, w) -> complex:
    """Exact value of int_{C cap ball} psi(<v, w>) |omega(v)|.

    Writes the cone measure as int_F psi(s Q(v)) ds and evaluates the Gauss
    integrals over the ball pair by pair.
    """
    p, c, n = cctx.p, cctx.ctx.psi_conductor, cctx.n
    a, L, w, factor = _scaled(cctx, ball, w)
    k = cctx.chart_index(a)
    s0 = -w[k] / a[k]
    d = tuple(wi + s0 * ai for wi, ai in zip(w, a))
    vd = _vec_valuation(d, p)
    m0 = valuation(s0, p)
    base = _pow(p, c - n * L)
    total = 0j
    # |s| small: the quadratic part is trivial on the ball
    if vd >= c - L and m0 >= c - 2 * L:
        total += float(_pow(p, L - c)) * psi(cctx.ctx, cctx.pair(a, w))
    # |s| large: only s near s0 survives the Gauss integrals
    if m0 < c - 2 * L and vd >= m0 + L:
        m0 = int(m0)
        sigma = s0 * _pow(p, 2 * L)
        amp = float(_pow(p, cctx.rank * (m0 + 2 * L - c)))
        if cctx.odd:
            amp = amp * _middle_gauss(cctx, sigma)
        total += amp * _s_ball_integral(cctx, s0, m0 + L, cctx.quadratic(w))
    return complex(float(factor * base) * total)


def _s_ball_integral(cctx: ConeContext, s0: Fraction, radius: int, qw: Fraction) -> complex:
    """int over s0 + p^radius Z_p of psi(-qw / s) ds."""
    p, c = cctx.p, cctx.ctx.psi_conductor
    vol = float(_pow(p, -radius))
    if qw == 0:
        return complex(vol)
    m0 = int(valuation(s0, p))
    digits = max(0, c - int(valuation(qw, p)) + 2 * m0 - radius)
    step = _pow(p, radius)
    acc = 0j
    for u in range(p**digits):
        acc += psi(cctx.ctx, -qw / (s0 + step * u))
    return acc * vol / p**digits


# The transform --------------------------------------------------------------


def _shell_psi_inverse(cctx: ConeContext, tau: int) -> Fraction:
    """int_{v(t) = tau} psi(1/t) dt."""
    p, c = cctx.p, cctx.ctx.psi_conductor
    m = -tau  # valuation of 1/t
    scale = _pow(p, -2 * tau)  # dt = ds / |s|^2 with |s| = p^tau
    if m >= c:
        return scale * _pow(p, -m) * Fraction(p - 1, p)
    if m == c - 1:
        return -scale * _pow(p, -m - 1)
    return Fraction(0)


@dataclass(frozen=True)
class KernelTerms:
    """Data of v' entering the transform of one ball (after rescaling)."""

    x: Fraction  # <a, v'>
    chart_valuation: object  # v(v'_k)
    transverse_valuation: object  # v(v' - (v'_k / a_k) a)
    ratio_unit: Fraction  # unit part of -v'_k / a_k, or 0


@dataclass
class ConeTransformResult:
    value: complex
    status: str
    layers: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag}, "status": self.status,
                "layers": self.layers}


class _BallTransform:
    """t-integral of psi(1/t) |t|^weight I_ball(t^lam v') for one ball."""

    def __init__(self, cctx: ConeContext, ball: ConeBall):
        self.cctx = cctx
        self.ball = ball
        p = cctx.p
        self.e = int(ball.center_valuation(p))
        self.a = tuple(x / _pow(p, self.e) for x in ball.center)
        self.L = ball.level - self.e
        self.k = cctx.chart_index(self.a)
        self.lam = 2 if cctx.odd else 1
        n = cctx.n
        # |t|^{(n-4)/2} d^x t / zeta(1) = |t|^{(n-6)/2} dt for even n, |t|^{n-4} dt for odd n
        self.weight = Fraction(n - 6, 2) if not cctx.odd else Fraction(n - 4)
        self.cache = {}
        self.results = {}

    def terms(self, v_prime) -> KernelTerms:
        p = self.cctx.p
        vp = tuple(as_fraction(x) * _pow(p, self.e) for x in v_prime)
        ratio = vp[self.k] / self.a[self.k]
        d = tuple(x - ratio * y for x, y in zip(vp, self.a))
        unit = -ratio / _pow(p, int(valuation(ratio, p))) if ratio != 0 else Fraction(0)
        return KernelTerms(self.cctx.pair(self.a, vp), valuation(vp[self.k], p), _vec_valuation(d, p), unit)

    def _weight_factor(self, tau: int) -> float:
        # |t|^weight on the shell v(t) = tau; weight may be half-integral
        return float(self.cctx.p) ** float(-tau * self.weight)

    def _region_a(self, t_terms: KernelTerms, tau: int) -> bool:
        c = self.cctx.ctx.psi_conductor
        lt = self.lam * tau
        return lt + t_terms.transverse_valuation >= c - self.L and lt + t_terms.chart_valuation >= c - 2 * self.L

    def _region_b_amplitude(self, t_terms: KernelTerms, tau: int):
        """Coefficient of the large-|s| part at shell tau, or None when it vanishes."""
        cctx, p, c, L = self.cctx, self.cctx.p, self.cctx.ctx.psi_conductor, self.L
        nu = t_terms.chart_valuation
        if nu == INF:
            return None
        m0 = self.lam * tau + int(nu)
        if not (m0 < c - 2 * L and t_terms.transverse_valuation >= int(nu) + L):
            return None
        amp = complex(float(_pow(p, cctx.rank * (m0 + 2 * L - c) - (m0 + L))))
        if cctx.odd:
            # s0 = -t^2 v'_k / a_k has the square class of -v'_k / a_k
            amp *= _middle_gauss(cctx, t_terms.ratio_unit * _pow(p, m0 + 2 * L))
        return amp

    def _region_a_shell(self, x: Fraction, tau: int) -> complex:
        """int_{v(t)=tau} psi(1/t + t^lam x) dt."""
        cctx, p, c = self.cctx, self.cctx.p, self.cctx.ctx.psi_conductor
        vx = valuation(x, p)
        need = [1, c + tau]
        if vx != INF:
            need.append(c - self.lam * tau - int(vx))
        digits = max(need)
        key = (tau, frac_p(x * _pow(p, self.lam * tau - c), p) if vx != INF else None, digits)
        if key in self.cache:
            return self.cache[key]
        acc = 0j
        pt = _pow(p, tau)
        for u in range(1, p**digits):
            if u % p == 0:
                continue
            t = pt * u
            acc += psi(cctx.ctx, 1 / t + t**self.lam * x)
        out = acc * float(_pow(p, -tau)) / p**digits
        self.cache[key] = out
        return out

    def _tau_a(self, tt: KernelTerms):
        """Lowest shell with a live small-|s| part, or None if there is none."""
        c, L, lam = self.cctx.ctx.psi_conductor, self.L, self.lam
        bounds = []
        if tt.transverse_valuation != INF:
            bounds.append(math.ceil(Fraction(c - L - tt.transverse_valuation, lam)))
        if tt.chart_valuation != INF:
            bounds.append(math.ceil(Fraction(c - 2 * L - int(tt.chart_valuation), lam)))
        return max(bounds) if bounds else None

    def evaluate(self, v_prime) -> tuple:
        """Returns (value, shells summed) for F_C(1_ball)(v')."""
        p, c = self.cctx.p, self.cctx.ctx.psi_conductor
        tt = self.terms(v_prime)
        tau_a = self._tau_a(tt)
        # psi(t^lam x) only sees x modulo p^(c - lam tau_a) on the live shells
        x = reduce_center(tt.x, p, c - self.lam * tau_a) if tau_a is not None else Fraction(0)
        square_class = None
        if self.cctx.odd and tt.ratio_unit != 0:
            square_class = sympy.legendre_symbol(
                tt.ratio_unit.numerator * pow(tt.ratio_unit.denominator, -1, p) % p, p)
        key = (x, tt.chart_valuation, tt.transverse_valuation, square_class)
        if key not in self.results:
            self.results[key] = self._evaluate_terms(KernelTerms(x, tt.chart_valuation,
                                                                 tt.transverse_valuation, tt.ratio_unit))
        return self.results[key]

    def _evaluate_terms(self, tt: KernelTerms) -> tuple:
        cctx, p, c, L = self.cctx, self.cctx.p, self.cctx.ctx.psi_conductor, self.L
        base = float(_pow(p, c - cctx.n * L)) * float(_pow(p, -self.e * (cctx.n - 2)))
        lam = self.lam
        # region A is empty below tau_a; above tau_hi everything is constant in t
        tau_a = self._tau_a(tt)
        hi = [2 - c]
        if tt.x != 0:
            hi.append(math.ceil(Fraction(c - int(valuation(tt.x, p)), lam)))
        if tau_a is not None:
            hi.append(tau_a)
        if tt.chart_valuation != INF:
            hi.append(math.ceil(Fraction(c - 2 * L - int(tt.chart_valuation), lam)))
        tau_hi = max(hi)
        # below tau_geo only the large-|s| part survives and psi(1/t) = 1
        tau_geo = min(-c, tau_a if tau_a is not None else -c)
        total = 0j
        shells = 0
        for tau in range(tau_geo, tau_hi):
            shells += 1
            contrib = 0j
            if tau_a is not None and tau >= tau_a:
                contrib += float(_pow(p, L - c)) * self._region_a_shell(tt.x, tau)
            amp = self._region_b_amplitude(tt, tau)
            if amp is not None:
                contrib += amp * float(_shell_psi_inverse(cctx, tau))
            total += contrib * self._weight_factor(tau)
        # geometric tail tau < tau_geo: each shell is 1/p of the next one up
        amp = self._region_b_amplitude(tt, tau_geo - 1)
        if amp is not None:
            first = amp * float(_shell_psi_inverse(cctx, tau_geo - 1)) * self._weight_factor(tau_geo - 1)
            second_amp = self._region_b_amplitude(tt, tau_geo - 2)
            second = second_amp * float(_shell_psi_inverse(cctx, tau_geo - 2)) * self._weight_factor(tau_geo - 2)
            if abs(second - first / p) > 1e-12 * max(1.0, abs(first)):
                raise ArithmeticError("ray tail is not geometric")
            total += first / (1 - 1 / p)
        return base * total, shells


@dataclass
class ConeFunction:
    """Finite combination sum c_j 1_{ball_j} restricted to the cone."""

    p: int
    n: int
    terms: tuple

    @classmethod
    def from_balls(cls, cctx: ConeContext, pairs) -> "ConeFunction":
        out = []
        for ball, coeff in pairs:
            if not isinstance(ball, ConeBall):
                center, level = ball
                ball = make_ball(cctx, center, level)
            out.append((ball, complex(coeff)))
        return cls(cctx.p, cctx.n, tuple(out))

    @classmethod
    def from_ambient(cls, cctx: ConeContext, f: SchwartzBruhatFunction) -> "ConeFunction":
        """Restriction of an ambient Schwartz-Bruhat function to C - {0}."""
        if f.dim != cctx.n or f.p != cctx.p:
            raise ValueError("function does not live on the ambient space of the cone")
        out = []
        for point, coeff in f.terms.items():
            if all(valuation(x, f.p) >= f.level for x in point):
                raise ValueError("function does not vanish near the origin")
            lifted = lift_to_cone(cctx, point, f.level)
            if lifted is not None:
                out.append((ConeBall(lifted, f.level), coeff))
        return cls(cctx.p, cctx.n, tuple(out))

    def __call__(self, v) -> complex:
        return sum((c for b, c in self.terms if b.contains(v, self.p)), 0j)

    def max_level(self) -> int:
        return max((b.level for b, _ in self.terms), default=0)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n,
                "terms": [{"ball": b.to_json(), "re": c.real, "im": c.imag} for b, c in self.terms]}

    @classmethod
    def from_json(cls, cctx: ConeContext, data: dict) -> "ConeFunction":
        if data.get("p", cctx.p) != cctx.p or data.get("n", cctx.n) != cctx.n:
            raise ValueError("function file does not match the cone")
        pairs = [((t["ball"]["center"], int(t["ball"]["level"])), complex(t["re"], t.get("im", 0.0)))
                 for t in data["terms"]]
        return cls.from_balls(cctx, pairs)


def random_cone_function(rng: np.random.Generator, cctx: ConeContext, count: int = 3,
                         level: int = 1, coordinate_bound: int | None = None) -> ConeFunction:
    """Random primitive cone points as centers of level-`level` balls."""
    p, n = cctx.p, cctx.n
    bound = coordinate_bound or p**level
    pairs = []
    seen = set()
    while len(pairs) < count:
        v = [Fraction(int(x)) for x in rng.integers(0, bound, size=n)]
        k = int(rng.integers(0, n))
        if k == cctx.middle:
            continue
        j = cctx.partner(k)
        v[k] = Fraction(int(rng.integers(1, p)))
        v[j] = Fraction(0)
        v[j] = -cctx.quadratic(v) / v[k]
        key = tuple(reduce_center(x, p, level) for x in v)
        if key in seen:
            continue
        seen.add(key)
        coeff = complex(rng.normal(), rng.normal())
        pairs.append((make_ball(cctx, v, level), coeff))
    return ConeFunction(p, n, tuple(pairs))


def reduce_center(x: Fraction, p: int, level: int) -> Fraction:
    from ..padic import reduce_mod
    return reduce_mod(x, p, level)


def cone_transform(cctx: ConeContext, f: ConeFunction, v_prime) -> ConeTransformResult:
    """F_C(f)(v') as a t-shell sum with closed-form cone integrals.

    Shells outside the computed range vanish exactly; the shells along the ray
    through v' form a geometric series that is summed in closed form.
    """
    v_prime = tuple(as_fraction(x) for x in v_prime)
    if not cctx.on_cone(v_prime):
        raise ValueError("v' must lie on the cone")
    if _vec_valuation(v_prime, cctx.p) == INF:
        raise ValueError("v' must be nonzero")
    if cctx.n % 2 == 0 and cctx.n <= 4:
        raise ValueError("the even case needs n > 4")
    total = 0j
    shells = 0
    for ball, coeff in f.terms:
        value, used = _ball_transform(cctx, ball).evaluate(v_prime)
        total += coeff * value
        shells = max(shells, used)
    status = PROVEN if shells <= cctx.policy.max_shell else TRUNCATED
    return ConeTransformResult(total, status, {"t-shells": {"status": status, "shells_used": shells}})


@lru_cache(maxsize=4096)
def _ball_transform(cctx: ConeContext, ball: ConeBall) -> _BallTransform:
    return _BallTransform(cctx, ball)


# Integration over the cone ---------------------------------------------------


def cone_quadrature(cctx: ConeContext, ball: ConeBall, level: int) -> list:
    """Cone points and weights, one per level-`level` cell of the ball meeting the cone.

    Cells are enumerated through the chart that solves the partner of a
    minimal-valuation coordinate, so each cone cell is visited once.
    """
    p, n = cctx.p, cctx.n
    if level < ball.level:
        raise ValueError("quadrature level must refine the ball")
    e = int(ball.center_valuation(p))
    weight = _pow(p, -(n - 1) * level + e)
    depth = level - ball.level
    if depth == 0:
        return [(ball.center, weight)]
    a = ball.center
    k = cctx.chart_index(a)
    j = cctx.partner(k)
    free = [i for i in range(n) if i != j]
    step = _pow(p, ball.level)
    out = []
    for digits in itertools.product(range(p**depth), repeat=n - 1):
        point = list(a)
        for i, h in zip(free, digits):
            point[i] = a[i] + step * h
        point[j] = Fraction(0)
        point[j] = -cctx.quadratic(point) / point[k]
        if valuation(point[j] - a[j], p) >= ball.level:
            out.append((tuple(point), weight))
    return out


def _resolution_for(cctx: ConeContext, ball: ConeBall, tball: ConeBall) -> int:
    """A level on which F_C(1_ball) is constant on cone cells of tball."""
    p = cctx.p
    bt = _ball_transform(cctx, ball)
    e1, rel = bt.e, bt.L
    e2 = int(tball.center_valuation(p))
    tt = bt.terms(tball.center)
    # valuations seen from the rescaled ball are known to precision tball.level + e1
    precision = tball.level + e1
    bounds = [2 * rel + e2]
    if tt.transverse_valuation < precision:
        bounds.append(rel + int(tt.transverse_valuation) - e1)
    if tt.chart_valuation < precision:
        bounds.append(2 * rel + int(tt.chart_valuation) - e1)
    # the smallest live shell needs psi(t^lam <a, v'>) constant on the cells
    return max(tball.level, min(bounds))


def transform_resolution(cctx: ConeContext, f: ConeFunction, target: ConeFunction) -> dict:
    """Quadrature level per target ball on which F_C(f) is constant on cells."""
    return {tball: max([tball.level] + [_resolution_for(cctx, ball, tball) for ball, _ in f.terms])
            for tball, _ in target.terms}


def cone_pairing(cctx: ConeContext, f1: ConeFunction, f2: ConeFunction, extra_level: int = 0) -> ConeTransformResult:
    """int_C F_C(f1) f2 |omega| by quadrature over the cells of f2."""
    levels = transform_resolution(cctx, f1, f2)
    total = 0j
    status = PROVEN
    points = 0
    for ball, coeff in f2.terms:
        for point, weight in cone_quadrature(cctx, ball, levels[ball] + extra_level):
            res = cone_transform(cctx, f1, point)
            if res.status == TRUNCATED:
                status = TRUNCATED
            total += coeff * float(weight) * res.value
            points += 1
    return ConeTransformResult(total, status, {"quadrature": {"levels": sorted(set(levels.values())),
                                                              "points": points},
                                               "t-shells": {"status": status}})


def cone_inner(cctx: ConeContext, f1: ConeFunction, f2: ConeFunction) -> complex:
    """int_C f1 conj(f2) |omega| for functions on balls."""
    total = 0j
    for b1, c1 in f1.terms:
        for b2, c2 in f2.terms:
            small, big = (b1, b2) if b1.level >= b2.level else (b2, b1)
            if big.contains(small.center, cctx.p):
                total += c1 * np.conj(c2) * float(small.measure(cctx))
    return total


def cone_norm(cctx: ConeContext, f: ConeFunction) -> float:
    return float(np.sqrt(abs(cone_inner(cctx, f, f))))


def plancherel_defect(cctx: ConeContext, f1: ConeFunction, f2: ConeFunction) -> dict:
    lhs = cone_pairing(cctx, f1, f2)
    rhs = cone_pairing(cctx, f2, f1)
    scale = cone_norm(cctx, f1) * cone_norm(cctx, f2)
    return {"lhs": lhs.value, "rhs": rhs.value, "defect": abs(lhs.value - rhs.value),
            "scale": scale, "statuses": [lhs.status, rhs.status],
            "layers": {"lhs": lhs.layers, "rhs": rhs.layers}}
