"""The Fourier transform on Y = {Q_1(v_1) = Q_2(v_2) = Q_3(v_3)} by nested shell sums.

Test functions are finite sums of product balls B_1 x B_2 x B_3 in V = V_1 x V_2 x V_3,
each B_i a ball of V_i avoiding the origin.  For such a term the integral over Y is
realized through the auxiliary variables (v_1, v_2) in F^2: the V-integral factors into
one Gauss integral per V_i, each a product of hyperbolic-plane integrals in closed form,
and the F^2 integral becomes a cyclic convolution of three compactly supported functions
on a finite quotient of Q_p.  The outer integrals over a in (F^x)^3 and z in F^x are
shell sums over unit cosets and carry their own status.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from ..local_factors import QuadraticSpace, chi_Q, weil_index_form
from ..padic import PAdicContext, as_fraction, psi, valuation
from ..regularized import PROVEN, STABILIZED, TRUNCATED


class BudgetExceeded(RuntimeError):
    """Raised when a Y-integration would need more cells than the budget allows."""


@dataclass(frozen=True)
class YBudget:
    z_orders: tuple = (-3, 3)
    a_orders: tuple = (-2, 2)
    unit_digits: int = 1
    tolerance: float = 1e-2
    max_cells: int = 2000

    def __post_init__(self):
        if self.z_orders[0] > self.z_orders[1] or self.a_orders[0] > self.a_orders[1]:
            raise ValueError("shell ranges must be nonempty")
        if self.unit_digits < 1 or self.max_cells < 1 or not self.tolerance > 0:
            raise ValueError("budgets must be positive")

    def refined(self) -> "YBudget":
        return YBudget(self.z_orders, self.a_orders, self.unit_digits + 1, self.tolerance,
                       self.max_cells)

    def to_json(self) -> dict:
        return {"z_orders": list(self.z_orders), "a_orders": list(self.a_orders),
                "unit_digits": self.unit_digits, "tolerance": self.tolerance,
                "max_cells": self.max_cells}


@dataclass(frozen=True)
class YContext:
    """Three split quadratic spaces (Gram J_d, d even and > 2) over Q_p, p odd."""

    ctx: PAdicContext
    dims: tuple = (4, 4, 4)
    budget: YBudget = YBudget()
    constant: Optional[complex] = None

    def __post_init__(self):
        if len(self.dims) != 3:
            raise ValueError("Y is built from three quadratic spaces")
        for d in self.dims:
            if d % 2 or d <= 2:
                raise ValueError("each V_i needs even dimension > 2")
        if self.ctx.p == 2:
            raise ValueError("p = 2 is not supported")

    @cached_property
    def spaces(self) -> tuple:
        return tuple(QuadraticSpace.split(d) for d in self.dims)

    @cached_property
    def gamma(self) -> complex:
        out = 1 + 0j
        for s in self.spaces:
            out *= weil_index_form(s, 1, self.ctx)
        return out

    @property
    def kappa(self) -> Fraction:
        # J_d is unimodular, so the standard lattice is self-dual for <,> and for the
        # standard pairing alike once psi is unramified
        if self.ctx.psi_conductor != 0:
            raise ValueError("kappa is only fixed here for unramified psi")
        return Fraction(1)

    @property
    def nominal_constant(self) -> complex:
        """gamma(Q) kappa / (|3| zeta(1)), i.e. the constant with k = 1."""
        p = self.ctx.p
        norm3 = Fraction(p) ** (-valuation(3, p)) if p == 3 else Fraction(1)
        return self.gamma * float(self.kappa) / float(norm3 * self.ctx.zeta1)

    @property
    def c(self) -> complex:
        return self.nominal_constant if self.constant is None else complex(self.constant)

    def with_constant(self, c: complex) -> "YContext":
        return YContext(self.ctx, self.dims, self.budget, c)

    def with_budget(self, budget: YBudget) -> "YContext":
        return YContext(self.ctx, self.dims, budget, self.constant)

    def q(self, i: int, x) -> Fraction:
        return self.spaces[i].q(x)

    def chi(self, a: Sequence) -> int:
        out = 1
        for s, ai in zip(self.spaces, a):
            out *= chi_Q(s, ai, self.ctx)
        return out

    def check_anisotropic(self, xi: Sequence) -> Fraction:
        """The common value Q_i(xi_i), which must be nonzero."""
        if len(xi) != 3 or any(len(x) != d for x, d in zip(xi, self.dims)):
            raise ValueError("xi must have one vector per factor")
        values = {self.q(i, xi[i]) for i in range(3)}
        if len(values) != 1:
            raise ValueError("xi is not on Y")
        (value,) = values
        if value == 0:
            raise ValueError("xi is isotropic")
        return value


# Test functions -----------------------------------------------------------------


@dataclass(frozen=True)
class ProductBall:
    coeff: complex
    centers: tuple
    level: int

    def contains(self, point, p: int) -> bool:
        for center, x in zip(self.centers, point):
            for c, y in zip(center, x):
                if valuation(as_fraction(y) - c, p) < self.level:
                    return False
        return True

    def to_json(self) -> dict:
        return {"coeff": {"re": complex(self.coeff).real, "im": complex(self.coeff).imag},
                "centers": [[str(c) for c in center] for center in self.centers],
                "level": self.level}


@dataclass(frozen=True)
class YFunction:
    """A finite sum of product-ball indicators on V, restricted to Y."""

    p: int
    terms: tuple

    @classmethod
    def from_terms(cls, p: int, terms: Sequence) -> "YFunction":
        out = []
        for coeff, centers, level in terms:
            cs = tuple(tuple(as_fraction(c) for c in center) for center in centers)
            for center in cs:
                if min(valuation(c, p) for c in center) >= level:
                    raise ValueError("each factor ball must avoid the origin")
            out.append(ProductBall(complex(coeff), cs, int(level)))
        return cls(p, tuple(out))

    def __call__(self, point) -> complex:
        return sum((t.coeff for t in self.terms if t.contains(point, self.p)), 0j)

    def max_level(self) -> int:
        return max((t.level for t in self.terms), default=0)

    def to_json(self) -> dict:
        return {"p": self.p, "terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_ambient(cls, yctx: "YContext", f) -> "YFunction":
        """Restriction to Y of a Schwartz-Bruhat function on V_1 + V_2 + V_3.

        Q_i is constant mod p^level on each cell, so cells whose three values differ
        there miss Y and are dropped.
        """
        p = yctx.ctx.p
        if f.p != p or f.dim != sum(yctx.dims):
            raise ValueError("function does not live on V_1 + V_2 + V_3")
        bounds = np.cumsum((0,) + tuple(yctx.dims))
        terms = []
        for point, coeff in f.terms.items():
            centers = [point[bounds[i]:bounds[i + 1]] for i in range(3)]
            qs = [yctx.q(i, c) for i, c in enumerate(centers)]
            if any(valuation(qs[0] - q, p) < f.level for q in qs[1:]):
                continue
            terms.append((coeff, centers, f.level))
        return cls.from_terms(p, terms)

    @classmethod
    def from_json(cls, data: dict) -> "YFunction":
        terms = [(complex(t["coeff"]["re"], t["coeff"]["im"]), t["centers"], int(t["level"]))
                 for t in data["terms"]]
        return cls.from_terms(int(data["p"]), terms)


def random_y_function(rng: np.random.Generator, yctx: YContext, count: int = 2,
                      level: int = 1) -> YFunction:
    """count product balls of the given level with integral centers off p Z_p^d.

    Each ball meets Y^ani: the three Q_i(center) share a unit residue mod p^level.
    """
    p = yctx.ctx.p
    mod = p**level
    terms = []
    for _ in range(count):
        residue = int(rng.integers(1, p)) + p * int(rng.integers(0, p ** (level - 1)))
        centers = []
        for i, d in enumerate(yctx.dims):
            while True:
                c = [int(x) for x in rng.integers(0, mod, size=d)]
                if any(x % p for x in c) and int(yctx.q(i, c)) % mod == residue:
                    break
            centers.append(c)
        coeff = complex(rng.normal(), rng.normal())
        terms.append((coeff, centers, level))
    return YFunction.from_terms(p, terms)


# Closed-form Gauss integrals ------------------------------------------------------


def _linear_ball(ctx: PAdicContext, coeff: Fraction, center: Fraction, level: int) -> complex:
    """int over center + p^level Z_p of psi(coeff * x) dx."""
    if coeff != 0 and valuation(coeff, ctx.p) < ctx.psi_conductor - level:
        return 0j
    return psi(ctx, coeff * center) * float(ctx.p) ** (-level)


def plane_integral(ctx: PAdicContext, alpha, omega, beta, xs, xt, level: int) -> complex:
    """int over (xs + p^L Z_p) x (xt + p^L Z_p) of psi(alpha s + omega t + beta s t).

    Integrating t first leaves the indicator of v(omega + beta s) >= c - L, a ball in s;
    intersecting it with the s-ball leaves a linear character integral.
    """
    alpha, omega, beta = as_fraction(alpha), as_fraction(omega), as_fraction(beta)
    xs, xt = as_fraction(xs), as_fraction(xt)
    p, c = ctx.p, ctx.psi_conductor
    if beta == 0:
        return _linear_ball(ctx, alpha, xs, level) * _linear_ball(ctx, omega, xt, level)
    other_level = c - level - int(valuation(beta, p))
    other_center = -omega / beta
    if valuation(xs - other_center, p) < min(level, other_level):
        return 0j
    center, inner = (other_center, other_level) if other_level >= level else (xs, level)
    outer = psi(ctx, omega * xt) * float(p) ** (-level)
    return outer * _linear_ball(ctx, alpha + beta * xt, center, inner)


def gauss_ball_integral(ctx: PAdicContext, dim: int, eta: Sequence, beta, center: Sequence,
                        level: int) -> complex:
    """int over center + p^level Z_p^d of psi(<eta, u> + beta Q(u)) du for Gram J_d."""
    out = 1 + 0j
    for j in range(dim // 2):
        k = dim - 1 - j
        # u_j pairs with eta_k and u_k with eta_j; Q contains u_j u_k
        out *= plane_integral(ctx, eta[k], eta[j], beta, center[j], center[k], level)
        if out == 0:
            return 0j
    return out


def _support_order(ctx: PAdicContext, eta: Sequence, level: int) -> int:
    """R with the Gauss integral of an origin-free ball vanishing for |beta| > p^R."""
    c = ctx.psi_conductor
    orders = [valuation(x, ctx.p) for x in eta]
    low = min(c - 2 * level, min(orders) - level)
    return int(-low - 1)


def _constancy_order(ctx: PAdicContext, center: Sequence, level: int) -> int:
    """K with the Gauss integral constant on beta + p^K Z_p."""
    e = min(valuation(x, ctx.p) for x in center)
    return int(ctx.psi_conductor - 2 * min(e, level))


# The (u, v) integral -------------------------------------------------------------------


@dataclass
class _TermGrid:
    """Gauss integrals of one term on the grid beta = n p^-R, n mod p^(R+K)."""

    order: int
    period: int
    spectra: list


def _grid_values(ctx, dim, eta, center, level, order, period) -> np.ndarray:
    p = ctx.p
    size = p ** (order + period)
    step = Fraction(1, p**order)
    return np.array([gauss_ball_integral(ctx, dim, eta, n * step, center, level)
                     for n in range(size)], dtype=complex)


def y_inner_integral(yctx: YContext, f: YFunction, eta: Sequence, shift) -> complex:
    """kappa^-1 int_{F^2} int_V psi(<eta, u> + Q-shift + c(u, v)) f(u) du dv.

    eta = xi / a and shift = -Q(xi)/(9 z^2 [a]), so the phase is
    sum_i <eta_i, u_i> + beta_i Q_i(u_i) with beta_1 = v_1 + shift, beta_2 = v_2 + shift and
    beta_3 = shift - v_1 - v_2.  In (beta_1, beta_2) this is the value at 3 shift of the
    triple convolution of the three Gauss integrals.
    """
    return _InnerEngine(yctx, f).value(tuple(tuple(as_fraction(x) for x in e) for e in eta),
                                       as_fraction(shift))


class _InnerEngine:
    """Caches Gauss-integral spectra per (factor, eta_i) across many (a, z)."""

    def __init__(self, yctx: YContext, f: YFunction, order: Optional[int] = None):
        self.yctx = yctx
        self.f = f
        self.ctx = yctx.ctx
        self.period = max((max(_constancy_order(self.ctx, c, t.level) for c in t.centers)
                           for t in f.terms), default=0)
        self.fixed_order = order
        self._spectra: dict = {}

    def order_for(self, etas) -> int:
        if self.fixed_order is not None:
            return self.fixed_order
        return max((max(_support_order(self.ctx, e, t.level) for e in etas)
                    for t in self.f.terms), default=0)

    def spectrum(self, term_index: int, factor: int, eta, order: int) -> np.ndarray:
        key = (term_index, factor, eta, order)
        if key not in self._spectra:
            t = self.f.terms[term_index]
            grid = _grid_values(self.ctx, self.yctx.dims[factor], eta, t.centers[factor],
                                t.level, order, self.period)
            self._spectra[key] = np.fft.fft(grid)
        return self._spectra[key]

    def convolution(self, etas, order: int) -> np.ndarray:
        total = None
        for ti, t in enumerate(self.f.terms):
            prod = t.coeff * self.spectrum(ti, 0, etas[0], order)
            prod = prod * self.spectrum(ti, 1, etas[1], order)
            prod = prod * self.spectrum(ti, 2, etas[2], order)
            total = prod if total is None else total + prod
        if total is None:
            return np.zeros(1, dtype=complex)
        return np.fft.ifft(total)

    def lookup(self, conv: np.ndarray, target: Fraction, order: int) -> complex:
        p = self.ctx.p
        if len(conv) == 1 and not self.f.terms:
            return 0j
        if target != 0 and valuation(target, p) < -order:
            return 0j
        mod = p ** (order + self.period)
        scaled = target * Fraction(p) ** order
        n = (scaled.numerator * pow(scaled.denominator, -1, mod)) % mod
        cell = float(p) ** (-2 * self.period)
        return complex(conv[n]) * cell / float(self.yctx.kappa)

    def value(self, etas, shift: Fraction) -> complex:
        if not self.f.terms:
            return 0j
        order = self.order_for(etas)
        return self.lookup(self.convolution(etas, order), 3 * shift, order)


# The transform ---------------------------------------------------------------------------


@dataclass(frozen=True)
class YTransformResult:
    value: complex
    status: str
    layers: dict
    budget: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": {"re": self.value.real, "im": self.value.imag}, "status": self.status,
                "layers": self.layers, "budget": self.budget}


def _unit_cosets(p: int, digits: int) -> list:
    mod = p**digits
    return [k for k in range(1, mod) if k % p]


def _coset_points(p: int, low: int, high: int, digits_for) -> list:
    """(representative, d^x-mass) for the cosets p^m u (1 + p^D Z_p), low <= m <= high."""
    out = []
    for m in range(low, high + 1):
        reps = _unit_cosets(p, digits_for(m))
        mass = 1.0 / len(reps)
        out.extend((Fraction(p) ** m * k, mass) for k in reps)
    return out


def _worst(statuses) -> str:
    statuses = list(statuses)
    if TRUNCATED in statuses:
        return TRUNCATED
    if STABILIZED in statuses:
        return STABILIZED
    return PROVEN


def _y_sum(yctx: YContext, f: YFunction, xi, budget: YBudget, engine: _InnerEngine) -> tuple:
    """Shell sums over a and z; returns (total, boundary_a, boundary_z, evaluations)."""
    p = yctx.ctx.p
    xi = tuple(tuple(as_fraction(x) for x in v) for v in xi)
    q_common = yctx.check_anisotropic(xi)
    q_total = 3 * q_common
    c = yctx.ctx.psi_conductor
    a_lo, a_hi = budget.a_orders
    z_lo, z_hi = budget.z_orders
    # psi(<xi/a, u>) on an integral ball is constant on a(1 + p^D) once D >= ord(a) - ord(xi) + c,
    # and psi(1/z) once D >= ord(z) + c; the remaining phases are left to the resolution layer
    a_values = []
    for i, v in enumerate(xi):
        low = min(valuation(x, p) for x in v)
        a_values.append(_coset_points(p, a_lo, a_hi, lambda m: max(budget.unit_digits, m - low + c)))
    z_values = _coset_points(p, z_lo, z_hi, lambda m: max(budget.unit_digits, m + c))
    total = boundary_a = boundary_z = 0j
    evaluations = 0
    for picks in itertools.product(*a_values):
        a = tuple(x for x, _ in picks)
        etas = tuple(tuple(x / ai for x in v) for v, ai in zip(xi, a))
        order = engine.order_for(etas)
        conv = engine.convolution(etas, order)
        prod_a = a[0] * a[1] * a[2]
        r_num = (a[0] * a[1] + a[1] * a[2] + a[2] * a[0]) ** 2
        weight_a = float(yctx.chi(a)) * picks[0][1] * picks[1][1] * picks[2][1]
        for ai, d in zip(a, yctx.dims):
            weight_a *= float(p) ** (valuation(ai, p) * (d // 2 - 1))  # 1 / {a}^{d/2-1}
        on_a_edge = any(valuation(ai, p) in (a_lo, a_hi) for ai in a)
        for z, z_mass in z_values:
            shift = -q_total / (9 * z * z * prod_a)
            inner = engine.lookup(conv, 3 * shift, order)
            evaluations += 1
            if inner == 0:
                continue
            phase = psi(yctx.ctx, 1 / z) * psi(yctx.ctx, -z * z * r_num / prod_a)
            term = phase * inner * weight_a * z_mass
            total += term
            if on_a_edge:
                boundary_a += term
            if valuation(z, p) in (z_lo, z_hi):
                boundary_z += term
    return total, boundary_a, boundary_z, evaluations


def y_transform(yctx: YContext, f: YFunction, xi: Sequence,
                check_resolution: bool = True) -> YTransformResult:
    """F_Y(f)(xi) for xi in Y^ani, with per-layer statuses.

    Layers: "v" is exact (finite convolution); "a" and "z" are stabilized when the
    outermost shells of the budget contribute below tolerance, truncated otherwise;
    "resolution" compares unit cosets mod p^D against mod p^(D+1).
    """
    budget = yctx.budget
    engine = _InnerEngine(yctx, f)
    if not f.terms:
        layers = {k: PROVEN for k in ("v", "a", "z", "resolution")}
        return YTransformResult(0j, PROVEN, layers, budget.to_json())
    total, edge_a, edge_z, evals = _y_sum(yctx, f, xi, budget, engine)
    scale = max(abs(total), 1e-300)
    tol = budget.tolerance
    layers = {
        "v": PROVEN,
        "a": STABILIZED if abs(edge_a) <= tol * scale else TRUNCATED,
        "z": STABILIZED if abs(edge_z) <= tol * scale else TRUNCATED,
    }
    if check_resolution:
        fine, _, _, more = _y_sum(yctx, f, xi, budget.refined(), engine)
        evals += more
        layers["resolution"] = STABILIZED if abs(fine - total) <= tol * max(abs(fine), 1e-300) else TRUNCATED
        total = fine
    else:
        layers["resolution"] = TRUNCATED
    report = dict(budget.to_json(), evaluations=evals)
    return YTransformResult(yctx.c * total, _worst(layers.values()), layers, report)


# Integration over Y --------------------------------------------------------------------


def y_cells(yctx: YContext, f: YFunction, level: int) -> list:
    """Cells x + p^level Z_p^d of supp f meeting Y to first order, with their dmu-mass.

    A cell whose center c has Q_i(c_i) all congruent mod p^level and with each
    gradient J c_i primitive carries mass p^{2 level - dim V level} by Hensel's lemma.
    """
    p = yctx.ctx.p
    n_cells = 0
    for t in f.terms:
        if level < t.level:
            raise ValueError("cell level must refine the test function")
        n_cells += p ** (sum(yctx.dims) * (level - t.level))
    if n_cells > yctx.budget.max_cells:
        raise BudgetExceeded(f"{n_cells} cells needed, budget {yctx.budget.max_cells}")
    cells = []
    mod = p**level
    dim_v = sum(yctx.dims)
    mass = float(p) ** (2 * level - dim_v * level)
    seen = set()
    for t in f.terms:
        offsets = range(p ** (level - t.level))
        per_factor = []
        for center, d in zip(t.centers, yctx.dims):
            points = []
            for shift in itertools.product(offsets, repeat=d):
                pt = tuple(c + s * Fraction(p) ** t.level for c, s in zip(center, shift))
                points.append(pt)
            per_factor.append(points)
        for point in itertools.product(*per_factor):
            key = tuple(tuple(x % mod for x in v) for v in point)
            if key in seen:
                continue
            seen.add(key)
            qs = [yctx.q(i, v) for i, v in enumerate(point)]
            if any(valuation(qs[0] - q, p) < level for q in qs[1:]):
                continue
            cells.append((_lift_to_y(yctx, point, level), mass))
    return cells


def _lift_to_y(yctx: YContext, point, level: int):
    """Move factors 2 and 3 so that Q_2 = Q_3 = Q_1 exactly, staying in the cell."""
    p = yctx.ctx.p
    target = yctx.q(0, point[0])
    out = [tuple(point[0])]
    for i in (1, 2):
        v = list(point[i])
        d = len(v)
        k = next(j for j in range(d) if valuation(v[j], p) == 0) if any(
            valuation(x, p) == 0 for x in v) else None
        if k is None:
            raise ValueError("cell center is not primitive")
        partner = d - 1 - k
        # Q is linear in v[partner] with coefficient v[k]; solve exactly
        v[partner] += (target - yctx.q(i, v)) / v[k]
        out.append(tuple(v))
    if target == 0:
        raise ValueError("cell center lies on the isotropic locus")
    return tuple(out)


def y_pairing(yctx: YContext, g, f: YFunction, level: Optional[int] = None) -> complex:
    """int_Y g f dmu by cell sums, g a callable on Y-points."""
    level = f.max_level() if level is None else level
    total = 0j
    for point, mass in y_cells(yctx, f, level):
        fv = f(point)
        if fv != 0:
            total += complex(g(point)) * fv * mass
    return total


@dataclass(frozen=True)
class YCheck:
    name: str
    defect: Optional[float]
    status: str
    layers: dict
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != TRUNCATED and self.defect is not None and self.defect < 1e-2

    def to_json(self) -> dict:
        return {"name": self.name, "defect": self.defect, "status": self.status,
                "layers": self.layers, "detail": self.detail}


def _transform_on(yctx: YContext, f: YFunction):
    statuses: dict = {}

    def g(point) -> complex:
        res = y_transform(yctx, f, point)
        for k, v in res.layers.items():
            statuses[k] = _worst([statuses.get(k, PROVEN), v])
        return res.value

    return g, statuses


def y_plancherel_defect(yctx: YContext, f1: YFunction, f2: YFunction) -> YCheck:
    """|int F_Y(f1) f2 - int f1 F_Y(f2)| / (|lhs| + |rhs|), over Y-cells."""
    try:
        g1, st1 = _transform_on(yctx, f1)
        g2, st2 = _transform_on(yctx, f2)
        lhs = y_pairing(yctx, g1, f2)
        rhs = y_pairing(yctx, g2, f1)
    except BudgetExceeded as exc:
        return YCheck("plancherel", None, TRUNCATED, {"cells": TRUNCATED}, str(exc))
    layers = {k: _worst([st1.get(k, PROVEN), st2.get(k, PROVEN)]) for k in set(st1) | set(st2)}
    scale = max(abs(lhs) + abs(rhs), 1e-300)
    return YCheck("plancherel", abs(lhs - rhs) / scale, _worst(layers.values()), layers)


def _primitive_vectors(p: int, d: int, level: int) -> dict:
    """Primitive integral vectors mod p^level in Z_p^d, keyed by Q mod p^level."""
    mod = p**level
    space = QuadraticSpace.split(d)
    out: dict = {}
    for v in itertools.product(range(mod), repeat=d):
        if any(x % p for x in v):
            out.setdefault(int(space.q(v)) % mod, []).append(v)
    return out


def primitive_y_cells(yctx: YContext, level: int) -> list:
    """All Y-cells of level `level` with primitive factors and a unit common Q value."""
    p = yctx.ctx.p
    per_factor = [_primitive_vectors(p, d, level) for d in yctx.dims]
    residues = [r for r in per_factor[0] if r % p]
    count = sum(len(per_factor[0][r]) * len(per_factor[1].get(r, ())) * len(per_factor[2].get(r, ()))
                for r in residues)
    if count > yctx.budget.max_cells:
        raise BudgetExceeded(f"{count} cells needed, budget {yctx.budget.max_cells}")
    mass = float(p) ** (2 * level - sum(yctx.dims) * level)
    cells = []
    for r in residues:
        for point in itertools.product(*(f.get(r, ()) for f in per_factor)):
            cells.append((_lift_to_y(yctx, point, level), mass))
    return cells


def _sampled_function(yctx: YContext, f: YFunction, level: int) -> tuple:
    """F_Y(f) sampled on the primitive Y-cells of the given level, as a YFunction."""
    cells = primitive_y_cells(yctx, level)
    g, statuses = _transform_on(yctx, f)
    terms = [(g(point), point, level) for point, _ in cells]
    # F_Y(f) is not supported in these cells; the rest of Y is dropped uncertified
    statuses["support"] = TRUNCATED
    return YFunction.from_terms(yctx.ctx.p, terms), statuses


def y_involution_defect(yctx: YContext, f: YFunction, xi: Sequence, level: int = 1) -> YCheck:
    """|F_Y(F_Y f)(xi) - f(xi)| with F_Y f sampled on Y-cells of the given level."""
    try:
        ff, st = _sampled_function(yctx, f, level)
    except BudgetExceeded as exc:
        return YCheck("involution", None, TRUNCATED, {"cells": TRUNCATED}, str(exc))
    res = y_transform(yctx, ff, xi)
    layers = {k: _worst([st.get(k, PROVEN), res.layers[k]]) for k in res.layers}
    defect = abs(res.value - f(xi))
    return YCheck("involution", defect, _worst(layers.values()), layers)


def calibrate_c(yctx: YContext, probes: Sequence, level: int = 1) -> dict:
    """Fix c by F_Y o F_Y = id on the first probe and check it on the others.

    With c = 1 the double transform is f / c^2, so c^2 = f(xi) / T(T f)(xi); the sign
    is taken nearest to the nominal constant.  The ratio c / nominal is the empirical k.
    """
    if len(probes) < 2:
        raise ValueError("calibration needs at least two probes")
    unit = yctx.with_constant(1.0)
    estimates = []
    statuses = []
    for f, xi in probes:
        try:
            ff, st = _sampled_function(unit, f, level)
        except BudgetExceeded as exc:
            return {"c": None, "k": None, "status": TRUNCATED, "detail": str(exc)}
        res = y_transform(unit, ff, xi)
        statuses.append(_worst([_worst(st.values()), res.status]))
        target = f(xi)
        if res.value == 0 or target == 0:
            raise ValueError("probe value vanishes; pick xi in the support of f")
        c2 = target / res.value
        root = complex(np.sqrt(c2))
        nominal = yctx.nominal_constant
        estimates.append(root if abs(root - nominal) <= abs(root + nominal) else -root)
    c = estimates[0]
    spread = max(abs(e - c) for e in estimates) / max(abs(c), 1e-300)
    status = _worst(statuses)
    if spread > yctx.budget.tolerance and status != TRUNCATED:
        raise ValueError(f"probes disagree on c (relative spread {spread:.3g})")
    return {"c": c, "k": c / yctx.nominal_constant, "spread": spread, "status": status}
