"""Seeded property suites shared by the command line and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .lie import build_parabolic, check_delta_relation, closed_form_oracle, family_system, load_golden, normalizing_data_for
from .local_factors import QuadraticSpace, QuasiCharacter, gamma_factor
from .padic import PAdicContext
from .regularized import TRUNCATED
from .schwartz import GramPairing, SchwartzBruhatFunction, fourier_transform, inverse_fourier_transform, random_function
from .zeta import TRIVIAL, UNRAMIFIED_QUADRATIC, functional_equation_holds

DEFAULT_SEED = 20240601
MAX_CELLS = 2_000_000


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def record(self, ok: bool, what: str) -> None:
        self.checked += 1
        if not ok:
            self.failures.append(what)

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "checked": self.checked,
                "failed": len(self.failures), "first_failure": self.failures[0] if self.failures else None,
                "details": self.details}

    def to_text(self) -> str:
        lines = [f"suite {self.suite} (seed {self.seed}): {self.checked - len(self.failures)}/{self.checked} passed"]
        if self.failures:
            lines.append(f"first failure: {self.failures[0]}")
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        return "\n".join(lines)


# Fourier analysis on Q_p^n ------------------------------------------------------


def random_pairs(seed: int, count: int, primes=(2, 3, 5), max_dim: int = 3, max_level: int = 3):
    """count random (f, g) pairs on Q_p^n, keeping dense arrays below MAX_CELLS."""
    rng = np.random.default_rng(seed)
    for k in range(count):
        p = primes[k % len(primes)]
        dim = int(rng.integers(1, max_dim + 1))
        level = int(rng.integers(0, max_level + 1))
        box = int(rng.integers(0, 2))
        if p ** ((box + level) * dim) > MAX_CELLS:
            box = 0
        yield p, random_function(rng, p, dim, level, box), random_function(rng, p, dim, level, box)


def inversion_suite(seed: int = DEFAULT_SEED, count: int = 100, tolerance: float = 1e-9,
                    primes=(2, 3, 5)) -> SuiteReport:
    report = SuiteReport("inversion", seed)
    worst = 0.0
    for p, f, _ in random_pairs(seed, count, primes):
        ctx = PAdicContext(p)
        back = inverse_fourier_transform(fourier_transform(f, ctx=ctx), ctx=ctx)
        err = back.max_abs_difference(f)
        worst = max(worst, err)
        report.record(err < tolerance, f"p={p} dim={f.dim} level={f.level}: inversion error {err:.3g}")
    report.details["worst_error"] = worst
    return report


def plancherel_suite(seed: int = DEFAULT_SEED, count: int = 100, tolerance: float = 1e-9,
                     primes=(2, 3, 5)) -> SuiteReport:
    report = SuiteReport("plancherel", seed)
    worst = 0.0
    for p, f, g in random_pairs(seed, count, primes):
        ctx = PAdicContext(p)
        lhs = fourier_transform(f, ctx=ctx).inner(fourier_transform(g, ctx=ctx))
        err = abs(lhs - f.inner(g))
        worst = max(worst, err)
        report.record(err < tolerance, f"p={p} dim={f.dim} level={f.level}: defect {err:.3g}")
    report.details["worst_defect"] = worst
    return report


# Weil representation ------------------------------------------------------------


def weil_spaces() -> list:
    """(name, space, coarse axes) for the relation checks."""
    return [
        ("split J4", QuadraticSpace.split(4), ()),
        ("diag(2,2,2,4)", QuadraticSpace(GramPairing([[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 4]])), ()),
        ("diag(2,2,6,6)", QuadraticSpace(GramPairing([[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 6, 0], [0, 0, 0, 6]])), (2, 3)),
    ]


def weilrep_suite(seed: int = DEFAULT_SEED, tolerance: float = 1e-8, p: int = 3, b=2, a=3) -> SuiteReport:
    from .transforms.weil import WeilRepContext, relation_words, weil_rep_apply

    report = SuiteReport("weilrep", seed)
    rng = np.random.default_rng(seed)
    ctx = PAdicContext(p)
    spaces = weil_spaces()
    wctx = WeilRepContext(ctx, tuple(s for _, s, _ in spaces))
    worst = 0.0
    for i, (name, _, coarse) in enumerate(spaces):
        f = random_function(rng, p, 4, 1, 0, 0.3, coarse_axes=coarse)
        for rel, (left, right) in relation_words(b, a).items():
            lhs = weil_rep_apply(wctx, left, f, i)
            rhs = weil_rep_apply(wctx, right, f, i)
            err = lhs.max_abs_difference(rhs)
            worst = max(worst, err)
            report.record(err < tolerance, f"{name}, {rel}: difference {err:.3g}")
    report.details["worst_difference"] = worst
    report.details["gamma"] = [complex(g) for g in wctx.gammas]
    return report


# Tate zeta integrals ------------------------------------------------------------


def _unramified_quadratic_param(p: int) -> Fraction:
    """A unit u with (p, u)_p = -1, so x -> (x, u)_p is the unramified quadratic character."""
    if p == 2:
        return Fraction(5)
    return Fraction(next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1))


def tate_basis(p: int) -> dict:
    one = SchwartzBruhatFunction.indicator
    return {
        "1_Zp": one(p, [0], 0),
        "1_Zp^x": one(p, [0], 0) - one(p, [0], 1),
        "1_{1+p^2Zp}": one(p, [1], 2),
        "1_{1/p+pZp}": one(p, [Fraction(1, p)], 1),
    }


def tate_suite(seed: int = DEFAULT_SEED, primes=(2, 3, 5)) -> SuiteReport:
    report = SuiteReport("tate", seed)
    for p in primes:
        ctx = PAdicContext(p)
        characters = {TRIVIAL: QuasiCharacter(p), UNRAMIFIED_QUADRATIC: QuasiCharacter(p, _unramified_quadratic_param(p))}
        for eta, chi in characters.items():
            gamma = gamma_factor(chi, ctx)
            for name, f in tate_basis(p).items():
                report.record(functional_equation_holds(f, eta, ctx, gamma), f"p={p} eta={eta} f={name}")
    return report


# Normalizing data ---------------------------------------------------------------


def closed_form_cases() -> list:
    """Family arguments covered by the closed-form oracles."""
    cases = [("PGL", n, ell) for n in range(2, 9) for ell in range(1, n)]
    cases += [(kind, r, ell) for kind in "BC" for r in range(2, 7) for ell in range(1, r + 1)]
    cases += [("D", r, ell) for r in range(3, 7) for ell in list(range(1, r - 1)) + [r]]
    cases += [("SIEGEL", n) for n in range(2, 7)]
    return cases


def closed_form_suite(seed: int = DEFAULT_SEED) -> SuiteReport:
    report = SuiteReport("closed-form", seed)
    for case in closed_form_cases():
        data = normalizing_data_for(*family_system(*case))
        expected = closed_form_oracle(*case)
        report.record(data.multiset() == expected, f"{case}: got {sorted(data.multiset().items())}")
    return report


def lie_cases() -> list:
    """(label, type, rank, node) for every golden row and closed-form case."""
    out = []
    for label, table in load_golden().items():
        for node in sorted(table, key=int):
            out.append((f"{label} node {node}", label, None, int(node)))
    for case in closed_form_cases():
        out.append((str(case),) + family_system(*case))
    return out


def lie_suite(seed: int = DEFAULT_SEED) -> SuiteReport:
    report = SuiteReport("lie", seed)
    for label, kind, rank, node in lie_cases():
        datum = build_parabolic(kind, rank, node)
        data = normalizing_data_for(kind, rank, node)
        report.record(data.last[1] == 1, f"{label}: last lambda is {data.last[1]}")
        witness = check_delta_relation(datum, data)
        report.record(witness.holds, f"{label}: delta coordinate {witness.r}, expected {witness.expected}")
    return report


# Transforms ---------------------------------------------------------------------


def cone_suite(seed: int = DEFAULT_SEED, count: int = 10, tolerance: float = 1e-6,
               primes=(3, 5), n: int = 6) -> SuiteReport:
    from .transforms.cone import ConeContext, plancherel_defect, random_cone_function

    report = SuiteReport("cone", seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(count):
        p = primes[k % len(primes)]
        cctx = ConeContext(PAdicContext(p), n)
        f1 = random_cone_function(rng, cctx, count=2, level=1)
        f2 = random_cone_function(rng, cctx, count=2, level=1)
        res = plancherel_defect(cctx, f1, f2)
        rel = res["defect"] / max(res["scale"], 1e-300)
        worst = max(worst, rel)
        ok = rel < tolerance and TRUNCATED not in res["statuses"]
        report.record(ok, f"pair {k} at p={p}: relative defect {rel:.3g}, statuses {res['statuses']}")
    report.details["worst_relative_defect"] = worst
    return report


def y_sample_point(yctx, f, term: int = 0):
    """A point of Y^ani inside the term-th ball of f."""
    from .transforms.ytransform import _lift_to_y

    t = f.terms[term]
    return _lift_to_y(yctx, t.centers, t.level)


def y_suite(seed: int = DEFAULT_SEED, budget=None, samples: int = 3, p: int = 3) -> SuiteReport:
    """Calibrate c, then check Plancherel symmetry and the involution on Y."""
    from .transforms.ytransform import YBudget, YContext, calibrate_c, random_y_function, y_involution_defect, y_plancherel_defect

    report = SuiteReport("y", seed)
    rng = np.random.default_rng(seed)
    yctx = YContext(PAdicContext(p), (4, 4, 4), budget or YBudget())
    fs = [random_y_function(rng, yctx, count=2, level=1) for _ in range(max(samples, 2))]
    points = [y_sample_point(yctx, f) for f in fs]
    cal = calibrate_c(yctx, list(zip(fs[:2], points[:2])))
    report.details["nominal_c"] = yctx.nominal_constant
    report.details["calibrated_c"] = cal["c"]
    report.details["empirical_k"] = cal["k"]
    report.details["calibration_status"] = cal["status"]
    report.record(cal["status"] != TRUNCATED, f"calibration {cal['status']}: {cal.get('detail', '')}")
    if cal["c"] is not None:
        yctx = yctx.with_constant(cal["c"])
    checks = [y_plancherel_defect(yctx, fs[0], fs[1])]
    checks += [y_involution_defect(yctx, f, xi) for f, xi in zip(fs[:samples], points[:samples])]
    for i, chk in enumerate(checks):
        report.details[f"{chk.name}[{i}]"] = chk.to_json()
        report.record(chk.passed, f"{chk.name}: defect {chk.defect}, status {chk.status}, layers {chk.layers} {chk.detail}".strip())
    report.details["budget"] = yctx.budget.to_json()
    return report


SUITES = {
    "inversion": inversion_suite,
    "plancherel": plancherel_suite,
    "weilrep": weilrep_suite,
    "tate": tate_suite,
    "lie": lie_suite,
    "cone": cone_suite,
    "y": y_suite,
}
