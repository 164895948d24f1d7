"""Command-line interface: normalizer tables, local factors, transforms and verification suites.

Settings come from flags, then BKFOURIER_* environment variables, then defaults
(flags win).  Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from . import suites
from .padic import PAdicContext, as_fraction
from .regularized import TruncationPolicy
from .transforms.ytransform import YBudget

ENV_PREFIX = "BKFOURIER_"
FORMATS = ("text", "json")

# name -> (shell policy, Y budget, random-pair count for the Q_p^n suites)
BUDGETS = {
    "small": (TruncationPolicy(max_shell=12), YBudget((-2, 2), (-1, 1), 1, 1e-2, 200), 20),
    "default": (TruncationPolicy(), YBudget(), 100),
    "large": (TruncationPolicy(max_shell=40), YBudget((-4, 4), (-3, 3), 1, 1e-2, 50_000), 300),
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class CommandConfig:
    prime: int | None = None
    tolerance: float | None = None
    budget: str = "default"
    format: str = "text"
    seed: int = suites.DEFAULT_SEED
    inputs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.prime is not None and not sympy.isprime(self.prime):
            raise UsageError(f"{self.prime} is not a prime")
        if self.tolerance is not None and not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.budget not in BUDGETS:
            raise UsageError(f"budget must be one of {', '.join(BUDGETS)}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")

    @property
    def policy(self) -> TruncationPolicy:
        policy = BUDGETS[self.budget][0]
        if self.tolerance is not None:
            policy = TruncationPolicy(policy.max_shell, policy.window, self.tolerance)
        return policy

    @property
    def y_budget(self) -> YBudget:
        return BUDGETS[self.budget][1]

    @property
    def pair_count(self) -> int:
        return BUDGETS[self.budget][2]


def _setting(args, name: str, convert, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return default
    try:
        return convert(raw)
    except ValueError as exc:
        raise UsageError(f"bad {ENV_PREFIX}{name.upper()}={raw!r}") from exc


def config_from(args) -> CommandConfig:
    return CommandConfig(
        prime=_setting(args, "prime", int, None),
        tolerance=_setting(args, "tolerance", float, None),
        budget=_setting(args, "budget", str, "default"),
        format=_setting(args, "format", str, "text"),
        seed=_setting(args, "seed", int, suites.DEFAULT_SEED),
        inputs=tuple(args.input or ()),
    )


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


def _emit(cfg: CommandConfig, payload: dict, text: str) -> None:
    if cfg.format == "json":
        print(json.dumps(payload, default=_json_default, sort_keys=True))
    else:
        print(text)


# normalizer -----------------------------------------------------------------------


def _parse_type(kind: str, rank):
    m = re.fullmatch(r"([A-Ga-g])(\d*)", kind.strip())
    if not m:
        raise UsageError(f"unknown Cartan type {kind!r}")
    letter, digits = m.group(1).upper(), m.group(2)
    if digits and rank is not None and int(digits) != rank:
        raise UsageError(f"type {kind} conflicts with --rank {rank}")
    rank = int(digits) if digits else rank
    if rank is None:
        raise UsageError("give the rank, either as --rank or inside --type (e.g. E6)")
    return letter, rank


def _fmt_bound(x) -> str:
    return str(x) if isinstance(x, Fraction) else ("-inf" if x < 0 else "inf")


def cmd_normalizer(args, cfg: CommandConfig) -> int:
    from .lie import build_parabolic, normalizing_data, sl2_decompose

    kind, rank = _parse_type(args.type, args.rank)
    try:
        datum = build_parabolic(kind, rank, args.node)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    content = sl2_decompose(datum)
    data = normalizing_data(content)
    grades = content.as_lists()
    pairs = [(str(s), lam) for s, lam in data.pairs]
    payload = {
        "type": f"{kind}{rank}", "node": args.node,
        "grades": {str(g): ws for g, ws in sorted(grades.items())},
        "pairs": [[s, lam] for s, lam in pairs],
        "A": _fmt_bound(data.A), "B": _fmt_bound(data.B),
        "a_L": str(data.a_L()), "mu_L": str(data.mu_L()),
    }
    row = "  ".join(f"i={g}: {{{', '.join(map(str, ws))}}}" for g, ws in sorted(grades.items()))
    lines = [
        f"{kind}{rank}, node {args.node}",
        f"  {row}",
        "  (s_i, lambda_i): " + ", ".join(f"({s}, {lam})" for s, lam in pairs),
        f"  A(L) = {payload['A']}   B(L) = {payload['B']}",
        f"  a_L  = {payload['a_L']}",
        f"  mu_L = {payload['mu_L']}",
    ]
    _emit(cfg, payload, "\n".join(lines))
    return 0


# tables ------------------------------------------------------------------------------


def cmd_tables(args, cfg: CommandConfig) -> int:
    from .lie import diff_tables, load_golden

    try:
        golden = load_golden(args.golden)
        rows, mismatches = diff_tables(args.scope, golden)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    payload = {"scope": args.scope, "rows": rows, "mismatches": [m.to_json() for m in mismatches]}
    lines = [f"{rows} rows checked, {len(mismatches)} mismatches"]
    for m in mismatches:
        lines.append(f"  {m.type} node {m.node} grade {m.grade}: expected {list(m.expected)}, got {list(m.got)}")
    _emit(cfg, payload, "\n".join(lines))
    return 1 if mismatches else 0


# local factors --------------------------------------------------------------------


def cmd_gamma(args, cfg: CommandConfig) -> int:
    from .local_factors import QuasiCharacter, gamma_factor

    p = cfg.prime or 3
    ctx = PAdicContext(p)
    param = suites._unramified_quadratic_param(p) if args.eta == "unramified-quadratic" else None
    gamma = gamma_factor(QuasiCharacter(p, param, Fraction(args.shift)), ctx)
    payload = {"prime": p, "eta": args.eta, "shift": args.shift, "gamma": str(gamma)}
    _emit(cfg, payload, f"gamma(s, {args.eta} |.|^{args.shift}, psi) at p={p}: {gamma}\n  (X = q^-s, u = q^1/2)")
    return 0


def _load_input(cfg: CommandConfig):
    from .schwartz import load_function

    if len(cfg.inputs) != 1:
        raise UsageError("give exactly one --input function file")
    try:
        f = load_function(cfg.inputs[0])
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {cfg.inputs[0]}: {exc}") from exc
    if cfg.prime is not None and cfg.prime != f.p:
        raise UsageError(f"--prime {cfg.prime} disagrees with the file's prime {f.p}")
    return f


def cmd_zeta(args, cfg: CommandConfig) -> int:
    from .zeta import zeta_integral

    f = _load_input(cfg)
    if f.dim != 1:
        raise UsageError("zeta integrals take one-variable functions")
    z = zeta_integral(f, args.eta, PAdicContext(f.p))
    _emit(cfg, {"prime": f.p, "eta": args.eta, "zeta": str(z)}, f"Z(f, {args.eta}, s) = {z}")
    return 0


# transforms --------------------------------------------------------------------------


def _parse_vector(text: str) -> tuple:
    try:
        return tuple(as_fraction(Fraction(x.strip())) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational vector {text!r}") from exc


def cmd_transform(args, cfg: CommandConfig) -> int:
    f = _load_input(cfg)
    ctx = PAdicContext(f.p)
    try:
        if args.kind == "cone":
            from .transforms.cone import ConeContext, ConeFunction, cone_transform

            cctx = ConeContext(ctx, f.dim, cfg.policy)
            point = _parse_vector(args.point)
            res = cone_transform(cctx, ConeFunction.from_ambient(cctx, f), point)
            payload = dict(res.to_json(), budget=cfg.policy.to_json())
        else:
            from .transforms.ytransform import YContext, YFunction, y_transform

            yctx = YContext(ctx, (4, 4, 4), cfg.y_budget)
            point = tuple(_parse_vector(part) for part in args.point.split(";"))
            yctx.check_anisotropic(point)
            res = y_transform(yctx, YFunction.from_ambient(yctx, f), point)
            payload = res.to_json()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    v = payload["value"]
    text = f"{args.kind} transform at {args.point}: {v['re']:.12g} {v['im']:+.12g}i  [{payload['status']}]"
    for k, s in sorted(payload.get("layers", {}).items()):
        text += f"\n  {k}: {s}"
    _emit(cfg, payload, text)
    return 0


# verify ---------------------------------------------------------------------------------


def _suite_kwargs(name: str, cfg: CommandConfig) -> dict:
    kw: dict = {"seed": cfg.seed}
    if name in ("inversion", "plancherel", "weilrep", "cone") and cfg.tolerance is not None:
        kw["tolerance"] = cfg.tolerance
    if name in ("inversion", "plancherel"):
        kw["count"] = cfg.pair_count
    if cfg.prime is not None:
        if name in ("inversion", "plancherel", "tate", "cone"):
            kw["primes"] = (cfg.prime,)
        elif name in ("weilrep", "y"):
            kw["p"] = cfg.prime
    if name == "y":
        kw["budget"] = cfg.y_budget
        if cfg.tolerance is not None:
            b = cfg.y_budget
            kw["budget"] = YBudget(b.z_orders, b.a_orders, b.unit_digits, cfg.tolerance, b.max_cells)
    return kw


def cmd_verify(args, cfg: CommandConfig) -> int:
    try:
        report = suites.SUITES[args.suite](**_suite_kwargs(args.suite, cfg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(cfg, report.to_json(), report.to_text())
    return 0 if report.passed else 1


# entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--budget", choices=sorted(BUDGETS))
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--seed", type=int)
    common.add_argument("--input", action="append", metavar="FUNCTION_FILE")

    parser = argparse.ArgumentParser(prog="bkfourier", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalizer", parents=[common], help="normalizing data of a maximal parabolic")
    p.add_argument("--type", required=True, help="Cartan type, e.g. E6 or A (with --rank)")
    p.add_argument("--rank", type=int)
    p.add_argument("--node", type=int, required=True, help="Bourbaki label of the removed node")
    p.set_defaults(run=cmd_normalizer)

    p = sub.add_parser("tables", parents=[common], help="regenerate the exceptional tables and diff")
    p.add_argument("--scope", default="all", help="all, or one of E6 E7 E8 F4 G2")
    p.add_argument("--golden", help="golden-table file (default: packaged copy)")
    p.set_defaults(run=cmd_tables)

    p = sub.add_parser("gamma", parents=[common], help="Tate gamma factor of an unramified character")
    p.add_argument("--eta", choices=("trivial", "unramified-quadratic"), default="trivial")
    p.add_argument("--shift", default="0", help="rational exponent t in eta |.|^t")
    p.set_defaults(run=cmd_gamma)

    p = sub.add_parser("zeta", parents=[common], help="Tate zeta integral of a function file")
    p.add_argument("--eta", choices=("trivial", "unramified-quadratic"), default="trivial")
    p.set_defaults(run=cmd_zeta)

    p = sub.add_parser("transform", parents=[common], help="evaluate the cone or Y transform at a point")
    p.add_argument("--kind", choices=("cone", "y"), required=True)
    p.add_argument("--point", required=True,
                   help="rational coordinates, comma separated; for y, three vectors separated by ';'")
    p.set_defaults(run=cmd_transform)

    p = sub.add_parser("verify", parents=[common], help="run a seeded property suite")
    p.add_argument("--suite", choices=sorted(suites.SUITES), required=True)
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from(args)
        return args.run(args, cfg)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
