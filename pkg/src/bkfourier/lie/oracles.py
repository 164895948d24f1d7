"""Closed-form parameter sets for classical maximal parabolics, used as cross-checks."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations


def _run(lo: Fraction, hi: Fraction, lam: int) -> list:
    """(lo, lam), (lo + 1, lam), ..., (hi, lam)."""
    out = []
    s = Fraction(lo)
    while s <= hi:
        out.append((s, lam))
        s += 1
    return out


def pgl(n: int, ell: int) -> Counter:
    """Stabilizer of an ell-plane in PGL_n; runs on A_{n-1}, node ell."""
    if not (n >= 2 and 1 <= ell <= n - 1):
        raise ValueError("need n >= 2 and 1 <= ell <= n - 1")
    return Counter(_run(Fraction(abs(n - 2 * ell), 2), Fraction(n - 2, 2), 1))


def classical(group: str, r: int, ell: int) -> Counter:
    """Parameters for SO_{2r+1} (type B_r), PSp_{2r} (C_r) or PSO_{2r} (D_r) at linear rank ell."""
    group = group.upper()
    if r <= 1:
        raise ValueError("need r > 1")
    if group in ("SO_ODD", "B"):
        parity, kind = 1, "B"
    elif group in ("PSP", "C"):
        parity, kind = 0, "C"
    elif group in ("PSO_EVEN", "D"):
        parity, kind = 0, "D"
    else:
        raise ValueError(f"unknown classical group {group!r}")
    if not 1 <= ell <= r:
        raise ValueError("linear rank out of range")
    if kind == "D":
        if r < 3:
            raise ValueError("PSO_{2r} needs r >= 3")
        if ell == r:
            return Counter((Fraction(r - 2 - 2 * j), 1) for j in range((r - 2) // 2 + 1))
        if ell > r - 2:
            raise ValueError("linear rank r - 1 is not covered for PSO_{2r}")
        if ell == 1:
            return Counter([(Fraction(0), 1), (Fraction(r - 2), 1)])
        out = _run(Fraction(abs(2 * r - 1 - 3 * ell), 2), Fraction(2 * r - ell - 3, 2), 1)
        out.append((Fraction(ell - 1, 2), 1))
        out += [(Fraction(ell - 2 - 2 * j), 2) for j in range((ell - 2) // 2 + 1)]
        return Counter(out)
    if kind == "C" and ell == r:
        return Counter((Fraction(r - 1 - 2 * j), 1) for j in range((r - 1) // 2 + 1))
    if ell == 1:
        if kind == "B":
            return Counter([(Fraction(2 * r - 2, 2), 1)])
        return Counter([(Fraction(2 * r - 3, 2), 1), (Fraction(0), 2)])
    out = _run(Fraction(abs(2 * r + parity - 3 * ell), 2), Fraction(2 * r + parity - ell - 2, 2), 1)
    top = ell - 1 - parity
    out += [(Fraction(top - 2 * j), 2) for j in range(top // 2 + 1)]
    return Counter(out)


def siegel(n: int) -> Counter:
    """Siegel parabolic of Sp_{2n}; runs on B_n, node n."""
    if n < 2:
        raise ValueError("need n >= 2")
    out = [(Fraction(n + 2 * r - 2 * (n // 2) - 2), 2) for r in range(1, n // 2 + 1)]
    out.append((Fraction(n - 1, 2), 1))
    return Counter(out)


def family_system(family: str, *args) -> tuple:
    """(type, rank, node) on which the normalizer reproduces a closed-form family."""
    family = family.upper()
    if family == "PGL":
        n, ell = args
        return "A", n - 1, ell
    if family == "SIEGEL":
        (n,) = args
        return "B", n, n
    if family in ("B", "SO_ODD"):
        r, ell = args
        return "B", r, ell
    if family in ("C", "PSP"):
        r, ell = args
        return "C", r, ell
    if family in ("D", "PSO_EVEN"):
        r, ell = args
        if ell == r:
            return "D", r, r
        return "D", r, ell
    raise ValueError(f"unknown family {family!r}")


def closed_form_oracle(family: str, *args) -> Counter:
    family = family.upper()
    if family == "PGL":
        return pgl(*args)
    if family == "SIEGEL":
        return siegel(*args)
    return classical(family, *args)


# sl2 character arithmetic, independent of root systems


def sym_weights(n: int) -> list:
    return list(range(n, -n - 1, -2))


def peel(weights) -> list:
    c = Counter(weights)
    out = []
    for n in sorted((e for e in c if e >= 0), reverse=True):
        out += [n] * (c[n] - c[n + 2])
    return out


def clebsch_gordan(n: int, m: int) -> list:
    return list(range(n + m, abs(n - m) - 1, -2))


def tensor_weights(a, b) -> list:
    return [x + y for x in a for y in b]


def wedge2_weights(a) -> list:
    return [x + y for x, y in combinations(a, 2)]


def wedge2_sym_closed_form(n: int) -> list:
    """wedge^2 Sym^n = sum_{j=0}^{floor((n-1)/2)} Sym^{2(n-1)-4j}."""
    return [2 * (n - 1) - 4 * j for j in range((n - 1) // 2 + 1)]
