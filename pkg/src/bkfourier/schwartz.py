"""Locally constant compactly supported functions on Q_p^n and their Fourier transforms.

A function is stored on a box p^{-box} Z_p^n, cut into cosets of p^{level} Z_p^n.
The point with index m (0 <= m_i < p^{box+level}) is x = m / p^{box}, which is
also the canonical coset representative in Z[1/p] ∩ [0, p^level).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .padic import PAdicContext, as_fraction, reduce_mod, valuation, vp_int


@dataclass(frozen=True)
class GramPairing:
    """Symmetric nondegenerate rational matrix S with <x, y> = x^T S y."""

    matrix: tuple

    def __init__(self, rows: Sequence[Sequence]):
        m = tuple(tuple(as_fraction(c) for c in row) for row in rows)
        n = len(m)
        if any(len(r) != n for r in m):
            raise ValueError("Gram matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "matrix", m)
        if self.det() == 0:
            raise ValueError("Gram matrix is singular")

    @classmethod
    def identity(cls, n: int) -> "GramPairing":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def antidiagonal(cls, n: int) -> "GramPairing":
        """The split form J_n with ones on the antidiagonal."""
        return cls([[int(i + j == n - 1) for j in range(n)] for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def det(self) -> Fraction:
        return _det(self.matrix)

    def inverse(self) -> tuple:
        return _inverse(self.matrix)

    def pair(self, x, y) -> Fraction:
        n = self.dim
        return sum((as_fraction(x[i]) * self.matrix[i][j] * as_fraction(y[j])
                    for i in range(n) for j in range(n)), Fraction(0))

    def quadratic(self, x) -> Fraction:
        return self.pair(x, x) / 2

    def apply(self, x) -> tuple:
        return tuple(sum((self.matrix[i][j] * as_fraction(x[j]) for j in range(self.dim)),
                         Fraction(0)) for i in range(self.dim))


def _det(m) -> Fraction:
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return det


def _inverse(m) -> tuple:
    n = len(m)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(tuple(r[n:]) for r in a)


def _min_valuation(m, p: int) -> int:
    vals = [valuation(c, p) for row in m for c in row if c != 0]
    return int(min(vals))


class SchwartzBruhatFunction:
    """Finite complex combination of indicators of cosets a + p^level Z_p^n."""

    def __init__(self, p: int, dim: int, level: int, box: int, values: np.ndarray):
        if box + level < 0:
            raise ValueError("box must contain at least one cell")
        size = p ** (box + level)
        values = np.asarray(values, dtype=complex)
        if values.shape != (size,) * dim:
            raise ValueError(f"expected shape {(size,) * dim}, got {values.shape}")
        self.p = p
        self.dim = dim
        self.level = level
        self.box = box
        self.values = values
        self.values.setflags(write=False)

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, p: int, dim: int, level: int = 0, box: int = 0) -> "SchwartzBruhatFunction":
        size = p ** (box + level)
        return cls(p, dim, level, box, np.zeros((size,) * dim, dtype=complex))

    @classmethod
    def from_terms(cls, p: int, dim: int, level: int, terms) -> "SchwartzBruhatFunction":
        """terms: iterable of (center, coeff); duplicate cosets are merged."""
        terms = [(tuple(as_fraction(c) for c in center), complex(coeff)) for center, coeff in terms]
        box = -level
        for center, _ in terms:
            if len(center) != dim:
                raise ValueError("center has wrong dimension")
            for c in center:
                if c != 0 and reduce_mod(c, p, level) != 0:
                    box = max(box, -int(valuation(reduce_mod(c, p, level), p)))
        box = max(box, 0) if terms else max(box, -level)
        f = cls.zero(p, dim, level, box)
        vals = np.array(f.values)
        for center, coeff in terms:
            vals[f._index(center)] += coeff
        return cls(p, dim, level, box, vals)

    @classmethod
    def indicator(cls, p: int, center: Sequence, level: int, coeff: complex = 1.0):
        return cls.from_terms(p, len(center), level, [(center, coeff)])

    # geometry ---------------------------------------------------------------

    @property
    def modulus(self) -> int:
        return self.p ** (self.box + self.level)

    def cell_volume(self) -> Fraction:
        return Fraction(self.p) ** (-self.dim * self.level)

    def _index(self, x) -> tuple:
        """Grid index of the coset containing x; raises KeyError outside the box."""
        idx = []
        for c in x:
            r = reduce_mod(as_fraction(c), self.p, self.level)
            if r != 0 and valuation(r, self.p) < -self.box:
                raise KeyError("point outside the box")
            m = r * Fraction(self.p) ** self.box
            assert m.denominator == 1
            idx.append(int(m) % self.modulus)
        return tuple(idx)

    def __call__(self, x) -> complex:
        try:
            return complex(self.values[self._index(x)])
        except KeyError:
            return 0j

    def point(self, index: Sequence[int]) -> tuple:
        scale = Fraction(self.p) ** (-self.box)
        return tuple(int(i) * scale for i in index)

    @property
    def terms(self) -> dict:
        """Nonzero cosets as {canonical representative: coefficient}."""
        out = {}
        for index in zip(*np.nonzero(self.values)):
            out[self.point(index)] = complex(self.values[index])
        return out

    def support_points(self) -> np.ndarray:
        """Integer index array (k, dim) of nonzero cells."""
        return np.argwhere(self.values != 0)

    # refinement -------------------------------------------------------------

    def refine(self, level: int | None = None, box: int | None = None) -> "SchwartzBruhatFunction":
        """Same function on a finer level and/or larger box."""
        level = self.level if level is None else level
        box = self.box if box is None else box
        if level < self.level or box < self.box:
            raise ValueError("can only refine to a finer level and larger box")
        vals = self.values
        p, n = self.p, self.dim
        # finer level: index m at the new level reads old index m mod p^(box+level)
        dl = level - self.level
        if dl:
            vals = np.tile(vals, (p**dl,) * n)
        # larger box: new index m' corresponds to x = m'/p^box; old index m'/p^db if integral
        db = box - self.box
        if db:
            new_size = p ** (box + level)
            out = np.zeros((new_size,) * n, dtype=complex)
            sl = tuple(slice(0, new_size, p**db) for _ in range(n))
            out[sl] = vals
            vals = out
        return SchwartzBruhatFunction(p, n, level, box, vals)

    def aligned(self, other: "SchwartzBruhatFunction"):
        if self.p != other.p or self.dim != other.dim:
            raise ValueError("functions live on different spaces")
        level = max(self.level, other.level)
        box = max(self.box, other.box)
        return self.refine(level, box), other.refine(level, box)

    def coarsen(self, tol: float = 0.0) -> "SchwartzBruhatFunction":
        """Smallest box and coarsest level carrying the same function, up to tol."""
        f = self
        while f.box + f.level > 0 and f._can_drop_level(tol):
            p, n = f.p, f.dim
            small = f.modulus // p
            f = SchwartzBruhatFunction(p, n, f.level - 1, f.box,
                                       f.values[tuple(slice(0, small) for _ in range(n))])
        while f.box + f.level > 0 and f._can_shrink_box(tol):
            p, n = f.p, f.dim
            vals = f.values[tuple(slice(0, None, p) for _ in range(n))]
            f = SchwartzBruhatFunction(p, n, f.level, f.box - 1, vals)
        return f

    def _can_drop_level(self, tol: float = 0.0) -> bool:
        small = self.modulus // self.p
        head = self.values[tuple(slice(0, small) for _ in range(self.dim))]
        tiled = np.tile(head, (self.p,) * self.dim)
        if tol == 0.0:
            return np.array_equal(tiled, self.values)
        return bool(np.max(np.abs(tiled - self.values), initial=0.0) <= tol)

    def _can_shrink_box(self, tol: float = 0.0) -> bool:
        p, n = self.p, self.dim
        mask = np.ones(self.values.shape, dtype=bool)
        mask[tuple(slice(0, None, p) for _ in range(n))] = False
        if tol == 0.0:
            return not np.any(self.values[mask])
        return bool(np.max(np.abs(self.values[mask]), initial=0.0) <= tol)

    # algebra ----------------------------------------------------------------

    def __add__(self, other):
        a, b = self.aligned(other)
        return SchwartzBruhatFunction(a.p, a.dim, a.level, a.box, a.values + b.values)

    def __sub__(self, other):
        a, b = self.aligned(other)
        return SchwartzBruhatFunction(a.p, a.dim, a.level, a.box, a.values - b.values)

    def scale(self, c: complex) -> "SchwartzBruhatFunction":
        return SchwartzBruhatFunction(self.p, self.dim, self.level, self.box, self.values * c)

    def conjugate(self) -> "SchwartzBruhatFunction":
        return SchwartzBruhatFunction(self.p, self.dim, self.level, self.box, self.values.conj())

    def multiply(self, other) -> "SchwartzBruhatFunction":
        a, b = self.aligned(other)
        return SchwartzBruhatFunction(a.p, a.dim, a.level, a.box, a.values * b.values)

    def max_abs_difference(self, other) -> float:
        a, b = self.aligned(other)
        return float(np.max(np.abs(a.values - b.values), initial=0.0))

    def integral(self, gram: GramPairing | None = None, ctx: PAdicContext | None = None) -> complex:
        return complex(self.values.sum()) * float(self.cell_volume()) * measure_scale(self, gram, ctx)

    def inner(self, other, gram: GramPairing | None = None, ctx: PAdicContext | None = None) -> complex:
        """int f conj(g) dx for the self-dual measure of (psi, gram)."""
        a, b = self.aligned(other)
        s = complex(np.vdot(b.values, a.values))
        return s * float(a.cell_volume()) * measure_scale(a, gram, ctx)

    def norm2(self, gram=None, ctx=None) -> float:
        return math.sqrt(max(self.inner(self, gram, ctx).real, 0.0))

    def pullback(self, matrix) -> "SchwartzBruhatFunction":
        """x -> f(M x) for an invertible rational matrix M."""
        return _pullback(self, tuple(tuple(as_fraction(c) for c in r) for r in matrix))

    def translate(self, a) -> "SchwartzBruhatFunction":
        """x -> f(x - a)."""
        a = tuple(as_fraction(c) for c in a)
        level = self.level
        box = self.box
        for c in a:
            if c != 0:
                box = max(box, -int(valuation(reduce_mod(c, self.p, level), self.p)) if reduce_mod(c, self.p, level) != 0 else box)
        f = self.refine(level, box)
        shift = [int(reduce_mod(c, self.p, level) * Fraction(self.p) ** box) for c in a]
        vals = f.values
        for axis, s in enumerate(shift):
            vals = np.roll(vals, s, axis=axis)
        return SchwartzBruhatFunction(f.p, f.dim, f.level, f.box, vals)

    def to_json(self) -> dict:
        return {
            "prime": self.p,
            "dim": self.dim,
            "level": self.level,
            "terms": [
                {"center": [str(c) for c in center], "coeff": {"re": v.real, "im": v.imag}}
                for center, v in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SchwartzBruhatFunction":
        for key in ("prime", "dim", "level", "terms"):
            if key not in data:
                raise ValueError(f"function description lacks '{key}'")
        for t in data["terms"]:
            for c in t["center"]:
                if "." in str(c) or "e" in str(c).lower():
                    raise ValueError(f"center coordinate {c!r} is not a rational string")
        terms = [(t["center"], complex(t["coeff"]["re"], t["coeff"]["im"])) for t in data["terms"]]
        return cls.from_terms(int(data["prime"]), int(data["dim"]), int(data["level"]), terms)

    def __repr__(self):
        return (f"SchwartzBruhatFunction(p={self.p}, dim={self.dim}, level={self.level}, "
                f"box={self.box}, cells={int(np.count_nonzero(self.values))})")


def load_function(path) -> SchwartzBruhatFunction:
    with open(path, encoding="utf-8") as fh:
        return SchwartzBruhatFunction.from_json(json.load(fh))


def dump_function(f: SchwartzBruhatFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(f.to_json(), fh, indent=2)


def measure_scale(f: SchwartzBruhatFunction, gram: GramPairing | None, ctx: PAdicContext | None) -> float:
    """Density of the self-dual measure relative to dx(Z_p^n) = 1."""
    cond = ctx.psi_conductor if ctx is not None else 0
    s = float(f.p) ** (cond * f.dim / 2)
    if gram is not None:
        d = gram.det()
        s *= float(f.p) ** (-valuation(d, f.p) / 2)
    return s


def _pullback(f: SchwartzBruhatFunction, m) -> SchwartzBruhatFunction:
    p, n = f.p, f.dim
    if len(m) != n:
        raise ValueError("matrix has wrong size")
    if _det(m) == 0:
        raise ValueError("singular matrix")
    minv = _inverse(m)
    # g(t) = f(M t); g is constant on cosets of p^lg Z^n with M p^lg Z^n inside p^level Z^n
    level = f.level - _min_valuation(m, p)
    box = f.box - _min_valuation(minv, p)
    box = max(box, -level)
    size = p ** (box + level)
    # M t with t = idx / p^box: write M = num / den with integer num, den = p^e * d
    den = 1
    for row in m:
        for c in row:
            den = den * c.denominator // math.gcd(den, c.denominator)
    e = vp_int(den, p)
    d = den // p**e
    num = np.array([[int(c * den) for c in row] for row in m], dtype=object)
    grid = np.indices((size,) * n).reshape(n, -1).astype(object)
    w = num.dot(grid)  # M t = w / (p^(box+e) d)
    # index in f: (M t) p^fbox mod p^(fbox+flevel), defined only when val(M t) >= -fbox
    shift = box + e - f.box
    fmod = f.modulus
    if shift > 0:
        ok = np.all(w % (p**shift) == 0, axis=0)
        w = w // (p**shift)
    else:
        ok = np.ones(w.shape[1], dtype=bool)
        w = w * (p ** (-shift))
    dinv = pow(d, -1, fmod) if fmod > 1 else 0
    idx = (w * dinv) % fmod
    vals = np.zeros(w.shape[1], dtype=complex)
    if np.any(ok):
        cols = tuple(np.array(idx[i][ok], dtype=np.int64) for i in range(n))
        vals[ok] = f.values[cols]
    return SchwartzBruhatFunction(p, n, level, box, vals.reshape((size,) * n))


def _standard_transform(f: SchwartzBruhatFunction, ctx: PAdicContext, sign: int) -> SchwartzBruhatFunction:
    """int psi(sign * t.x) f(x) dx with dx(Z_p^n) = 1."""
    n, p, c = f.dim, f.p, ctx.psi_conductor
    size = f.modulus
    if sign > 0:
        out = np.fft.ifftn(f.values) * float(size) ** n
    else:
        out = np.fft.fftn(f.values)
    out = out * float(f.cell_volume())
    # output lives on box level - c, level box + c
    return SchwartzBruhatFunction(p, n, f.box + c, f.level - c, out)


def fourier_transform(f: SchwartzBruhatFunction, gram: GramPairing | None = None,
                      ctx: PAdicContext | None = None) -> SchwartzBruhatFunction:
    """f^(t) = int psi(<t, x>) f(x) dx for the self-dual measure of (psi, gram)."""
    return _transform(f, gram, ctx, +1)


def inverse_fourier_transform(g: SchwartzBruhatFunction, gram: GramPairing | None = None,
                              ctx: PAdicContext | None = None) -> SchwartzBruhatFunction:
    """x -> int conj(psi)(<t, x>) g(t) dt for the self-dual measure."""
    return _transform(g, gram, ctx, -1)


def _transform(f, gram, ctx, sign):
    ctx = ctx or PAdicContext(f.p)
    if ctx.p != f.p:
        raise ValueError("context prime differs from the function's prime")
    if gram is None:
        gram = GramPairing.identity(f.dim)
    if gram.dim != f.dim:
        raise ValueError("Gram matrix dimension mismatch")
    std = _standard_transform(f, ctx, sign)
    # <t, x>_S = (S t) . x, so f^_S = scale * std(f) o S
    out = std.pullback(gram.matrix) if not _is_identity(gram.matrix) else std
    return out.scale(measure_scale(f, gram, ctx))


def _is_identity(m) -> bool:
    return all(m[i][j] == (1 if i == j else 0) for i in range(len(m)) for j in range(len(m)))


def random_function(rng: np.random.Generator, p: int, dim: int, level: int,
                    box: int = 0, density: float = 0.3,
                    coarse_axes: Sequence[int] = ()) -> SchwartzBruhatFunction:
    """Random complex combination of cells on p^{-box} Z_p^n at the given level.

    Along coarse_axes the function is invariant under Z_p translations.
    """
    size = p ** (box + level)
    shape = (size,) * dim
    mask = rng.random(shape) < density
    vals = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * mask
    for axis in coarse_axes:
        if level < 0:
            break
        head = np.take(vals, range(p**box), axis=axis)
        reps = [1] * dim
        reps[axis] = p**level
        vals = np.tile(head, reps)
    return SchwartzBruhatFunction(p, dim, level, box, vals)
