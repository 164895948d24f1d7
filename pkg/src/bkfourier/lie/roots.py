"""Root systems of simple types in Bourbaki numbering."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

EXPECTED_POSITIVE_ROOTS = {"E6": 36, "E7": 63, "E8": 120, "F4": 24, "G2": 6}


def _chain(rank: int, lengths: list, links: dict) -> list:
    """Symmetric Gram matrix of simple roots from squared lengths and bond values."""
    b = [[Fraction(0)] * rank for _ in range(rank)]
    for i in range(rank):
        b[i][i] = Fraction(lengths[i])
    for (i, j), v in links.items():
        b[i][j] = b[j][i] = Fraction(v)
    return b


def simple_root_form(kind: str, rank: int) -> list:
    """(alpha_i, alpha_j) for the Bourbaki simple roots, 0-based indices."""
    kind = kind.upper()
    if kind == "A":
        if rank < 1:
            raise ValueError("A_n needs n >= 1")
        return _chain(rank, [2] * rank, {(i, i + 1): -1 for i in range(rank - 1)})
    if kind == "B":
        if rank < 2:
            raise ValueError("B_n needs n >= 2")
        return _chain(rank, [2] * (rank - 1) + [1], {(i, i + 1): -1 for i in range(rank - 1)})
    if kind == "C":
        if rank < 2:
            raise ValueError("C_n needs n >= 2")
        links = {(i, i + 1): Fraction(-1, 2) for i in range(rank - 2)}
        links[(rank - 2, rank - 1)] = -1
        return _chain(rank, [1] * (rank - 1) + [2], links)
    if kind == "D":
        if rank < 3:
            raise ValueError("D_n needs n >= 3")
        links = {(i, i + 1): -1 for i in range(rank - 2)}
        links[(rank - 3, rank - 1)] = -1
        return _chain(rank, [2] * rank, links)
    if kind == "E":
        if rank not in (6, 7, 8):
            raise ValueError("E_n needs n in {6, 7, 8}")
        # 1-3-4-5-6-7-8 with 2 attached to 4
        links = {(0, 2): -1, (2, 3): -1, (1, 3): -1}
        for i in range(3, rank - 1):
            links[(i, i + 1)] = -1
        return _chain(rank, [2] * rank, links)
    if kind == "F":
        if rank != 4:
            raise ValueError("F_n needs n = 4")
        return _chain(4, [2, 2, 1, 1], {(0, 1): -1, (1, 2): -1, (2, 3): Fraction(-1, 2)})
    if kind == "G":
        if rank != 2:
            raise ValueError("G_n needs n = 2")
        return _chain(2, [2, 6], {(0, 1): -3})
    raise ValueError(f"unknown Cartan type {kind!r}")


def parse_type(label: str, rank: int | None = None) -> tuple[str, int]:
    """'E6' -> ('E', 6); 'A' with rank=3 -> ('A', 3)."""
    label = label.strip().upper()
    kind = label[0]
    if kind not in "ABCDEFG":
        raise ValueError(f"unknown Cartan type {label!r}")
    if len(label) > 1:
        r = int(label[1:])
        if rank is not None and rank != r:
            raise ValueError(f"rank {rank} contradicts type {label}")
        rank = r
    if rank is None:
        raise ValueError("rank is required")
    return kind, rank


@dataclass(frozen=True)
class RootSystem:
    kind: str
    rank: int
    form: tuple = field(repr=False)

    @classmethod
    def of(cls, label: str, rank: int | None = None) -> "RootSystem":
        kind, rank = parse_type(label, rank)
        form = simple_root_form(kind, rank)
        return cls(kind, rank, tuple(tuple(r) for r in form))

    @classmethod
    def from_form(cls, kind: str, form) -> "RootSystem":
        return cls(kind, len(form), tuple(tuple(Fraction(c) for c in r) for r in form))

    @property
    def label(self) -> str:
        return f"{self.kind}{self.rank}"

    @cached_property
    def cartan_matrix(self) -> tuple:
        """a_ij = <alpha_j, alpha_i^vee> = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i)."""
        f = self.form
        return tuple(tuple(int(2 * f[i][j] / f[i][i]) for j in range(self.rank)) for i in range(self.rank))

    def inner(self, x, y) -> Fraction:
        f = self.form
        return sum((x[i] * f[i][j] * y[j] for i in range(self.rank) for j in range(self.rank)
                    if x[i] and y[j]), Fraction(0))

    def simple_pairing(self, gamma, i: int) -> int:
        """<gamma, alpha_i^vee> via the Cartan matrix."""
        row = self.cartan_matrix[i]
        return sum(g * a for g, a in zip(gamma, row))

    def coroot_pairing(self, gamma, delta) -> Fraction:
        """<gamma, delta^vee> = 2 (gamma, delta) / (delta, delta)."""
        return 2 * self.inner(gamma, delta) / self.inner(delta, delta)

    @cached_property
    def positive_roots(self) -> tuple:
        """All positive roots as coefficient tuples, generated by root strings."""
        n = self.rank
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        roots = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for g in layer:
                for i in range(n):
                    # p = largest k with g - k alpha_i a root
                    p = 0
                    while True:
                        h = list(g)
                        h[i] -= p + 1
                        if h[i] < 0 or tuple(h) not in roots:
                            break
                        p += 1
                    q = p - self.simple_pairing(g, i)
                    if q > 0:
                        h = list(g)
                        h[i] += 1
                        h = tuple(h)
                        if h not in roots:
                            roots.add(h)
                            nxt.append(h)
            layer = nxt
        return tuple(sorted(roots, key=lambda r: (sum(r), r)))

    def dual(self) -> "RootSystem":
        """The system of coroots alpha^vee = 2 alpha / (alpha, alpha), same node labels."""
        f = self.form
        n = self.rank
        form = [[4 * f[i][j] / (f[i][i] * f[j][j]) for j in range(n)] for i in range(n)]
        kind = {"B": "C", "C": "B"}.get(self.kind, self.kind)
        return RootSystem.from_form(kind, form)

    def coroot_coefficients(self, gamma) -> tuple:
        """gamma^vee in the basis of simple coroots."""
        g2 = self.inner(gamma, gamma)
        return tuple(Fraction(2) * gamma[i] * self.form[i][i] / (2 * g2) for i in range(self.rank))

    def fundamental_weight_coordinates(self, x) -> tuple:
        """Coefficients of x (simple-root basis) in the fundamental-weight basis."""
        return tuple(self.coroot_pairing(x, tuple(int(i == j) for j in range(self.rank)))
                     for i in range(self.rank))


def root_count_check(rs: RootSystem) -> bool:
    expected = {"A": rs.rank * (rs.rank + 1) // 2, "B": rs.rank**2, "C": rs.rank**2,
                "D": rs.rank * (rs.rank - 1)}.get(rs.kind, EXPECTED_POSITIVE_ROOTS.get(rs.label))
    return len(rs.positive_roots) == expected
