"""Golden exceptional tables and the regenerate-and-diff check."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .normalizer import build_parabolic, sl2_decompose

GOLDEN_RESOURCE = "exceptional_tables.json"


@dataclass(frozen=True)
class Mismatch:
    type: str
    node: int
    grade: int
    expected: tuple
    got: tuple

    def to_json(self) -> dict:
        return {"type": self.type, "node": self.node, "grade": self.grade,
                "expected": list(self.expected), "got": list(self.got)}


def load_golden(path=None) -> dict:
    if path is None:
        text = resources.files("bkfourier.data").joinpath(GOLDEN_RESOURCE).read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    data = json.loads(text)
    if data.get("version") != 1:
        raise ValueError("unsupported golden-table version")
    return data["tables"]


def diff_tables(scope: str = "all", golden: dict | None = None) -> tuple[int, list]:
    """Regenerate rows in scope; returns (rows checked, mismatches)."""
    golden = load_golden() if golden is None else golden
    scope = scope.upper()
    rows = 0
    mismatches = []
    for label, table in golden.items():
        if scope != "ALL" and scope != label:
            continue
        for node, grades in sorted(table.items(), key=lambda kv: int(kv[0])):
            rows += 1
            content = sl2_decompose(build_parabolic(label, None, int(node))).grades
            expected = {int(g): tuple(sorted(v, reverse=True)) for g, v in grades.items()}
            got = {g: tuple(sorted(v, reverse=True)) for g, v in content.items()}
            for g in sorted(set(expected) | set(got)):
                if expected.get(g, ()) != got.get(g, ()):
                    mismatches.append(Mismatch(label, int(node), g, expected.get(g, ()), got.get(g, ())))
    if rows == 0:
        raise ValueError(f"no golden rows in scope {scope!r}")
    return rows, mismatches
