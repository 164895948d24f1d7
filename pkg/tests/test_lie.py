import json
from collections import Counter
from fractions import Fraction

import pytest

from bkfourier.lie import (
    RootSystem, build_parabolic, check_delta_relation, closed_form_oracle, diff_tables, family_system,
    load_golden, normalizing_data, normalizing_data_for, sl2_decompose,
)
from bkfourier.suites import closed_form_cases, lie_cases


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n, det = len(m), Fraction(1)
    for i in range(n):
        piv = next(r for r in range(i, n) if m[r][i] != 0)
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            m[r] = [a - f * b for a, b in zip(m[r], m[i])]
    return det


# (type, rank): (number of positive roots, det of the Cartan matrix)
KNOWN = {("A", 4): (10, 5), ("B", 3): (9, 2), ("C", 4): (16, 2), ("D", 5): (20, 4), ("E", 6): (36, 3),
         ("E", 7): (63, 2), ("E", 8): (120, 1), ("F", 4): (24, 1), ("G", 2): (6, 1)}


@pytest.mark.parametrize("kind,rank", sorted(KNOWN))
def test_root_system_counts(kind, rank):
    rs = RootSystem.of(kind, rank)
    n_pos, det = KNOWN[(kind, rank)]
    assert len(rs.positive_roots) == n_pos
    assert _det(rs.cartan_matrix) == det


def _nilradical_dim(content):
    return sum(w + 1 for ws in content.as_lists().values() for w in ws)


@pytest.mark.parametrize("kind,node,dim", [("E6", 1, 16), ("E6", 4, 29), ("E7", 7, 27), ("E8", 8, 57),
                                            ("F4", 4, 15), ("G2", 1, 5), ("G2", 2, 5)])
def test_nilradical_dimensions(kind, node, dim):
    assert _nilradical_dim(sl2_decompose(build_parabolic(kind, None, node))) == dim


def test_documented_rows():
    assert sl2_decompose(build_parabolic("E6", None, 4)).as_lists() == {1: [5, 3, 3, 1, 1], 2: [4, 2, 0], 3: [1]}
    assert sl2_decompose(build_parabolic("G2", None, 1)).as_lists() == {1: [1], 2: [0], 3: [1]}
    assert normalizing_data_for("A", 2, 1).pairs == ((Fraction(1, 2), 1),)


def test_siegel_three_and_bounds():
    data = normalizing_data_for(*family_system("SIEGEL", 3))
    assert data.multiset() == Counter({(Fraction(1), 2): 1, (Fraction(1), 1): 1})
    assert data.bounds_of_dual(1) == (Fraction(1, 2), Fraction(2))
    pgl2 = normalizing_data_for(*family_system("PGL", 2, 1))
    assert pgl2.multiset() == Counter({(Fraction(0), 1): 1})
    assert pgl2.A == 0


@pytest.mark.parametrize("case", closed_form_cases(), ids=str)
def test_closed_forms(case):
    assert normalizing_data_for(*family_system(*case)).multiset() == closed_form_oracle(*case)


@pytest.mark.parametrize("label,kind,rank,node", lie_cases(), ids=lambda x: str(x))
def test_last_pair_and_delta_relation(label, kind, rank, node):
    datum = build_parabolic(kind, rank, node)
    data = normalizing_data(sl2_decompose(datum))
    assert data.is_good_order()
    assert data.last[1] == 1
    assert check_delta_relation(datum, data).holds


def test_dualized_data_shifts_strip():
    data = normalizing_data_for("E", 6, 4)
    a0, b0 = data.bounds_of_dual(0)
    assert (a0, b0) == (data.A, data.B)
    a1, b1 = data.bounds_of_dual(1)
    # dualizing the last pair (s, 1) -> (-1 - s, -1) makes B finite
    assert b1 == 1 + data.last[0]


def test_laurent_factors_of_pgl3():
    data = normalizing_data_for("A", 2, 1)
    from bkfourier.laurent import LaurentFraction, X, u
    # L(-1/2, |.|^s) = 1 / (1 - q^{1/2} X)
    assert data.a_L() == LaurentFraction(1 / (1 - u * X))


def test_tables_scope_counts():
    rows, _ = diff_tables("F4")
    assert rows == 4
    rows, _ = diff_tables("all")
    assert rows == 27


def test_corrupted_golden_reports_exact_row(tmp_path):
    data = {"version": 1, "tables": load_golden()}
    data["tables"]["G2"]["1"]["2"] = [2]
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(data))
    _, mismatches = diff_tables("G2", load_golden(path))
    assert [(m.type, m.node, m.grade, m.expected, m.got) for m in mismatches] == [("G2", 1, 2, (2,), (0,))]


def test_golden_version_checked(tmp_path):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps({"version": 2, "tables": {}}))
    with pytest.raises(ValueError):
        load_golden(path)
