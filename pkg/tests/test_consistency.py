"""Cross-provider agreement: associations and usable-case fractions."""

import numpy as np
import pytest

from helpers import make_table
from registry_ida.errors import NoMissingTarget, NoSharedRows
from registry_ida.consistency import (
    HIGH_AGREEMENT,
    REASON_CONSTANT,
    REASON_NO_OVERLAP,
    REASON_TYPE_MISMATCH,
    association,
    consistency_report,
    cramers_v,
    cross_provider_usable_cases,
)
from registry_ida.ingest import MultiSourceGroup

X = 1.0
_ = None


def test_cramers_v_hand_checked_table():
    # chi2 of [[20,5],[5,20]] is 9 + 9 = 18; V = sqrt(18/50) = 0.6
    assert cramers_v(np.array([[20, 5], [5, 20]])) == pytest.approx(
        0.6, abs=1e-12
    )


def test_cramers_v_perfect_association():
    assert cramers_v(np.array([[10, 0], [0, 10]])) == pytest.approx(
        1.0, abs=1e-12
    )


def paired(name_a, kind_a, cells_a, name_b, kind_b, cells_b, n):
    return make_table(
        "t",
        [
            (name_a, kind_a, "ET", cells_a),
            (name_b, kind_b, "DSO", cells_b),
        ],
        n,
    )


def test_identical_categoricals_have_v_one():
    cells = ["a", "b", "a", "b", "a", "b"]
    table = paired("x_ET", "categorical", cells, "x_DSO", "categorical", list(cells), 6)
    result = association(table, "x_ET", "x_DSO")
    assert result.measure == "cramers_v"
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_affine_numeric_pair_has_abs_r_one():
    a = [1.0, 2.0, 3.0, 4.0]
    b = [-2.0 * v + 7.0 for v in a]
    table = paired("y_ET", "numeric", a, "y_DSO", "numeric", b, 4)
    result = association(table, "y_ET", "y_DSO")
    assert result.measure == "abs_pearson"
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_relative_dates_compare_numerically():
    table = paired(
        "d_ET", "relative_date", [1, 5, 9], "d_DSO", "relative_date", [2, 10, 18], 3
    )
    result = association(table, "d_ET", "d_DSO")
    assert result.measure == "abs_pearson"
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_not_computable_taxonomy_and_precedence():
    # type mismatch wins even when the pair also never overlaps
    table = paired(
        "a_ET", "numeric", [1.0, None], "a_DSO", "categorical", [None, "x"], 2
    )
    assert association(table, "a_ET", "a_DSO").reason == REASON_TYPE_MISMATCH

    # no overlap wins over constant data
    table = paired(
        "b_ET", "numeric", [3.0, None], "b_DSO", "numeric", [None, 4.0], 2
    )
    assert association(table, "b_ET", "b_DSO").reason == REASON_NO_OVERLAP

    # constant on the shared rows
    table = paired(
        "c_ET", "numeric", [3.0, 3.0], "c_DSO", "numeric", [1.0, 2.0], 2
    )
    assert association(table, "c_ET", "c_DSO").reason == REASON_CONSTANT


def test_sentinels_do_not_enter_numeric_association():
    table = make_table(
        "t",
        [
            ("v_ET", "numeric", "ET", [1.0, 2.0, "-9", 4.0], {"sentinels": ("-9",)}),
            ("v_DSO", "numeric", "DSO", [2.0, 4.0, 5.0, 8.0]),
        ],
        4,
    )
    result = association(table, "v_ET", "v_DSO")
    # dropping the sentinel row leaves a perfectly affine pair
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_sentinels_stay_as_levels_in_categorical_association():
    table = make_table(
        "t",
        [
            ("s_ET", "categorical", "ET", ["u", "-9", "u", "-9"], {"sentinels": ("-9",)}),
            ("s_DSO", "categorical", "DSO", ["p", "q", "p", "q"]),
        ],
        4,
    )
    result = association(table, "s_ET", "s_DSO")
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_usable_cases_is_directional():
    # the anchor keeps every row inside the ET observation set even
    # where u_ET itself is missing
    table = make_table(
        "t",
        [
            ("anchor", "numeric", "ET", [X, X, X, X]),
            ("u_ET", "numeric", "ET", [X, _, _, X]),
            ("u_DSO", "numeric", "DSO", [X, X, _, X]),
        ],
        4,
    )
    assert cross_provider_usable_cases(table, "u_ET", "u_DSO") == 0.5
    with pytest.raises(NoMissingTarget):
        cross_provider_usable_cases(table, "u_DSO", "u_ET")


def test_usable_cases_requires_a_shared_row():
    table = paired(
        "w_ET", "numeric", [X, _], "w_DSO", "numeric", [_, X], 2
    )
    with pytest.raises(NoSharedRows):
        cross_provider_usable_cases(table, "w_ET", "w_DSO")


def test_report_shape_and_summary():
    table = make_table(
        "t",
        [
            ("g_ET", "numeric", "ET", [1.0, 2.0, None, 4.0]),
            ("g_DSO", "numeric", "DSO", [2.0, 4.0, 6.0, 8.0]),
            ("h_ET", "categorical", "ET", ["a", "a", "b", "b"]),
            ("h_DSO", "numeric", "DSO", [1.0, 1.0, 2.0, 2.0]),
        ],
        4,
    )
    groups = [
        MultiSourceGroup("t", "g", (("ET", "g_ET"), ("DSO", "g_DSO"))),
        MultiSourceGroup("t", "h", (("ET", "h_ET"), ("DSO", "h_DSO"))),
    ]
    results, summary = consistency_report({"t": table}, groups)
    # two ordered rows per group
    assert len(results) == 4
    by_key = {
        (r.group, r.target_provider): r for r in results
    }
    g_et = by_key[("g", "ET")]
    g_dso = by_key[("g", "DSO")]
    # association echoed identically on both ordered rows
    assert g_et.association == g_dso.association == pytest.approx(1.0)
    assert g_et.usable_cases == 1.0
    assert g_dso.usable_reason == "no_missing_target"
    h_et = by_key[("h", "ET")]
    assert h_et.not_computable == REASON_TYPE_MISMATCH
    assert summary["n_groups"] == 2
    assert summary["n_association_pairs"] == 2
    assert summary["n_computed"] == 1
    assert summary["n_type_mismatch"] == 1
    assert summary["n_high_agreement"] == 1
    assert 0.0 < HIGH_AGREEMENT <= 1.0
