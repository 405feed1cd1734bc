import json
import math

import numpy as np

from plurihull import artifacts
from plurihull.core import DegreeCurve, SampledSet
from plurihull.extend import QuotientModel
from plurihull.extremal import ExtremalEstimate, HullSlice, extremal_grid
from plurihull.hull import PoleOrderFit


def test_cell_formats_round_trip_floats():
    assert artifacts._cell(0.1) == "0.10000000000000001"
    assert artifacts._cell(math.inf) == "inf"
    assert artifacts._cell(-math.inf) == "-inf"
    assert artifacts._cell(math.nan) == "nan"
    assert artifacts._cell(None) == ""
    assert artifacts._cell(True) == "true"
    assert artifacts._cell(3) == "3"


def test_write_csv_creates_directory_with_lf_endings(tmp_path):
    target = artifacts.write_csv(
        str(tmp_path / "nested" / "out"), "table.csv", ("a", "b"), [(1, 0.5), (2, None)]
    )

    with open(target, "rb") as stream:
        content = stream.read()

    assert content == b"a,b\n1,0.5\n2,\n"


def test_rerun_is_byte_identical(tmp_path):
    sweep = extremal_grid(SampledSet.circle(32), [2.0, 1.5j], 2)

    first = artifacts.write_csv(
        str(tmp_path / "a"), "x.csv", artifacts.EXTREMAL_HEADER, artifacts.extremal_rows(sweep)
    )
    second = artifacts.write_csv(
        str(tmp_path / "b"), "x.csv", artifacts.EXTREMAL_HEADER, artifacts.extremal_rows(sweep)
    )

    with open(first, "rb") as one, open(second, "rb") as two:
        assert one.read() == two.read()


def test_write_json_sorts_keys_and_encodes_specials(tmp_path):
    target = artifacts.write_json(
        str(tmp_path), "summary.json", {"b": math.inf, "a": 1 + 2j, "c": [0.5, None]}
    )

    with open(target, encoding="utf-8") as stream:
        text = stream.read()

    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": [1.0, 2.0], "b": "inf", "c": [0.5, None]}


def _estimate(status="bounded"):
    curve = DegreeCurve()
    curve.add(1, 0.5, 0.6, status)
    return ExtremalEstimate((0.5 + 0j, 0.25 + 0j), curve, 0.5)


def test_extremal_and_slice_rows_cover_failures():
    sweep = HullSlice(
        nodes=((0.5, 0.25), (0.5, 1.0)),
        estimates=(_estimate(), None),
        errors=(None, "boom"),
    )

    assert list(artifacts.extremal_rows(sweep)) == [
        (0.5, 0.0, 0.25, 0.0, 1, 0.5, 0.6, "bounded"),
        (0.5, 0.0, 1.0, 0.0, None, None, None, "error"),
    ]
    rows = list(artifacts.slice_rows(sweep))
    assert rows[0] == (0.25, 0.0, 0.5, "bounded")
    assert math.isnan(rows[1][2]) and rows[1][3] == "error"


def test_node_status_prefers_unbounded():
    assert artifacts.node_status(_estimate("unbounded")) == "unbounded"
    assert artifacts.node_status(_estimate()) == "bounded"
    assert artifacts.node_status(None) == "error"


def test_model_and_pole_rows():
    model = QuotientModel(np.array([0, 1], dtype=complex), np.array([0.5j]), 1e-15, 1, 4)

    rows = list(artifacts.model_rows(model))

    assert rows[0] == ("k", 0, 0.0, 0.0)
    assert rows[2] == ("l", 0, 0.0, 0.5)
    assert rows[-1] == ("residual", 1e-15)
    assert list(artifacts.pole_rows([(0.5 - 0.1j, 2)])) == [(0.5, -0.1, 2)]


def test_fit_rows_and_summary():
    fit = PoleOrderFit((0.3, 0.5), (2.4, 1.4), 1.98, 0.01, 0.002)

    assert list(artifacts.fit_rows(fit)) == [(0.3, 2.4), (0.5, 1.4)]
    assert artifacts.fit_summary(fit, 2) == {
        "m_hat": 1.98,
        "intercept": 0.01,
        "order": 2,
        "laplacian_residual": 0.002,
        "extend_multiplicity": 2,
    }
