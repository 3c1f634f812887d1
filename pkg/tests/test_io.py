import io
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cosymplectic_bench.io import (
    SCHEMA_VERSION,
    SWEEP_COLUMNS,
    DocumentError,
    InstanceDocument,
    SweepRow,
    load_point,
    read_sweep_csv,
    save_point,
    sweep_csv_text,
)
from cosymplectic_bench.submanifold import random_point

GOLDEN = Path(__file__).parent / "golden"


def doc_dict(seed=0, **kw):
    return InstanceDocument.from_point(random_point(seed, 2, 3, **kw), seed).to_dict()


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_round_trip_bit_faithful(seed, geometric):
    pt = random_point(seed, 3, 3, geometric_mode=geometric)
    text = InstanceDocument.from_point(pt, seed).dumps()
    back = InstanceDocument.loads(text)
    assert back.dumps() == text
    pt2 = back.to_point()
    assert pt2.h.tobytes() == pt.h.tobytes()
    assert pt2.tangent_frame.tobytes() == pt.tangent_frame.tobytes()
    assert pt2.c == pt.c and pt2.geometric_mode == geometric and back.seed == seed


def test_dict_round_trip_value_identical():
    d = doc_dict(4)
    assert InstanceDocument.from_dict(d).to_dict() == d


def test_save_load(tmp_path):
    pt = random_point(1, 2, 2)
    save_point(pt, tmp_path / "a.json", seed=1)
    assert load_point(tmp_path / "a.json").h.tobytes() == pt.h.tobytes()


def test_schema_fields():
    d = doc_dict()
    assert d["schema_version"] == SCHEMA_VERSION
    assert set(d) == {"schema_version", "ambient", "tangent_frame", "normal_frame", "h", "geometric_mode", "seed"}
    assert set(d["ambient"]) == {"m", "c"}


def _error_path(d):
    with pytest.raises(DocumentError) as exc:
        InstanceDocument.from_dict(d).to_point()
    return exc.value.path


def test_nonsymmetric_h_path():
    d = doc_dict()
    d["h"][0][1][2] += 1.0
    assert _error_path(d) == "h[0][1][2]"


def test_bad_number_path():
    d = doc_dict()
    d["tangent_frame"][1][3] = "x"
    assert _error_path(d) == "tangent_frame[1][3]"


@pytest.mark.parametrize(
    "mutate,path",
    [
        (lambda d: d.pop("h"), "h"),
        (lambda d: d.update(schema_version=2), "schema_version"),
        (lambda d: d["ambient"].update(m=0), "ambient.m"),
        (lambda d: d["ambient"].update(c=float("nan")), "ambient.c"),
        (lambda d: d.update(geometric_mode="yes"), "geometric_mode"),
        (lambda d: d.update(seed=1.5), "seed"),
        (lambda d: d["normal_frame"].pop(), "normal_frame"),
        (lambda d: d["h"][0].pop(), "h"),
    ],
)
def test_field_errors(mutate, path):
    d = doc_dict()
    mutate(d)
    assert _error_path(d) == path


def test_xi_row_rejected_in_geometric_mode():
    d = doc_dict(geometric_mode=False)
    d["geometric_mode"] = True
    assert _error_path(d).startswith("h")


def test_invalid_json():
    with pytest.raises(DocumentError, match="invalid JSON"):
        InstanceDocument.loads("{not json")


def _row(i, slack=0.1):
    return SweepRow(i, 42, 2, 3, 0.5, 1.0, -1.0, 2.0, 3.0, 0.25, 1.0, 2.0, 2.0 + slack, slack, "holds", "generic", 0.1 + 0.2)


def test_csv_header_golden():
    text = sweep_csv_text([_row(0)])
    assert text.splitlines()[0] == (GOLDEN / "sweep_header_v1.csv").read_text().strip()
    assert SWEEP_COLUMNS[0] == "instance_id" and "seed" in SWEEP_COLUMNS


def test_csv_float_round_trip():
    rows = [_row(i, slack=1 / 3 * i) for i in range(4)]
    back = read_sweep_csv(io.StringIO(sweep_csv_text(rows)))
    assert [r["slack"] for r in back] == [r.slack for r in rows]
    assert back[0]["equality_residual_max"] == 0.1 + 0.2
    assert back[2]["instance_id"] == 2 and back[0]["verdict"] == "holds"


def test_csv_bad_header():
    with pytest.raises(ValueError):
        read_sweep_csv(io.StringIO("a,b\n1,2\n"))
