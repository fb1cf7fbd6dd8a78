import json

import numpy as np
import pytest

import oracles
from aqm.adapt import display_parameter
from aqm.qm import QuantizationMatrix, adaptive_matrices, default_matrices, hevc_fitted_model
from aqm.scaling_list import (
    HEADER,
    ScalingListError,
    emit_scaling_list,
    parse_scaling_list,
    write_atomic,
)


def test_emit_default_8x8_text():
    mats = default_matrices(sizes=(8,))
    text = emit_scaling_list(mats, layer_id=0)
    lines = text.splitlines()
    assert lines[0] == HEADER
    assert lines[1] == "[SIZE=8 KIND=intra LAYER=0 DC=16]"
    intra_rows = [[int(t) for t in line.split()] for line in lines[2:10]]
    assert intra_rows == oracles.GOLDEN_QM
    assert sum(len(r) for r in intra_rows) == 64
    assert lines[10] == "[SIZE=8 KIND=inter LAYER=0 DC=16]"
    assert len(lines) == 1 + 2 * 9


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_round_trip_full_set(fmt):
    mats = adaptive_matrices(display_parameter(1920, 1080), inter_model=hevc_fitted_model())
    doc = parse_scaling_list(emit_scaling_list(mats, layer_id=3, fmt=fmt))
    assert doc.layer_id == 3
    assert set(doc.matrices) == set(mats)
    for key, qm in mats.items():
        assert doc.matrices[key] == qm
        assert doc.matrices[key].dc == qm.dc


def test_json_mirrors_text_fields():
    mats = default_matrices(sizes=(8, 16))
    doc = json.loads(emit_scaling_list(mats, layer_id=1, fmt="json"))
    assert doc["format"] == HEADER and doc["layer"] == 1
    assert [(s["size"], s["kind"]) for s in doc["sections"]] == [
        (8, "intra"), (8, "inter"), (16, "intra"), (16, "inter")
    ]
    assert all(set(s) == {"size", "kind", "layer", "dc", "values"} for s in doc["sections"])


def test_emit_is_deterministic():
    a = emit_scaling_list(default_matrices(), 0)
    b = emit_scaling_list(list(reversed(list(default_matrices().values()))), 0)
    assert a == b


def test_explicit_dc_survives():
    intra = QuantizationMatrix(np.full((16, 16), 20), dc=12)
    inter = QuantizationMatrix(np.full((16, 16), 21), kind="inter", dc=13)
    text = emit_scaling_list([intra, inter], 0)
    assert "[SIZE=16 KIND=intra LAYER=0 DC=12]" in text
    doc = parse_scaling_list(text)
    assert doc.matrices[(16, "intra")].dc == 12
    assert doc.matrices[(16, "inter")].dc == 13


def test_4x4_pass_through():
    intra = QuantizationMatrix(np.arange(16, 32).reshape(4, 4), provenance="user")
    inter = QuantizationMatrix(np.arange(17, 33).reshape(4, 4), kind="inter", provenance="user")
    doc = parse_scaling_list(emit_scaling_list([intra, inter], 2))
    assert doc.matrices[(4, "intra")] == intra


def test_two_layers_differ():
    bl = adaptive_matrices(display_parameter(1280, 720))
    el = adaptive_matrices(display_parameter(3840, 2160))
    doc_bl = parse_scaling_list(emit_scaling_list(bl, 0))
    doc_el = parse_scaling_list(emit_scaling_list(el, 1))
    assert doc_bl.layer_id != doc_el.layer_id
    for key in bl:
        el_vals = doc_el.matrices[key].values
        bl_vals = doc_bl.matrices[key].values
        assert not np.array_equal(el_vals, bl_vals)
        assert np.all(el_vals <= bl_vals)


def test_incomplete_set_rejected():
    mats = default_matrices()
    del mats[(16, "inter")]
    with pytest.raises(ScalingListError, match="16x16 inter"):
        emit_scaling_list(mats, 0)
    with pytest.raises(ScalingListError):
        emit_scaling_list([], 0)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "NOT-A-HEADER\n",
        HEADER + "\n[SIZE=8 KIND=intra LAYER=0 DC=16]\n1 2 3\n",
        HEADER + "\n[SIZE=8 KIND=luma LAYER=0 DC=16]\n",
        HEADER + "\n" + "\n".join(emit_scaling_list(default_matrices(sizes=(8,)), 0).splitlines()[1:10]),
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ScalingListError):
        parse_scaling_list(text)


def test_parse_rejects_mixed_layers():
    text = emit_scaling_list(default_matrices(sizes=(8,)), 0)
    text = text.replace("KIND=inter LAYER=0", "KIND=inter LAYER=1")
    with pytest.raises(ScalingListError, match="single layer"):
        parse_scaling_list(text)


def test_write_atomic(tmp_path):
    target = tmp_path / "list.txt"
    write_atomic(target, "abc\n")
    assert target.read_text() == "abc\n"
    assert list(tmp_path.iterdir()) == [target]
    with pytest.raises(OSError):
        write_atomic(tmp_path / "missing" / "x.txt", "abc")
