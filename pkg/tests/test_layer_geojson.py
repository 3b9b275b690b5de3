from __future__ import annotations

import json

import pytest

from urbanrisk.network.layer import export_weight_layer, import_weight_layer, layer_to_json

from conftest import conditioned


STAMP = "2026-08-08T12:00:00Z"


def test_one_feature_per_edge(line):
    layer = export_weight_layer(conditioned(line), STAMP)
    assert layer["type"] == "FeatureCollection"
    assert len(layer["features"]) == 3


def test_removed_edge_schema(line):
    cn = conditioned(line, {"B-C": 0.9})
    layer = export_weight_layer(cn, STAMP)
    by_id = {f["properties"]["edge_id"]: f["properties"] for f in layer["features"]}
    assert by_id["B-C"]["removed"] is True
    assert "multiplier" not in by_id["B-C"]
    assert by_id["A-B"]["multiplier"] == 1.0
    assert "removed" not in by_id["A-B"]


def test_round_trip_byte_identical(line):
    cn = conditioned(line, {"A-B": 0.3, "B-C": 0.8}, sid="storm-1")
    first = layer_to_json(export_weight_layer(cn, STAMP))
    imported, stamp = import_weight_layer(first, line)
    second = layer_to_json(export_weight_layer(imported, stamp))
    assert second == first


def test_import_validates_edges(line, diamond):
    layer = export_weight_layer(conditioned(line), STAMP)
    with pytest.raises(ValueError, match="unknown edge"):
        import_weight_layer(layer, diamond)


def test_import_requires_feature_collection(line):
    with pytest.raises(ValueError, match="FeatureCollection"):
        import_weight_layer(json.dumps({"type": "Feature"}), line)


def test_geometry_is_lon_lat(line):
    layer = export_weight_layer(conditioned(line), STAMP)
    feat = layer["features"][0]
    (lon1, lat1), (lon2, lat2) = feat["geometry"]["coordinates"]
    a = line.nodes[line.edges[feat["properties"]["edge_id"]].frm]
    assert (lon1, lat1) == (a.lon, a.lat)
