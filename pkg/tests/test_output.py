import json
import xml.etree.ElementTree as ET

import numpy as np

from kplab.output import dump_csv, dump_json, fmt, read_header_config, svg_panels


def test_fmt_round_trip():
    for x in (0.1, 1 / 3, 2.0 ** -40, 6.02214076e23, -0.0):
        assert float(fmt(x)) == x
    assert fmt(-0.0) == "0"
    assert fmt(True) == "true"
    assert fmt(np.int64(3)) == "3"


def test_csv_header_and_config():
    cfg = {"model": "bo", "k": 1.0}
    text = dump_csv(["x", "y"], [(1, 0.5), (2, 0.25)], cfg, ["note one"])
    lines = text.splitlines()
    assert lines[1] == "# note one"
    assert lines[2] == "x,y"
    assert lines[3] == "1,0.5"
    assert read_header_config(text) == cfg


def test_json_config_first():
    text = dump_json({"value": np.float64(0.1), "flag": np.bool_(True)}, {"model": "ilw"})
    data = json.loads(text)
    assert list(data) == ["config", "value", "flag"]
    assert read_header_config(text) == {"model": "ilw"}
    assert data["value"] == 0.1


def test_svg_is_well_formed():
    x = np.linspace(0, 1, 11)
    svg = svg_panels(x, [("Re", [x, -x]), ("Im", [x ** 2])], "ell", "t <1>", {"a": 1})
    root = ET.fromstring(svg)
    assert root.get("width") == "800" and root.get("height") == "600"
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}polyline")) == 3
    labels = [t.text for t in root.findall(f"{ns}text")]
    assert "ell" in labels and "Re" in labels and "Im" in labels
    assert read_header_config(svg) == {"a": 1}


def test_svg_constant_series():
    svg = svg_panels([0, 1], [("flat", [[0.0, 0.0]])], "x")
    ET.fromstring(svg)
