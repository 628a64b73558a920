import xml.etree.ElementTree as ET

import pytest


@pytest.fixture
def svg_classed():
    """Parse an SVG and return the elements carrying a given class."""
    def load(path, cls):
        root = ET.parse(path).getroot()
        return [el for el in root.iter() if el.get("class") == cls]
    return load


@pytest.fixture
def write_flows(tmp_path):
    """Write a flows CSV from (source, target, weight) rows."""
    def write(rows, name="flows.csv"):
        path = tmp_path / name
        lines = ["source,target,weight"]
        lines += [f"{s},{t},{w}" for s, t, w in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)
    return write
