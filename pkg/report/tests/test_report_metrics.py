"""Bar-chart renderer: chart counts, exact heights, error bars, validation."""

import json
import os

import pytest

from carekg_report import ReportDataError, render_metrics
from carekg_report.barchart import HEADROOM, MARGIN_TOP, Y_SCALE

METRICS = ["f1_backhome", "f1_rehab", "f1_death", "f1_macro", "f1_weighted",
           "accuracy", "auc"]

Y_BASE = MARGIN_TOP + HEADROOM * Y_SCALE


def make_summary(tmp_path, experiments):
    """experiments: {name: [(model, variant, {metric: (mean, std)})]}"""
    doc = {"tool_version": "0.1.0", "experiments": []}
    for name, cells in experiments.items():
        doc["experiments"].append({
            "name": name,
            "seeds": [0, 1],
            "cells": [{"model": m, "kg_variant": v,
                       "metrics": {k: {"mean": mu, "std": sd}
                                   for k, (mu, sd) in ms.items()}}
                      for m, v, ms in cells],
        })
    path = tmp_path / "summary.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def default_cell(model="LR", variant="tabular", base=0.61):
    ms = {k: (round(base + 0.017 * i, 6), round(0.01 + 0.003 * i, 6))
          for i, k in enumerate(METRICS)}
    return (model, variant, ms)


def test_chart_count_equals_experiment_count(tmp_path):
    path = make_summary(tmp_path, {
        "table1": [default_cell()],
        "table3": [default_cell("RGCN3+lit", "SPHN-ts", 0.7)],
    })
    out = render_metrics(path, str(tmp_path / "charts"))
    assert len(out) == 2
    assert sorted(os.path.basename(p) for p in out) == \
        ["metrics_table1.svg", "metrics_table3.svg"]
    assert all(os.path.exists(p) for p in out)


def test_single_cell_makes_a_single_bar_group(tmp_path, svg_classed):
    path = make_summary(tmp_path, {"solo": [default_cell()]})
    out = render_metrics(path, str(tmp_path / "charts"))
    groups = svg_classed(out[0], "cellgroup")
    assert len(groups) == 1
    assert len(svg_classed(out[0], "bar")) == len(METRICS)


def test_bar_heights_equal_means_exactly(tmp_path, svg_classed):
    cells = [default_cell("LR", "tabular", 0.55),
             default_cell("RGCN3+lit", "SPHN-tr", 0.79)]
    path = make_summary(tmp_path, {"table1": cells})
    out = render_metrics(path, str(tmp_path / "charts"))
    bars = svg_classed(out[0], "bar")
    assert len(bars) == 2 * len(METRICS)
    expected = {(m, v, k): mu for m, v, ms in cells for k, (mu, _) in ms.items()}
    for group in svg_classed(out[0], "cellgroup"):
        key_mv = (group.get("data-model"), group.get("data-variant"))
        for bar in group:
            if bar.get("class") != "bar":
                continue
            mean = expected[key_mv + (bar.get("data-metric"),)]
            assert float(bar.get("data-mean")) == mean
            assert float(bar.get("height")) == mean * Y_SCALE
            assert float(bar.get("y")) == Y_BASE - mean * Y_SCALE


def test_error_bars_span_mean_plus_minus_std(tmp_path, svg_classed):
    cells = [default_cell("NN", "tabular", 0.5)]
    path = make_summary(tmp_path, {"exp": cells})
    out = render_metrics(path, str(tmp_path / "charts"))
    ms = cells[0][2]
    for err in svg_classed(out[0], "errbar"):
        mean, std = ms[err.get("data-metric")]
        top = Y_BASE - (mean + std) * Y_SCALE
        bot = Y_BASE - max(mean - std, 0.0) * Y_SCALE
        vertical = err[0]
        assert float(vertical.get("y1")) == top
        assert float(vertical.get("y2")) == bot


def test_error_bar_lower_cap_clamps_at_zero(tmp_path, svg_classed):
    ms = {k: (0.02, 0.5) for k in METRICS}
    path = make_summary(tmp_path, {"exp": [("LR", "tabular", ms)]})
    out = render_metrics(path, str(tmp_path / "charts"))
    for err in svg_classed(out[0], "errbar"):
        assert float(err[0].get("y2")) == Y_BASE


def test_renderer_leaves_the_input_untouched(tmp_path):
    path = make_summary(tmp_path, {"exp": [default_cell()]})
    before = open(path, "rb").read()
    render_metrics(path, str(tmp_path / "charts"))
    assert open(path, "rb").read() == before


@pytest.mark.parametrize("mutate,fragment", [
    (lambda d: d.pop("experiments"), "expected an object"),
    (lambda d: d.update(experiments=[]), "no experiments"),
    (lambda d: d["experiments"][0].pop("name"), "without a name"),
    (lambda d: d["experiments"].append(dict(d["experiments"][0])),
     "duplicate experiment"),
    (lambda d: d["experiments"][0].update(cells=[]), "has no cells"),
    (lambda d: d["experiments"][0]["cells"][0].pop("model"),
     "missing model/kg_variant"),
    (lambda d: d["experiments"][0]["cells"][0].update(metrics={}),
     "has no metrics"),
    (lambda d: d["experiments"][0]["cells"][0]["metrics"]["auc"].pop("std"),
     "numeric mean and std"),
    (lambda d: d["experiments"][0]["cells"][0]["metrics"]["auc"].update(
        mean=1.5), "out of range"),
    (lambda d: d["experiments"][0]["cells"][0]["metrics"]["auc"].update(
        std=-0.1), "out of range"),
    (lambda d: d["experiments"][0]["cells"][1]["metrics"].pop("auc"),
     "disagree on metric names"),
])
def test_malformed_summaries_raise_with_a_message(tmp_path, mutate, fragment):
    path = make_summary(tmp_path, {"exp": [
        default_cell(), default_cell("RF", "tabular", 0.6)]})
    doc = json.loads(open(path, encoding="utf-8").read())
    mutate(doc)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ReportDataError, match=fragment):
        render_metrics(str(bad), str(tmp_path / "charts"))


def test_missing_and_invalid_files_raise(tmp_path):
    with pytest.raises(ReportDataError, match="cannot read"):
        render_metrics(str(tmp_path / "absent.json"), str(tmp_path / "c"))
    bad = tmp_path / "notjson.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(ReportDataError, match="not valid JSON"):
        render_metrics(str(bad), str(tmp_path / "c"))
