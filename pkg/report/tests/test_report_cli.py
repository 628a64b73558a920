"""Command-line wrapper: exit codes and output placement."""

import json

import pytest

from carekg_report.cli import main


def test_sankey_subcommand_writes_the_svg(tmp_path, write_flows, capsys):
    flows = write_flows([("a", "b", 3), ("b", "c", 7)])
    out = tmp_path / "fig" / "sankey.svg"
    out.parent.mkdir()
    assert main(["sankey", flows, "--out", str(out)]) == 0
    assert out.exists()
    assert str(out) in capsys.readouterr().out


def test_metrics_subcommand_writes_one_chart_per_experiment(tmp_path, capsys):
    doc = {"experiments": [
        {"name": "t1", "cells": [{"model": "LR", "kg_variant": "tabular",
                                  "metrics": {"auc": {"mean": 0.5, "std": 0.01}}}]},
        {"name": "t2", "cells": [{"model": "RF", "kg_variant": "tabular",
                                  "metrics": {"auc": {"mean": 0.6, "std": 0.02}}}]},
    ]}
    summary = tmp_path / "summary.json"
    summary.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["metrics", str(summary), "--out-dir", str(tmp_path / "charts")]) == 0
    written = capsys.readouterr().out.strip().splitlines()
    assert len(written) == 2
    assert (tmp_path / "charts" / "metrics_t1.svg").exists()
    assert (tmp_path / "charts" / "metrics_t2.svg").exists()


def test_missing_input_exits_2_with_message(tmp_path, capsys):
    assert main(["sankey", str(tmp_path / "absent.csv")]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["metrics", str(tmp_path / "absent.json")]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_input_exits_2_with_message(tmp_path, capsys):
    bad = tmp_path / "flows.csv"
    bad.write_text("a,b\n1,2\n", encoding="utf-8")
    assert main(["sankey", str(bad)]) == 2
    assert "expected header" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["render-everything"])
    assert exc.value.code == 2


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
