"""Command-line surface: config handling, renderers, exit codes."""

from __future__ import annotations

import json
import math

import pytest

import zeroledger.cli as cli
from zeroledger import CaseCertificate, DomainError, VerificationReport
from zeroledger.cli import (
    RunConfig,
    build_parser,
    evaluate_expression,
    load_config_file,
    main,
    render_report,
)
from zeroledger.tables import TableReproduction


def _synthetic_report() -> VerificationReport:
    row_ok = TableReproduction(
        row_id="stair-1.58-1.58",
        paper=0.0380,
        computed=0.0378,
        margin=0.0002,
        feasible=True,
        slacks=(("x >= 2*delta", 0.1),),
    )
    row_bad = TableReproduction(
        row_id="tail-general-9",
        paper=1.0,
        computed=math.nan,
        margin=math.nan,
        feasible=False,
        slacks=(),
    )
    cert_ok = CaseCertificate(
        case_id=2,
        subcase="one isolated term",
        sum_bound=0.89,
        components={"i0": 1},
        passed=True,
        paper_value=0.8919,
    )
    cert_comma = CaseCertificate(
        case_id=5,
        subcase="two terms, common class",
        sum_bound=0.96,
        components={"i0": 1},
        passed=True,
        paper_value=0.9737,
    )
    cert_bad = CaseCertificate(
        case_id=6,
        subcase="infeasible",
        sum_bound=math.nan,
        components={},
        passed=False,
        discrepancy="constituent bound infeasible",
    )
    return VerificationReport(
        delta=0.291,
        c0=0.01,
        table_reproductions=(row_ok, row_bad),
        case_certificates=(cert_ok, cert_comma, cert_bad),
        c1=0.0264,
        overall_pass=False,
    )


def test_run_config_validation():
    RunConfig().validate()
    for bad in (
        RunConfig(delta=1.5),
        RunConfig(c0=0.0),
        RunConfig(eps_num=-1e-9),
        RunConfig(grid_points=50),
        RunConfig(grid_points=49),
        RunConfig(output_format="yaml"),
    ):
        with pytest.raises(DomainError):
            bad.validate()


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "delta = 0.28   # frontier probe\n"
        "c0 = 0.02\n"
        "\n"
        "format = csv\n"
        "parallel = yes\n"
    )
    assert load_config_file(str(path)) == {
        "delta": 0.28,
        "c0": 0.02,
        "format": "csv",
        "parallel": True,
    }
    for text in ("foo = 1\n", "delta 0.3\n", "delta = abc\n", "parallel = maybe\n"):
        path.write_text(text)
        with pytest.raises(DomainError):
            load_config_file(str(path))


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("delta = 0.28\nformat = csv\ngrid_points = 101\n")
    ns = build_parser().parse_args(
        ["verify-cases", "--config", str(path), "--delta", "0.25"]
    )
    cfg = cli._build_config(ns)
    assert cfg.delta == 0.25
    assert cfg.output_format == "csv"
    assert cfg.grid_points == 101


def test_json_render_round_trips():
    text = render_report(_synthetic_report(), "json")
    doc = json.loads(text)
    assert set(doc) == {"delta", "c0", "tables", "cases", "c1", "overall_pass"}
    assert json.dumps(doc, indent=2) + "\n" == text
    assert set(doc["tables"][0]) == {"id", "paper", "computed", "margin", "feasible"}
    assert doc["tables"][1]["computed"] is None
    assert doc["tables"][1]["margin"] is None
    assert set(doc["cases"][0]) == {
        "case",
        "subcase",
        "bound",
        "paper",
        "pass",
        "components",
        "discrepancy",
    }
    assert doc["cases"][2]["bound"] is None
    assert doc["overall_pass"] is False


def test_csv_render():
    lines = render_report(_synthetic_report(), "csv").splitlines()
    assert lines[0] == "kind,id,paper,computed,margin,status"
    assert lines[1].startswith("table,stair-1.58-1.58,0.038,0.0378,")
    assert lines[2] == "table,tail-general-9,1,,,infeasible"
    assert any(line.startswith("case,case2:one-isolated-term,") for line in lines)
    assert any(
        line.startswith("case,case5:two-terms-common-class,") for line in lines
    )
    assert any(line.endswith(",infeasible") and "case6" in line for line in lines)


def test_markdown_render():
    text = render_report(_synthetic_report(), "markdown")
    assert text.startswith("# Verification report\n")
    assert "- c1 = 0.0264" in text
    assert "| id | paper | computed | margin | status |" in text
    assert "| 2 | one isolated term | 0.89 | 0.8919 |" in text
    assert "- case 6 (infeasible): constituent bound infeasible" in text


def test_number_formatting():
    assert cli._fmt(None) == ""
    assert cli._fmt(math.nan) == ""
    assert cli._fmt(1.0 / 3.0) == "0.3333333333"
    assert cli._fmt_margin(2e-4) == "2.000000000e-04"
    assert cli._fmt_margin(None) == ""


def test_evaluate_expression():
    assert evaluate_expression("g", [1.0]) == pytest.approx(11.0 / 30.0, rel=1e-15)
    assert evaluate_expression("G", [0.0]) == pytest.approx(8.0 / 9.0, rel=1e-15)
    assert evaluate_expression("psi", [0.8, 1.0, 2.0]) == pytest.approx(
        0.2702668225817308, rel=1e-12
    )
    assert evaluate_expression("xi", [0.8, 1.0]) == pytest.approx(
        0.07484529542686055, rel=1e-12
    )
    value = evaluate_expression("B", [0.047065, 0.128170, 0.084299, 3.08])
    assert value == pytest.approx(49.67448067, rel=1e-6)
    with pytest.raises(DomainError):
        evaluate_expression("nope", [1.0])
    with pytest.raises(DomainError):
        evaluate_expression("g", [1.0, 2.0])


def test_main_eval_paths(capsys, tmp_path):
    assert main(["eval", "g", "1"]) == 0
    assert capsys.readouterr().out == "0.3666666667\n"
    assert main(["eval", "g"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["eval", "nope", "1"]) == 2
    capsys.readouterr()
    out = tmp_path / "value.txt"
    assert main(["eval", "g", "1", "--out", str(out)]) == 0
    assert out.read_text() == "0.3666666667\n"
    assert main(["eval", "g", "1", "--out", str(tmp_path / "no" / "dir")]) == 2


def test_main_rejects_bad_flags(capsys, monkeypatch):
    assert main(["verify-tables", "--grid", "50"]) == 2
    assert "error:" in capsys.readouterr().err
    monkeypatch.setenv("ZL_THREADS", "abc")
    assert main(["verify-tables"]) == 2
    monkeypatch.setenv("ZL_THREADS", "0")
    assert main(["verify-tables"]) == 2
    capsys.readouterr()


def test_main_requires_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_search_delta_exit_codes(capsys, monkeypatch):
    def stub_bracketed(lo, hi, tol, c0, eps_num, grid_points):
        trace = {
            "probes": [[lo, True], [hi, False]],
            "status": "bracketed",
            "feasible_max": lo,
            "infeasible_min": hi,
            "monotone": True,
        }
        return lo, trace

    monkeypatch.setattr(cli, "delta_search", stub_bracketed)
    assert main(["search-delta", "0.25", "0.35", "1e-3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["delta_min"] == 0.25
    assert doc["trace"]["status"] == "bracketed"

    def stub_failed(lo, hi, tol, c0, eps_num, grid_points):
        trace = {
            "probes": [[lo, False]],
            "status": "all-fail",
            "feasible_max": None,
            "infeasible_min": lo,
            "monotone": True,
        }
        return math.nan, trace

    monkeypatch.setattr(cli, "delta_search", stub_failed)
    assert main(["search-delta", "0.25", "0.35", "1e-3"]) == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["delta_min"] is None
    assert main(["search-delta", "0.25", "0.35", "1e-3", "--format", "markdown"]) == 3
    text = capsys.readouterr().out
    assert "status: all-fail" in text
    assert "delta_min = none" in text
