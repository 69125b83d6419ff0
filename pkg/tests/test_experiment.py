import csv
import json
import re

import numpy as np
import pytest

from rqss.cli import main
from rqss.experiment import (GQSA_COLUMNS, RECORD_COLUMNS, ConfigError, parse_config, run_experiment,
                             run_gqsa, sweep_points)
from rqss.lattice import GuardError
from rqss.report import CsvAppender, EmptyReportError, emit_report, format_value, read_csv, render_svg


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _strip_wall(text):
    rows = list(csv.reader(text.splitlines()))
    i = rows[0].index("wall_ms")
    return [r[:i] + r[i + 1:] for r in rows]


@pytest.mark.parametrize("doc,path", [
    ({"mode": "recursive", "n": 2, "nn": 3}, "$"),
    ({"mode": "recursive", "errors": {"epsilon": 0.1, "delat": 0.1}}, "$.errors"),
    ({"mode": "recursive", "sweep": [{"name": "epsilon", "values": [0.1], "step": 1}]}, "$.sweep[0]"),
    ({"mode": "recursive", "sweep": [{"name": "eps", "values": [0.1]}]}, "$.sweep[0].name"),
    ({"mode": "recursive", "n": "3"}, "$.n"),
    ({"mode": "walk"}, "$.mode"),
])
def test_strict_schema_reports_path(doc, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert str(exc.value).startswith(path + ":")


def test_non_finite_values_rejected():
    with pytest.raises(ConfigError, match=r"\$\.sweep\[0\]\.values\[1\]"):
        parse_config({"mode": "recursive", "sweep": [{"name": "epsilon", "values": [0.0, float("nan")]}]})


def test_integer_axes_must_be_integral():
    with pytest.raises(ConfigError, match="integers"):
        parse_config({"mode": "recursive", "sweep": [{"name": "n", "values": [2.5]}]})


def test_sweep_points_cartesian_order():
    cfg = parse_config({"mode": "recursive", "sweep": [{"name": "n", "values": [2, 3]},
                                                        {"name": "epsilon", "values": [0.0, 0.1, 0.2]}]})
    pts = sweep_points(cfg)
    assert len(pts) == 6
    assert pts[:3] == [{"n": 2, "epsilon": e} for e in (0.0, 0.1, 0.2)]


def test_single_run_n3():
    recs = run_experiment(parse_config({"mode": "recursive", "n": 3}))
    assert len(recs) == 1
    r = recs[0]
    assert tuple(r) == RECORD_COLUMNS
    assert r["success_prob"] >= 0.9 and r["N"] == 729


def test_epsilon_sweep_n4(tmp_path):
    out = tmp_path / "eps.csv"
    cfg = parse_config({"mode": "recursive", "n": 4, "sweep": [{"name": "epsilon", "values": [0, 0.05, 0.1]}]})
    recs = run_experiment(cfg, out)
    assert len(recs) == 3
    p = [r["success_prob"] for r in recs]
    assert p[0] - min(p) <= 0.1
    assert len(out.read_text().splitlines()) == 4


def test_records_model_agreement():
    cfg = parse_config({"mode": "recursive", "n": 3, "sweep": [{"name": "epsilon", "values": [-0.3, 0.3]},
                                                                {"name": "delta", "values": [-0.3, 0.3]}]})
    for r in run_experiment(cfg):
        assert abs(r["omega_n_sim"] - r["omega_n_model"]) <= 1e-9


def test_Delta_axis_sets_both_errors():
    cfg = parse_config({"mode": "recursive", "n": 2, "sweep": [{"name": "Delta", "values": [0.1]}]})
    r = run_experiment(cfg)[0]
    assert r["epsilon"] == r["delta"] == 0.1


def test_guard_error_before_work(tmp_path, monkeypatch):
    monkeypatch.setenv("RQSS_MAX_N", "3")
    cfg = parse_config({"mode": "recursive", "sweep": [{"name": "n", "values": [2, 4]}]})
    out = tmp_path / "g.csv"
    with pytest.raises(GuardError):
        run_experiment(cfg, out)
    assert not out.exists()


def test_gqsa_grover_row():
    rows = run_gqsa(parse_config({"mode": "gqsa", "spectrum": {"kind": "grover", "N": 16}}))
    assert len(rows) == 1 and tuple(rows[0]) == GQSA_COLUMNS
    assert rows[0]["q_m"] == pytest.approx(3.1416, abs=1e-4)
    assert rows[0]["P_m"] == pytest.approx(1.0, abs=1e-14)


def test_gqsa_rejects_other_axes():
    cfg = parse_config({"mode": "gqsa", "spectrum": {"kind": "grover", "N": 16},
                        "sweep": [{"name": "delta", "values": [0.1]}]})
    with pytest.raises(ConfigError):
        run_gqsa(cfg)


def test_determinism_and_workers(tmp_path):
    doc = {"mode": "recursive", "n": 2, "errors": {"nu": 0.05, "seed": 3},
           "sweep": [{"name": "epsilon", "values": [0.0, 0.1, 0.2]}, {"name": "seed", "values": [1, 2]}]}
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    run_experiment(parse_config(doc), a)
    run_experiment(parse_config(doc), b)
    run_experiment(parse_config({**doc, "workers": 3}), c)
    assert _strip_wall(a.read_text()) == _strip_wall(b.read_text()) == _strip_wall(c.read_text())


def test_format_value_roundtrip():
    assert format_value(0.1) == "0.1"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(np.float64(10.0)) == "10.0" and format_value(np.int64(3)) == "3"
    assert format_value(np.bool_(True)) == "true"
    assert format_value(None) == "" and format_value(True) == "true" and format_value(7) == "7"


def test_csv_report_lines(tmp_path):
    recs = run_experiment(parse_config({"mode": "recursive", "n": 2,
                                        "sweep": [{"name": "epsilon", "values": [0, 0.1, 0.2]}]}))
    p = emit_report(recs, "csv", tmp_path / "r.csv")
    lines = p.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == ",".join(RECORD_COLUMNS)
    back = read_csv(p)
    assert back[2]["epsilon"] == 0.2 and back[0]["success_prob"] == recs[0]["success_prob"]


def test_svg_single_series():
    recs = run_experiment(parse_config({"mode": "recursive", "n": 2,
                                        "sweep": [{"name": "epsilon", "values": [0, 0.1, 0.2]}]}))
    svg = render_svg(recs)
    assert svg.count("<polyline") == 1
    assert 'viewBox="0 0 800 600"' in svg
    assert re.search(r'class="xlabel"[^>]*>epsilon<', svg)
    assert re.search(r'class="ylabel"[^>]*>success_prob<', svg)


def test_svg_two_series_legend():
    recs = [dict(n=n, epsilon=e, success_prob=0.9 - e) for n in (4, 5) for e in (0.0, 0.1)]
    svg = render_svg(recs, "epsilon")
    assert svg.count("<polyline") == 2
    assert ">n=4<" in svg and ">n=5<" in svg


def test_svg_constant_data_padding():
    svg = render_svg([dict(n=2, epsilon=0.0, success_prob=0.5)])
    assert "nan" not in svg.lower()


def test_empty_report():
    with pytest.raises(EmptyReportError):
        emit_report([], "csv", "unused.csv")
    with pytest.raises(EmptyReportError):
        render_svg([])


def test_appender_writes_to_stream(capsys):
    import sys
    with CsvAppender(sys.stdout, ("a", "b")) as app:
        app.append({"a": 1, "b": 0.5})
    assert capsys.readouterr().out == "a,b\n1,0.5\n"


# --- command line -------------------------------------------------------------

def test_cli_simulate(tmp_path, capsys):
    cfg = _write(tmp_path, {"mode": "recursive", "n": 2})
    assert main(["simulate", cfg]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["amp_iters"] == 2 and rec["success_prob"] == pytest.approx(0.98288, abs=1e-5)


def test_cli_simulate_rejects_sweep(tmp_path, capsys):
    cfg = _write(tmp_path, {"mode": "recursive", "n": 2, "sweep": [{"name": "n", "values": [2]}]})
    assert main(["simulate", cfg]) == 2
    assert "sweep" in capsys.readouterr().err


def test_cli_sweep_and_plot(tmp_path):
    cfg = _write(tmp_path, {"mode": "recursive", "sweep": [{"name": "n", "values": [2, 3]},
                                                           {"name": "epsilon", "values": [0.0, 0.1]}]})
    out, svg, svg2 = tmp_path / "s.csv", tmp_path / "s.svg", tmp_path / "p.svg"
    assert main(["sweep", cfg, "-o", str(out), "--svg", str(svg)]) == 0
    assert len(out.read_text().splitlines()) == 5
    assert svg.read_text().count("<polyline") == 2
    assert main(["plot", str(out), "-o", str(svg2)]) == 0
    assert ">n=2<" in svg2.read_text() and ">n=3<" in svg2.read_text()


def test_cli_gqsa(tmp_path, capsys):
    cfg = _write(tmp_path, {"mode": "gqsa", "sweep": [{"name": "epsilon", "values": [0.0, 0.1]}]})
    spec = tmp_path / "spec.csv"
    spec.write_text("theta,weight\n0,0.0625\n3.141592653589793,0.9375\n")
    assert main(["gqsa", cfg, "--spectrum", str(spec)]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 2 and float(rows[0]["q_m"]) == pytest.approx(3.14159, abs=1e-5)
    out = tmp_path / "g.csv"
    assert main(["gqsa", cfg, "--spectrum", str(spec), "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0] == ",".join(GQSA_COLUMNS)


def test_cli_errors_exit_2(tmp_path, capsys):
    assert main(["simulate", str(tmp_path / "missing.json")]) == 2
    bad = _write(tmp_path, {"mode": "recursive", "n": 2, "sweeps": []})
    assert main(["sweep", bad]) == 2
    assert "$" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["simulate", str(broken)]) == 2
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(RECORD_COLUMNS) + "\n")
    assert main(["plot", str(empty), "-o", str(tmp_path / "x.svg")]) == 2


def test_cli_verify_quick(capsys):
    assert main(["verify"]) == 0
    assert "checks passed" in capsys.readouterr().out
