"""CLI subcommands: exit codes, config round trips, report determinism."""

import json

import numpy as np
import pytest

from alexgeo.cli import main
from alexgeo.metric_core import load_manifold_json
from alexgeo.report import (
    COLUMN_NAMES,
    CSV_COLUMNS,
    ExperimentConfig,
    config_to_ini,
    parse_config,
    save_config,
)


@pytest.fixture(scope="module")
def cyl_json(tmp_path_factory):
    p = tmp_path_factory.mktemp("gen") / "cyl.json"
    rc = main([
        "gen", "--family", "thin_cylinder", "--h", "0.15",
        "--param", "radius=0.5", "--param", "height=0.5", "--out", str(p),
    ])
    assert rc == 0
    return str(p)


@pytest.fixture(scope="module")
def tube_json(tmp_path_factory):
    p = tmp_path_factory.mktemp("gen2") / "tube.json"
    rc = main([
        "gen", "--family", "tube_neighborhood", "--h", "0.1",
        "--param", "kind=segment", "--param", "eps=0.2", "--out", str(p),
    ])
    assert rc == 0
    return str(p)


def test_config_round_trip():
    cfg = ExperimentConfig(
        name="t",
        family="thin_cylinder",
        indices=(2, 3),
        h=0.2,
        seed=7,
        sample_cap=80,
        curvature=False,
        gh=False,
        curvature_samples=120,
        params=(("height", "0.5"), ("radius", "0.5")),
    )
    text = config_to_ini(cfg)
    assert parse_config(text) == cfg
    assert config_to_ini(parse_config(text)) == text  # canonical form is stable
    assert parse_config(config_to_ini(ExperimentConfig())) == ExperimentConfig()


def test_config_validation_errors():
    with pytest.raises(ValueError, match=r"unknown section \[extra\]"):
        parse_config("[extra]\nx = 1\n")
    with pytest.raises(ValueError, match="unknown key 'color'"):
        parse_config("[experiment]\ncolor = red\n")
    with pytest.raises(ValueError, match=r"\[experiment\] indices"):
        parse_config("[experiment]\nindices = 1, two\n")
    with pytest.raises(ValueError, match="a float or 'auto'"):
        parse_config("[experiment]\nh = soon\n")
    with pytest.raises(ValueError, match=">= 4"):
        parse_config("[experiment]\nsample_cap = 2\n")
    with pytest.raises(ValueError, match=r"\[features\] gh"):
        parse_config("[features]\ngh = maybe\n")
    with pytest.raises(ValueError, match=r"\[curvature\] samples"):
        parse_config("[curvature]\nsamples = lots\n")


def test_family_params_typing():
    cfg = ExperimentConfig(params=(("a", "3"), ("b", "0.5"), ("c", "xyz")))
    assert cfg.family_params() == {"a": 3, "b": 0.5, "c": "xyz"}
    assert type(cfg.family_params()["a"]) is int


def test_version_and_report_epilog(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("alexgeo ")
    with pytest.raises(SystemExit) as exc:
        main(["report", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "CSV columns:" in out
    assert "curv_k_lower" in out


def test_gen_outputs_and_usage_errors(cyl_json, capsys, tmp_path):
    m = load_manifold_json(cyl_json)
    assert m.n > 50 and m.boundary_mask.sum() > 0
    rc = main([
        "gen", "--family", "thin_cylinder", "--h", "0.2", "--truth",
        "--param", "radius=0.5", "--param", "height=0.5",
        "--out", str(tmp_path / "c2.json"),
    ])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    truth = json.loads(lines[-1])
    assert truth["inj"] == pytest.approx(np.pi * 0.5)
    with pytest.raises(SystemExit) as exc:  # argparse rejects unknown families
        main(["gen", "--family", "moebius", "--out", "x.json"])
    assert exc.value.code == 1
    assert main([
        "gen", "--family", "thin_cylinder", "--param", "radius0.5",
        "--out", str(tmp_path / "c3.json"),
    ]) == 1  # malformed --param is a config error


def test_curv_exit_codes(cyl_json, tube_json, tmp_path, capsys):
    rep_path = tmp_path / "rep.json"
    rc = main([
        "curv", "--manifold", tube_json, "--k", "-0.1",
        "--samples", "300", "--json", str(rep_path),
    ])
    assert rc == 0
    assert "pass" in capsys.readouterr().out
    doc = json.loads(rep_path.read_text())
    assert doc["schema"] == "cbb-quadruple-report/1"
    assert doc["passed"] is True
    # flat solid around a segment is CAT(k) for any k >= 0
    assert main(["curv", "--manifold", tube_json, "--cat", "--k", "0.5"]) == 0
    rc = main(["curv", "--manifold", cyl_json, "--k", "9.0"])
    assert rc == 2
    out = capsys.readouterr().out
    assert "FAIL" in out and "diameter_bound_violated" in out


def test_extend_roundtrip(cyl_json, tmp_path):
    out = tmp_path / "ext.json"
    rc = main([
        "extend", "--manifold", cyl_json, "--t0", "0.2", "--eps", "0.5",
        "--lambda-bar", "-1.0", "--layers", "8", "--out", str(out),
    ])
    assert rc == 0
    m = load_manifold_json(cyl_json)
    g = load_manifold_json(str(out))
    assert g.n == m.n + 8 * int(m.boundary_mask.sum())
    assert g.meta["collar_t0"] == 0.2
    assert main([
        "extend", "--manifold", cyl_json, "--t0", "0.2", "--out", str(out),
    ]) == 1  # partial explicit profile


def test_gh_self_distance(cyl_json, tmp_path, capsys):
    doc_path = tmp_path / "gh.json"
    rc = main([
        "gh", "--source", cyl_json, "--target", cyl_json,
        "--cap", "80", "--json", str(doc_path),
    ])
    assert rc == 0
    assert "lower=0" in capsys.readouterr().out
    doc = json.loads(doc_path.read_text())
    assert doc["schema"] == "gh-bounds/1"
    assert doc["lower"] == 0.0
    assert doc["upper"] == 0.0  # identity assignment is found


def test_glue_command(cyl_json, tmp_path, capsys):
    out = tmp_path / "glued.csv"
    rc = main([
        "glue", "--source", cyl_json, "--target", cyl_json,
        "--seam-source", "0", "--seam-target", "0", "--out", str(out),
    ])
    assert rc == 0
    n = load_manifold_json(cyl_json).n
    lines = out.read_text().splitlines()
    assert len(lines) == 2 * n - 1 + 1  # header + one row per glued point
    assert main([
        "glue", "--source", cyl_json, "--target", cyl_json,
        "--seam-source", "a,b", "--seam-target", "0", "--out", str(out),
    ]) == 1


def test_report_template_and_missing_config(tmp_path):
    cfgp = tmp_path / "template.ini"
    assert main(["report", "--config", str(cfgp), "--init"]) == 0
    assert parse_config(cfgp.read_text()) == ExperimentConfig()
    assert main(["report", "--config", str(tmp_path / "absent.ini")]) == 1


def test_report_determinism_and_outputs(tmp_path):
    cfgp = tmp_path / "mini.ini"
    save_config(
        ExperimentConfig(
            name="mini", family="thin_cylinder", indices=(1, 2), h=0.15,
            sample_cap=60, curvature_samples=120,
        ),
        str(cfgp),
    )
    outs = []
    for sub, jobs in (("a", "1"), ("b", "1"), ("c", "2")):
        out = tmp_path / sub
        rc = main(["report", "--config", str(cfgp), "--out", str(out), "--jobs", jobs])
        assert rc == 0
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert outs[0].keys() == outs[1].keys() == outs[2].keys()
    for name in outs[0]:
        assert outs[0][name] == outs[1][name], f"rerun changed {name}"
        assert outs[0][name] == outs[2][name], f"--jobs changed {name}"
    names = set(outs[0])
    assert {"mini.csv", "mini_columns.json", "mini_manifest.json"} <= names
    assert any(n.endswith(".svg") for n in names)
    schema = json.loads(outs[0]["mini_columns.json"])
    assert schema["columns"] == [{"name": n, "description": d} for n, d in CSV_COLUMNS]
    manifest = json.loads(outs[0]["mini_manifest.json"])
    assert manifest["files"] == sorted(n for n in names if n != "mini_manifest.json")
    assert [r["status"] for r in manifest["rows"]] == ["ok", "ok"]
    header = outs[0]["mini.csv"].decode().splitlines()[0].split(",")
    assert header == list(COLUMN_NAMES)


def test_report_row_failure_isolation(tmp_path):
    # i = 1 cannot build this family (the cut misses the capsule); i = 6 can
    cfgp = tmp_path / "caps.ini"
    save_config(
        ExperimentConfig(
            name="caps", family="capsule_cross_circle", indices=(1, 6), h=0.2,
            sample_cap=60, curvature=False, collar=False, gh=False, wrap=False,
        ),
        str(cfgp),
    )
    out = tmp_path / "out"
    rc = main(["report", "--config", str(cfgp), "--out", str(out), "--no-plots"])
    assert rc == 2
    manifest = json.loads((out / "caps_manifest.json").read_text())
    st = {r["i"]: r for r in manifest["rows"]}
    assert st[1]["status"] == "failed" and "ValueError" in st[1]["error"]
    assert st[6]["status"] == "ok" and st[6]["error"] == ""
    rows = (out / "caps.csv").read_text().splitlines()
    col = list(COLUMN_NAMES).index("status")
    assert rows[1].split(",")[col] == "failed"
    assert rows[2].split(",")[col] == "ok"
