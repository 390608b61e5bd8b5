import json
import shutil
from pathlib import Path

import pytest

from suploc.cli import main

CORPUS = Path(__file__).resolve().parents[1] / "corpus" / "small-factory"


@pytest.fixture()
def corpus(tmp_path):
    dst = tmp_path / "small-factory"
    shutil.copytree(CORPUS, dst)
    return dst


def run_cli(*args):
    return main([str(a) for a in args])


def test_info(corpus, capsys):
    assert run_cli("info", corpus / "minspec.aut") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["type"] == "buchi"
    assert out["states"] == 6
    assert out["buchi"] == 1


def test_info_star_has_no_acceptance(corpus, capsys):
    assert run_cli("info", corpus / "m1.aut") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["type"] == "star"
    assert "buchi" not in out


def test_info_rabin(tmp_path, capsys, sf):
    from suploc.textio import save_automaton
    path = tmp_path / "prod.aut"
    save_automaton(path, "prod", sf["prod"])
    assert run_cli("info", path) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["type"] == "rabin-buchi"
    assert out["rabin_pairs"] == [[4, 27]]


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.aut"
    bad.write_text("automaton x\ntype star\nevents a:u\ninitial 0\nwhat 1\n")
    assert run_cli("info", bad) == 2
    assert "line 5" in capsys.readouterr().err


def test_pipeline_factory(corpus, capsys):
    cfg = corpus / "pipeline.cfg"
    assert run_cli("pipeline", cfg) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["finite_ok"] and out["infinite_ok"]
    assert out["sup_star"] == {"states": 8, "transitions": 14, "buchi": 5}
    assert out["legal_product"]["states"] == 27
    assert out["legal_product"]["controllability_subset"] == 27
    assert len(out["controllers"]) == 6
    report = json.loads((corpus / "out" / "report.json").read_text())
    assert report["finite_ok"]
    for artifact in ("plant.aut", "sup_star.aut", "sup_omega.aut",
                     "legal_product.aut", "controllers/manifest.json"):
        assert (corpus / "out" / artifact).exists()


def test_pipeline_deterministic(corpus):
    cfg_text = (corpus / "pipeline.cfg").read_text()
    for name in ("run1", "run2"):
        cfg = json.loads(cfg_text)
        cfg["output_dir"] = name
        p = corpus / f"{name}.cfg"
        p.write_text(json.dumps(cfg))
        assert run_cli("--quiet", "pipeline", p, "--seed", 9) == 0
    files1 = sorted((corpus / "run1").rglob("*"))
    files2 = sorted((corpus / "run2").rglob("*"))
    assert [f.name for f in files1] == [f.name for f in files2]
    for f1, f2 in zip(files1, files2):
        if f1.is_file():
            assert f1.read_bytes() == f2.read_bytes(), f1.name


def test_pipeline_existence_failure(corpus, capsys):
    # demand an infinite behavior the legal condition cannot contain:
    # swap the minimal spec for a run that starves machine 2
    bad = corpus / "badmin.aut"
    bad.write_text(
        "automaton badmin\ntype buchi\n"
        "events a1:c b1:u g1:u a2:c b2:u g2:u\n"
        "initial 0\n"
        "trans 0 a1 1\ntrans 1 b1 2\ntrans 2 g1 0\n"
        "buchi 0\n")
    cfg = json.loads((corpus / "pipeline.cfg").read_text())
    cfg["minimal_spec"] = "badmin.aut"
    p = corpus / "bad.cfg"
    p.write_text(json.dumps(cfg))
    assert run_cli("pipeline", p) == 3
    assert "witness" in capsys.readouterr().err


def test_synth_safety_and_omega_roundtrip(corpus, tmp_path, capsys):
    plant_path = tmp_path / "plant.aut"
    cfg = corpus / "pipeline.cfg"
    assert run_cli("--quiet", "pipeline", cfg) == 0
    out_dir = corpus / "out"

    assert run_cli("synth-safety", "--plant", out_dir / "plant.aut",
                   "--spec", corpus / "bufspec1.aut", corpus / "bufspec2.aut",
                   corpus / "muxspec.aut",
                   "--out", tmp_path / "sup.aut") == 0
    out = json.loads(capsys.readouterr().out)
    assert (out["states"], out["transitions"], out["buchi"]) == (8, 14, 5)

    assert run_cli("synth-omega", "--plant", tmp_path / "sup.aut",
                   "--legal", corpus / "maxspec.aut",
                   "--minimal", corpus / "minspec.aut",
                   "--out", tmp_path / "supw.aut",
                   "--psi-table", tmp_path / "psi.csv") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["product_states"] == 27
    assert out["controllability_subset"] == 27
    table = (tmp_path / "psi.csv").read_text().splitlines()
    assert table[0] == "product_state,z_state,enabled_events"
    assert len(table) == 1 + out["states"]

    loc_dir = tmp_path / "locs"
    assert run_cli("localize", "--plant", out_dir / "plant.aut",
                   "--sup-star", tmp_path / "sup.aut",
                   "--sup-omega", tmp_path / "supw.aut",
                   "--minimal", corpus / "minspec.aut",
                   "--out-dir", loc_dir) == 0
    manifest = json.loads((loc_dir / "manifest.json").read_text())
    assert len(manifest) == 6

    assert run_cli("verify", "--plant", out_dir / "plant.aut",
                   "--sup-star", tmp_path / "sup.aut",
                   "--sup-omega", tmp_path / "supw.aut",
                   "--minimal", corpus / "minspec.aut",
                   "--controllers", loc_dir,
                   "--lassos", "200", "--report", tmp_path / "rep.json") == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["finite_ok"] and rep["infinite_ok"]


def test_product_command(corpus, tmp_path, capsys):
    assert run_cli("product", corpus / "minspec.aut", corpus / "maxspec.aut",
                   "--out", tmp_path / "p.aut") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["states"] >= 6
