import json
import subprocess
import sys

import numpy as np
import pytest

from jndmark import data
from jndmark.attacks import jpeg_attack
from jndmark.cli import main, parse_size
from jndmark.errors import MissingSize
from jndmark.imaging import load_image, load_watermark, save_image
from jndmark.watermark import EmbedConfig, embed, extract


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    cover = d / "cover.pgm"
    save_image(data.photo("launchpad"), cover)
    return d, cover, data.path("lsu12x12.pbm")


@pytest.fixture(scope="module")
def embedded(files):
    d, cover, wm = files
    out = d / "wm.png"
    assert main(["embed", str(cover), str(wm), "--q", "2467", "--beta", "0.007", "-o", str(out)]) == 0
    return out


def manifest(path):
    return json.loads(path.with_name(path.name + ".manifest.json").read_text())


def test_parse_size():
    assert parse_size("12x15") == (12, 15)
    assert parse_size("64X64") == (64, 64)
    for bad in ("0x0", "12", "axb", "3x0"):
        with pytest.raises(MissingSize):
            parse_size(bad)


def test_embed_manifest(files, embedded, capsys):
    d, cover, wm = files
    m = manifest(embedded)
    assert m["command"] == "embed"
    assert 35 <= m["metrics"]["wpsnr_db"] <= 42
    assert m["config"]["beta"] == 0.007 and m["config"]["prime_q"] == 2467
    assert m["config"]["watermark_size"] == [12, 12]
    assert m["inputs"]["cover"] == str(cover)
    text = embedded.with_name(embedded.name + ".manifest.json").read_text()
    assert text == json.dumps(m, indent=2, sort_keys=True) + "\n"


def test_embed_matches_library(files, embedded):
    _, cover, wm = files
    lib = embed(load_image(cover), load_watermark(wm), EmbedConfig())
    assert np.array_equal(load_image(embedded), lib)


def test_rerun_from_manifest_is_bit_exact(files, embedded, tmp_path):
    m = manifest(embedded)
    c = m["config"]
    again = tmp_path / "again.png"
    argv = ["embed", m["inputs"]["cover"], m["inputs"]["watermark"], "--q", str(c["prime_q"]),
            "--beta", repr(c["beta"]), "--mode", c["luminance_mode"], "--detector", c["detector"]["kind"], "-o", str(again)]
    for key, value in c["detector"]["params"].items():
        argv += ["--detector-param", f"{key}={value}"]
    assert main(argv) == 0
    assert again.read_bytes() == embedded.read_bytes()


def test_beta_zero_identity(files, tmp_path, capsys):
    _, cover, wm = files
    out = tmp_path / "same.png"
    assert main(["embed", str(cover), str(wm), "--beta", "0", "-o", str(out)]) == 0
    assert np.array_equal(load_image(out), load_image(cover))
    assert json.loads(capsys.readouterr().out)["wpsnr_db"] == "inf"
    assert manifest(out)["metrics"]["psnr_db"] == "inf"


def test_embed_mask_dump(files, tmp_path):
    _, cover, wm = files
    out = tmp_path / "m.png"
    prefix = tmp_path / "mask"
    assert main(["embed", str(cover), str(wm), "-o", str(out), "--mask-dump", str(prefix), "--mask-rows", "32,50"]) == 0
    lines = (tmp_path / "mask.csv").read_text().splitlines()
    assert lines[0] == "block_col,row_32,row_50" and len(lines) == 65
    assert load_image(tmp_path / "mask.png").shape == (512, 512)


@pytest.mark.parametrize(
    "argv",
    [
        ["embed", "{cover}", "{wm}", "--q", "2468", "-o", "{tmp}/x.png"],
        ["embed", "{cover}", "{wm}", "--beta", "-1", "-o", "{tmp}/x.png"],
        ["embed", "{cover}", "{wm}", "--detector-param", "radius=3", "--detector", "gradient-hysteresis", "-o", "{tmp}/x.png"],
        ["extract", "{cover}", "--wm-size", "0x0", "-o", "{tmp}/x.pbm"],
        ["extract", "{cover}", "-o", "{tmp}/x.pbm"],
        ["attack", "{cover}", "jpeg:q=0", "-o", "{tmp}/x.png"],
        ["attack", "{cover}", "median:w=4", "-o", "{tmp}/x.png"],
        ["sweep", "{cover}", "{wm}", "--betas", "", "-o", "{tmp}/x.csv"],
        ["evaluate", "{cover}", "{small}"],
        ["embed", "{cover}"],
        ["frobnicate"],
    ],
)
def test_validation_exit_code_2(files, tmp_path, argv):
    _, cover, wm = files
    small = tmp_path / "small.pgm"
    save_image(np.zeros((8, 8), np.uint8), small)
    argv = [a.format(cover=cover, wm=wm, tmp=tmp_path, small=small) for a in argv]
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    assert code == 2


def test_io_exit_code_3(files, tmp_path):
    _, cover, wm = files
    assert main(["evaluate", str(tmp_path / "missing.png"), str(cover)]) == 3
    assert main(["embed", str(cover), str(wm), "-o", str(tmp_path / "no" / "dir.png")]) == 3


def test_internal_error_exit_code_4(files, tmp_path, monkeypatch):
    import jndmark.cli as cli

    def boom(*a, **k):
        raise RuntimeError("invariant broken")

    monkeypatch.setattr(cli, "embed_detailed", boom)
    _, cover, wm = files
    assert main(["embed", str(cover), str(wm), "-o", str(tmp_path / "x.png")]) == 4


def test_extract_clean_and_wrong_key(files, embedded, tmp_path, capsys):
    _, _, wm = files
    out = tmp_path / "rec.pbm"
    assert main(["extract", str(embedded), "--q", "2467", "--wm-size", "12x12", "--reference", str(wm), "-o", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["ber"] == 0.0
    assert np.array_equal(load_watermark(out), load_watermark(wm))
    report = json.loads(out.with_suffix(".json").read_text())
    assert report["ber"] == 0.0 and len(report["per_bit_score"]) == 144
    assert manifest(out)["config"]["wm_size"] == [12, 12]
    bad = tmp_path / "bad.pbm"
    assert main(["extract", str(embedded), "--q", "8069", "--wm-size", "12x12", "--reference", str(wm), "-o", str(bad)]) == 0
    assert 0.3 <= json.loads(capsys.readouterr().out)["ber"] <= 0.7


def test_extract_without_reference_has_null_ber(embedded, tmp_path, capsys):
    out = tmp_path / "r.pbm"
    assert main(["extract", str(embedded), "--wm-size", "12x12", "-o", str(out), "--report", str(tmp_path / "rep.json")]) == 0
    assert json.loads((tmp_path / "rep.json").read_text())["ber"] is None


def test_pipeline_equals_library(files, embedded, tmp_path, capsys):
    _, cover, wm = files
    attacked = tmp_path / "a.png"
    assert main(["attack", str(embedded), "jpeg:q=35", "-o", str(attacked)]) == 0
    m = manifest(attacked)
    assert m["config"]["attack"] == {"kind": "jpeg", "params": {"quality": 35}}
    rec = tmp_path / "r.pbm"
    assert main(["extract", str(attacked), "--wm-size", "12x12", "--reference", str(wm), "-o", str(rec)]) == 0
    cli_report = json.loads(rec.with_suffix(".json").read_text())

    lib_marked = embed(load_image(cover), load_watermark(wm))
    lib_attacked = jpeg_attack(lib_marked, 35).attacked
    assert np.array_equal(load_image(attacked), lib_attacked)
    lib = extract(lib_attacked, (12, 12), reference=load_watermark(wm))
    assert cli_report["ber"] == lib.ber
    assert np.allclose(cli_report["per_bit_score"], lib.per_bit_score.ravel())


def test_attack_seed_recorded(embedded, tmp_path):
    a, b = tmp_path / "n1.png", tmp_path / "n2.png"
    assert main(["attack", str(embedded), "gauss:var=2%:seed=5", "-o", str(a)]) == 0
    assert main(["attack", str(embedded), "gauss:var=2%", "--seed", "5", "-o", str(b)]) == 0
    assert manifest(a)["config"]["seed"] == 5
    assert a.read_bytes() == b.read_bytes()


def test_sweeps(files, tmp_path):
    _, cover, wm = files
    betas = tmp_path / "betas.csv"
    assert main(["sweep", str(cover), str(wm), "--betas", "0.003,0.007", "-o", str(betas)]) == 0
    lines = betas.read_text().splitlines()
    assert lines[0] == "beta,psnr_db,wpsnr_db,clean_ber"
    rows = [list(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 2 and rows[0][2] > rows[1][2]
    assert lines[1].split(",")[0] == "0.003000"
    assert all(r[3] == 0 for r in rows)
    one = tmp_path / "one.csv"
    assert main(["sweep", str(cover), str(wm), "--jpeg-qs", "45", "-o", str(one)]) == 0
    lines = one.read_text().splitlines()
    assert lines[0] == "quality,ber" and len(lines) == 2 and lines[1].startswith("45,")
    assert b"\r" not in one.read_bytes()
    assert manifest(one)["command"] == "sweep"


def test_evaluate(files, embedded, capsys, tmp_path):
    _, cover, _ = files
    assert main(["evaluate", str(cover), str(cover)]) == 0
    assert json.loads(capsys.readouterr().out)["psnr_db"] == "inf"
    assert main(["evaluate", str(cover), str(embedded), "--manifest", str(tmp_path / "e.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert 35 <= report["wpsnr_db"] <= 42
    assert json.loads((tmp_path / "e.json").read_text())["metrics"] == report


def test_console_script_runs(files):
    _, cover, _ = files
    proc = subprocess.run(
        [sys.executable, "-m", "jndmark.cli", "evaluate", str(cover), str(cover)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mse"] == 0
    proc = subprocess.run([sys.executable, "-m", "jndmark.cli", "--version"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
