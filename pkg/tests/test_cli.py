import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from importlib import resources

import jsonschema
import numpy as np
import pytest

from specseg import cli
from specseg.formats import load_pgm, save_pgm, save_tensor
from specseg.segmap import LabelMap

SPEC_TEXT = """conv 3 64 3 129 encoder
conv 64 64 3 129 decoder
pointwise 64 21 1 129 decoder
base_side 129
"""


def schema(name):
    return json.loads(resources.files("specseg").joinpath("schemas", name).read_text(encoding="utf-8"))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def label_pgm(tmp_path, rng):
    labels = np.zeros((16, 16), dtype=int)
    labels[3:11, 4:13] = 1
    labels[12:, :5] = 2
    path = tmp_path / "map.pgm"
    save_pgm(LabelMap(labels, 3), path)
    return path


def test_spectrum_synthetic(tmp_path):
    out = tmp_path / "s"
    assert run("spectrum", "--size", 32, "--seed", 3, "--plot", "--out", out) == 0
    rows = read_csv(out / "spectrum.csv")
    summary = json.loads((out / "spectrum.json").read_text())
    jsonschema.validate(summary, schema("spectrum.schema.json"))
    data = rows[:-1]
    assert len(data) == summary["nyquist"] + 1 == 17
    assert float(data[-1]["R"]) <= 1e-9
    assert rows[-1]["nu"] == "total"
    assert float(rows[-1]["L_ce"]) == pytest.approx(summary["ce_spatial"], rel=1e-8)
    assert max(float(r["abs_b"]) for r in data) == pytest.approx(1.0)
    ET.parse(out / "spectrum.svg")


def test_spectrum_with_logits(tmp_path, label_pgm, rng):
    logits = tmp_path / "y.spsg"
    save_tensor(rng.standard_normal((3, 16, 16)), logits)
    out = tmp_path / "s"
    assert run("spectrum", "--input", label_pgm, "--logits", logits, "--out", out, "--binning", "euclidean") == 0
    summary = json.loads((out / "spectrum.json").read_text())
    assert summary["binning"] == "euclidean" and summary["source"] == "map"
    assert summary["ce_spectral_total"] == pytest.approx(summary["ce_spatial"], rel=1e-8)


def test_spectrum_batch(tmp_path, label_pgm):
    other = tmp_path / "other.pgm"
    other.write_bytes(label_pgm.read_bytes())
    out = tmp_path / "s"
    assert run("spectrum", "--input", label_pgm, other, "--classes", 3, "--jobs", 2, "--out", out) == 0
    assert (out / "map_spectrum.csv").read_bytes() == (out / "other_spectrum.csv").read_bytes()


def test_spectrum_logit_size_mismatch(tmp_path, label_pgm, rng):
    logits = tmp_path / "y.spsg"
    save_tensor(rng.standard_normal((3, 8, 8)), logits)
    assert run("spectrum", "--input", label_pgm, "--logits", logits, "--out", tmp_path / "s") == 3


def test_block_annot(tmp_path, label_pgm):
    out = tmp_path / "b"
    assert run("block-annot", "--input", label_pgm, "--nu", "1,2,4,8", "--plot", "--out", out) == 0
    rows = read_csv(out / "block_annot.csv")
    assert [int(r["nu"]) for r in rows] == [1, 2, 4, 8]
    assert float(rows[-1]["iou"]) == 1.0
    assert float(rows[-1]["R"]) <= 1e-9
    assert load_pgm(out / "block_nu8.pgm", 3) == load_pgm(label_pgm, 3)
    ET.parse(out / "block_annot.svg")


def test_block_annot_rejects_zero(tmp_path, label_pgm):
    assert run("block-annot", "--input", label_pgm, "--nu", "0", "--out", tmp_path / "b") == 2


def test_biou(tmp_path):
    out = tmp_path / "biou"
    assert run("biou", "--t0", -3, "--t1", 3, "--d", 1.5, "--out", out) == 0
    rows = read_csv(out / "biou.csv")
    for r in rows:
        assert 0.99999 <= float(r["closed"]) / float(r["numeric"]) <= 1.00001
    approx = [float(r["approx"]) for r in rows]
    assert all(a <= b for a, b in zip(approx, approx[1:]))
    root = ET.parse(out / "biou.svg").getroot()
    assert root.tag.endswith("svg")


def test_biou_identical_segments_saturate(tmp_path):
    out = tmp_path / "biou"
    assert run("biou", "--t0", -1, "--t1", 1, "--sigma", 0.5, "--nu", "2,8,80", "--out", out) == 0
    rows = read_csv(out / "biou.csv")
    assert float(rows[-1]["boundary_iou"]) == pytest.approx(float(rows[1]["boundary_iou"]), rel=1e-3)


def test_biou_envelope_exit_code(tmp_path):
    code = run("biou", "--t0", 0, "--t1", 1, "--tb0", 30, "--tb1", 31, "--sigma", 0.3, "--nu", 20,
               "--out", tmp_path / "e")
    assert code == 4


def test_biou_bad_segment(tmp_path):
    assert run("biou", "--t0", 2, "--t1", 1, "--out", tmp_path / "x") == 3


def test_gradcheck(tmp_path):
    out = tmp_path / "g"
    assert run("gradcheck", "--n", 16, "--kernel-scale", 0.01, "--plot", "--out", out) == 0
    summary = json.loads((out / "gradcheck.json").read_text())
    jsonschema.validate(summary, schema("gradcheck.schema.json"))
    assert summary["rows"] == [0, 4, 8]
    assert summary["off_diagonal_ratio"]["conv"] < 1e-8
    assert summary["off_diagonal_ratio"]["delta"] == 0
    rows = read_csv(out / "jacobian_conv.csv")
    assert len(rows) == 3 * 16
    for name in ("conv", "relu", "upsample", "layer"):
        ET.parse(out / f"jacobian_{name}.svg")


def test_gradcheck_ratio_shrinks_with_scale(tmp_path):
    ratios = []
    for scale in (0.1, 0.01):
        out = tmp_path / str(scale)
        assert run("gradcheck", "--kernel-scale", scale, "--out", out) == 0
        ratios.append(json.loads((out / "gradcheck.json").read_text())["off_diagonal_ratio"]["layer"])
    assert ratios[1] < ratios[0]


def test_flops(tmp_path):
    spec = tmp_path / "net.txt"
    spec.write_text(SPEC_TEXT)
    out = tmp_path / "f"
    assert run("flops", "--spec", spec, "--sizes", "129,65,33", "--miou", "129:0.651,33:0.633", "--out", out) == 0
    rows = read_csv(out / "flops.csv")
    assert float(rows[0]["relative_drop"]) == 0
    assert float(rows[2]["fpi"]) < float(rows[0]["fpi"])
    assert rows[1]["fpi"] == ""
    enc = 2 * 9 * 3 * 64 * 129 ** 2
    dec = (2 * 9 * 64 * 64 + 2 * 64 * 21) * 33 ** 2
    assert float(rows[2]["flops"]) == pytest.approx(enc + dec)


def test_flops_errors(tmp_path):
    assert run("flops", "--out", tmp_path / "f") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("conv 1 2\n")
    assert run("flops", "--spec", bad, "--out", tmp_path / "f") == 3
    assert run("flops", "--spec", tmp_path / "missing.txt", "--out", tmp_path / "f") == 3


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 8\nkernel_scale = 0.1\nseed = 5\n")
    out = tmp_path / "g"
    assert run("gradcheck", "--config", cfg, "--n", 12, "--out", out) == 0
    summary = json.loads((out / "gradcheck.json").read_text())
    assert (summary["n"], summary["kernel_scale"], summary["seed"]) == (12, 0.1, 5)


def test_config_errors(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    assert run("gradcheck", "--config", cfg, "--out", tmp_path / "g") == 2
    cfg.write_text("no equals sign\n")
    assert run("gradcheck", "--config", cfg, "--out", tmp_path / "g") == 2
    assert run("gradcheck", "--n", "abc", "--out", tmp_path / "g") == 2


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "--binning", "polar"])
    assert exc.value.code == 2


def test_missing_input_is_input_error(tmp_path):
    assert run("spectrum", "--input", tmp_path / "nope.pgm", "--out", tmp_path / "s") == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "specseg.cli", "gradcheck", "--n", "8", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "gradcheck.json").exists()
