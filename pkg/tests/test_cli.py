from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from schemelab.cli import main
from schemelab.ppm import IoError, ppm_bytes, read_ppm, write_ppm
from schemelab.scheme import BITRANSITIVE, CAPTURE, parse, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    (tmp_path / "bitransitive.txt").write_text(serialize(BITRANSITIVE))
    (tmp_path / "capture.txt").write_text(serialize(CAPTURE))
    (tmp_path / "basilica.map").write_text("0 : -1\n")
    (tmp_path / "broken.txt").write_text("0 0 0\n")
    return tmp_path


def test_one_white_pixel_is_fifteen_bytes(tmp_path):
    img = np.full((1, 1, 3), 255, dtype=np.uint8)
    assert ppm_bytes(img) == b"P6\n1 1\n255\n\xff\xff\xff"
    write_ppm(img, tmp_path / "w.ppm")
    assert (tmp_path / "w.ppm").read_bytes() == b"P6\n1 1\n255\n\xff\xff\xff"
    assert np.array_equal(read_ppm(tmp_path / "w.ppm"), img)


def test_unwritable_path(tmp_path):
    with pytest.raises(IoError):
        write_ppm(np.zeros((1, 1, 3)), tmp_path / "missing" / "x.ppm")


def test_census_table(capsys):
    code, out, _ = run(capsys, "census", "--max-weight", "6", "--table")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0].startswith("#")
    assert rows[-1].split() == ["6", "224", "108", "238", "494"]


def test_census_list(capsys):
    code, out, _ = run(capsys, "census", "--max-weight", "2", "--list")
    blocks = [b for b in out.strip().split("\n\n") if b]
    assert code == 0 and len(blocks) == 4
    assert {parse(b).total_weight for b in blocks} == {2}


def test_scheme_actions(capsys, files):
    code, out, _ = run(capsys, "scheme", "validate", str(files / "capture.txt"))
    assert code == 0
    code, out, _ = run(capsys, "scheme", "iso", str(files / "capture.txt"), str(files / "bitransitive.txt"))
    assert code == 0 and out.strip() == "not isomorphic"
    code, out, _ = run(capsys, "scheme", "dot", str(files / "capture.txt"))
    assert code == 0 and out.lstrip().startswith("digraph")
    code, _, err = run(capsys, "scheme", "validate", str(files / "broken.txt"))
    assert code == 1 and err


def test_symmetry(capsys, files):
    code, out, _ = run(capsys, "symmetry", str(files / "bitransitive.txt"))
    assert code == 0
    assert "|Gamma| 3" in out and "|Aut| 2" in out


def test_hubbard_and_model(capsys, files):
    code, out, _ = run(capsys, "hubbard", "build", "--dot", str(files / "capture.txt"))
    assert code == 0 and " -- " in out
    code, out, _ = run(capsys, "model", "center", str(files / "capture.txt"))
    assert code == 0 and out


def test_moduli(capsys):
    code, out, _ = run(capsys, "moduli", "x2l", "0.3", "-0.3", "0")
    assert code == 0 and out.split() == ["1+0i", "1+0i", "0.91+0i"]
    code, _, _ = run(capsys, "moduli", "x2l", "1", "1", "1")
    assert code == 1


def test_extract_scheme(capsys, files):
    code, out, _ = run(capsys, "extract-scheme", "--map", str(files / "basilica.map"), "--res", "256")
    assert code == 0
    full, reduced = out.split("# reduced")
    assert parse(full.replace("# full", "")).n == 2
    assert parse(reduced).n == 1
    code, _, _ = run(capsys, "extract-scheme", "--map", str(files / "basilica.map"), "--res", "16")
    assert code == 2


def test_render_and_julia(capsys, tmp_path, files):
    out = tmp_path / "t.ppm"
    code, _, _ = run(capsys, "render", "tricorn", "--res", "40x30", "--max-iter", "100", "-o", str(out))
    assert code == 0 and read_ppm(out).shape == (30, 40, 3)
    code, _, _ = run(capsys, "julia", "--map", str(files / "basilica.map"), "--res", "20x20", "-o", str(out))
    assert code == 0 and read_ppm(out).shape == (20, 20, 3)


def test_usage_errors(capsys, tmp_path):
    out = str(tmp_path / "x.ppm")
    assert run(capsys, "render", "tricorn", "--window", "1,0,0,1", "-o", out)[0] == 1
    assert run(capsys, "render", "tricorn", "--res", "axb", "-o", out)[0] == 1
    assert run(capsys, "scheme", "validate", str(tmp_path / "nope.txt"))[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["render", "nosuchfamily", "-o", out])
    assert exc.value.code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "schemelab", "census", "--max-weight", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip().splitlines()[-1].split()[-1] == "12"
