from __future__ import annotations

import shutil
import subprocess

import pytest

from rslab.cli import main
from rslab.repair import read_scheme_file


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_code_describe_cauchy(capsys):
    code, out, _ = run(capsys, "code", "describe", "cauchy", "--n", "9", "--k", "6")
    assert code == 0
    for row in ("122 186 173", "186 122 157", " 71 167 221", "167  71 152", "142 244  61", "244 142 170"):
        assert row in out
    assert "lambda = (z^177, z^177, z^5, z^5, z^234, z^234, z^208, z^208, z^119)" in out
    assert "dual gamma = (z^47, z^82, z^171, z^239, z^221, z^144, z^75, z^199, z^0)" in out


def test_code_backblaze_equivalence(capsys):
    _, out, _ = run(capsys, "code", "describe", "backblaze", "--n", "9", "--k", "6", "--check-equiv")
    assert "equivalent to RS([0,8],6): true" in out


def test_code_vand_mds(capsys):
    _, out, _ = run(capsys, "code", "describe", "vand-systematic", "--n", "9", "--k", "6", "--mds")
    assert "MDS: true" in out
    _, out, _ = run(capsys, "code", "describe", "vand-systematic", "--n", "11", "--k", "5", "--mds")
    assert "MDS: false" in out and "singular minor rows=" in out


def test_code_dump_and_genpoly(capsys):
    code, out, _ = run(capsys, "code", "dump", "genpoly", "--n", "14", "--k", "10", "--seed", "3")
    assert code == 0 and out.startswith("code genpoly field=gf256 n=14 k=10")
    _, out, _ = run(capsys, "code", "describe", "genpoly", "--n", "8", "--k", "5", "--check-equiv")
    assert "equivalent to the null space of Vand(1..z^7): true" in out


def test_invalid_params_exit_nonzero(capsys):
    code, _, err = run(capsys, "code", "describe", "cauchy", "--n", "4", "--k", "4")
    assert code == 2 and "error" in err


def test_search_compile_verify_bench(tmp_path, capsys):
    code, out, err = run(capsys, "search", "exhaustive", "--family", "f16", "--n", "5", "--k", "3",
                         "--out", str(tmp_path))
    assert code == 0
    assert "gf16 profile: (9, 9, 8, 9, 9)" in out
    assert "n,default,bits,reduction\n5,24,18,-25%" in out
    assert "# config " in err
    schemes = tmp_path / "f16-exhaustive-n5-k3.schemes"
    rs, ss = read_scheme_file(schemes)
    assert [s.bandwidth for s in ss] == [18, 18, 16, 18, 18]

    tables = tmp_path / "t.bin"
    assert run(capsys, "compile", str(schemes), "-o", str(tables))[0] == 0
    code, out, _ = run(capsys, "verify", str(schemes), "--tables", str(tables), "--trials", "20")
    assert code == 0 and "byte-identical" in out

    csv = tmp_path / "bench.csv"
    code, out, err = run(capsys, "bench", str(schemes), "--tables", str(tables), "--codewords", "4000",
                         "--erasure", "2", "--out", str(csv))
    assert code == 0 and "time ratio" in err
    rows = {tuple(ln.split(",")[:2]): ln.split(",") for ln in csv.read_text().splitlines()[1:]}
    assert rows[("trace", "total")][3] == str(4000 * 16 // 8)
    assert rows[("naive", "total")][3] == str(4000 * 3)
    assert csv.read_text() == out


def test_verify_detects_tampered_tables(tmp_path, capsys):
    run(capsys, "search", "exhaustive", "--family", "f16", "--n", "4", "--k", "2", "--out", str(tmp_path))
    schemes = tmp_path / "f16-exhaustive-n4-k2.schemes"
    tables = tmp_path / "t.bin"
    run(capsys, "compile", str(schemes), "-o", str(tables))
    data = bytearray(tables.read_bytes())
    data[-1] ^= 1
    tables.write_bytes(bytes(data))
    code, out, _ = run(capsys, "verify", str(schemes), "--tables", str(tables))
    assert code == 2 and "differ" in out
    text = schemes.read_text().replace("bandwidth=12", "bandwidth=10", 1)
    schemes.write_text(text)
    assert run(capsys, "verify", str(schemes))[0] == 2


def test_search_resume_reproduces(tmp_path, capsys, monkeypatch):
    fresh, ck = tmp_path / "fresh", tmp_path / "ck"
    run(capsys, "search", "exhaustive", "--family", "f16", "--n", "6", "--k", "4", "--out", str(fresh))
    monkeypatch.setenv("RSLAB_CHECKPOINT_DIR", str(ck))
    code, out, _ = run(capsys, "search", "exhaustive", "--family", "f16", "--n", "6", "--k", "4",
                       "--target-bandwidth", "60", "--out", str(tmp_path / "part"))
    assert code == 0
    assert (ck / "f16-exhaustive-n6-k4.ckpt").exists()
    code, out, _ = run(capsys, "search", "exhaustive", "--family", "f16", "--n", "6", "--k", "4", "--resume",
                       "--out", str(tmp_path / "done"))
    name = "f16-exhaustive-n6-k4.schemes"
    assert (tmp_path / "done" / name).read_text() == (fresh / name).read_text()


def test_search_target_unmet_warns(tmp_path, capsys):
    code, out, _ = run(capsys, "search", "exhaustive", "--family", "f16", "--n", "5", "--k", "3",
                       "--target-bandwidth", "8", "--out", str(tmp_path))
    assert code == 0 and "note: target bandwidth" in out and "not met" in out


def test_search_deg4_uncovered_exit(tmp_path, capsys):
    code, out, err = run(capsys, "search", "deg4", "--family", "isal", "--n", "9", "--k", "6",
                         "--theta2", "4", "--theta4", "2", "--out", str(tmp_path))
    assert code == 3 and "uncovered positions" in err


def test_env_workers_echoed(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RSLAB_WORKERS", "2")
    code, _, err = run(capsys, "search", "exhaustive", "--family", "f16", "--n", "4", "--k", "2",
                       "--out", str(tmp_path))
    assert code == 0 and "workers=2" in err


def test_tables_rows(tmp_path, capsys):
    out_file = tmp_path / "t.csv"
    code, out, _ = run(capsys, "tables", "--r", "2", "--n-max", "5", "--budget", "30", "--out", str(out_file))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "r,n,default,bits,reduction,source"
    assert "2,4,16,12,-25%,computed" in lines and "2,5,24,18,-25%,computed" in lines
    _, out2, _ = run(capsys, "tables", "--r", "2", "--n-max", "5", "--budget", "30")
    assert out2 == out == out_file.read_text()
    _, out, _ = run(capsys, "tables", "--r", "3", "--budget", "0")
    assert "3,9,48,32,-33.3%,reference" in out.splitlines()


def test_profiles_census(tmp_path, capsys):
    csv = tmp_path / "p5.csv"
    code, out, _ = run(capsys, "profiles", "--n", "5", "--out", str(csv), "--check", "0,1,2,3,4")
    assert code == 0
    assert "sets enumerated: 6142500" in out
    assert "(9,9,9,9,8): 2880" in out and "(9,9,9,9,9): 1440" in out and "(10,10,10,10,10): 48" in out
    assert csv.read_text().splitlines()[0] == "n,A,profile"
    assert "census=" in out and "direct=" in out


@pytest.mark.skipif(shutil.which("rslab") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["rslab", "code", "describe", "vand-systematic", "--n", "9", "--k", "6", "--mds"],
                         capture_output=True, text=True, check=True)
    assert "MDS: true" in res.stdout
