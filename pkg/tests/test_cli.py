import io
import json

import pytest

from catpaths import cli


def run(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), buf)
    return code, buf.getvalue()


def test_series_text():
    assert run("series", "--N", "7") == (0, "1,0,1,1,3,5,12,23\n")
    assert run("series", "--N", "6", "--slice", "meanders")[1].strip() == "1,1,2,4,8,17,35"


def test_series_json_schema():
    code, text = run("series", "--N", "5", "--json")
    doc = json.loads(text)
    assert code == 0
    assert doc["schema"] == "catpaths/1" and doc["float_digits"] == 17
    assert doc["series"]["coeffs"][4] == "3/1"


def test_negative_jump_argument():
    code, text = run("series", "--jumps", "-1:1,0:1,1:1,q=1", "--N", "4")
    assert code == 0 and text.startswith("1,1,")


def test_constants_json():
    code, text = run("constants", "--json")
    doc = json.loads(text)
    assert code == 0
    assert doc["kernel"]["regime"] == "SubcriticalPole"
    assert doc["kernel"]["rho0"] == pytest.approx(0.4655712319, abs=1e-9)
    assert doc["C_e"] == pytest.approx(0.1038149281, abs=1e-9)


def test_law_csv():
    code, text = run("law", "--param", "final_altitude", "--K", "3", "--csv")
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "k,probability" and len(lines) == 5


def test_asymptotics():
    code, text = run("asymptotics", "--family", "e", "--n", "100", "--exact", "--json")
    assert code == 0
    assert "schema" in json.loads(text)


def test_sample_writes_sidecar(tmp_path):
    out = tmp_path / "paths.txt"
    code, _ = run("sample", "--n", "10", "--count", "4", "--seed", "3", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 4
    side = json.loads((tmp_path / "paths.txt.json").read_text())
    assert side["seed"] == 3 and side["rng"] == "PCG64"


def test_sample_reproducible():
    a = run("sample", "--n", "20", "--count", "5", "--seed", "7")
    b = run("sample", "--n", "20", "--count", "5", "--seed", "7")
    assert a == b and a[0] == 0


def test_empirical_law_csv():
    code, text = run("empirical-law", "--param", "returns", "--n", "30", "--trials", "200",
                     "--seed", "1", "--csv")
    rows = text.strip().splitlines()
    assert code == 0 and rows[0] == "k,count,frequency"
    assert sum(int(r.split(",")[1]) for r in rows[1:]) == 200


def test_biject_roundtrip():
    code, text = run("biject", "--path", "1 1 1 C3 1 -1")
    assert (code, text.strip()) == (0, "1 0h 0h -1 1 -1")
    code, text = run("biject", "--direction", "from-horizontal", "--path", "1 0h 0h -1 1 -1")
    assert (code, text.strip()) == (0, "1 1 1 C3 1 -1")


def test_oracle_check_passes():
    code, text = run("oracle-check", "--N", "6")
    assert code == 0 and text.startswith("PASS")


def test_reproduce_subset(tmp_path):
    code, text = run("reproduce-paper", "--only", "1,2", "--figures", str(tmp_path))
    assert code == 0
    assert text.count("[PASS]") == 2
    assert (tmp_path / "final_altitude_pmf.csv").exists()


@pytest.mark.parametrize("argv", [
    ("series",),
    ("series", "--N", "3", "--jumps", "bogus"),
    ("sample", "--n", "1"),
    ("biject", "--path", "1 1"),
    ("law", "--param", "nope"),
])
def test_usage_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
