import json

import pytest

from jntcodes import analysis as an
from jntcodes.catalog import default_catalog_path, load_catalog, serialize_catalog
from jntcodes.cli import EXIT_FAIL, EXIT_INCOMPLETE, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def tsv_rows(out):
    lines = out.strip().splitlines()
    assert lines[0] == an.HEADER
    return [dict(zip(an.HEADER.split("\t"), l.split("\t"))) for l in lines[1:]]


def test_validate_shipped(capsys):
    code, out, _ = run(capsys, "validate", "--group", "M11,M22/22")
    assert code == EXIT_OK
    assert out.count("ok\t") == 3


def test_validate_corrupted(tmp_path, capsys):
    doc = json.loads(default_catalog_path().read_text())
    doc["entries"][0]["order"] = "661"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", "--catalog", str(p), "--group", "L2(11)")
    assert code == EXIT_FAIL and "FAIL" in out


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "validate", "--catalog", str(tmp_path / "nope.json"))
    assert code == EXIT_USAGE and "cannot read" in err


def test_bad_flags(capsys):
    assert run(capsys, "classify", "--mode", "fast")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--group", "J4")[0] == EXIT_USAGE
    assert run(capsys, "classify", "--group", "HS", "--mode", "exhaustive")[0] == EXIT_USAGE


def test_classify_m22(capsys):
    code, out, _ = run(capsys, "classify", "--group", "M22", "--mode", "exhaustive", "--workers", "1")
    rows = tsv_rows(out)
    assert code == EXIT_OK
    assert [r["k"] for r in rows] == ["6", "7", "8", "10"]
    assert [r["status"] for r in rows] == ["line 4", "line 5", "line 6", "line 7"]


def test_classify_pgaml28(capsys):
    code, out, _ = run(capsys, "classify", "--group", "PGammaL28")
    assert code == EXIT_OK and tsv_rows(out) == []


def test_classify_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    for p in (a, b):
        assert run(capsys, "classify", "--group", "M11", "--out", str(p), "--workers", "1")[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_classify_detail(tmp_path, capsys):
    p = tmp_path / "d.json"
    run(capsys, "classify", "--group", "L2(11)", "--detail", str(p))
    (d,) = json.loads(p.read_text())
    assert (d["k"], d["size"], d["delta"], d["stabilizer_order"]) == (5, 11, 3, 60)
    assert d["neighbour_transitive"] is True


def test_k_range(capsys):
    code, out, _ = run(capsys, "classify", "--group", "M11/12", "--k", "5:5")
    assert code == EXIT_OK and tsv_rows(out) == []


def test_verify_table_subset(capsys):
    code, out, err = run(capsys, "verify-table", "--group", "L2(11),A7,M11,M12", "--workers", "1")
    assert code == EXIT_OK
    assert all(r["status"].startswith("line ") for r in tsv_rows(out))
    assert "[1, 2, 3]" in err and "[23, 24, 25, 26]" in err


def test_verify_table_perturbed(capsys):
    code, out, err = run(capsys, "verify-table", "--group", "L2(11)", "--perturb", "1")
    assert code == EXIT_FAIL
    assert [r["status"] for r in tsv_rows(out)] == ["mismatch line 1"]


def test_verify_table_incomplete(tmp_path, capsys):
    cat = load_catalog()
    co3 = next(e for e in cat if e.name == "Co3")
    co3.maximal_subgroups = []
    p = tmp_path / "cut.json"
    p.write_text(serialize_catalog([co3]))
    code, _, err = run(capsys, "verify-table", "--catalog", str(p))
    assert code == EXIT_INCOMPLETE and "incomplete" in err


def test_export_line3(tmp_path, capsys):
    code, out, _ = run(capsys, "export", "--line", "3", "--out", str(tmp_path))
    assert code == EXIT_OK
    (path,) = tmp_path.iterdir()
    header, words = an.read_hamming(path.read_text())
    assert len(words) == 22 and {len(w) for w in words} == {12}
    assert an.hamming_min_distance(words) == 6


def test_export_line15(tmp_path, capsys):
    assert run(capsys, "export", "--line", "15", "--out", str(tmp_path))[0] == EXIT_OK
    (path,) = tmp_path.iterdir()
    assert len(an.read_hamming(path.read_text())[1]) == 759


def test_export_empty(tmp_path, capsys):
    code, _, err = run(capsys, "export", "--group", "PGammaL28", "--out", str(tmp_path / "x"))
    assert code == EXIT_OK and "nothing written" in err
    assert not (tmp_path / "x").exists()
