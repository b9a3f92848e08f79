import subprocess
import sys

import pytest

from succinctxml.cli import main, read_queries
from succinctxml.xmark import generate_xmark


@pytest.fixture
def ex1_files(tmp_path):
    xml = tmp_path / "ex1.xml"
    xml.write_bytes(b"<a><b/><c>x</c></a>")
    idx = tmp_path / "ex1.idx"
    assert main(["build", str(xml), str(idx)]) == 0
    return xml, idx


def test_build_report(ex1_files, capsys, tmp_path):
    xml, _ = ex1_files
    capsys.readouterr()
    assert main(["build", str(xml), str(tmp_path / "again.idx")]) == 0
    out = capsys.readouterr().out
    assert "n=5 d=1 t=7 u=2" in out
    assert "section fm:" in out and "elapsed" in out
    assert (tmp_path / "again.idx").read_bytes() == (tmp_path / "ex1.idx").read_bytes()


def test_query_count(ex1_files, capsys):
    _, idx = ex1_files
    capsys.readouterr()
    assert main(["query", str(idx), "//c"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["query", str(idx), "//c", "--count", "--strategy", "topdown"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_query_serialize(ex1_files, tmp_path):
    _, idx = ex1_files
    out = tmp_path / "out.xml"
    assert main(["query", str(idx), "//c/text()", "--serialize", str(out)]) == 0
    assert out.read_bytes() == b"x"
    assert main(["query", str(idx), "//b | //c", "--serialize", str(out)]) == 2


def test_query_materialize(ex1_files, capsys):
    _, idx = ex1_files
    assert main(["query", str(idx), "//*", "--materialize"]) == 0
    assert "materialized 3" in capsys.readouterr().err


def test_exit_codes(ex1_files, tmp_path, capsys):
    xml, idx = ex1_files
    assert main(["query", str(idx), "//a/parent::b"]) == 2
    assert "parent axis" in capsys.readouterr().err
    assert main(["query", str(idx), "//a["]) == 2
    assert main(["query", str(idx), "//b", "--strategy", "bottomup"]) == 2
    assert main(["query", str(tmp_path / "none.idx"), "//a"]) == 3
    bad = tmp_path / "bad.xml"
    bad.write_bytes(b"<a><b></a>")
    assert main(["build", str(bad), str(tmp_path / "bad.idx")]) == 3
    assert main(["build", str(tmp_path / "none.xml"), str(tmp_path / "n.idx")]) == 3


def test_strategies_agree_on_text_query(tmp_path, capsys):
    xml = tmp_path / "x.xml"
    xml.write_bytes(generate_xmark(40_000, seed=7))
    idx = tmp_path / "x.idx"
    main(["build", str(xml), str(idx), "--sample-rate", "16", "--plain-text"])
    counts = []
    for strategy in ("topdown", "bottomup"):
        capsys.readouterr()
        assert main(["query", str(idx), '//item//keyword[contains(., "gold")]', "--strategy", strategy]) == 0
        counts.append(int(capsys.readouterr().out))
    assert counts[0] == counts[1] > 0


def test_bench(ex1_files, tmp_path, capsys):
    _, idx = ex1_files
    qfile = tmp_path / "q.txt"
    qfile.write_text("# comment\nQc\t//c\n\n//b\n", encoding="utf-8")
    capsys.readouterr()
    assert main(["bench", str(idx), str(qfile), "--repeats", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split("\t") == ["query", "mode", "best_ms", "count", "peak_rss_kb"]
    rows = [line.split("\t") for line in lines[1:]]
    assert [(r[0], r[1], r[3]) for r in rows] == [("Qc", "count", "1"), ("q4", "count", "1")]
    assert all(float(r[2]) >= 0 and int(r[4]) > 0 for r in rows)


def test_bench_empty_file(ex1_files, tmp_path, capsys):
    _, idx = ex1_files
    empty = tmp_path / "empty.txt"
    empty.write_text("", encoding="utf-8")
    capsys.readouterr()
    assert main(["bench", str(idx), str(empty)]) == 0
    assert capsys.readouterr().out.strip().splitlines() == ["query\tmode\tbest_ms\tcount\tpeak_rss_kb"]


def test_read_queries(tmp_path):
    f = tmp_path / "q.txt"
    f.write_text("a\t//x\n//y\n", encoding="utf-8")
    assert read_queries(f) == [("a", "//x"), ("q2", "//y")]


def test_module_entry_point(ex1_files):
    _, idx = ex1_files
    proc = subprocess.run([sys.executable, "-m", "succinctxml.cli", "query", str(idx), "//b"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1"
