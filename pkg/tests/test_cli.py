"""Command-line interface: exit codes and output schema."""

import json

import pytest

from convsum.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_decisive_exit_zero(capsys):
    code, out, _ = run(capsys, "analyze", "1/n^2")
    assert code == 0
    assert "Converges" in out


def test_analyze_reports_auxiliary_values(capsys):
    code, out, _ = run(capsys, "analyze", "1/(n*ln(n))")
    assert code == 0
    assert "Diverges" in out and "w=1" in out and "p=1" in out


def test_analyze_inconclusive_exit_two(capsys):
    code, out, _ = run(capsys, "analyze", "sin(n)/n")
    assert code == 2


def test_analyze_parse_error_exit_one(capsys):
    code, _, err = run(capsys, "analyze", "1/(((")
    assert code == 1
    assert "error" in err


def test_analyze_json_schema(capsys):
    code, out, _ = run(capsys, "--json", "analyze", "1/n^2")
    payload = json.loads(out)
    assert set(payload) == {"input", "normalized", "verdict", "deciding_test",
                            "auxiliary", "trace", "numeric"}
    assert set(payload["auxiliary"]) == {"ratio", "raabe", "w", "p", "radius"}
    assert set(payload["numeric"]) == {"windows", "rates"}
    assert payload["verdict"] == "Converges"
    for step in payload["trace"]:
        assert set(step) == {"rule", "paper_ref", "before", "after"}


def test_forced_single_test(capsys):
    code, out, _ = run(capsys, "--test", "ratio", "analyze", "n^2/2^n")
    assert code == 0 and "ratio" in out
    # ratio test alone cannot settle a p-series
    code, _, _ = run(capsys, "--test", "ratio", "analyze", "1/n^2")
    assert code == 2


def test_radius_command(capsys):
    code, out, _ = run(capsys, "radius", "n/2^(n+1)")
    assert code == 0
    assert "r = 2" in out and "(-2, 2)" in out


def test_radius_with_center(capsys):
    code, out, _ = run(capsys, "radius", "1/((n+2)*3^n)", "--center", "5")
    assert code == 0 and "(2, 8)" in out


def test_oracle_window_command(capsys):
    code, out, _ = run(capsys, "oracle", "1/k", "--window", "20")
    assert code == 0
    assert "0.6931" in out


def test_oracle_sum_command(capsys):
    code, out, _ = run(capsys, "oracle", "1/2^k", "--sum", "20")
    assert code == 0
    assert "0.99999904" in out


def test_corpus_shipped_is_clean(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0
    assert "0 fail" in out


def test_corpus_flags_wrong_expectation(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("B1 | 1/n^2 | 1 | D | direct | deliberately wrong\n")
    code, out, _ = run(capsys, "corpus", str(path))
    assert code == 1
    assert "FAIL" in out and "Converges" in out


def test_corpus_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing here\n")
    code, out, _ = run(capsys, "corpus", str(path))
    assert code == 0
    assert "0 entries" in out


def test_corpus_malformed_exit_one(tmp_path, capsys):
    path = tmp_path / "broken.txt"
    path.write_text("only | three | fields\n")
    code, _, err = run(capsys, "corpus", str(path))
    assert code == 1 and "error" in err
