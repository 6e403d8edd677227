import csv
import json
import subprocess
import sys

import pytest

from blockmark.cli import main, parse_sizes
from blockmark.sim import SWEEP_COLUMNS


def write_scenario(path, **kw):
    d = {"variant": "ologn", "size_bits": 2048, "chunk_bits": 256, "seed": 1,
         "seller": {"behavior": "corrupt_chunk", "chunk": 2}}
    d.update(kw)
    path.write_text(json.dumps(d))
    return path


def test_parse_sizes():
    assert parse_sizes("2^10..2^13") == [1024, 2048, 4096, 8192]
    assert parse_sizes("4096,1024") == [1024, 4096]


def test_run_verdict_exits_zero(tmp_path, capsys):
    p = write_scenario(tmp_path / "s.json")
    assert main(["run", str(p), "--out", str(tmp_path / "o")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["phase"] == "DisputeResolved"
    assert out["verdict"]["dishonest"] == "seller"
    assert out["scheme"]["hash_bits"] == 256
    assert (tmp_path / "o" / "transcript.jsonl").exists()


def test_run_bad_config_exits_nonzero(tmp_path, capsys):
    p = write_scenario(tmp_path / "s.json", chunk_bits=13)
    assert main(["run", str(p)]) == 2
    assert "chunk_bits" in capsys.readouterr().err
    bad = tmp_path / "b.json"
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_run_seed_env_fallback(tmp_path, monkeypatch):
    p = write_scenario(tmp_path / "s.json")
    monkeypatch.setenv("BLOCKMARK_SEED", "77")
    main(["run", str(p), "--out", str(tmp_path / "a")])
    main(["run", str(p), "--seed", "77", "--out", str(tmp_path / "b")])
    main(["run", str(p), "--seed", "78", "--out", str(tmp_path / "c")])
    a, b, c = ((tmp_path / x / "transcript.jsonl").read_bytes() for x in "abc")
    assert a == b != c


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    header = json.loads(lines[0][2:])
    return header, list(csv.DictReader(lines[1:]))


def test_bench_o1_constant(tmp_path):
    out = tmp_path / "o1.csv"
    assert main(["bench", "--variant", "o1", "--size", "2^10..2^16", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header["scheme"]["sig_bytes"] == 65
    assert list(rows[0]) == SWEEP_COLUMNS
    assert {r["formula_bits"] for r in rows} == {"1032"}
    assert all(int(r["dispute_onchain_bits"]) == 1032 + int(r["dispute_framing_bits"]) for r in rows)


def test_bench_ologn_doubling(tmp_path):
    out = tmp_path / "l.csv"
    main(["bench", "--variant", "ologn", "--chunk-bits", "256", "--size", "2^10..2^15", "--simulate", "--out", str(out)])
    _, rows = read_csv(out)
    bits = [int(r["formula_bits"]) for r in rows]
    assert all(b - a == 256 for a, b in zip(bits, bits[1:]))


def test_bench_on_is_alpha_n(capsys):
    main(["bench", "--variant", "on", "--size", "1024,2048", "--alpha", "3/2"])
    lines = capsys.readouterr().out.splitlines()
    rows = [json.loads(x) for x in lines[1:]]
    assert [r["formula_bits"] for r in rows] == [1536, 3072]


def test_bench_toy_scheme(capsys):
    main(["bench", "--variant", "o1", "--size", "1024", "--hash-bits", "64", "--sig-bytes", "8", "--chunk-bits", "64"])
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0][2:])["scheme"]["kind"] == "toy"
    assert json.loads(lines[1])["formula_bits"] == 64 + 64 + 64


def test_chunk_opt(capsys):
    assert main(["chunk-opt", "--hash-bits", "256", "--alpha", "1"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["optimal_chunk_bits"] == pytest.approx(369.33, abs=0.01)
    assert r["optimal_chunk_bits_rounded"] == 369
    assert r["byte_aligned_chunk_bits"] % 8 == 0
    assert abs(r["scan_argmin_bits"] - 369.33) <= 8
    assert len(r["curve"]) >= 5


def test_matrix(tmp_path, capsys):
    assert main(["matrix", "--variant", "o1", "--chunks", "2", "--out", str(tmp_path / "m.csv")]) == 0
    _, rows = read_csv(tmp_path / "m.csv")
    assert rows and all(r["agrees"] == "True" for r in rows)
    assert "agree with the oracle" in capsys.readouterr().err


def test_console_script(tmp_path):
    p = write_scenario(tmp_path / "s.json", variant="o1")
    r = subprocess.run([sys.executable, "-m", "blockmark.cli", "run", str(p)], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["variant"] == "o1"
