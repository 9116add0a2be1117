import csv
import io

import numpy as np
import pytest

from shardsim.circuit import parse_circuit, read_circuit
from shardsim.cli import main

S = 1 / np.sqrt(2)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.txt"
    path.write_text("qubits 2\nH 0\nCNOT 0 1\n")
    return path


class TestGen:
    def test_one_qubit_only(self, tmp_path, capsys):
        out = tmp_path / "c.txt"
        code, _, err = run(capsys, "gen", "-n", 4, "-g", 10, "-p", 0, "-s", 7, "-o", out)
        assert code == 0 and "seed=7" in err
        c = read_circuit(out)
        assert len(c.gates) == 10 and all(g.control is None for g in c.gates)

    def test_large_size(self, capsys):
        code, out, _ = run(capsys, "gen", "-n", 35, "-g", 1050, "-p", 0.3, "-s", 1)
        assert code == 0
        assert len(parse_circuit(out).gates) == 1050

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run(capsys, "gen", "-n", 12, "-g", 200, "-p", 0.3, "-s", 5, "-o", a)
        run(capsys, "gen", "-n", 12, "-g", 200, "-p", 0.3, "-s", 5, "-o", b)
        assert a.read_bytes() == b.read_bytes()

    def test_invalid(self, capsys):
        code, _, err = run(capsys, "gen", "-n", 1, "-g", 10, "-p", 0.5)
        assert code == 1 and err.startswith("shardsim: error:") and err.count("\n") == 1


class TestCompile:
    def test_all_local(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        src.write_text("qubits 4\nH 0\nCNOT 0 1\nY 1\n")
        dst = tmp_path / "out.txt"
        code, _, err = run(capsys, "compile", src, "-o", dst, "-k", 4, "--report")
        assert code == 0
        assert dst.read_text() == src.read_text()
        assert "permutes=0" in err

    def test_reference_regime_report(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 50, "-g", 1500, "-p", 0.3, "-s", 3, "-o", src)
        code, out, err = run(capsys, "compile", src, "-k", 1024, "--report")
        assert code == 0
        report = dict(line.split("=") for line in err.strip().splitlines())
        assert abs(float(report["frac_before"]) - 0.20) < 0.04
        assert abs(float(report["frac_after"]) - 0.035) < 0.02
        assert parse_circuit(out).num_permutes == int(report["permutes"])

    def test_bad_k(self, bell_file, capsys):
        code, _, err = run(capsys, "compile", bell_file, "-k", 3)
        assert code == 1 and "power of two" in err

    def test_dot(self, bell_file, tmp_path, capsys):
        dot = tmp_path / "g.dot"
        assert run(capsys, "compile", bell_file, "--dot", dot)[0] == 0
        assert "g0 -> g1" in dot.read_text()

    def test_parse_error(self, tmp_path, capsys):
        src = tmp_path / "bad.txt"
        src.write_text("qubits 2\nCNOT 0 0\n")
        code, _, err = run(capsys, "compile", src)
        assert code == 1 and "line 2" in err


class TestSimulate:
    def test_bell_dump(self, bell_file, tmp_path, capsys):
        dump = tmp_path / "state.csv"
        code, out, _ = run(capsys, "simulate", bell_file, "-k", 2, "--dump-state", dump)
        assert code == 0 and "gates_comm=1" in out
        rows = list(csv.reader(io.StringIO(dump.read_text())))
        assert rows[0] == ["index", "re", "im"]
        amps = np.array([float(r[1]) + 1j * float(r[2]) for r in rows[1:]])
        np.testing.assert_allclose(amps, [S, 0, 0, S], atol=1e-15)

    def test_check_against_compiled(self, tmp_path, capsys):
        src, dst = tmp_path / "c.txt", tmp_path / "cc.txt"
        run(capsys, "gen", "-n", 9, "-g", 200, "-p", 0.3, "-s", 2, "-o", src)
        run(capsys, "compile", src, "-k", 8, "-o", dst)
        code, out, _ = run(capsys, "simulate", dst, "-k", 8, "--check-against", src)
        assert code == 0
        dev = float(out.split("max_deviation=")[1])
        assert dev <= 1e-12

    def test_check_failure(self, tmp_path, bell_file, capsys):
        other = tmp_path / "other.txt"
        other.write_text("qubits 2\nH 1\n")
        code, _, err = run(capsys, "simulate", bell_file, "--check-against", other)
        assert code == 1 and "exceeds tolerance" in err

    def test_count_only(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 50, "-g", 300, "-p", 0.3, "-s", 2, "-o", src)
        code, out, _ = run(capsys, "simulate", src, "-k", 1024, "--count-only")
        assert code == 0
        stats = dict(line.split("=") for line in out.strip().splitlines())
        assert int(stats["gates_local"]) + int(stats["gates_comm"]) == 300

    def test_too_large(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 40, "-g", 3, "-s", 2, "-o", src)
        code, _, err = run(capsys, "simulate", src, "-k", 2)
        assert code == 1 and "--count-only" in err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# shardsim ")
    return list(csv.DictReader(lines[1:]))


class TestEstimate:
    def test_synthetic_closed_form(self, tmp_path, capsys):
        orig, opt = tmp_path / "o.txt", tmp_path / "c.txt"
        orig.write_text("qubits 10\n" + "H 9\n" * 200 + "H 0\n" * 800)
        opt.write_text("qubits 10\n" + "H 9\n" * 35 + "H 0\n" * 965)
        code, out, _ = run(capsys, "estimate", orig, opt, "-m", 8, "--model", "step:R=8")
        assert code == 0
        (row,) = read_csv(out)
        assert abs(float(row["reduction"]) - 0.48125) <= 1e-12

    def test_reference_regime(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 50, "-g", 1500, "-p", 0.3, "-s", 4, "-o", src)
        code, out, _ = run(capsys, "estimate", src, "-m", 40)
        (row,) = read_csv(out)
        assert abs(float(row["reduction"]) - 0.48) < 0.06

    def test_free_communication(self, tmp_path, capsys):
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 20, "-g", 600, "-p", 0.3, "-s", 4, "-o", src)
        code, out, _ = run(capsys, "estimate", src, "-m", 16, "--model", "step:R=1")
        (row,) = read_csv(out)
        assert float(row["reduction"]) <= 0

    def test_table_model(self, tmp_path, capsys):
        from pathlib import Path

        fixture = Path(__file__).parent / "data" / "fig1_like_n35.csv"
        src = tmp_path / "c.txt"
        run(capsys, "gen", "-n", 35, "-g", 1050, "-p", 0.0, "-s", 4, "-o", src)
        code, out, _ = run(capsys, "estimate", src, "-k", 128, "--model", f"table:{fixture}")
        assert code == 0
        (row,) = read_csv(out)
        assert 0.3 < float(row["reduction"]) < 0.8


class TestBench:
    def test_p_sweep(self, tmp_path, capsys):
        out = tmp_path / "b.csv"
        code, _, _ = run(
            capsys, "bench", "--sweep", "p", "-n", 20, "-m", 16, "--points", "0,1", "--seeds", 3, "-o", out
        )
        assert code == 0
        rows = read_csv(out.read_text())
        assert len(rows) == 2 * 3 + 2 * 2
        assert list(rows[0]) == [
            "sweep_param", "seed", "frac_orig", "frac_opt", "t_orig", "t_opt", "reduction", "permutes", "runtime_ms"
        ]
        assert [r["seed"] for r in rows[-4:]] == ["mean", "std", "mean", "std"]

    def test_reproducible(self, tmp_path, capsys):
        args = ["bench", "--sweep", "n", "--points", "10,15", "--seeds", 2, "--no-timing"]
        out = tmp_path / "a.csv"
        run(capsys, *args, "-o", out)
        first = out.read_bytes()
        run(capsys, *args, "-o", out)
        assert out.read_bytes() == first

    def test_workers_same_rows(self, tmp_path, capsys):
        args = ["bench", "--sweep", "globalfrac", "-n", 15, "--points", "0.2,0.4", "--seeds", 2, "--no-timing"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, *args, "-o", a)
        run(capsys, *args, "--workers", 2, "-o", b)
        assert a.read_text().splitlines()[1:] == b.read_text().splitlines()[1:]

    def test_p_sweep_needs_layout(self, capsys):
        code, _, err = run(capsys, "bench", "--sweep", "p")
        assert code == 1 and "needs" in err

    def test_invalid_range(self, capsys):
        code, _, err = run(capsys, "bench", "--sweep", "globalfrac", "-n", 10, "--points", "1.0")
        assert code == 1
