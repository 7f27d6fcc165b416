import subprocess
import sys

from petribench.cli import main


def run(*args):
    return subprocess.run([sys.executable, "-m", "petribench", *args], capture_output=True, text=True)


def test_generate_and_explore(tmp_path, capsys):
    out = tmp_path / "e.pnml"
    assert main(["generate", "--family", "Eratosthenes", "--param", "10", "--out", str(out)]) == 0
    assert main(["explore", str(out), "--order", "dfs", "--graph"]) == 0
    text = capsys.readouterr().out
    assert "count: 32" in text and "exhausted: true" in text and "deadlock:" in text


def test_explore_budget(tmp_path, capsys):
    out = tmp_path / "p.pnml"
    main(["generate", "--family", "Philosophers", "--param", "10", "--out", str(out)])
    main(["explore", str(out), "--max-states", "50"])
    text = capsys.readouterr().out
    assert "count: 50" in text and "exhausted: false" in text and "stopped: max_states" in text


def test_list_instances(capsys):
    assert main(["list-instances", "--family", "Peterson"]) == 0
    assert capsys.readouterr().out.split() == ["2", "3", "4", "5", "6"]


def test_check(tmp_path, capsys):
    net = tmp_path / "p.pnml"
    main(["generate", "--family", "Philosophers", "--param", "5", "--out", str(net)])
    f = tmp_path / "f.txt"
    f.write_text("a: DEADLOCK; b: AG tokens(Think_0) <= 1; c: EF tokens(nowhere) > 0")
    assert main(["check", str(net), "--formulae", str(f)]) == 0
    assert "vector: TT." in capsys.readouterr().out


def test_errors_exit_nonzero(tmp_path):
    bad = tmp_path / "bad.pnml"
    bad.write_text("<pnml>")
    r = run("explore", str(bad))
    assert r.returncode == 2 and "malformed" in r.stderr
    r = run("generate", "--family", "Nope", "--param", "3", "--out", str(tmp_path / "x"))
    assert r.returncode == 2


def test_bench_and_report(tmp_path):
    plan = tmp_path / "plan.yaml"
    plan.write_text("tools: [petribench]\nfamilies:\n  - {family: Eratosthenes, params: [5, 10]}\n"
                    "examinations: [StateSpace, StructuralFormulae]\nformulae: {count: 4, seed: 2}\n")
    r = run("bench", "--plan", str(plan), "--out", str(tmp_path / "res"), "--workers", "1")
    assert r.returncode == 0, r.stderr
    assert "OK=4" in r.stdout
    r = run("report", "--results", str(tmp_path / "res"), "--out", str(tmp_path / "rep"))
    assert r.returncode == 0, r.stderr
    names = {p.name for p in (tmp_path / "rep").iterdir()}
    assert "summary_StateSpace.csv" in names and "radar-model_StateSpace_Eratosthenes.svg" in names
    r = run("report", "--results", str(tmp_path / "res"), "--out", str(tmp_path / "rep2"),
            "--charts", "radar-tool", "--tables")
    names = {p.name for p in (tmp_path / "rep2").iterdir()}
    assert "summary_StateSpace.csv" in names and not any(n.startswith("scaling") for n in names)
