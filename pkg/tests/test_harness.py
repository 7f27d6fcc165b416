import json
import sys

import pytest

from petribench import workloads
from petribench.harness import (CSV_HEADER, BUILTIN, ExaminationPlan, Limits, PlanError, RunRecord,
                                RunTrace, RunVerdict, Series, ToolAdapter, confine, default_workers,
                                format_count, load_plan, load_results, parse_count,
                                read_results_csv, run_examination, write_results_csv)


def test_limits_validation():
    with pytest.raises(PlanError):
        Limits(wall_seconds=0)
    with pytest.raises(PlanError):
        Limits(sample_millis=0)


def test_noop_is_ok_with_a_sample():
    res = confine(workloads.argv("noop"), Limits(wall_seconds=10, sample_millis=20))
    assert res.verdict is RunVerdict.OK and res.returncode == 0
    assert len(res.trace) >= 1
    elapsed = [s[0] for s in res.trace.samples]
    assert elapsed == sorted(set(elapsed))


def test_exit_status_and_output_are_captured():
    res = confine([sys.executable, "-c", "print('hi'); import sys; sys.exit(3)"], Limits())
    assert res.returncode == 3 and res.stdout.strip() == "hi"


def test_count_formatting():
    assert format_count(243) == "243"
    assert format_count(2546432) == "2.546e6"
    assert format_count(10**6) == "1.000e6"
    assert format_count(None) == ""
    assert parse_count("2.546e6") == 2546000
    assert parse_count("59049") == 59049


def test_csv_round_trip(tmp_path):
    recs = [
        RunRecord("t", "Philosophers", "5", "StateSpace", RunVerdict.OK, count=243,
                  cpu_seconds=0.25, peak_memory_bytes=1234),
        RunRecord("t", "Peterson", "2", "ReachabilityFormulae", RunVerdict.OK, vector="TF.",
                  cpu_seconds=1.5, peak_memory_bytes=99),
        RunRecord("t", "Peterson", "3", "StateSpace", RunVerdict.ConfinementTime, cpu_seconds=2.0),
        RunRecord("u", "Peterson", "2", "StateSpace", RunVerdict.NotCompeting),
    ]
    p = tmp_path / "r.csv"
    write_results_csv(recs, p)
    assert p.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = read_results_csv(p)
    key = lambda r: (r.tool, r.family, r.params, r.examination, r.verdict, r.count, r.vector,
                     r.cpu_seconds, r.peak_memory_bytes)
    assert [key(r) for r in back] == [key(r) for r in recs]


def test_empty_csv_is_header_only(tmp_path):
    p = tmp_path / "r.csv"
    write_results_csv([], p)
    assert p.read_text() == ",".join(CSV_HEADER) + "\n"


def test_ok_record_needs_payload():
    with pytest.raises(ValueError):
        RunRecord("t", "F", "1", "StateSpace", RunVerdict.OK)


def test_trace_keeps_elapsed_increasing():
    t = RunTrace()
    t.add(0.1, 0.0, 10)
    t.add(0.1, 0.0, 20)
    t.add(0.2, 0.1, 30)
    assert [s[0] for s in t.samples] == [0.1, 0.2]


def test_adapter_validation():
    with pytest.raises(PlanError):
        ToolAdapter("x", kind="external")
    with pytest.raises(PlanError):
        ToolAdapter("x", kind="external", command=["run", "{nonsense}"])
    a = ToolAdapter("x", kind="external", command="tool --net {model} --task {examination}")
    assert a.argv("m.pnml", "", "StateSpace", "F", "1", Limits()) == [
        "tool", "--net", "m.pnml", "--task", "StateSpace"]


def test_plan_validation():
    with pytest.raises(PlanError):
        ExaminationPlan([BUILTIN], [Series.generated("Philosophers", [5])], [])
    with pytest.raises(PlanError):
        ExaminationPlan([], [Series.generated("Philosophers", [5])], ["StateSpace"])


def test_load_plan(tmp_path):
    (tmp_path / "plan.yaml").write_text("""
tools: [petribench]
families:
  - family: Eratosthenes
    params: [5, 10]
  - RwMutex
examinations: [StateSpace]
limits: {wall_seconds: 30}
""")
    plan = load_plan(tmp_path / "plan.yaml", output_dir=tmp_path / "out")
    assert plan.families[0].params == ["5", "10"]
    assert plan.families[1].params[0] == "r10w10"
    assert plan.limits.wall_seconds == 30 and plan.limits.sample_millis == 100
    assert plan.max_records() == 14


def test_workers_env(monkeypatch):
    monkeypatch.delenv("PETRIBENCH_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("PETRIBENCH_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("PETRIBENCH_WORKERS", "many")
    with pytest.raises(PlanError):
        default_workers()


def test_builtin_series(tmp_path):
    plan = ExaminationPlan([BUILTIN], [Series.generated("Philosophers", [5, 10])],
                           ["StateSpace"], Limits(wall_seconds=60), tmp_path)
    recs = run_examination(plan)
    assert [(r.verdict, r.count) for r in recs] == [(RunVerdict.OK, 243), (RunVerdict.OK, 59049)]
    assert (tmp_path / "results.csv").exists()
    again = load_results(tmp_path, with_traces=True)
    assert [r.count for r in again] == [243, 59049]
    assert all(len(r.trace) >= 1 for r in again)


def test_external_pnml_series_and_tool_error(tmp_path):
    from petribench.models import generate
    from petribench.pnml import write_pnml_file
    files = []
    for n in (5, 10):
        f = tmp_path / f"erat{n}.pnml"
        write_pnml_file(generate("Eratosthenes", n), f)
        files.append(str(f))
    broken = ToolAdapter("broken", kind="external", command=[sys.executable, "-c", "print('nothing')"])
    plan = ExaminationPlan([BUILTIN, broken], [Series.external("erat", files)], ["StateSpace"],
                           Limits(wall_seconds=60), tmp_path / "out")
    recs = run_examination(plan, workers=2)
    by_tool = {}
    for r in recs:
        by_tool.setdefault(r.tool, []).append(r)
    assert [r.count for r in by_tool["petribench"]] == [2, 32]
    # tool errors do not abort the series
    assert [r.verdict for r in by_tool["broken"]] == [RunVerdict.ToolError] * 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    plan = ExaminationPlan([BUILTIN], [Series.generated("Philosophers", [5])], ["StateSpace"],
                           output_dir=blocker / "sub")
    with pytest.raises(PlanError):
        run_examination(plan)


def test_not_competing_records(tmp_path):
    only_kanban = ToolAdapter("picky", kind="external", command=["true"],
                              families=frozenset({"Kanban"}))
    plan = ExaminationPlan([only_kanban], [Series.generated("Philosophers", [5, 10])],
                           ["StateSpace"], output_dir=tmp_path)
    recs = run_examination(plan)
    assert [r.verdict for r in recs] == [RunVerdict.NotCompeting] * 2
    lines = (tmp_path / "series" / "picky__Philosophers.jsonl").read_text().splitlines()
    assert [json.loads(x)["verdict"] for x in lines] == ["NotCompeting"] * 2
