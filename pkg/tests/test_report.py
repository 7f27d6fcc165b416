import math

import pytest
from hypothesis import given, strategies as st

from petribench.harness import RunRecord, RunTrace, RunVerdict
from petribench.report import (CellState, ReportError, TOOL_ORDER, execution_chart, radar_by_model,
                               radar_by_tool, radius, scaling_chart, summary_table, write_report)


def ok(tool, family, params, exam="StateSpace", cpu=1.0, mem=100, vector=None):
    if exam == "StateSpace":
        return RunRecord(tool, family, str(params), exam, RunVerdict.OK, count=1, cpu_seconds=cpu,
                         peak_memory_bytes=mem)
    return RunRecord(tool, family, str(params), exam, RunVerdict.OK, vector=vector,
                     cpu_seconds=cpu, peak_memory_bytes=mem)


def fail(tool, family, params, verdict=RunVerdict.ConfinementTime, exam="StateSpace"):
    return RunRecord(tool, family, str(params), exam, verdict)


def test_summary_states():
    kanban = [5, 10, 20, 50, 100, 200, 500, 1000]
    recs = [ok("ITS-Tools", "Kanban", p) for p in kanban]
    recs += [ok("Marcie", "Kanban", 5), ok("Marcie", "Kanban", 10), fail("Marcie", "Kanban", 20)]
    recs += [fail("Neco", "Kanban", 5)]
    recs += [RunRecord("Sara", "Kanban", "5", "StateSpace", RunVerdict.NotCompeting)]
    recs += [ok("Helena", "Peterson", 2), ok("Helena", "Peterson", 3), ok("Marcie", "Peterson", 2)]
    grid = summary_table(recs)
    assert grid[("Kanban", "ITS-Tools")].state is CellState.max
    assert grid[("Kanban", "ITS-Tools")].value == "1000"
    assert grid[("Kanban", "Marcie")].state is CellState.some
    assert grid[("Kanban", "Neco")].state is CellState.none
    assert grid[("Kanban", "Sara")].state is CellState.nc
    assert grid[("Peterson", "ITS-Tools")].state is CellState.nc  # no record at all
    assert grid[("Peterson", "Helena")].state is CellState.best
    assert grid[("Peterson", "Helena")].value == "3"
    assert grid[("Peterson", "Marcie")].state is CellState.some


def test_summary_best_vs_some():
    recs = [ok("A", "Philosophers", p) for p in (5, 10, 20)]
    recs += [ok("B", "Philosophers", p) for p in (5, 10, 20, 50, 100)]
    grid = summary_table(recs)
    assert (grid[("Philosophers", "B")].state, grid[("Philosophers", "B")].value) == (CellState.best, "100")
    assert (grid[("Philosophers", "A")].state, grid[("Philosophers", "A")].value) == (CellState.some, "20")


def test_mixed_examinations_rejected():
    with pytest.raises(ReportError):
        summary_table([ok("A", "Peterson", 2), ok("A", "Peterson", 2, "ReachabilityFormulae", vector="T")])


def test_radius_rule():
    assert radius(25, 50) == 0.5
    assert radius(100, 100000) == pytest.approx(0.4)
    assert radius(100000, 100000) == 1.0


@given(v=st.integers(1, 10**6), vmax=st.integers(1, 10**6))
def test_radius_in_unit_interval(v, vmax):
    assert 0.0 <= radius(v, vmax) <= 1.0


def test_radar_by_model_slices():
    recs = [ok("Marcie", "Philosophers", 100), ok("AlPiNA", "Philosophers", 5),
            fail("Neco", "Philosophers", 5)]
    spec = radar_by_model(recs, "Philosophers")
    assert [s.label for s in spec.slices] == list(TOOL_ORDER)
    by = {s.label: s for s in spec.slices}
    assert spec.scale == "log10"
    assert by["Marcie"].radius == pytest.approx(0.4)
    assert by["AlPiNA"].radius == pytest.approx(math.log10(5) / 5)
    assert by["Neco"].radius is None
    pet = radar_by_model([ok("Helena", "Peterson", 3)], "Peterson")
    assert pet.scale == "linear"
    assert {s.label: s for s in pet.slices}["Helena"].radius == pytest.approx(0.5)


def test_radar_by_tool():
    recs = [ok("T", "Kanban", p) for p in (5, 10, 20, 50)] + [fail("T", "Kanban", 100)]
    recs += [fail("T", "FMS", 2)]
    spec = radar_by_tool(recs, "T")
    by = {s.label: s for s in spec.slices}
    assert by["Kanban"].radius == 0.5
    assert by["FMS"].attempted and by["FMS"].radius == 0.0
    assert by["Lamport"].radius is None and not by["Lamport"].attempted


def test_formula_radar_subslices():
    vec = "T" * 10 + "." * 10
    recs = [ok("T", "Peterson", 2, "ReachabilityFormulae", vector=vec)]
    spec = radar_by_tool(recs, "T")
    sub = {s.label: s for s in spec.slices}["Peterson"].subslices
    assert sub[0][0] == 0.5
    assert len(sub) == 5


def test_scaling_chart():
    recs = [ok("A", "Peterson", 2, cpu=1.0, mem=10), ok("A", "Peterson", 3, cpu=4.0, mem=20)]
    spec = scaling_chart(recs, "Peterson")
    assert [s.points for s in spec.series] == [((2.0, 1.0), (3.0, 4.0))]
    assert scaling_chart(recs, "Peterson", "memory").series[0].points[1] == (3.0, 20.0)
    assert scaling_chart([ok("A", "Philosophers", 5)], "Philosophers").scale == "log10"
    assert scaling_chart([], "Peterson").empty
    rw = scaling_chart([ok("A", "RwMutex", "r10w20")], "RwMutex")
    assert rw.series[0].points[0][0] == 20.0


def test_execution_chart():
    t = RunTrace([(0.1, 0.05, 10), (0.2, 0.15, 12), (0.3, 0.25, 9)])
    spec = execution_chart(t)
    cpu, mem = spec.series
    assert len(cpu.points) == len(mem.points) == 3
    assert [p[1] for p in cpu.points] == sorted(p[1] for p in cpu.points)
    assert len(execution_chart(RunTrace([(0.1, 0.0, 1)])).series[0].points) == 1


def test_report_is_byte_deterministic(tmp_path):
    recs = [ok("A", "Philosophers", p, cpu=p / 7) for p in (5, 10, 20)]
    recs += [ok("B", "Peterson", 2, "ReachabilityFormulae", vector="TF.")]
    recs[0].trace = RunTrace([(0.1, 0.1, 5), (0.2, 0.2, 6)])
    a = write_report(recs, tmp_path / "a")
    b = write_report(list(reversed(recs)), tmp_path / "b")
    assert [p.name for p in a] != [] and sorted(p.name for p in a) == sorted(p.name for p in b)
    for p in a:
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
    assert (tmp_path / "a" / "summary_StateSpace.csv").exists()
