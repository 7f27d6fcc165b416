"""Benchmark harness: run tools over model series under resource confinement.

Each (tool, family) pair forms a series that walks the scaling values in
order and, for every value, each requested examination. The first run that
breaches the time or memory limit ends the series; other series are not
affected. Records are appended to one JSON-lines file per series as they are
produced and merged into ``results.csv`` and ``results.jsonl`` at the end.
"""
from __future__ import annotations

import csv
import enum
import json
import logging
import os
import re
import shlex
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Optional, Sequence

import psutil
import yaml

from .models import ModelFamily, ModelParams, generate, list_instances

log = logging.getLogger(__name__)

CSV_HEADER = ["tool", "family", "params", "examination", "verdict", "count", "vector",
              "cpu_seconds", "peak_memory_bytes"]
WORKERS_ENV = "PETRIBENCH_WORKERS"


class Examination(str, enum.Enum):
    StateSpace = "StateSpace"
    StructuralFormulae = "StructuralFormulae"
    ReachabilityFormulae = "ReachabilityFormulae"


class RunVerdict(str, enum.Enum):
    OK = "OK"
    ConfinementTime = "ConfinementTime"
    ConfinementMemory = "ConfinementMemory"
    ToolError = "ToolError"
    NotCompeting = "NotCompeting"


CONFINEMENT_FAILURES = (RunVerdict.ConfinementTime, RunVerdict.ConfinementMemory)


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class Limits:
    wall_seconds: float = 300
    memory_bytes: int = 2 * 1024**3
    sample_millis: int = 100

    def __post_init__(self):
        for name in ("wall_seconds", "memory_bytes", "sample_millis"):
            if getattr(self, name) < 1:
                raise PlanError(f"limit {name} must be >= 1, got {getattr(self, name)}")


@dataclass
class RunTrace:
    """Samples of ``(elapsed_seconds, cpu_seconds, memory_bytes)``."""

    samples: list[tuple[float, float, int]] = field(default_factory=list)

    def add(self, elapsed: float, cpu: float, mem: int) -> None:
        if self.samples and elapsed <= self.samples[-1][0]:
            return
        self.samples.append((float(elapsed), float(cpu), max(int(mem), 0)))

    def __len__(self):
        return len(self.samples)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["elapsed_seconds", "cpu_seconds", "memory_bytes"])
            for e, c, m in self.samples:
                w.writerow([repr(e), repr(c), m])

    @classmethod
    def read_csv(cls, path) -> "RunTrace":
        t = cls()
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                t.samples.append((float(row["elapsed_seconds"]), float(row["cpu_seconds"]),
                                  int(row["memory_bytes"])))
        return t


@dataclass
class ConfinementResult:
    verdict: RunVerdict
    trace: RunTrace
    stdout: str
    stderr: str
    returncode: Optional[int]
    cpu_seconds: float
    peak_memory_bytes: int
    wall_seconds: float


def _tree(proc: psutil.Process) -> list[psutil.Process]:
    try:
        return [proc] + proc.children(recursive=True)
    except psutil.Error:
        return [proc]


def _sample(proc: psutil.Process) -> tuple[float, int]:
    cpu, mem = 0.0, 0
    for p in _tree(proc):
        try:
            t = p.cpu_times()
            cpu += t.user + t.system
            mem += p.memory_info().rss
        except psutil.Error:
            continue
    return cpu, mem


def _kill_tree(proc: psutil.Process) -> None:
    for p in reversed(_tree(proc)):
        try:
            p.kill()
        except psutil.Error:
            pass


def confine(argv: Sequence[str], limits: Limits, env: Optional[dict] = None,
            cwd: Optional[str] = None) -> ConfinementResult:
    """Run ``argv`` as a child process, killing it when it breaches ``limits``.

    Resident memory and CPU time of the whole process tree are polled every
    ``sample_millis``. The final sample comes from the kernel's resource
    accounting for the reaped child, so even instant runs get one sample.
    """
    period = limits.sample_millis / 1000.0
    trace = RunTrace()
    out_f = tempfile.TemporaryFile()
    err_f = tempfile.TemporaryFile()
    start = time.monotonic()
    deadline = start + limits.wall_seconds
    popen = subprocess.Popen(list(argv), stdout=out_f, stderr=err_f, stdin=subprocess.DEVNULL,
                             env=env, cwd=cwd)
    try:
        ps = psutil.Process(popen.pid)
    except psutil.Error:
        ps = None
    verdict = RunVerdict.OK
    peak = 0
    last_cpu = 0.0
    status = None
    rusage = None
    while True:
        pid, st, ru = os.wait4(popen.pid, os.WNOHANG)
        if pid == popen.pid:
            status, rusage = st, ru
            break
        now = time.monotonic()
        if ps is not None:
            try:
                cpu, mem = _sample(ps)
                last_cpu = max(last_cpu, cpu)
                peak = max(peak, mem)
                trace.add(now - start, last_cpu, mem)
            except Exception as e:  # sampling must never abort a run
                log.debug("sampling failed: %s", e)
                cpu, mem = last_cpu, 0
        else:
            mem = 0
        if mem > limits.memory_bytes:
            verdict = RunVerdict.ConfinementMemory
        elif now >= deadline:
            verdict = RunVerdict.ConfinementTime
        if verdict is not RunVerdict.OK:
            if ps is not None:
                _kill_tree(ps)
            else:
                popen.kill()
            _, status, rusage = os.wait4(popen.pid, 0)
            break
        time.sleep(max(0.0, min(period, deadline - time.monotonic())))
    popen.returncode = os.waitstatus_to_exitcode(status)
    wall = time.monotonic() - start
    cpu = rusage.ru_utime + rusage.ru_stime if rusage is not None else last_cpu
    cpu = max(cpu, last_cpu)
    maxrss = rusage.ru_maxrss * 1024 if rusage is not None else 0
    peak = max(peak, maxrss)
    trace.add(wall, cpu, maxrss if maxrss else peak)
    if not trace.samples:
        trace.samples.append((wall, cpu, peak))
    out_f.seek(0)
    err_f.seek(0)
    stdout = out_f.read().decode("utf-8", "replace")
    stderr = err_f.read().decode("utf-8", "replace")
    out_f.close()
    err_f.close()
    return ConfinementResult(verdict, trace, stdout, stderr, popen.returncode, cpu, peak, wall)


# -- tools ---------------------------------------------------------------

_SLOTS = ("model", "formulae", "examination", "family", "params")
_SLOT_RE = re.compile(r"\{(\w+)\}")


@dataclass
class ToolAdapter:
    """How to launch one tool and read its answer.

    ``command`` is an argument list whose items may contain the slots
    ``{model}``, ``{formulae}``, ``{examination}``, ``{family}`` and
    ``{params}``. The built-in adapter runs this package's own CLI.
    ``families`` and ``examinations`` restrict what the tool competes in.
    """

    name: str
    kind: str = "builtin"
    command: Optional[list[str]] = None
    count_pattern: str = r"^count:\s*(\d+)\s*$"
    vector_pattern: str = r"^vector:\s*([TF.]*)\s*$"
    families: Optional[frozenset[str]] = None
    examinations: Optional[frozenset[str]] = None
    max_states: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise PlanError(f"tool {self.name!r}: kind must be builtin or external")
        if self.kind == "external":
            if not self.command:
                raise PlanError(f"tool {self.name!r}: external tools need a command")
            if isinstance(self.command, str):
                self.command = shlex.split(self.command)
            for part in self.command:
                for slot in _SLOT_RE.findall(part):
                    if slot not in _SLOTS:
                        raise PlanError(f"tool {self.name!r}: unknown slot {{{slot}}} in command")
        for pat in (self.count_pattern, self.vector_pattern):
            try:
                re.compile(pat, re.MULTILINE)
            except re.error as e:
                raise PlanError(f"tool {self.name!r}: bad pattern {pat!r}: {e}") from None

    def competes(self, family: str, examination: str) -> bool:
        if self.families is not None and family not in self.families:
            return False
        if self.examinations is not None and examination not in self.examinations:
            return False
        return True

    def argv(self, model: str, formulae: str, examination: str, family: str, params: str,
             limits: Limits) -> list[str]:
        values = dict(model=model, formulae=formulae, examination=examination, family=family,
                      params=params)
        if self.kind == "builtin":
            # The engine's own budget sits above the confinement limit so that
            # the harness, not the engine, decides when a run took too long.
            timeout = str(limits.wall_seconds * 2 + 5)
            base = [sys.executable, "-m", "petribench"]
            ms = ["--max-states", str(self.max_states)] if self.max_states else []
            if examination == Examination.StateSpace.value:
                return base + ["explore", model, "--timeout", timeout] + ms
            return base + ["check", model, "--formulae", formulae, "--timeout", timeout] + ms
        return [_SLOT_RE.sub(lambda m: values[m.group(1)], part) for part in self.command]

    def parse(self, examination: str, stdout: str) -> tuple[Optional[int], Optional[str]]:
        if examination == Examination.StateSpace.value:
            m = re.search(self.count_pattern, stdout, re.MULTILINE)
            if self.kind == "builtin" and re.search(r"^exhausted:\s*false", stdout, re.MULTILINE):
                return None, None
            return (int(m.group(1)) if m else None), None
        m = re.search(self.vector_pattern, stdout, re.MULTILINE)
        return None, (m.group(1) if m else None)


BUILTIN = ToolAdapter(name="petribench")


# -- plan ----------------------------------------------------------------

@dataclass
class Series:
    """A family of instances: a generated model family or a list of PNML files."""

    name: str
    params: list[str]
    family: Optional[ModelFamily] = None
    files: Optional[dict[str, str]] = None

    @classmethod
    def generated(cls, family: ModelFamily | str, params: Iterable | None = None) -> "Series":
        fam = family if isinstance(family, ModelFamily) else ModelFamily.parse(family)
        values = [ModelParams.parse(p) for p in params] if params is not None else list_instances(fam)
        return cls(fam.value, [str(p) for p in values], family=fam)

    @classmethod
    def external(cls, name: str, files: Sequence[str]) -> "Series":
        labels = {Path(f).stem: str(f) for f in files}
        return cls(name, list(labels), files=labels)


@dataclass
class ExaminationPlan:
    tools: list[ToolAdapter]
    families: list[Series]
    examinations: list[Examination]
    limits: Limits = field(default_factory=Limits)
    output_dir: Path = Path("results")
    formula_count: int = 16
    formula_seed: int = 0
    workers: Optional[int] = None

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        self.examinations = [Examination(e) for e in self.examinations]
        if not self.tools:
            raise PlanError("plan lists no tools")
        if not self.families:
            raise PlanError("plan lists no families")
        if not self.examinations:
            raise PlanError("plan lists no examinations")
        names = [t.name for t in self.tools]
        if len(set(names)) != len(names):
            raise PlanError("tool names must be unique")

    def max_records(self) -> int:
        return len(self.tools) * sum(len(s.params) for s in self.families) * len(self.examinations)


def _opt_set(value):
    return frozenset(str(v) for v in value) if value is not None else None


def load_plan(path, output_dir=None) -> ExaminationPlan:
    """Read a YAML plan file; relative PNML paths resolve against the plan's folder."""
    path = Path(path)
    with open(path) as f:
        doc = yaml.safe_load(f) or {}
    return plan_from_dict(doc, base=path.parent, output_dir=output_dir)


def plan_from_dict(doc: dict, base=Path("."), output_dir=None) -> ExaminationPlan:
    if not isinstance(doc, dict):
        raise PlanError("plan must be a mapping")
    tools = []
    for t in doc.get("tools") or []:
        if isinstance(t, str):
            t = {"name": t}
        t = dict(t)
        kind = t.pop("kind", "builtin")
        tools.append(ToolAdapter(
            name=t.pop("name"), kind=kind, command=t.pop("command", None),
            count_pattern=t.pop("count_pattern", ToolAdapter.count_pattern),
            vector_pattern=t.pop("vector_pattern", ToolAdapter.vector_pattern),
            families=_opt_set(t.pop("families", None)),
            examinations=_opt_set(t.pop("examinations", None)),
            max_states=t.pop("max_states", None),
        ))
        if t:
            raise PlanError(f"unknown tool keys: {sorted(t)}")
    series = []
    for s in doc.get("families") or []:
        if isinstance(s, str):
            series.append(Series.generated(s))
        elif "pnml" in s:
            files = [str((Path(base) / f)) for f in s["pnml"]]
            series.append(Series.external(s.get("name") or "external", files))
        else:
            series.append(Series.generated(s["family"], s.get("params")))
    lim = doc.get("limits") or {}
    limits = Limits(**{k: lim[k] for k in ("wall_seconds", "memory_bytes", "sample_millis")
                       if k in lim})
    formulae = doc.get("formulae") or {}
    return ExaminationPlan(
        tools=tools, families=series, examinations=list(doc.get("examinations") or []),
        limits=limits,
        output_dir=Path(output_dir or doc.get("output_dir") or "results"),
        formula_count=int(formulae.get("count", 16)),
        formula_seed=int(formulae.get("seed", 0)),
        workers=doc.get("workers"),
    )


# -- records -------------------------------------------------------------

@dataclass
class RunRecord:
    tool: str
    family: str
    params: str
    examination: str
    verdict: RunVerdict
    count: Optional[int] = None
    vector: Optional[str] = None
    cpu_seconds: float = 0.0
    peak_memory_bytes: int = 0
    trace: RunTrace = field(default_factory=RunTrace)
    wall_seconds: float = 0.0
    message: str = ""
    trace_file: Optional[str] = None

    def __post_init__(self):
        self.verdict = RunVerdict(self.verdict)
        if self.verdict is RunVerdict.OK:
            if self.examination == Examination.StateSpace.value and self.count is None:
                raise ValueError("OK state-space record without a count")
            if self.examination != Examination.StateSpace.value and self.vector is None:
                raise ValueError("OK formula record without a vector")

    def to_json(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d.pop("trace")
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RunRecord":
        d = dict(d)
        return cls(**d)


def format_count(n: Optional[int]) -> str:
    """Exact below one million, otherwise ``a.bcde`` such as ``2.546e6``."""
    if n is None:
        return ""
    if n < 10**6:
        return str(n)
    mant, exp = f"{Decimal(n):.3e}".split("e")
    return f"{mant}e{int(exp)}"


def parse_count(text: str) -> Optional[int]:
    text = text.strip()
    if not text:
        return None
    if "e" in text:
        return int(Decimal(text))
    return int(text)


def write_results_csv(records: Iterable[RunRecord], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.tool, r.family, r.params, r.examination, r.verdict.value,
                        format_count(r.count), "" if r.vector is None else r.vector,
                        repr(float(r.cpu_seconds)), int(r.peak_memory_bytes)])


def read_results_csv(path) -> list[RunRecord]:
    out = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            tool, family, params, exam, verdict, count, vector, cpu, mem = row
            out.append(RunRecord(tool, family, params, exam, RunVerdict(verdict),
                                 parse_count(count),
                                 vector if (vector or exam != Examination.StateSpace.value
                                            and verdict == "OK") else None,
                                 float(cpu), int(mem)))
    return out


def write_jsonl(records: Iterable[RunRecord], path) -> None:
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r.to_json(), sort_keys=True) + "\n")


def read_jsonl(path) -> list[RunRecord]:
    out = []
    with open(path) as f:
        for line in f:
            if line.strip():
                out.append(RunRecord.from_json(json.loads(line)))
    return out


def load_results(results_dir, with_traces: bool = False) -> list[RunRecord]:
    """Records of a results folder; exact counts come from the JSON-lines file when present."""
    d = Path(results_dir)
    if (d / "results.jsonl").exists():
        records = read_jsonl(d / "results.jsonl")
    else:
        records = read_results_csv(d / "results.csv")
    if with_traces:
        for r in records:
            if r.trace_file and (d / r.trace_file).exists():
                r.trace = RunTrace.read_csv(d / r.trace_file)
    return records


# -- running -------------------------------------------------------------

def _safe(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


class _Inputs:
    """Materializes model and formula files once per instance, shared by all series."""

    def __init__(self, plan: ExaminationPlan):
        self.plan = plan
        self.lock = threading.Lock()
        self.cache: dict[tuple, str] = {}

    def model(self, series: Series, params: str) -> str:
        key = ("model", series.name, params)
        with self.lock:
            if key in self.cache:
                return self.cache[key]
            if series.files is not None:
                path = str(Path(series.files[params]).resolve())
            else:
                from .pnml import write_pnml_file
                d = self.plan.output_dir / "models"
                d.mkdir(parents=True, exist_ok=True)
                path = str((d / f"{_safe(series.name)}-{_safe(params)}.pnml").resolve())
                write_pnml_file(generate(series.family, params), path)
            self.cache[key] = path
            return path

    def formulae(self, series: Series, params: str, exam: Examination) -> str:
        if exam is Examination.StateSpace:
            return ""
        key = ("formulae", series.name, params, exam)
        model_path = self.model(series, params)
        with self.lock:
            if key in self.cache:
                return self.cache[key]
            from .formula import sample_formulae, to_text
            from .pnml import read_pnml_file
            net = read_pnml_file(model_path)
            kinds = ("structural",) if exam is Examination.StructuralFormulae else ("reachability",)
            fs = sample_formulae(net, self.plan.formula_count, self.plan.formula_seed, kinds)
            d = self.plan.output_dir / "formulae"
            d.mkdir(parents=True, exist_ok=True)
            path = d / f"{_safe(series.name)}-{_safe(params)}-{exam.value}.txt"
            path.write_text(to_text(fs))
            self.cache[key] = str(path.resolve())
            return self.cache[key]


def run_one(tool: ToolAdapter, series: Series, params: str, exam: Examination,
            inputs: _Inputs, limits: Limits) -> RunRecord:
    base = dict(tool=tool.name, family=series.name, params=params, examination=exam.value)
    if not tool.competes(series.name, exam.value):
        return RunRecord(**base, verdict=RunVerdict.NotCompeting)
    try:
        model = inputs.model(series, params)
        formulae = inputs.formulae(series, params, exam)
    except Exception as e:
        return RunRecord(**base, verdict=RunVerdict.ToolError, message=f"input preparation: {e}")
    argv = tool.argv(model, formulae, exam.value, series.name, params, limits)
    try:
        res = confine(argv, limits)
    except OSError as e:
        return RunRecord(**base, verdict=RunVerdict.ToolError, message=f"launch failed: {e}")
    verdict, message, count, vector = res.verdict, "", None, None
    if verdict is RunVerdict.OK:
        count, vector = tool.parse(exam.value, res.stdout)
        if res.returncode != 0:
            verdict = RunVerdict.ToolError
            message = f"exit status {res.returncode}: {res.stderr.strip()[-500:]}"
        elif exam is Examination.StateSpace and count is None:
            verdict, message = RunVerdict.ToolError, "no state count in tool output"
        elif exam is not Examination.StateSpace and vector is None:
            verdict, message = RunVerdict.ToolError, "no result vector in tool output"
    return RunRecord(**base, verdict=verdict, count=count, vector=vector,
                     cpu_seconds=res.cpu_seconds, peak_memory_bytes=res.peak_memory_bytes,
                     trace=res.trace, wall_seconds=res.wall_seconds, message=message)


def run_series(tool: ToolAdapter, series: Series, plan: ExaminationPlan,
               inputs: _Inputs) -> list[RunRecord]:
    """One (tool, family) series, stopping at the first confinement failure."""
    out_dir = plan.output_dir
    trace_dir = out_dir / "traces"
    trace_dir.mkdir(parents=True, exist_ok=True)
    series_dir = out_dir / "series"
    series_dir.mkdir(parents=True, exist_ok=True)
    jsonl = series_dir / f"{_safe(tool.name)}__{_safe(series.name)}.jsonl"
    records = []
    with open(jsonl, "w") as sink:
        for params in series.params:
            aborted = False
            for exam in plan.examinations:
                rec = run_one(tool, series, params, exam, inputs, plan.limits)
                if rec.trace.samples:
                    name = f"{_safe(tool.name)}__{_safe(series.name)}__{_safe(params)}__{exam.value}.csv"
                    rec.trace.write_csv(trace_dir / name)
                    rec.trace_file = f"traces/{name}"
                records.append(rec)
                sink.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
                sink.flush()
                log.info("%s %s %s %s -> %s", tool.name, series.name, params, exam.value,
                         rec.verdict.value)
                if rec.verdict in CONFINEMENT_FAILURES:
                    aborted = True
                    break
            if aborted:
                break
    return records


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise PlanError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_examination(plan: ExaminationPlan, workers: Optional[int] = None) -> list[RunRecord]:
    """Run every series of ``plan`` and write the merged results into ``plan.output_dir``."""
    out = plan.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        raise PlanError(f"output directory {out} is not writable: {e}") from None
    n = workers or plan.workers or default_workers()
    inputs = _Inputs(plan)
    jobs = [(t, s) for t in plan.tools for s in plan.families]
    if n <= 1:
        results = [run_series(t, s, plan, inputs) for t, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(lambda job: run_series(job[0], job[1], plan, inputs), jobs))
    records = [r for rs in results for r in rs]
    write_results_csv(records, out / "results.csv")
    write_jsonl(records, out / "results.jsonl")
    return records
