"""Summary tables, scaling and execution charts, and radar diagrams from run records.

Every chart is described by a :class:`ChartSpec` and written twice: as SVG
and as a tab-separated ``.dat`` file carrying the same geometry. Floats are
printed with six decimals and iteration orders are fixed, so identical
records always yield identical bytes.
"""
from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .harness import Examination, RunRecord, RunTrace, RunVerdict
from .models import ModelFamily, ModelParams, family_info

TOOL_ORDER = ("AlPiNA", "Crocodile", "Helena", "ITS-Tools", "LoLA-binstore", "LoLA-bloom",
              "Marcie", "Neco", "PNXDD", "Sara")
MODEL_ORDER = tuple(f.value for f in ModelFamily)
LOG_THRESHOLD = 100
CHART_KINDS = ("scaling", "execution", "radar-model", "radar-tool")


class ReportError(ValueError):
    pass


class CellState(str, enum.Enum):
    nc = "nc"
    none = "none"
    some = "some"
    best = "best"
    max = "max"


@dataclass(frozen=True)
class SummaryCell:
    state: CellState
    value: Optional[str] = None
    net_type: str = "none"

    def __post_init__(self):
        if self.state in (CellState.some, CellState.best, CellState.max) and self.value is None:
            raise ValueError(f"{self.state.value} cell needs a value")
        if self.net_type not in ("PT", "CN", "none"):
            raise ValueError(f"bad net type {self.net_type!r}")

    def text(self) -> str:
        if self.value is None:
            return self.state.value
        return f"{self.state.value}:{self.value}:{self.net_type}"


@dataclass(frozen=True)
class Slice:
    """One radar slice. ``radius`` is ``None`` when the slice is absent."""

    label: str
    radius: Optional[float]
    value: Optional[str] = None
    attempted: bool = False
    subslices: tuple[tuple[float, float], ...] = ()  # (angle fraction, radius)


@dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ChartSpec:
    kind: str  # Scaling, Execution, RadarByModel, RadarByTool
    title: str
    x_label: str = ""
    y_label: str = ""
    scale: str = "linear"
    series: tuple[Series, ...] = ()
    slices: tuple[Slice, ...] = ()

    @property
    def empty(self) -> bool:
        if self.kind.startswith("Radar"):
            return all(s.radius is None for s in self.slices)
        return not any(s.points for s in self.series)


# -- helpers -------------------------------------------------------------

def _f(x: float) -> str:
    return f"{x:.6f}"


def _params_scale(text: str) -> int:
    try:
        return ModelParams.parse(text).scale
    except (ValueError, TypeError):
        m = re.findall(r"\d+", text)
        return int(m[-1]) if m else 0


def _known(model: str) -> Optional[ModelFamily]:
    try:
        return ModelFamily.parse(model)
    except (ValueError, KeyError):
        return None


def official_params(model: str, records: Sequence[RunRecord] = ()) -> list[str]:
    """Official values for a known family; for other series the values seen, by scale."""
    fam = _known(model)
    if fam is not None:
        return [str(p) for p in family_info(fam).official_parameters]
    seen = sorted({r.params for r in records if r.family == model},
                  key=lambda p: (_params_scale(p), p))
    return seen


def _universe(model: str, records: Sequence[RunRecord]) -> list[str]:
    base = official_params(model, records)
    extra = sorted({r.params for r in records if r.family == model} - set(base),
                   key=lambda p: (_params_scale(p), p))
    return base + extra


def max_official_value(model: str, records: Sequence[RunRecord] = ()) -> int:
    vals = [_params_scale(p) for p in official_params(model, records)]
    return max(vals, default=1)


def scale_for(model: str, records: Sequence[RunRecord] = ()) -> str:
    return "log10" if max_official_value(model, records) >= LOG_THRESHOLD else "linear"


def radius(value: float, vmax: float) -> float:
    """Linear ``v/Vmax`` below 100, ``log10(v)/log10(Vmax)`` from 100 up; clamped to [0, 1]."""
    if vmax <= 0:
        return 0.0
    if vmax < LOG_THRESHOLD:
        r = value / vmax
    else:
        r = math.log10(max(value, 1)) / math.log10(vmax)
    return min(1.0, max(0.0, r))


def tool_order(records: Iterable[RunRecord]) -> list[str]:
    names = {r.tool for r in records}
    return list(TOOL_ORDER) + sorted(names - set(TOOL_ORDER))


def model_order(records: Iterable[RunRecord]) -> list[str]:
    names = {r.family for r in records}
    return list(MODEL_ORDER) + sorted(names - set(MODEL_ORDER))


def _examination(records: Sequence[RunRecord]) -> Optional[str]:
    exams = {r.examination for r in records}
    if len(exams) > 1:
        raise ReportError(f"records mix examinations: {sorted(exams)}")
    return next(iter(exams), None)


def _ok(r: RunRecord) -> bool:
    return r.verdict is RunVerdict.OK


# -- summary table -------------------------------------------------------

def summary_table(records: Sequence[RunRecord], tools: Sequence[str] | None = None,
                  models: Sequence[str] | None = None) -> dict[tuple[str, str], SummaryCell]:
    """Legend state of every (model, tool) pair for one examination."""
    records = list(records)
    _examination(records)
    tools = list(tools) if tools is not None else sorted({r.tool for r in records},
                                                         key=tool_order(records).index)
    models = list(models) if models is not None else sorted({r.family for r in records},
                                                            key=model_order(records).index)
    grid = {}
    for m in models:
        universe = _universe(m, records)
        official = official_params(m, records)
        rank = {p: i for i, p in enumerate(universe)}
        best_per_tool = {}
        for t in tools:
            ok = [r.params for r in records if r.family == m and r.tool == t and _ok(r)]
            if ok:
                best_per_tool[t] = max(ok, key=rank.__getitem__)
        top = max((rank[p] for p in best_per_tool.values()), default=-1)
        for t in tools:
            mine = [r for r in records if r.family == m and r.tool == t]
            if all(r.verdict is RunVerdict.NotCompeting for r in mine):
                grid[(m, t)] = SummaryCell(CellState.nc)
            elif t not in best_per_tool:
                grid[(m, t)] = SummaryCell(CellState.none)
            else:
                done = {r.params for r in mine if _ok(r)}
                value = best_per_tool[t]
                if official and set(official) <= done:
                    state = CellState.max
                elif rank[value] == top:
                    state = CellState.best
                else:
                    state = CellState.some
                grid[(m, t)] = SummaryCell(state, value, "PT")
    return grid


def write_summary_csv(records: Sequence[RunRecord], path) -> None:
    records = list(records)
    grid = summary_table(records)
    tools = sorted({t for _, t in grid}, key=tool_order(records).index)
    models = sorted({m for m, _ in grid}, key=model_order(records).index)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["model", *tools])
        for m in models:
            w.writerow([m, *(grid[(m, t)].text() for t in tools)])


# -- chart specs ---------------------------------------------------------

def scaling_chart(records: Sequence[RunRecord], model: str, metric: str = "cpu") -> ChartSpec:
    if metric not in ("cpu", "memory"):
        raise ReportError(f"metric must be cpu or memory, not {metric!r}")
    records = list(records)
    mine = [r for r in records if r.family == model and _ok(r)]
    series = []
    for t in sorted({r.tool for r in mine}, key=tool_order(records).index):
        pts = sorted(
            (float(_params_scale(r.params)),
             float(r.cpu_seconds if metric == "cpu" else r.peak_memory_bytes))
            for r in mine if r.tool == t)
        series.append(Series(t, tuple(pts)))
    y = "CPU time (s)" if metric == "cpu" else "peak memory (bytes)"
    return ChartSpec("Scaling", f"{model}: {metric} by scaling parameter", "scaling parameter", y,
                     scale_for(model, records), tuple(series))


def execution_chart(trace: RunTrace, title: str = "execution") -> ChartSpec:
    if not trace.samples:
        raise ReportError("trace has no samples")
    cpu = tuple((e, c) for e, c, _ in trace.samples)
    mem = tuple((e, float(m)) for e, _, m in trace.samples)
    return ChartSpec("Execution", title, "elapsed (s)", "", "linear",
                     (Series("cpu_seconds", cpu), Series("memory_bytes", mem)))


def radar_by_model(records: Sequence[RunRecord], model: str) -> ChartSpec:
    """One slice per tool; length is the highest parameter reached against the largest official one."""
    records = list(records)
    vmax = max_official_value(model, records)
    slices = []
    for t in tool_order(records):
        ok = [r for r in records if r.family == model and r.tool == t and _ok(r)]
        attempted = any(r.family == model and r.tool == t
                        and r.verdict is not RunVerdict.NotCompeting for r in records)
        if not ok:
            slices.append(Slice(t, None, attempted=attempted))
            continue
        best = max(ok, key=lambda r: (_params_scale(r.params), r.params))
        v = _params_scale(best.params)
        slices.append(Slice(t, radius(v, vmax), best.params, True))
    return ChartSpec("RadarByModel", f"{model}: highest parameter per tool",
                     scale="log10" if vmax >= LOG_THRESHOLD else "linear", slices=tuple(slices))


def radar_by_tool(records: Sequence[RunRecord], tool: str) -> ChartSpec:
    """One slice per model; length is the share of official values handled."""
    records = list(records)
    exam = _examination([r for r in records if r.tool == tool])
    formulae = exam is not None and exam != Examination.StateSpace.value
    slices = []
    for m in model_order(records):
        mine = [r for r in records if r.family == m and r.tool == tool]
        attempted = any(r.verdict is not RunVerdict.NotCompeting for r in mine)
        total = official_params(m, records)
        handled = {r.params for r in mine if _ok(r)} & set(total)
        ratio = len(handled) / len(total) if total else 0.0
        subs = ()
        if formulae and total and attempted:
            by_param = {r.params: r for r in mine if _ok(r)}
            parts = []
            for p in total:
                r = by_param.get(p)
                if r is None or not r.vector:
                    parts.append((0.0, 0.0))
                else:
                    done = sum(ch != "." for ch in r.vector)
                    parts.append((done / len(r.vector), ratio))
            subs = tuple(parts)
        slices.append(Slice(m, ratio if attempted else None,
                            f"{len(handled)}/{len(total)}", attempted, subs))
    return ChartSpec("RadarByTool", f"{tool}: share of parameters handled per model",
                     slices=tuple(slices))


# -- data files ----------------------------------------------------------

def chart_data(spec: ChartSpec) -> str:
    lines = [f"# kind\t{spec.kind}", f"# title\t{spec.title}", f"# scale\t{spec.scale}"]
    if spec.kind.startswith("Radar"):
        lines.append("index\tlabel\tpresent\tattempted\tradius\tvalue")
        for i, s in enumerate(spec.slices):
            lines.append("\t".join([str(i), s.label, str(int(s.radius is not None)),
                                    str(int(s.attempted)),
                                    _f(s.radius) if s.radius is not None else "",
                                    s.value or ""]))
            for j, (a, r) in enumerate(s.subslices):
                lines.append(f"{i}.{j}\t{s.label}\t1\t{int(s.attempted)}\t{_f(r)}\tangle={_f(a)}")
    else:
        lines.append("series\tx\ty")
        for s in spec.series:
            for x, y in s.points:
                lines.append(f"{s.label}\t{_f(x)}\t{_f(y)}")
    return "\n".join(lines) + "\n"


# -- SVG -----------------------------------------------------------------

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
            "#7f7f7f", "#bcbd22", "#17becf")


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _svg(width: int, height: int, body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">')
    return "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>', head,
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.6f}" y="18.000000" text-anchor="middle" font-size="13">'
        f'{_esc(title)}</text>',
        *body, "</svg>", ""])


def _axis_map(lo, hi, a, b, log):
    if log:
        lo, hi = math.log10(max(lo, 1e-12)), math.log10(max(hi, 1e-12))
    if hi <= lo:
        hi = lo + 1.0

    def m(v):
        if log:
            v = math.log10(max(v, 1e-12))
        return a + (v - lo) / (hi - lo) * (b - a)
    return m


def _line_panel(series: Sequence[Series], x0, y0, w, h, xlog, ylabel, xlabel,
                colors: Sequence[str]) -> list[str]:
    out = [f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(w)}" height="{_f(h)}" '
           f'fill="none" stroke="black"/>']
    pts = [p for s in series for p in s.points]
    if not pts:
        out.append(f'<text x="{_f(x0 + w / 2)}" y="{_f(y0 + h / 2)}" text-anchor="middle">'
                   "no successful run</text>")
        return out
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = 0.0, max(ys) if max(ys) > 0 else 1.0
    mx = _axis_map(xmin, xmax, x0 + 10, x0 + w - 10, xlog)
    my = _axis_map(ymin, ymax, y0 + h - 10, y0 + 10, False)
    for label, v in (("min", xmin), ("max", xmax)):
        out.append(f'<text x="{_f(mx(v))}" y="{_f(y0 + h + 14)}" text-anchor="middle">'
                   f"{_f(v)}</text>")
    out.append(f'<text x="{_f(x0 - 4)}" y="{_f(y0 + 10)}" text-anchor="end">{_f(ymax)}</text>')
    out.append(f'<text x="{_f(x0 - 4)}" y="{_f(y0 + h - 10)}" text-anchor="end">0</text>')
    out.append(f'<text x="{_f(x0 + w / 2)}" y="{_f(y0 + h + 28)}" text-anchor="middle">'
               f"{_esc(xlabel)}{' (log10)' if xlog else ''}</text>")
    out.append(f'<text x="{_f(x0 + 4)}" y="{_f(y0 - 4)}">{_esc(ylabel)}</text>')
    for k, s in enumerate(series):
        c = colors[k % len(colors)]
        coords = " ".join(f"{_f(mx(x))},{_f(my(y))}" for x, y in s.points)
        if len(s.points) > 1:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{c}"/>')
        for x, y in s.points:
            out.append(f'<circle cx="{_f(mx(x))}" cy="{_f(my(y))}" r="2.500000" fill="{c}"/>')
    return out


def _legend(labels: Sequence[str], x, y, colors=_PALETTE) -> list[str]:
    out = []
    for k, lab in enumerate(labels):
        yy = y + 14 * k
        out.append(f'<rect x="{_f(x)}" y="{_f(yy - 8)}" width="10.000000" height="10.000000" '
                   f'fill="{colors[k % len(colors)]}"/>')
        out.append(f'<text x="{_f(x + 14)}" y="{_f(yy)}">{_esc(lab)}</text>')
    return out


def _wedge(cx, cy, r, a0, a1) -> str:
    x0, y0 = cx + r * math.cos(a0), cy + r * math.sin(a0)
    x1, y1 = cx + r * math.cos(a1), cy + r * math.sin(a1)
    large = 1 if a1 - a0 > math.pi else 0
    return (f"M {_f(cx)},{_f(cy)} L {_f(x0)},{_f(y0)} "
            f"A {_f(r)},{_f(r)} 0 {large} 1 {_f(x1)},{_f(y1)} Z")


def render_svg(spec: ChartSpec) -> str:
    if spec.kind == "Scaling":
        body = _line_panel(spec.series, 70, 40, 420, 260, spec.scale == "log10", spec.y_label,
                           spec.x_label, _PALETTE)
        body += _legend([s.label for s in spec.series], 510, 50)
        return _svg(640, 340, body, spec.title)
    if spec.kind == "Execution":
        body = []
        for k, s in enumerate(spec.series):
            body += _line_panel([s], 80, 40 + 170 * k, 480, 120, False, s.label, spec.x_label,
                                (_PALETTE[k],))
        return _svg(600, 380, body, spec.title)
    return _radar_svg(spec)


def _radar_svg(spec: ChartSpec) -> str:
    cx, cy, R = 220.0, 230.0, 170.0
    inner = 0.08
    n = max(len(spec.slices), 1)
    step = 2 * math.pi / n
    body = [f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R)}" fill="none" stroke="#999999"/>',
            f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R * inner)}" fill="none" '
            'stroke="#999999"/>']
    radii = sorted({s.radius for s in spec.slices if s.radius is not None})
    for r in radii:
        body.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R * r)}" fill="none" '
                    'stroke="#bbbbbb" stroke-dasharray="2,3"/>')
    for i, s in enumerate(spec.slices):
        a0 = -math.pi / 2 + i * step
        a1 = a0 + step
        color = _PALETTE[i % len(_PALETTE)]
        mid = (a0 + a1) / 2
        lx, ly = cx + (R + 16) * math.cos(mid), cy + (R + 16) * math.sin(mid)
        anchor = "start" if math.cos(mid) > 0.1 else ("end" if math.cos(mid) < -0.1 else "middle")
        body.append(f'<text x="{_f(lx)}" y="{_f(ly)}" text-anchor="{anchor}">'
                    f"{_esc(s.label)}</text>")
        if spec.kind == "RadarByTool" and s.attempted:
            body.append(f'<path d="{_wedge(cx, cy, R * inner, a0, a1)}" fill="{color}"/>')
        if s.radius is None:
            continue
        if s.subslices:
            share = step / len(s.subslices)
            for j, (frac, r) in enumerate(s.subslices):
                if frac <= 0 or r <= 0:
                    continue
                b0 = a0 + j * share
                body.append(f'<path d="{_wedge(cx, cy, R * r, b0, b0 + share * frac)}" '
                            f'fill="{color}" fill-opacity="0.7" stroke="{color}"/>')
        elif s.radius > 0:
            body.append(f'<path d="{_wedge(cx, cy, R * s.radius, a0, a1)}" fill="{color}" '
                        f'fill-opacity="0.7" stroke="{color}"/>')
    return _svg(480, 470, body, spec.title)


# -- writing a report ----------------------------------------------------

def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


def _emit(spec: ChartSpec, out: Path, stem: str) -> list[Path]:
    svg, dat = out / f"{stem}.svg", out / f"{stem}.dat"
    svg.write_text(render_svg(spec))
    dat.write_text(chart_data(spec))
    return [svg, dat]


def write_report(records: Sequence[RunRecord], out_dir, charts: Sequence[str] = CHART_KINDS,
                 tables: bool = True) -> list[Path]:
    """Write the requested artifacts for every examination present in ``records``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    unknown = set(charts) - set(CHART_KINDS)
    if unknown:
        raise ReportError(f"unknown chart kinds: {sorted(unknown)}")
    written: list[Path] = []
    records = list(records)
    for exam in sorted({r.examination for r in records}):
        recs = [r for r in records if r.examination == exam]
        models = sorted({r.family for r in recs}, key=model_order(recs).index)
        tools = sorted({r.tool for r in recs}, key=tool_order(recs).index)
        if tables:
            p = out / f"summary_{exam}.csv"
            write_summary_csv(recs, p)
            written.append(p)
        for m in models:
            if "scaling" in charts:
                for metric in ("cpu", "memory"):
                    written += _emit(scaling_chart(recs, m, metric), out,
                                     f"scaling_{exam}_{_slug(m)}_{metric}")
            if "radar-model" in charts:
                written += _emit(radar_by_model(recs, m), out, f"radar-model_{exam}_{_slug(m)}")
        if "radar-tool" in charts:
            for t in tools:
                written += _emit(radar_by_tool(recs, t), out, f"radar-tool_{exam}_{_slug(t)}")
        if "execution" in charts:
            for r in recs:
                if r.trace.samples:
                    spec = execution_chart(r.trace, f"{r.tool} {r.family} {r.params} {exam}")
                    written += _emit(spec, out, "execution_" + "_".join(
                        _slug(x) for x in (exam, r.tool, r.family, r.params)))
    return written
