"""Explicit state-space exploration and the analyses built on it."""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernel as _kernel
from .kernel_common import WidthOverflow, compile_net, next_width, width_for
from .net import Marking, PetriNet, StructuralError, validate

DEFAULT_MAX_STATES = 10**7
DEFAULT_MAX_SECONDS = 300.0


class IncompleteExploration(Exception):
    """The budget ran out before the question could be decided."""

    def __init__(self, message: str, result: "StateSpaceResult | None" = None):
        super().__init__(message)
        self.result = result


class Liveness(str, enum.Enum):
    L0 = "L0"  # dead: never fires
    L1 = "L1"  # quasi-live: fires at least once
    L4 = "L4"  # live: can always fire again


@dataclass(frozen=True)
class ExploreOptions:
    """Budgets and traversal settings for one exploration.

    ``None`` disables a budget. ``kernel`` picks ``"cython"`` or ``"python"``
    explicitly; by default the kernel selected at import is used.
    """

    max_states: Optional[int] = DEFAULT_MAX_STATES
    max_seconds: Optional[float] = DEFAULT_MAX_SECONDS
    store_graph: bool = False
    order: str = "bfs"
    kernel: Optional[str] = None

    def __post_init__(self):
        if self.max_states is not None and self.max_states < 1:
            raise ValueError("max_states must be >= 1")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")
        if self.order not in ("bfs", "dfs"):
            raise ValueError(f"order must be 'bfs' or 'dfs', not {self.order!r}")

    def with_(self, **changes) -> "ExploreOptions":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return ExploreOptions(**values)


@dataclass
class StateSpaceResult:
    count: int
    exhausted: bool
    dead_marking: Optional[Marking]
    place_bounds: tuple[int, ...]
    fired: frozenset[str]
    peak_states_stored: int
    dead_count: int = 0
    stop_reason: str = ""
    elapsed_seconds: float = 0.0
    width_bytes: int = 1
    kernel: str = ""
    stored_bytes: int = 0

    @property
    def partial(self) -> bool:
        return not self.exhausted


@dataclass
class ReachabilityGraph:
    """Explicit reachability graph; state 0 is the initial marking."""

    net: PetriNet
    states: np.ndarray  # (n_states, n_places) int64
    edges: np.ndarray  # (n_edges, 3): source, transition index, target
    initial: int = 0
    _csr: dict = field(default_factory=dict, repr=False)

    @property
    def n_states(self) -> int:
        return int(self.states.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def marking(self, i: int) -> Marking:
        return tuple(int(v) for v in self.states[i])

    def _forward(self):
        if "fwd" not in self._csr:
            order = np.argsort(self.edges[:, 0], kind="stable")
            ptr = np.searchsorted(self.edges[order, 0], np.arange(self.n_states + 1))
            self._csr["fwd"] = (ptr, self.edges[order])
        return self._csr["fwd"]

    def successors(self, i: int) -> list[tuple[str, int]]:
        ptr, e = self._forward()
        names = self.net.transition_names
        return [(names[int(t)], int(d)) for _, t, d in e[ptr[i]:ptr[i + 1]]]

    def bottom_components(self) -> list[np.ndarray]:
        """Terminal strongly connected components, each as an array of state indices."""
        if "bottom" not in self._csr:
            self._csr["bottom"] = _bottom_sccs(self.n_states, self.edges)
        return self._csr["bottom"]


# -- running the kernel --------------------------------------------------

def _check(net: PetriNet) -> None:
    problems = validate(net)
    if problems:
        raise StructuralError("invalid net: " + "; ".join(problems))


def run_exploration(net: PetriNet, opts: ExploreOptions, on_states=None, stop_on_deadlock=False,
         batch: int = 65536):
    """Run a kernel to completion, widening the encoding whenever a count overflows."""
    _check(net)
    cls = _kernel.explorer_class(opts.kernel)
    kname = opts.kernel or _kernel.KERNEL
    arrays = compile_net(net)
    start = time.monotonic()
    deadline = -1.0 if opts.max_seconds is None else start + opts.max_seconds
    width = width_for(max(net.initial, default=0))
    while True:
        ex = cls(net.n_places, *arrays, net.initial, width=width, order=opts.order,
                 store_graph=opts.store_graph)
        callback = None
        if on_states is not None:
            def callback(a, b, ex=ex):
                return bool(on_states(ex.markings(a, b), a))
        try:
            ex.run(max_states=opts.max_states or -1, deadline=deadline, callback=callback,
                   batch=batch, stop_on_deadlock=stop_on_deadlock)
        except WidthOverflow:
            width = next_width(width)
            continue
        break
    elapsed = time.monotonic() - start
    dead = ex.marking(ex.dead_index) if ex.dead_index >= 0 else None
    names = net.transition_names
    result = StateSpaceResult(
        count=int(ex.count),
        exhausted=bool(ex.exhausted),
        dead_marking=tuple(int(v) for v in dead) if dead is not None else None,
        place_bounds=tuple(int(b) for b in ex.bounds()),
        fired=frozenset(names[i] for i, f in enumerate(ex.fired()) if f),
        peak_states_stored=int(ex.count),
        dead_count=int(ex.dead_count),
        stop_reason=ex.stop_reason,
        elapsed_seconds=elapsed,
        width_bytes=width,
        kernel=kname,
        stored_bytes=int(ex.stored_bytes()),
    )
    return result, ex


def explore(net: PetriNet, opts: ExploreOptions | None = None) -> StateSpaceResult:
    """Visit every marking reachable from the initial one, within the budgets."""
    result, _ = run_exploration(net, opts or ExploreOptions())
    return result


def explore_with(net: PetriNet, opts: ExploreOptions, on_states: Callable[[np.ndarray, int], bool],
                 batch: int = 4096):
    """Explore while handing each batch of new markings to ``on_states(block, first_index)``.

    ``on_states`` returns true to stop early. After a width restart the
    batches start again from state 0. Returns the result and the kernel.
    """
    return run_exploration(net, opts, on_states=on_states, batch=batch)


def count_states(net: PetriNet, opts: ExploreOptions | None = None) -> int:
    """Exact number of reachable markings; raises ``IncompleteExploration`` on budget exhaustion."""
    r = explore(net, opts)
    if not r.exhausted:
        raise IncompleteExploration(
            f"incomplete: stopped by {r.stop_reason} after {r.count} states", r)
    return r.count


def find_deadlock(net: PetriNet, opts: ExploreOptions | None = None) -> Optional[Marking]:
    """A reachable dead marking, or ``None`` when the full state space has none.

    Stops at the first dead marking found. When the budget runs out first the
    answer is unknown and ``IncompleteExploration`` is raised.
    """
    r, _ = run_exploration(net, opts or ExploreOptions(), stop_on_deadlock=True)
    if r.dead_marking is not None:
        return r.dead_marking
    if not r.exhausted:
        raise IncompleteExploration(f"deadlock unknown: stopped by {r.stop_reason}", r)
    return None


def place_bound(net: PetriNet, p, opts: ExploreOptions | None = None) -> int:
    i = net.place_index(p)
    r = explore(net, opts)
    if not r.exhausted:
        raise IncompleteExploration(f"bound unknown: stopped by {r.stop_reason}", r)
    return r.place_bounds[i]


def build_graph(net: PetriNet, opts: ExploreOptions | None = None) -> ReachabilityGraph:
    """The full reachability graph; raises ``IncompleteExploration`` if it does not fit the budget."""
    opts = (opts or ExploreOptions()).with_(store_graph=True)
    r, ex = run_exploration(net, opts)
    if not r.exhausted:
        raise IncompleteExploration(f"graph incomplete: stopped by {r.stop_reason}", r)
    return ReachabilityGraph(net, ex.markings(), ex.edges())


def transition_liveness(net: PetriNet, t, level: Liveness | str,
                        opts: ExploreOptions | None = None,
                        graph: ReachabilityGraph | None = None) -> bool:
    """Whether ``t`` has liveness property ``level``.

    L0 holds when ``t`` never fires, L1 when it fires somewhere, L4 when from
    every reachable marking some continuation enables it. L4 always works on
    the stored graph (built here unless one is passed in).
    """
    level = Liveness(level)
    ti = net.transition_index(t)
    if level is Liveness.L4:
        g = graph if graph is not None else build_graph(net, opts)
        return live_transitions(g)[ti]
    if graph is not None:
        fired = bool(np.any(graph.edges[:, 1] == ti))
    else:
        r = explore(net, opts)
        if not r.exhausted:
            raise IncompleteExploration(f"liveness unknown: stopped by {r.stop_reason}", r)
        fired = net.transition_names[ti] in r.fired
    return not fired if level is Liveness.L0 else fired


def live_transitions(graph: ReachabilityGraph) -> list[bool]:
    """L4 verdict for every transition at once.

    Every path eventually enters a terminal component, so a transition is
    live exactly when each terminal component contains an edge labelled
    with it.
    """
    n_t = graph.net.n_transitions
    if graph.n_states == 0:
        return [False] * n_t
    comp = np.full(graph.n_states, -1, dtype=np.int64)
    bottoms = graph.bottom_components()
    for k, members in enumerate(bottoms):
        comp[members] = k
    e = graph.edges
    live = []
    inside = comp[e[:, 0]] >= 0 if len(e) else np.zeros(0, dtype=bool)
    for t in range(n_t):
        sel = inside & (e[:, 1] == t)
        covered = np.unique(comp[e[sel, 0]])
        live.append(len(covered) == len(bottoms))
    return live


def _bottom_sccs(n: int, edges: np.ndarray) -> list[np.ndarray]:
    """Terminal SCCs via an iterative Tarjan pass over a CSR adjacency."""
    if n == 0:
        return []
    src = edges[:, 0] if len(edges) else np.zeros(0, dtype=np.int64)
    dst = edges[:, 2] if len(edges) else np.zeros(0, dtype=np.int64)
    order = np.argsort(src, kind="stable")
    targets = dst[order].tolist()
    ptr = np.searchsorted(src[order], np.arange(n + 1)).tolist()

    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp_of = [-1] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, ptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            end = ptr[v + 1]
            advanced = False
            while i < end:
                w = targets[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, i)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, ptr[w]))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    members.append(w)
                    if w == v:
                        break
                comps.append(members)
    bottoms = []
    for k, members in enumerate(comps):
        closed = True
        for v in members:
            for i in range(ptr[v], ptr[v + 1]):
                if comp_of[targets[i]] != k:
                    closed = False
                    break
            if not closed:
                break
        if closed:
            bottoms.append(np.asarray(sorted(members), dtype=np.int64))
    return bottoms
