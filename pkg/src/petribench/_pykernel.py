"""Pure-Python exploration kernel, interchangeable with the compiled one.

Markings are kept as tuples in a list and deduplicated with a dict keyed on
the tuple itself; this is the fastest key available in pure Python. The
``width`` argument is honoured for overflow detection so both kernels restart
at the same points.
"""
from __future__ import annotations

from time import monotonic

import numpy as np

from .kernel_common import WidthOverflow, max_value_for_width
from .net import TokenOverflowError


class Explorer:
    def __init__(self, n_places, pre_ptr, pre_place, pre_w, post_ptr, post_place, post_w,
                 initial, width=1, order="bfs", store_graph=False):
        if width not in (1, 2, 4, 8):
            raise ValueError("width must be 1, 2, 4 or 8")
        self.n_places = n_places
        self.width_bytes = width
        self.maxval = max_value_for_width(width)
        self.dfs = order == "dfs"
        self.store_graph = store_graph
        self.initial = tuple(int(v) for v in initial)
        if any(v > self.maxval for v in self.initial):
            raise WidthOverflow(width)
        pre_ptr = [int(v) for v in pre_ptr]
        post_ptr = [int(v) for v in post_ptr]
        self.transitions = []
        for t in range(len(pre_ptr) - 1):
            pre = tuple((int(pre_place[k]), int(pre_w[k])) for k in range(pre_ptr[t], pre_ptr[t + 1]))
            post = tuple((int(post_place[k]), int(post_w[k]))
                         for k in range(post_ptr[t], post_ptr[t + 1]))
            self.transitions.append((pre, post))
        self.states: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self._bounds = [0] * n_places
        self._fired = [False] * len(self.transitions)
        self._edges: list[tuple[int, int, int]] = []
        self.dead_index = -1
        self.dead_count = 0
        self.exhausted = False
        self.stop_reason = ""
        self._started = False
        self._frontier = 0

    def _add(self, m):
        self.index[m] = len(self.states)
        self.states.append(m)
        b = self._bounds
        for i, v in enumerate(m):
            if v > b[i]:
                b[i] = v

    def run(self, max_states=-1, deadline=-1.0, callback=None, batch=65536,
            stop_on_deadlock=False):
        if self._started:
            raise RuntimeError("an Explorer runs once")
        self._started = True
        limit = max_states if max_states >= 1 else None
        maxval = self.maxval
        index, states = self.index, self.states
        trans, fired, store_graph = self.transitions, self._fired, self.store_graph
        self._add(self.initial)
        stack = [0] if self.dfs else None
        cursor = 0
        last_cb = 0
        expanded = 0
        reason = ""
        while True:
            if stack is not None:
                if not stack:
                    break
                s = stack.pop()
            else:
                if cursor >= len(states):
                    break
                s = cursor
                cursor += 1
            m = states[s]
            any_enabled = False
            for t, (pre, post) in enumerate(trans):
                for p, w in pre:
                    if m[p] < w:
                        break
                else:
                    any_enabled = True
                    fired[t] = True
                    nxt = list(m)
                    for p, w in pre:
                        nxt[p] -= w
                    for p, w in post:
                        v = nxt[p] + w
                        if v > maxval:
                            if self.width_bytes == 8:
                                raise TokenOverflowError("token count exceeds 2**63-1")
                            raise WidthOverflow(self.width_bytes)
                        nxt[p] = v
                    nxt = tuple(nxt)
                    idx = index.get(nxt)
                    if idx is None:
                        if limit is not None and len(states) >= limit:
                            reason = "max_states"
                            break
                        idx = len(states)
                        self._add(nxt)
                        if stack is not None:
                            stack.append(idx)
                    if store_graph:
                        self._edges.append((s, t, idx))
            if reason:
                if stack is not None:
                    stack.append(s)
                break
            if not any_enabled:
                self.dead_count += 1
                if self.dead_index < 0:
                    self.dead_index = s
                if stop_on_deadlock:
                    reason = "deadlock"
                    break
            expanded += 1
            if deadline >= 0 and (expanded & 1023) == 0 and monotonic() > deadline:
                reason = "timeout"
                break
            if callback is not None and len(states) - last_cb >= batch:
                start, last_cb = last_cb, len(states)
                if callback(start, last_cb):
                    reason = "callback"
                    break
        if callback is not None and len(states) > last_cb and reason != "callback":
            if callback(last_cb, len(states)):
                reason = "callback"
        self._frontier = len(stack) if stack is not None else len(states) - cursor
        self.stop_reason = reason
        self.exhausted = not reason
        return self.exhausted

    @property
    def count(self):
        return len(self.states)

    @property
    def n_edges(self):
        return len(self._edges)

    @property
    def frontier_size(self):
        return self._frontier

    def bounds(self):
        return list(self._bounds)

    def fired(self):
        return list(self._fired)

    def marking(self, idx):
        if idx < 0 or idx >= len(self.states):
            raise IndexError(idx)
        return self.states[idx]

    def markings(self, start=0, stop=-1):
        if stop < 0 or stop > len(self.states):
            stop = len(self.states)
        start = max(start, 0)
        rows = self.states[start:stop]
        if not rows:
            return np.empty((0, self.n_places), dtype=np.int64)
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), self.n_places)

    def edges(self):
        if not self._edges:
            return np.empty((0, 3), dtype=np.int64)
        return np.asarray(self._edges, dtype=np.int64)

    def stored_bytes(self):
        return len(self.states) * self.n_places * self.width_bytes + len(self._edges) * 24
